// Right-pane rendering. The engine's document itself is shown verbatim in
// an iframe (the console never re-composes anything); these helpers build
// the structured summary around it: subject, top news, section order, and
// per-message preference badges from the server's score matrix.
import type { DraftDoc, PreviewResponse } from "./types.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function pct(v: number): string {
  return (100 * v).toFixed(0) + "%";
}

export function scoreBadges(
  messageId: string,
  scores: PreviewResponse["scores"],
): string {
  const row = scores[messageId];
  if (!row) return "";
  return (
    `<span class="badge emp" title="employee preference">emp ${pct(row["emp_pref"])}</span>` +
    `<span class="badge org" title="organization preference">org ${pct(row["org_pref"])}</span>`
  );
}

function titleOf(draft: DraftDoc, messageId: string): string {
  const m = draft.messages.find((x) => x.id === messageId);
  return m ? m.title : messageId;
}

function item(
  draft: DraftDoc,
  resp: PreviewResponse,
  messageId: string,
): string {
  // campus items pulled into top news arrive with a campus-name prefix
  const shown = resp.newsletter.display_titles[messageId]
    ?? titleOf(draft, messageId);
  return (
    `<li data-message="${escapeHtml(messageId)}">` +
    `${escapeHtml(shown)} ${scoreBadges(messageId, resp.scores)}</li>`
  );
}

export function renderSummary(draft: DraftDoc, resp: PreviewResponse): string {
  const nl = resp.newsletter;
  const parts: string[] = [];
  parts.push(`<p class="subject"><strong>Subject:</strong> ${escapeHtml(nl.subject)}</p>`);
  if (nl.subject_message === null) {
    parts.push(`<p class="hint">original subject line (no message promoted)</p>`);
  }
  parts.push(`<h3>Top news</h3><ol class="top-news">`);
  for (const mid of nl.top_news) parts.push(item(draft, resp, mid));
  parts.push(`</ol>`);
  for (const [section, ids] of nl.sections) {
    parts.push(`<h3>${escapeHtml(section)}</h3>`);
    if (ids.length === 0) {
      parts.push(`<p class="hint">empty (items moved above)</p>`);
      continue;
    }
    parts.push(`<ol>`);
    for (const mid of ids) parts.push(item(draft, resp, mid));
    parts.push(`</ol>`);
  }
  return parts.join("\n");
}
