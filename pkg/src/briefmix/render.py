"""Self-contained HTML rendering of a personalized newsletter.

Output is a pure function of (newsletter, draft, config): no timestamps, no
environment lookups, so the same inputs always produce the same bytes. The
employee and draft ids ride along as data attributes for log correlation.
"""
from __future__ import annotations

import html
import re

from .composer import ComposeConfig, DEFAULT_CONFIG, PersonalizedNewsletter
from .model import U_WIDE, Draft, is_campus_section, section_campus

__all__ = ["render_html", "newsletter_path", "section_label"]

SNIPPET_CHARS = 200

_STYLE = (
    "body{font-family:Georgia,serif;max-width:640px;margin:1em auto;"
    "color:#222}h1{font-size:1.3em;border-bottom:2px solid #7a0019}"
    "h2{font-size:1.05em;color:#7a0019}li{margin-bottom:.7em}"
    "p{margin:.2em 0;color:#555;font-size:.9em}"
)


def newsletter_path(draft_id: str, employee_id: str) -> str:
    """Relative path a rendered newsletter is stored and served under."""
    return f"{draft_id}/{employee_id}.html"


def section_label(section_key: str, config: ComposeConfig) -> str:
    if section_key == U_WIDE:
        return "U-wide news"
    if is_campus_section(section_key):
        return config.campus_name(section_campus(section_key) or "")
    return section_key


def _snippet(body_html: str) -> str:
    text = re.sub(r"<[^>]*>", " ", body_html)
    text = html.unescape(text)
    text = " ".join(text.split())
    if len(text) > SNIPPET_CHARS:
        text = text[:SNIPPET_CHARS - 1].rstrip() + "…"
    return text


def _item(draft: Draft, newsletter: PersonalizedNewsletter,
          message_id: str) -> str:
    m = draft.message(message_id)
    title = newsletter.display_titles.get(message_id, m.title)
    parts = [f'<li data-message-id="{html.escape(message_id, quote=True)}">']
    text = html.escape(title)
    if m.link:
        parts.append(
            f'<a href="{html.escape(m.link, quote=True)}">{text}</a>')
    else:
        parts.append(f"<strong>{text}</strong>")
    snippet = _snippet(m.body_html)
    if snippet:
        parts.append(f"<p>{html.escape(snippet)}</p>")
    parts.append("</li>")
    return "".join(parts)


def render_html(newsletter: PersonalizedNewsletter, draft: Draft,
                config: ComposeConfig = DEFAULT_CONFIG) -> str:
    esc = html.escape
    lines = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{esc(newsletter.subject)}</title>",
        f"<style>{_STYLE}</style>",
        "</head>",
        f'<body data-employee-id="{esc(newsletter.employee_id, quote=True)}"'
        f' data-draft-id="{esc(newsletter.draft_id, quote=True)}">',
        f'<h1 class="subject">{esc(newsletter.subject)}</h1>',
    ]
    if newsletter.top_news:
        lines.append('<section class="top-news" data-section="top-news">')
        lines.append("<h2>Top News</h2>")
        lines.append("<ol>")
        lines.extend(_item(draft, newsletter, mid)
                     for mid in newsletter.top_news)
        lines.append("</ol>")
        lines.append("</section>")
    for key, ids in newsletter.sections:
        lines.append(f'<section class="section"'
                     f' data-section="{esc(key, quote=True)}">')
        lines.append(f"<h2>{esc(section_label(key, config))}</h2>")
        if ids:
            lines.append("<ol>")
            lines.extend(_item(draft, newsletter, mid) for mid in ids)
            lines.append("</ol>")
        lines.append("</section>")
    lines.append("</body>")
    lines.append("</html>")
    return "\n".join(lines) + "\n"
