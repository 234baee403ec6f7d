// Wires the console together: annotation editor on the left, persona
// preview on the right. All composition happens server-side; this file
// only collects survey input and presents what the API returns.
import { ApiClient } from "./client.js";
import { renderSummary } from "./preview.js";
import {
  ConsoleState,
  TOPIC_LOCK_HINT,
  canSubmit,
  formAsAnnotations,
  initialState,
  isPreviewStale,
  loadDraft,
  markConflict,
  markPreviewFetched,
  markSaved,
  setImportance,
  submitBadge,
  toggleCampus,
  toggleJob,
  toggleTopic,
  topicsLocked,
} from "./state.js";
import type { ApiError, Campus, Job, Topic } from "./types.js";
import { catalogInfo, checkAnnotationMap } from "./validate.js";

const SUBJECT_LEVELS = [
  "1 original subject",
  "2 random message",
  "3 organization pick",
  "4 employee pick",
];
const TOP_NEWS_LEVELS = [
  "1 original block",
  "2 random four",
  "3 organization top four",
  "4 employee top four",
  "5 two + two",
];
const ORDER_LEVELS = [
  "1 original order",
  "2 shuffled",
  "3 organization-ranked",
  "4 employee-ranked",
  "5 interleaved",
];

const api = new ApiClient("");
const state: ConsoleState = initialState();
let topics: Topic[] = [];
let jobs: Job[] = [];
let campuses: Campus[] = [];

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function errorsFor(prefix: string): ApiError[] {
  return state.fieldErrors.filter(
    (e) => e.field === prefix || e.field.startsWith(prefix + "."),
  );
}

function inlineErrors(list: ApiError[]): string {
  if (list.length === 0) return "";
  return (
    `<ul class="errors">` +
    list.map((e) => `<li>${e.field}: ${e.message}</li>`).join("") +
    `</ul>`
  );
}

// --- annotation pane -------------------------------------------------------

function messageCard(mid: string): string {
  const draft = state.draft!;
  const msg = draft.messages.find((m) => m.id === mid)!;
  const form = state.form[mid];
  const locked = topicsLocked(state, mid);

  const importance = [1, 2, 3, 4]
    .map(
      (v) => `<label><input type="radio" name="imp-${mid}" value="${v}"` +
        `${form.importance === v ? " checked" : ""}> ${v}</label>`,
    )
    .join(" ");

  const jobBoxes = jobs
    .map(
      (j) => `<label><input type="checkbox" data-kind="job" value="${j.id}"` +
        `${form.target_jobs.includes(j.id) ? " checked" : ""}> ${j.name}</label>`,
    )
    .join(" ");

  const campusBoxes = campuses
    .map(
      (c) => `<label><input type="checkbox" data-kind="campus" value="${c.id}"` +
        `${form.target_campuses.includes(c.id) ? " checked" : ""}> ${c.name}</label>`,
    )
    .join(" ");

  const topicBoxes = topics
    .filter((t) => !t.special)
    .map((t) => {
      const checked = form.topics.includes(t.id);
      const disabled = locked && !checked ? " disabled" : "";
      return `<label><input type="checkbox" data-kind="topic" value="${t.id}"` +
        `${checked ? " checked" : ""}${disabled}> ${t.name}</label>`;
    })
    .join(" ");

  return `
  <article class="card" data-message="${mid}">
    <h3>${msg.title}</h3>
    <p class="meta">${msg.section} &middot; <a href="${msg.link}" target="_blank" rel="noopener">link</a></p>
    ${inlineErrors(errorsFor(mid))}
    <div class="field"><span>How important?</span> ${importance}</div>
    <div class="field"><span>Target jobs (none = everyone)</span> ${jobBoxes}</div>
    <div class="field"><span>Target campuses</span> ${campusBoxes}</div>
    <div class="field"><span>Topics (1 to 4)</span> ${topicBoxes}
      <p class="hint topic-hint${locked ? "" : " hidden"}">${TOPIC_LOCK_HINT}</p>
    </div>
  </article>`;
}

function renderForm(): void {
  const pane = el<HTMLElement>("annotations");
  if (!state.draft) {
    pane.innerHTML = `<p class="hint">Pick a draft to annotate.</p>`;
    return;
  }
  const general = state.fieldErrors.filter(
    (e) => !state.draft!.messages.some(
      (m) => e.field === m.id || e.field.startsWith(m.id + "."),
    ),
  );
  pane.innerHTML =
    inlineErrors(general) +
    state.draft.messages.map((m) => messageCard(m.id)).join("\n");
  renderSaveBar();
}

function renderSaveBar(): void {
  el<HTMLButtonElement>("save").disabled = !canSubmit(state);
  el<HTMLElement>("badge").textContent = submitBadge(state);
  el<HTMLElement>("conflict").classList.toggle("hidden", !state.conflict);
  el<HTMLElement>("notice").textContent = state.notice ?? "";
}

async function save(force = false): Promise<void> {
  if (!state.draft || !canSubmit(state)) return;
  const payload = formAsAnnotations(state);
  const known = new Set(state.draft.messages.map((m) => m.id));
  const clientErrors = checkAnnotationMap(known, payload, catalogInfo(topics));
  if (clientErrors.length > 0) {
    state.fieldErrors = clientErrors;
    renderForm();
    return;
  }
  const r = await api.putAnnotations(
    state.draft.id,
    payload,
    force ? null : state.annotationsVersion,
  );
  if (r.ok) {
    markSaved(state, r.etag);
    state.notice = `saved ${r.data.annotated} annotations`;
    renderForm();
    await refreshPreview();
  } else if (r.status === 412) {
    markConflict(state, r.errors);
    renderForm();
  } else {
    state.fieldErrors = r.errors;
    renderForm();
  }
  renderSaveBar();
}

async function reloadDraft(): Promise<void> {
  if (!state.draft) return;
  const r = await api.getDraft(state.draft.id);
  if (r.ok) {
    loadDraft(state, r.data, r.etag);
    state.notice = "reloaded from server";
    renderForm();
    await refreshPreview();
  }
}

// --- preview pane ----------------------------------------------------------

async function refreshPreview(): Promise<void> {
  const pane = el<HTMLElement>("summary");
  const frame = el<HTMLIFrameElement>("frame");
  if (!state.draft || !state.persona) {
    pane.innerHTML = `<p class="hint">Pick a persona to preview.</p>`;
    frame.srcdoc = "";
    return;
  }
  const r = await api.preview({
    draft_id: state.draft.id,
    employee_id: state.persona,
    cell: state.cell,
    seed: state.seed,
  });
  if (r.ok) {
    markPreviewFetched(state, r.data);
    pane.innerHTML = renderSummary(state.draft, r.data);
    frame.srcdoc = r.data.html;
  } else {
    state.previewErrors = r.errors;
    pane.innerHTML = inlineErrors(r.errors);
    frame.srcdoc = "";
  }
  el<HTMLElement>("stale").classList.toggle("hidden", !isPreviewStale(state));
}

function renderStale(): void {
  el<HTMLElement>("stale").classList.toggle("hidden", !isPreviewStale(state));
}

function fillSelect(id: string, labels: string[]): void {
  el<HTMLSelectElement>(id).innerHTML = labels
    .map((lab, i) => `<option value="${i + 1}">${lab}</option>`)
    .join("");
}

// --- boot -------------------------------------------------------------------

async function selectDraft(id: string): Promise<void> {
  const r = await api.getDraft(id);
  if (!r.ok) {
    state.notice = r.errors.map((e) => e.message).join("; ");
    renderSaveBar();
    return;
  }
  loadDraft(state, r.data, r.etag);
  state.notice = null;
  renderForm();
  await refreshPreview();
}

async function boot(): Promise<void> {
  const [t, j, c, drafts, personas] = await Promise.all([
    api.topics(),
    api.jobs(),
    api.campuses(),
    api.listDrafts(),
    api.personas(),
  ]);
  if (t.ok) topics = t.data;
  if (j.ok) jobs = j.data;
  if (c.ok) campuses = c.data;

  const draftSel = el<HTMLSelectElement>("draft");
  if (drafts.ok && drafts.data.length > 0) {
    draftSel.innerHTML = drafts.data
      .map(
        (d) => `<option value="${d.id}">${d.id} (${d.annotated}/${d.messages} annotated)</option>`,
      )
      .join("");
  } else {
    draftSel.innerHTML = `<option value="">no drafts in store</option>`;
  }

  const personaSel = el<HTMLSelectElement>("persona");
  if (personas.ok && personas.data.length > 0) {
    personaSel.innerHTML = personas.data
      .map((p) => `<option value="${p.id}">${p.id} (${p.campus}, ${p.job})</option>`)
      .join("");
    state.persona = personas.data[0].id;
  } else {
    personaSel.innerHTML = `<option value="">no personas</option>`;
  }

  fillSelect("cell-a", SUBJECT_LEVELS);
  fillSelect("cell-b", TOP_NEWS_LEVELS);
  fillSelect("cell-c", ORDER_LEVELS);

  draftSel.addEventListener("change", () => void selectDraft(draftSel.value));
  personaSel.addEventListener("change", () => {
    state.persona = personaSel.value || null;
    void refreshPreview();
  });
  for (const [id, key] of [["cell-a", "a"], ["cell-b", "b"], ["cell-c", "c"]] as const) {
    el<HTMLSelectElement>(id).addEventListener("change", (ev) => {
      state.cell[key] = Number((ev.target as HTMLSelectElement).value);
      void refreshPreview();
    });
  }
  el<HTMLInputElement>("seed").addEventListener("change", (ev) => {
    state.seed = Number((ev.target as HTMLInputElement).value) || 0;
    void refreshPreview();
  });

  el<HTMLButtonElement>("save").addEventListener("click", () => void save(false));
  el<HTMLButtonElement>("overwrite").addEventListener("click", () => void save(true));
  el<HTMLButtonElement>("reload").addEventListener("click", () => void reloadDraft());

  el<HTMLElement>("annotations").addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    const card = input.closest("[data-message]") as HTMLElement | null;
    if (!card || !state.draft) return;
    const mid = card.dataset["message"]!;
    if (input.type === "radio" && input.name.startsWith("imp-")) {
      setImportance(state, mid, Number(input.value));
    } else if (input.dataset["kind"] === "job") {
      toggleJob(state, mid, input.value);
    } else if (input.dataset["kind"] === "campus") {
      toggleCampus(state, mid, input.value);
    } else if (input.dataset["kind"] === "topic") {
      const accepted = toggleTopic(state, mid, input.value);
      if (!accepted) input.checked = false;
      // re-render so the lock disables unchecked boxes and shows the hint
      renderForm();
    }
    renderSaveBar();
    renderStale();
  });

  if (drafts.ok && drafts.data.length > 0) {
    await selectDraft(drafts.data[0].id);
  } else {
    renderForm();
  }
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", () => void boot());
} else {
  void boot();
}
