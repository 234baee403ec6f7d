// Console state and the pure transitions the UI wires to events. Keeping
// these framework-free makes the gating rules (submit blocking, the
// four-topic lock, stale-preview flagging) directly testable.
import type {
  Annotation,
  ApiError,
  Cell,
  DraftDoc,
  PreviewResponse,
} from "./types.js";

export interface FormAnnotation {
  importance: number | null;
  target_jobs: string[];
  target_campuses: string[];
  topics: string[];
}

export interface ConsoleState {
  draft: DraftDoc | null;
  form: Record<string, FormAnnotation>;
  // etag of the annotations collection as last seen from the server
  annotationsVersion: string | null;
  dirty: boolean;
  fieldErrors: ApiError[];
  notice: string | null;
  conflict: boolean; // a 412 happened; offer reload vs overwrite

  persona: string | null;
  cell: Cell;
  seed: number;
  preview: PreviewResponse | null;
  // annotationsVersion at the moment the preview was fetched
  previewVersion: string | null;
  previewDirtyAtFetch: boolean;
  previewErrors: ApiError[];
}

export const MAX_TOPICS = 4;
export const TOPIC_LOCK_HINT =
  `a message carries at most ${MAX_TOPICS} topics; deselect one to pick another`;

export function initialState(): ConsoleState {
  return {
    draft: null,
    form: {},
    annotationsVersion: null,
    dirty: false,
    fieldErrors: [],
    notice: null,
    conflict: false,
    persona: null,
    cell: { a: 1, b: 1, c: 1 },
    seed: 1,
    preview: null,
    previewVersion: null,
    previewDirtyAtFetch: false,
    previewErrors: [],
  };
}

function emptyForm(): FormAnnotation {
  return { importance: null, target_jobs: [], target_campuses: [], topics: [] };
}

export function loadDraft(
  state: ConsoleState,
  draft: DraftDoc,
  etag: string | null,
): void {
  state.draft = draft;
  state.annotationsVersion = etag;
  state.dirty = false;
  state.conflict = false;
  state.fieldErrors = [];
  state.form = {};
  for (const m of draft.messages) {
    const saved = draft.annotations[m.id];
    state.form[m.id] = saved
      ? {
          importance: saved.importance,
          target_jobs: [...saved.target_jobs],
          target_campuses: [...saved.target_campuses],
          topics: [...saved.topics],
        }
      : emptyForm();
  }
}

export function setImportance(
  state: ConsoleState,
  messageId: string,
  value: number,
): void {
  state.form[messageId].importance = value;
  state.dirty = true;
}

function toggle(list: string[], id: string): string[] {
  return list.includes(id) ? list.filter((x) => x !== id) : [...list, id];
}

export function toggleJob(state: ConsoleState, messageId: string, id: string): void {
  state.form[messageId].target_jobs = toggle(state.form[messageId].target_jobs, id);
  state.dirty = true;
}

export function toggleCampus(state: ConsoleState, messageId: string, id: string): void {
  state.form[messageId].target_campuses = toggle(
    state.form[messageId].target_campuses, id);
  state.dirty = true;
}

/** Returns false (and changes nothing) when the four-topic lock blocks
    the selection; the UI shows TOPIC_LOCK_HINT in that case. */
export function toggleTopic(
  state: ConsoleState,
  messageId: string,
  id: string,
): boolean {
  const form = state.form[messageId];
  if (!form.topics.includes(id) && form.topics.length >= MAX_TOPICS) {
    return false;
  }
  form.topics = toggle(form.topics, id);
  state.dirty = true;
  return true;
}

export function topicsLocked(state: ConsoleState, messageId: string): boolean {
  return state.form[messageId].topics.length >= MAX_TOPICS;
}

/** A message counts as annotated once every survey answer is in. */
export function isComplete(form: FormAnnotation): boolean {
  return (
    form.importance !== null &&
    form.target_campuses.length > 0 &&
    form.topics.length >= 1 &&
    form.topics.length <= MAX_TOPICS
  );
}

export function annotatedCount(state: ConsoleState): number {
  return Object.values(state.form).filter(isComplete).length;
}

export function missingCount(state: ConsoleState): number {
  return Object.keys(state.form).length - annotatedCount(state);
}

export function canSubmit(state: ConsoleState): boolean {
  return state.draft !== null && missingCount(state) === 0;
}

export function submitBadge(state: ConsoleState): string {
  const total = Object.keys(state.form).length;
  return `${annotatedCount(state)} of ${total} annotated`;
}

export function formAsAnnotations(
  state: ConsoleState,
): Record<string, Annotation> {
  const out: Record<string, Annotation> = {};
  for (const [mid, f] of Object.entries(state.form)) {
    out[mid] = {
      importance: f.importance as number,
      target_jobs: [...f.target_jobs].sort(),
      target_campuses: [...f.target_campuses].sort(),
      topics: [...f.topics],
    };
  }
  return out;
}

export function markSaved(state: ConsoleState, etag: string | null): void {
  state.annotationsVersion = etag;
  state.dirty = false;
  state.conflict = false;
  state.fieldErrors = [];
  if (state.draft) {
    state.draft.annotations = formAsAnnotations(state);
  }
}

export function markConflict(state: ConsoleState, errors: ApiError[]): void {
  state.conflict = true;
  state.fieldErrors = errors;
}

export function markPreviewFetched(
  state: ConsoleState,
  preview: PreviewResponse,
): void {
  state.preview = preview;
  state.previewVersion = state.annotationsVersion;
  state.previewDirtyAtFetch = state.dirty;
  state.previewErrors = [];
}

/** The preview pane must always correspond to the last-saved annotations;
    anything newer (a later save, or unsaved edits) flags it stale. */
export function isPreviewStale(state: ConsoleState): boolean {
  if (state.preview === null) return false;
  return (
    state.previewVersion !== state.annotationsVersion ||
    state.dirty ||
    state.previewDirtyAtFetch
  );
}
