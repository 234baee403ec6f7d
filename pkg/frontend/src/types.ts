// Shapes exchanged with the gateway API.

export interface Topic {
  id: string;
  name: string;
  special: boolean; // campus-scope pseudo topics: not assignable to messages
}

export interface Job {
  id: string;
  name: string;
}

export interface Campus {
  id: string;
  name: string;
}

export interface DraftMessage {
  id: string;
  title: string;
  body_html: string;
  link: string;
  section: string;
  position: number;
}

export interface Annotation {
  importance: number;
  target_jobs: string[];
  target_campuses: string[];
  topics: string[];
}

export interface DraftDoc {
  id: string;
  issue_date: string;
  messages: DraftMessage[];
  annotations: Record<string, Annotation>;
}

export interface DraftListItem {
  id: string;
  issue_date: string;
  messages: number;
  annotated: number;
}

export interface Persona {
  id: string;
  campus: string;
  job: string;
  interest: Record<string, number>;
  relevance: Record<string, number>;
  cross_campus_interest: number;
  cross_campus_relevance: number;
}

export interface Cell {
  a: number;
  b: number;
  c: number;
}

export interface PreviewNewsletter {
  employee_id: string;
  draft_id: string;
  subject: string;
  subject_message: string | null;
  top_news: string[];
  sections: [string, string[]][];
  display_titles: Record<string, string>;
}

export type ScoreRow = Record<string, number>;

export interface PreviewResponse {
  html: string;
  newsletter: PreviewNewsletter;
  scores: Record<string, ScoreRow>;
}

export interface ApiError {
  field: string;
  message: string;
}

export type ApiResult<T> =
  | { ok: true; status: number; data: T; etag: string | null }
  | { ok: false; status: number; errors: ApiError[] };
