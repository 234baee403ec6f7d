// Thin fetch wrapper over the gateway API. Every call resolves to an
// ApiResult so callers render failure diagnostics inline instead of catching.
import type {
  Annotation,
  ApiError,
  ApiResult,
  Campus,
  Cell,
  DraftDoc,
  DraftListItem,
  Job,
  Persona,
  PreviewResponse,
  Topic,
} from "./types.js";

async function request<T>(
  url: string,
  init?: RequestInit,
): Promise<ApiResult<T>> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (e) {
    return {
      ok: false,
      status: 0,
      errors: [{ field: "network", message: `request failed: ${e}` }],
    };
  }
  if (resp.ok) {
    return {
      ok: true,
      status: resp.status,
      data: (await resp.json()) as T,
      etag: resp.headers.get("ETag"),
    };
  }
  let errors: ApiError[];
  try {
    const body = (await resp.json()) as { errors?: ApiError[] };
    errors = body.errors ?? [{ field: "response", message: `HTTP ${resp.status}` }];
  } catch {
    errors = [{ field: "response", message: `HTTP ${resp.status}` }];
  }
  return { ok: false, status: resp.status, errors };
}

export class ApiClient {
  constructor(private base: string = "") {}

  listDrafts(): Promise<ApiResult<DraftListItem[]>> {
    return request(`${this.base}/drafts`);
  }

  getDraft(id: string): Promise<ApiResult<DraftDoc>> {
    return request(`${this.base}/drafts/${encodeURIComponent(id)}`);
  }

  putAnnotations(
    id: string,
    annotations: Record<string, Annotation>,
    ifMatch?: string | null,
  ): Promise<ApiResult<{ id: string; annotated: number; missing: number }>> {
    const headers: Record<string, string> = {
      "Content-Type": "application/json",
    };
    if (ifMatch) headers["If-Match"] = ifMatch;
    return request(`${this.base}/drafts/${encodeURIComponent(id)}/annotations`, {
      method: "PUT",
      headers,
      body: JSON.stringify(annotations),
    });
  }

  topics(): Promise<ApiResult<Topic[]>> {
    return request(`${this.base}/topics`);
  }

  jobs(): Promise<ApiResult<Job[]>> {
    return request(`${this.base}/jobs`);
  }

  campuses(): Promise<ApiResult<Campus[]>> {
    return request(`${this.base}/campuses`);
  }

  personas(): Promise<ApiResult<Persona[]>> {
    return request(`${this.base}/personas`);
  }

  preview(req: {
    draft_id: string;
    employee_id: string;
    cell: Cell;
    seed: number;
  }): Promise<ApiResult<PreviewResponse>> {
    return request(`${this.base}/preview`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }
}
