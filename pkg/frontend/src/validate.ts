// Client-side mirror of the server's annotation checks. It must be a
// strict subset of what the server rejects: every rejection here is one
// the server would also make, field for field. The agreement is pinned
// case by case in tests/fixtures/annotation-validation.json, which the
// python suite runs against the real endpoint.
import type { ApiError, Topic } from "./types.js";

export interface CatalogInfo {
  regularTopics: Set<string>;
  specialTopics: Set<string>;
}

export function catalogInfo(topics: Topic[]): CatalogInfo {
  return {
    regularTopics: new Set(topics.filter((t) => !t.special).map((t) => t.id)),
    specialTopics: new Set(topics.filter((t) => t.special).map((t) => t.id)),
  };
}

function isStringArray(v: unknown): v is string[] {
  return Array.isArray(v) && v.every((x) => typeof x === "string");
}

export function checkAnnotation(
  raw: unknown,
  prefix: string,
  cat: CatalogInfo,
): ApiError[] {
  const errors: ApiError[] = [];
  const push = (field: string, message: string) =>
    errors.push({ field: prefix + field, message });

  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    return [{ field: prefix.replace(/\.$/, ""), message: "annotation shape: not an object" }];
  }
  const ann = raw as Record<string, unknown>;
  if (!("importance" in ann)) {
    // the server fails to parse such a payload outright
    return [{ field: prefix.replace(/\.$/, ""), message: "annotation shape: missing importance" }];
  }

  const imp = ann["importance"];
  if (typeof imp !== "number" || !Number.isInteger(imp) || imp < 1 || imp > 4) {
    push("importance", `importance must be an integer in 1..4, got ${JSON.stringify(imp)}`);
  }

  const campuses = ann["target_campuses"];
  if (!isStringArray(campuses) || campuses.length === 0) {
    push("target_campuses", "target_campuses must name at least one campus");
  }

  const topics = ann["topics"];
  if (!isStringArray(topics)) {
    push("topics", "a message carries 1 to 4 topics, got none");
  } else {
    if (topics.length < 1 || topics.length > 4) {
      push("topics", `a message carries 1 to 4 topics, got ${topics.length}`);
    }
    if (new Set(topics).size !== topics.length) {
      push("topics", "topics must be distinct");
    }
    for (const t of topics) {
      if (cat.specialTopics.has(t)) {
        push("topics", `campus-scope topic '${t}' cannot be assigned to a message`);
      } else if (!cat.regularTopics.has(t)) {
        push("topics", `unknown topic '${t}'`);
      }
    }
  }
  // target_jobs carries no constraint: an empty list means every job
  return errors;
}

export function checkAnnotationMap(
  knownMessageIds: Set<string>,
  body: Record<string, unknown>,
  cat: CatalogInfo,
): ApiError[] {
  const errors: ApiError[] = [];
  for (const [mid, raw] of Object.entries(body)) {
    if (!knownMessageIds.has(mid)) {
      errors.push({ field: mid, message: `no message '${mid}' in draft` });
      continue;
    }
    errors.push(...checkAnnotation(raw, `${mid}.`, cat));
  }
  return errors;
}
