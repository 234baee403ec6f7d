"""On-disk project store: one directory per study.

Layout under the root:

    drafts/<draft-id>.json          draft as ingested (round-trips verbatim)
    annotations/<draft-id>.json     editor annotations, upserted separately
    profiles.json                   employee roster
    assignments.json                persistent treatment assignments
    weeks.json                      week number -> draft id
    scores/<draft-id>.csv           exported score matrix
    newsletters/<draft-id>/         per-employee .html and .json,
                                    committed by manifest.json
    logs/week-<w>.csv               reading log rows (plugin CSV shape)
    answers/week-<w>.csv            survey answers
    reports/<run-id>.json, .md      analysis output

Every write lands in a temp file in the target directory and is moved into
place with os.replace, so readers never observe half a file. Multi-file
newsletter batches become visible only once their manifest is written.
Mutations are serialized per collection with a lock; readers do not lock.
"""
from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .composer import PersonalizedNewsletter, TreatmentCell
from .metrics import MetricsReport
from .model import (Draft, EmployeeProfile, MessageAnnotation,
                    annotation_from_dict, annotation_to_dict, draft_from_dict,
                    draft_to_dict, profile_from_dict, profile_to_dict,
                    validate_draft)
from .scoring import ScoreMatrix
from .simulate import (ReadingLogRow, SurveyAnswer, TreatmentAssignment,
                       answers_from_csv, answers_to_csv, logs_from_csv,
                       logs_to_csv)

__all__ = ["ProjectStore", "UnknownId"]

_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class UnknownId(KeyError):
    """Lookup of a draft, newsletter, or report that is not in the store."""

    def __init__(self, kind: str, value: str):
        self.kind = kind
        self.value = value
        super().__init__(f"unknown {kind}: {value!r}")


def _check_id(kind: str, value: str) -> str:
    # ids become file names; keep them out of path-traversal territory
    if not _ID_RE.match(value):
        raise ValueError(f"{kind} id not storable: {value!r}")
    return value


class ProjectStore:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, collection: str) -> threading.Lock:
        with self._locks_guard:
            if collection not in self._locks:
                self._locks[collection] = threading.Lock()
            return self._locks[collection]

    def _write(self, path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _write_json(self, path: Path, obj) -> None:
        self._write(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")

    @staticmethod
    def _read_json(path: Path, kind: str, value: str):
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UnknownId(kind, value) from None

    # --- drafts and annotations ---------------------------------------------

    def save_draft(self, draft: Draft) -> None:
        _check_id("draft", draft.id)
        with self._lock("drafts"):
            self._write_json(self.root / "drafts" / f"{draft.id}.json",
                             draft_to_dict(draft))

    def ingest_draft(self, text: str) -> Draft:
        """Validate a draft file and store it byte-for-byte.

        Keeping the original bytes makes export the exact inverse of
        ingest; annotations may be absent at this stage.
        """
        draft = draft_from_dict(json.loads(text))
        validate_draft(draft, require_annotations=False)
        _check_id("draft", draft.id)
        with self._lock("drafts"):
            self._write(self.root / "drafts" / f"{draft.id}.json", text)
        return draft

    def draft_ids(self) -> list[str]:
        d = self.root / "drafts"
        if not d.is_dir():
            return []
        return sorted(p.stem for p in d.glob("*.json"))

    def has_draft(self, draft_id: str) -> bool:
        return (self.root / "drafts" / f"{draft_id}.json").is_file()

    def load_draft(self, draft_id: str) -> Draft:
        """The stored draft with any separately saved annotations merged in."""
        raw = self._read_json(self.root / "drafts" / f"{draft_id}.json",
                              "draft", draft_id)
        draft = draft_from_dict(raw)
        ann_path = self.root / "annotations" / f"{draft_id}.json"
        if ann_path.is_file():
            saved = json.loads(ann_path.read_text(encoding="utf-8"))
            merged = dict(draft.annotations)
            merged.update({mid: annotation_from_dict(a)
                           for mid, a in saved.items()})
            draft = Draft(id=draft.id, issue_date=draft.issue_date,
                          messages=draft.messages, annotations=merged)
        return draft

    def export_draft(self, draft_id: str) -> str:
        """Verbatim bytes of the stored draft file (ingest round-trip)."""
        path = self.root / "drafts" / f"{draft_id}.json"
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise UnknownId("draft", draft_id) from None

    def save_annotations(self, draft_id: str,
                         annotations: dict[str, MessageAnnotation]) -> None:
        if not self.has_draft(draft_id):
            raise UnknownId("draft", draft_id)
        with self._lock("annotations"):
            self._write_json(
                self.root / "annotations" / f"{draft_id}.json",
                {mid: annotation_to_dict(a)
                 for mid, a in sorted(annotations.items())})

    # --- roster and assignments ----------------------------------------------

    def save_profiles(self, profiles: Sequence[EmployeeProfile]) -> None:
        with self._lock("profiles"):
            self._write_json(self.root / "profiles.json",
                             [profile_to_dict(p) for p in profiles])

    def load_profiles(self) -> list[EmployeeProfile]:
        raw = self._read_json(self.root / "profiles.json",
                              "collection", "profiles")
        return [profile_from_dict(d) for d in raw]

    def has_profiles(self) -> bool:
        return (self.root / "profiles.json").is_file()

    def save_assignments(self,
                         assignments: Sequence[TreatmentAssignment]) -> None:
        with self._lock("assignments"):
            self._write_json(
                self.root / "assignments.json",
                [{"employee_id": a.employee_id,
                  "cell": {"a": a.cell.a, "b": a.cell.b, "c": a.cell.c}}
                 for a in assignments])

    def load_assignments(self) -> list[TreatmentAssignment]:
        raw = self._read_json(self.root / "assignments.json",
                              "collection", "assignments")
        return [TreatmentAssignment(
                    d["employee_id"],
                    TreatmentCell(d["cell"]["a"], d["cell"]["b"],
                                  d["cell"]["c"]))
                for d in raw]

    def has_assignments(self) -> bool:
        return (self.root / "assignments.json").is_file()

    # --- week map -------------------------------------------------------------

    def save_weeks(self, week_drafts: dict[int, str]) -> None:
        with self._lock("weeks"):
            self._write_json(self.root / "weeks.json",
                             {str(w): d
                              for w, d in sorted(week_drafts.items())})

    def load_weeks(self) -> dict[int, str]:
        raw = self._read_json(self.root / "weeks.json", "collection", "weeks")
        return {int(w): d for w, d in raw.items()}

    # --- score export ----------------------------------------------------------

    def save_scores(self, matrix: ScoreMatrix) -> None:
        rows = matrix.to_rows()
        if not rows:
            raise ValueError("empty score matrix")
        header = list(rows[0].keys())
        lines = [",".join(header)]
        lines += [",".join(str(r[k]) for k in header) for r in rows]
        with self._lock("scores"):
            self._write(self.root / "scores" / f"{matrix.draft_id}.csv",
                        "\n".join(lines) + "\n")

    # --- newsletters -----------------------------------------------------------

    @staticmethod
    def _newsletter_dict(nl: PersonalizedNewsletter) -> dict:
        return {
            "employee_id": nl.employee_id,
            "draft_id": nl.draft_id,
            "subject": nl.subject,
            "subject_message": nl.subject_message,
            "top_news": list(nl.top_news),
            "sections": [[key, list(ids)] for key, ids in nl.sections],
            "display_titles": dict(nl.display_titles),
        }

    @staticmethod
    def _newsletter_from(d: dict) -> PersonalizedNewsletter:
        return PersonalizedNewsletter(
            employee_id=d["employee_id"],
            draft_id=d["draft_id"],
            subject=d["subject"],
            subject_message=d.get("subject_message"),
            top_news=list(d.get("top_news", [])),
            sections=[(k, list(ids)) for k, ids in d.get("sections", [])],
            display_titles=dict(d.get("display_titles", {})),
        )

    def save_newsletters(self, draft_id: str,
                         rendered: Iterable[tuple[PersonalizedNewsletter,
                                                  str]],
                         *, seed: Optional[int] = None) -> None:
        """Write every (newsletter, html) pair, then commit the manifest."""
        _check_id("draft", draft_id)
        with self._lock("newsletters"):
            base = self.root / "newsletters" / draft_id
            employees = []
            for nl, html in rendered:
                if nl.draft_id != draft_id:
                    raise ValueError(
                        f"newsletter for draft {nl.draft_id!r} in a "
                        f"{draft_id!r} batch")
                emp = _check_id("employee", nl.employee_id)
                self._write(base / f"{emp}.html", html)
                self._write_json(base / f"{emp}.json",
                                 self._newsletter_dict(nl))
                employees.append(emp)
            # the batch exists once this file does
            self._write_json(base / "manifest.json",
                             {"draft_id": draft_id, "seed": seed,
                              "employees": sorted(employees)})

    def newsletter_manifest(self, draft_id: str) -> dict:
        return self._read_json(
            self.root / "newsletters" / draft_id / "manifest.json",
            "newsletter batch", draft_id)

    def load_newsletters(self, draft_id: str) -> list[PersonalizedNewsletter]:
        manifest = self.newsletter_manifest(draft_id)
        base = self.root / "newsletters" / draft_id
        return [self._newsletter_from(
                    self._read_json(base / f"{emp}.json", "newsletter", emp))
                for emp in manifest["employees"]]

    def newsletter_html(self, draft_id: str, employee_id: str) -> str:
        path = (self.root / "newsletters" / draft_id
                / f"{employee_id}.html")
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise UnknownId("newsletter",
                            f"{draft_id}/{employee_id}") from None

    def newsletter_draft_ids(self) -> list[str]:
        d = self.root / "newsletters"
        if not d.is_dir():
            return []
        return sorted(p.name for p in d.iterdir()
                      if (p / "manifest.json").is_file())

    # --- logs and answers --------------------------------------------------------

    def save_week_logs(self, week: int, logs: Sequence[ReadingLogRow]) -> None:
        with self._lock("logs"):
            self._write(self.root / "logs" / f"week-{week:02d}.csv",
                        logs_to_csv(logs))

    def save_week_answers(self, week: int,
                          answers: Sequence[SurveyAnswer]) -> None:
        with self._lock("answers"):
            self._write(self.root / "answers" / f"week-{week:02d}.csv",
                        answers_to_csv(answers))

    def load_all_logs(self) -> list[ReadingLogRow]:
        d = self.root / "logs"
        out: list[ReadingLogRow] = []
        for path in sorted(d.glob("week-*.csv")) if d.is_dir() else []:
            out.extend(logs_from_csv(path.read_text(encoding="utf-8")))
        return out

    def load_all_answers(self) -> list[SurveyAnswer]:
        d = self.root / "answers"
        out: list[SurveyAnswer] = []
        for path in sorted(d.glob("week-*.csv")) if d.is_dir() else []:
            out.extend(answers_from_csv(path.read_text(encoding="utf-8")))
        return out

    # --- reports -------------------------------------------------------------------

    def save_report(self, run_id: str, report: MetricsReport) -> None:
        _check_id("run", run_id)
        with self._lock("reports"):
            base = self.root / "reports"
            self._write(base / f"{run_id}.md", report.render_markdown())
            self._write_json(base / f"{run_id}.json", report.to_dict())

    def load_report(self, run_id: str) -> dict:
        return self._read_json(self.root / "reports" / f"{run_id}.json",
                               "report", run_id)

    def report_ids(self) -> list[str]:
        d = self.root / "reports"
        if not d.is_dir():
            return []
        return sorted(p.stem for p in d.glob("*.json"))
