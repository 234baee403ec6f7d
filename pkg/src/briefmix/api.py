"""HTTP API consumed by the editor console.

Endpoints return field-level diagnostics as

    {"errors": [{"field": "...", "message": "..."}]}

with 400 for anything invalid and 404 for unknown ids. Composition goes
through the same entry point as the command line, so a preview for a given
(draft, employee, cell, seed) is byte-identical to the file generate writes.
"""
from __future__ import annotations

import hashlib
import json
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .catalog import default_campuses, load_job_catalog, load_topic_catalog
from .model import (Draft, DraftInvalid, annotation_from_dict,
                    annotation_to_dict, draft_from_dict, draft_to_dict,
                    check_annotation, profile_to_dict, validate_draft)
from .pipeline import compose_newsletter
from .render import render_html
from .scoring import SCORE_FIELDS, score_matrix
from .store import ProjectStore, UnknownId

__all__ = ["create_app"]


class PreviewCell(BaseModel):
    a: int
    b: int
    c: int


class PreviewRequest(BaseModel):
    draft_id: str
    employee_id: str
    cell: PreviewCell
    seed: int


def _errors(status: int, items: list[tuple[str, str]]) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"errors": [{"field": f, "message": m} for f, m in items]})


def _annotations_version(draft: Draft) -> str:
    """Opaque content version of a draft's stored annotations.

    Served as an ETag; a PUT carrying If-Match detects concurrent edits
    (writes stay last-write-wins when the header is absent).
    """
    canon = json.dumps({mid: annotation_to_dict(a)
                        for mid, a in draft.annotations.items()},
                       sort_keys=True)
    return '"' + hashlib.sha256(canon.encode()).hexdigest()[:16] + '"'


def create_app(store: ProjectStore,
               frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="briefmix", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        items = []
        for err in exc.errors():
            if err.get("type") == "json_invalid":
                # loc here is a char offset, useless to a client
                items.append(("body", "request body is not valid JSON"))
            else:
                items.append((".".join(str(p) for p in err["loc"]
                                       if p != "body"), err["msg"]))
        return _errors(400, items or [("body", "invalid request")])

    @app.exception_handler(UnknownId)
    async def _unknown(request: Request, exc: UnknownId):
        return _errors(404, [(exc.kind, exc.args[0])])

    @app.exception_handler(DraftInvalid)
    async def _invalid(request: Request, exc: DraftInvalid):
        return _errors(400, [(i.field, i.message) for i in exc.issues])

    @app.exception_handler(json.JSONDecodeError)
    async def _bad_json(request: Request, exc: json.JSONDecodeError):
        return _errors(400, [("body", f"invalid JSON: {exc}")])

    # --- drafts ---------------------------------------------------------

    @app.post("/drafts", status_code=201)
    async def upload_draft(request: Request):
        body = json.loads(await request.body())
        try:
            draft = draft_from_dict(body)
        except (KeyError, TypeError, ValueError) as e:
            return _errors(400, [("body", f"draft shape: {e!r}")])
        validate_draft(draft, require_annotations=False)
        store.save_draft(draft)
        return {"id": draft.id, "messages": len(draft.messages),
                "annotated": len(draft.annotations)}

    @app.get("/drafts")
    def list_drafts():
        out = []
        for did in store.draft_ids():
            d = store.load_draft(did)
            out.append({"id": d.id, "issue_date": d.issue_date.isoformat(),
                        "messages": len(d.messages),
                        "annotated": len(d.annotations)})
        out.sort(key=lambda r: (r["issue_date"], r["id"]))
        return out

    @app.get("/drafts/{draft_id}")
    def get_draft(draft_id: str, response: Response):
        draft = store.load_draft(draft_id)
        response.headers["ETag"] = _annotations_version(draft)
        return draft_to_dict(draft)

    @app.put("/drafts/{draft_id}/annotations")
    def put_annotations(draft_id: str, body: dict[str, dict],
                        request: Request, response: Response):
        draft = store.load_draft(draft_id)
        expected = request.headers.get("if-match")
        if expected is not None and expected != _annotations_version(draft):
            return _errors(412, [("annotations",
                                  "annotations changed since they were "
                                  "loaded; reload before saving")])
        known = {m.id for m in draft.messages}
        items = []
        incoming = {}
        for mid, raw in body.items():
            if mid not in known:
                items.append((mid, f"no message {mid!r} in draft "
                                   f"{draft_id!r}"))
                continue
            try:
                ann = annotation_from_dict(raw)
            except (KeyError, TypeError) as e:
                items.append((mid, f"annotation shape: {e!r}"))
                continue
            issues = check_annotation(ann, field_prefix=f"{mid}.")
            if issues:
                items.extend((i.field, i.message) for i in issues)
            else:
                incoming[mid] = ann
        if items:
            return _errors(400, items)
        merged = dict(draft.annotations)
        merged.update(incoming)
        store.save_annotations(draft_id, merged)
        response.headers["ETag"] = _annotations_version(
            store.load_draft(draft_id))
        return {"id": draft_id, "annotated": len(merged),
                "missing": len(known) - len(merged)}

    # --- catalogs and personas -------------------------------------------

    @app.get("/topics")
    def topics():
        return [{"id": t.id, "name": t.name, "special": t.special}
                for t in load_topic_catalog()]

    @app.get("/jobs")
    def jobs():
        return [{"id": j.id, "name": j.name} for j in load_job_catalog()]

    @app.get("/campuses")
    def campuses():
        return [{"id": c.id, "name": c.name} for c in default_campuses()]

    @app.get("/personas")
    def personas():
        if not store.has_profiles():
            return []
        return [profile_to_dict(p) for p in store.load_profiles()]

    # --- preview ----------------------------------------------------------

    @app.post("/preview")
    def preview(req: PreviewRequest):
        draft = validate_draft(store.load_draft(req.draft_id))
        profile = next((p for p in store.load_profiles()
                        if p.id == req.employee_id), None)
        if profile is None:
            raise UnknownId("employee", req.employee_id)
        try:
            from .composer import TreatmentCell
            cell = TreatmentCell(req.cell.a, req.cell.b, req.cell.c)
        except ValueError as e:
            return _errors(400, [("cell", str(e))])
        matrix = score_matrix(draft, [profile])
        nl = compose_newsletter(draft, profile, cell, matrix, req.seed)
        scores = {}
        for m in draft.messages:
            s = matrix.get(profile.id, m.id)
            scores[m.id] = {f: getattr(s, f) for f in SCORE_FIELDS}
        return {
            "html": render_html(nl, draft),
            "newsletter": {
                "employee_id": nl.employee_id,
                "draft_id": nl.draft_id,
                "subject": nl.subject,
                "subject_message": nl.subject_message,
                "top_news": list(nl.top_news),
                "sections": [[k, list(ids)] for k, ids in nl.sections],
                "display_titles": dict(nl.display_titles),
            },
            "scores": scores,
        }

    # --- newsletters and reports ---------------------------------------------

    @app.get("/newsletters/{draft_id}/{employee_id}",
             response_class=HTMLResponse)
    def newsletter(draft_id: str, employee_id: str):
        return store.newsletter_html(draft_id, employee_id)

    @app.get("/reports/{run_id}")
    def report(run_id: str):
        return store.load_report(run_id)

    @app.get("/reports/{run_id}/markdown", response_class=PlainTextResponse)
    def report_markdown(run_id: str):
        try:
            path = store.root / "reports" / f"{run_id}.md"
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise UnknownId("report", run_id) from None

    if frontend_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="console")

    return app
