"""Local review API: read-only run/alignment/drift views plus preference
submission. Backs the review UI; everything it serves uses external aliases
or stored artifacts, never live backend calls."""

from __future__ import annotations

import json
import os

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .errors import DuplicateJudgment, LabelEqualsLoser, NotFound
from .fewshot import PreferenceStore, record_preference
from .corpus import ProcessedDocument
from .store import Store


class PreferenceIn(BaseModel):
    doc_id: str
    y_w: str
    y_l: str
    reviewer: str
    round: int = 1


def _read_queue(store: Store) -> list[dict]:
    path = store.queue_path()
    if not os.path.exists(path):
        return []
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                items.append(json.loads(line))
    return items


def create_app(store: Store) -> FastAPI:
    app = FastAPI(title="taxonomist review API")

    @app.get("/api/runs")
    def list_runs():
        return {"runs": store.list_runs()}

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        try:
            record = store.load_run(run_id)
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {
            "run_id": record.run_id,
            "prompt_hash": record.prompt_hash,
            "schema_version": record.schema_version,
            "backend_id": record.backend_id,
            "started": record.started,
            "finished": record.finished,
            "results": [
                {"doc_id": r.doc_id, "parent": r.parent, "child": r.child}
                for r in record.results
            ],
        }

    @app.get("/api/alignment/{run_id}")
    def get_alignment(run_id: str):
        try:
            return store.load_artifact("alignment", run_id)
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/api/diagnostics/{run_id}")
    def get_diagnostics(run_id: str):
        try:
            return store.load_artifact("diagnostics", run_id)
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/api/review/queue")
    def review_queue():
        """Pending review items: the queue minus documents already judged,
        so the list shrinks as preferences come in."""
        judged = {p.doc_id for p in PreferenceStore(store.prefs_path()).load()}
        items = [item for item in _read_queue(store) if item["doc_id"] not in judged]
        return {"items": items}

    @app.post("/api/preferences", status_code=201)
    def post_preference(body: PreferenceIn):
        pref_store = PreferenceStore(store.prefs_path())
        doc = ProcessedDocument(id=body.doc_id, source_id=body.doc_id, text="")
        try:
            pair = record_preference(
                pref_store, doc, body.y_w, body.y_l, body.reviewer,
                source="human", round=body.round)
        except LabelEqualsLoser as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except DuplicateJudgment as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return pair.to_dict()

    @app.get("/api/drift/latest")
    def drift_latest():
        try:
            return store.load_artifact("windows", "latest_drift")
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    return app
