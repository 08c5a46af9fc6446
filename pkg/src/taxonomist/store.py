"""Content-addressed persistence: runs, windows, golden sets, preferences."""

from __future__ import annotations

import contextlib
import hashlib
import json
import os
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptyGoldenSet, IntegrityError, NotFound, ParseError, StoreLocked, UnknownLabel
from .gateway import ClassificationResult
from .schema import ClassSchema


def canonical_json(obj) -> str:
    """Stable serialization used for hashing and replayable artifacts."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest_of(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    prompt_hash: str
    schema_version: int
    backend_id: str
    results: tuple[ClassificationResult, ...]
    started: str = ""
    finished: str = ""


def _result_payload(r: ClassificationResult) -> dict:
    # latency is wall-clock noise and stays out of the canonical form
    return {
        "doc_id": r.doc_id,
        "parent": r.parent,
        "child": r.child,
        "raw_response": r.raw_response,
        "prompt_hash": r.prompt_hash,
        "backend_id": r.backend_id,
    }


def run_payload(prompt_hash: str, schema_version: int, backend_id: str,
                results: Sequence[ClassificationResult]) -> dict:
    return {
        "prompt_hash": prompt_hash,
        "schema_version": schema_version,
        "backend_id": backend_id,
        "results": [_result_payload(r) for r in results],
    }


def make_run(prompt_hash: str, schema_version: int, backend_id: str,
             results: Sequence[ClassificationResult],
             started: str = "", finished: str = "") -> RunRecord:
    payload = run_payload(prompt_hash, schema_version, backend_id, results)
    return RunRecord(
        run_id=digest_of(payload),
        prompt_hash=prompt_hash,
        schema_version=schema_version,
        backend_id=backend_id,
        results=tuple(results),
        started=started,
        finished=finished,
    )


class Store:
    """Plain-directory store: runs/, windows/, prefs/, golden/ under one root.

    Writes are single-writer (lock file); reads need no lock. Nothing is ever
    rewritten in place.
    """

    def __init__(self, root: str):
        self.root = root
        for sub in ("runs", "windows", "prefs", "golden"):
            os.makedirs(os.path.join(root, sub), exist_ok=True)

    @contextlib.contextmanager
    def write_lock(self):
        lock_path = os.path.join(self.root, ".lock")
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreLocked(f"store {self.root} is locked by another writer")
        try:
            yield
        finally:
            os.close(fd)
            os.unlink(lock_path)

    def _atomic_write(self, path: str, text: str) -> None:
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)

    # -- runs -------------------------------------------------------------

    def run_path(self, run_id: str) -> str:
        return os.path.join(self.root, "runs", f"{run_id}.json")

    def save_run(self, record: RunRecord) -> str:
        payload = run_payload(record.prompt_hash, record.schema_version,
                              record.backend_id, record.results)
        digest = digest_of(payload)
        if record.run_id != digest:
            raise IntegrityError(
                f"run_id {record.run_id} does not match content digest {digest}"
            )
        doc = {
            "run_id": record.run_id,
            "digest": digest,
            "started": record.started,
            "finished": record.finished,
            **payload,
        }
        with self.write_lock():
            self._atomic_write(self.run_path(record.run_id), canonical_json(doc) + "\n")
        return record.run_id

    def load_run(self, run_id: str) -> RunRecord:
        path = self.run_path(run_id)
        if not os.path.exists(path):
            raise NotFound(f"no run {run_id!r}")
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        payload = run_payload(
            doc["prompt_hash"], doc["schema_version"], doc["backend_id"],
            [ClassificationResult(latency=0.0, **r) for r in doc["results"]],
        )
        if digest_of(payload) != doc.get("digest"):
            raise IntegrityError(f"run {run_id!r} content does not match its digest")
        return RunRecord(
            run_id=doc["run_id"],
            prompt_hash=doc["prompt_hash"],
            schema_version=doc["schema_version"],
            backend_id=doc["backend_id"],
            results=tuple(ClassificationResult(latency=0.0, **r) for r in doc["results"]),
            started=doc.get("started", ""),
            finished=doc.get("finished", ""),
        )

    def list_runs(self) -> list[str]:
        runs_dir = os.path.join(self.root, "runs")
        return sorted(
            name[:-5] for name in os.listdir(runs_dir) if name.endswith(".json")
        )

    # -- generic json artifacts (alignment, diagnostics, drift, windows) ---

    def save_artifact(self, kind: str, name: str, obj) -> str:
        path = os.path.join(self.root, kind, f"{name}.json")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with self.write_lock():
            self._atomic_write(path, canonical_json(obj) + "\n")
        return path

    def load_artifact(self, kind: str, name: str):
        path = os.path.join(self.root, kind, f"{name}.json")
        if not os.path.exists(path):
            raise NotFound(f"no {kind} artifact {name!r}")
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def prefs_path(self) -> str:
        return os.path.join(self.root, "prefs", "preferences.jsonl")

    def queue_path(self) -> str:
        return os.path.join(self.root, "prefs", "queue.jsonl")


# -- golden sets ----------------------------------------------------------

@dataclass(frozen=True)
class GoldenEntry:
    doc_id: str
    text: str
    parent_label: str
    child_label: Optional[str] = None


@dataclass(frozen=True)
class GoldenSet:
    entries: tuple[GoldenEntry, ...]
    provenance: str = ""


def load_golden(path: str, schema: Optional[ClassSchema] = None) -> GoldenSet:
    """Load a JSONL golden set, validating labels against the schema when one
    is supplied."""
    valid_parents = set()
    valid_children: dict[str, set[str]] = {}
    if schema is not None:
        for p in schema.parents:
            valid_parents.add(p.internal_name)
            valid_children[p.internal_name] = {c.internal_name for c in p.children}
    entries: list[GoldenEntry] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(lineno, str(exc)) from exc
            if "doc_id" not in obj or "text" not in obj or "parent" not in obj:
                raise ParseError(lineno, "need doc_id, text, parent")
            parent = obj["parent"]
            child = obj.get("child")
            if schema is not None:
                if parent not in valid_parents:
                    raise UnknownLabel(f"{parent} (line {lineno})")
                if child is not None and child not in valid_children.get(parent, set()):
                    raise UnknownLabel(f"{child} (line {lineno})")
            entries.append(GoldenEntry(
                doc_id=str(obj["doc_id"]), text=str(obj["text"]),
                parent_label=parent, child_label=child,
            ))
    if not entries:
        raise EmptyGoldenSet(f"{path} contains no entries")
    return GoldenSet(entries=tuple(entries), provenance=str(path))
