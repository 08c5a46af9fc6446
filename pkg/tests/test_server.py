import json

import pytest
from fastapi.testclient import TestClient

from taxonomist.gateway import ClassificationResult
from taxonomist.server import create_app
from taxonomist.store import Store, make_run


def result(doc_id, parent, child=None):
    return ClassificationResult(doc_id=doc_id, parent=parent, child=child,
                                raw_response="{}", prompt_hash="p1",
                                backend_id="mock:m")


@pytest.fixture
def store(tmp_path):
    store = Store(str(tmp_path / "store"))
    record = make_run("p1", 1, "mock:m", [result("d1", "Red Fruits", "Cranberry")])
    store.save_run(record)
    store.save_artifact("alignment", record.run_id,
                        {"rows": ["Red Fruits"], "cols": ["t1"], "counts": [[1]]})
    store.save_artifact("diagnostics", record.run_id,
                        {"run_id": record.run_id, "diagnostics": []})
    store.save_artifact("windows", "latest_drift", {"verdict": "stable"})
    queue = [
        {"doc_id": f"q{i}", "text": f"review item {i}",
         "candidates": ["Cranberry", "Redcurrant"]}
        for i in range(3)
    ]
    with open(store.queue_path(), "w") as fh:
        for item in queue:
            fh.write(json.dumps(item) + "\n")
    store.run_id = record.run_id
    return store


@pytest.fixture
def client(store):
    return TestClient(create_app(store))


class TestRuns:
    def test_list_and_get(self, client, store):
        assert client.get("/api/runs").json() == {"runs": [store.run_id]}
        payload = client.get(f"/api/runs/{store.run_id}").json()
        assert payload["results"] == [
            {"doc_id": "d1", "parent": "Red Fruits", "child": "Cranberry"}]

    def test_missing_run_404(self, client):
        assert client.get("/api/runs/nope").status_code == 404


class TestArtifacts:
    def test_alignment_and_diagnostics(self, client, store):
        assert client.get(f"/api/alignment/{store.run_id}").json()["counts"] == [[1]]
        assert client.get(f"/api/diagnostics/{store.run_id}").status_code == 200
        assert client.get("/api/alignment/nope").status_code == 404

    def test_drift_latest(self, client):
        assert client.get("/api/drift/latest").json() == {"verdict": "stable"}


class TestReviewRoundTrip:
    def test_queue_shrinks_after_submission(self, client):
        queue = client.get("/api/review/queue").json()["items"]
        assert len(queue) == 3
        resp = client.post("/api/preferences", json={
            "doc_id": "q0", "y_w": "Cranberry", "y_l": "Redcurrant",
            "reviewer": "r1"})
        assert resp.status_code == 201
        assert resp.json()["y_w"] == "Cranberry"
        remaining = client.get("/api/review/queue").json()["items"]
        assert len(remaining) == 2
        assert all(item["doc_id"] != "q0" for item in remaining)

    def test_winner_equals_loser_is_422(self, client):
        resp = client.post("/api/preferences", json={
            "doc_id": "q1", "y_w": "Cranberry", "y_l": "Cranberry",
            "reviewer": "r1"})
        assert resp.status_code == 422

    def test_duplicate_judgment_is_409(self, client):
        body = {"doc_id": "q2", "y_w": "Cranberry", "y_l": "Redcurrant",
                "reviewer": "r1"}
        assert client.post("/api/preferences", json=body).status_code == 201
        assert client.post("/api/preferences", json=body).status_code == 409
