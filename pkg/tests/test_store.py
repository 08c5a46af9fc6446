import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taxonomist.errors import (
    EmptyGoldenSet,
    IntegrityError,
    NotFound,
    ParseError,
    StoreLocked,
    UnknownLabel,
)
from taxonomist.gateway import ClassificationResult
from taxonomist.store import (
    RunRecord,
    Store,
    canonical_json,
    digest_of,
    load_golden,
    make_run,
)


def result(doc_id, parent, child=None, latency=0.0):
    return ClassificationResult(doc_id=doc_id, parent=parent, child=child,
                                raw_response="{}", prompt_hash="p1",
                                backend_id="mock:m", latency=latency)


json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=10),
    lambda inner: st.lists(inner, max_size=4)
    | st.dictionaries(st.text(max_size=6), inner, max_size=4),
    max_leaves=12,
)


class TestCanonicalJson:
    def test_sorted_compact_form(self):
        assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'

    @given(st.dictionaries(st.text(max_size=8), json_values, max_size=6))
    @settings(max_examples=100)
    def test_key_order_does_not_matter(self, obj):
        reordered = json.loads(json.dumps(obj))
        assert canonical_json(obj) == canonical_json(reordered)
        assert digest_of(obj) == digest_of(reordered)

    def test_digest_is_short_hex(self):
        digest = digest_of({"x": 1})
        assert len(digest) == 16
        int(digest, 16)


class TestRuns:
    def test_run_id_ignores_latency(self):
        a = make_run("p1", 1, "mock:m", [result("d", "X", latency=0.1)])
        b = make_run("p1", 1, "mock:m", [result("d", "X", latency=9.9)])
        assert a.run_id == b.run_id

    def test_save_and_load_roundtrip(self, tmp_path):
        store = Store(str(tmp_path / "st"))
        record = make_run("p1", 1, "mock:m", [result("d1", "X"), result("d2", "Y")])
        store.save_run(record)
        loaded = store.load_run(record.run_id)
        assert loaded.run_id == record.run_id
        assert [(r.doc_id, r.parent) for r in loaded.results] == [
            ("d1", "X"), ("d2", "Y")]
        assert store.list_runs() == [record.run_id]

    def test_mismatched_run_id_rejected(self, tmp_path):
        store = Store(str(tmp_path / "st"))
        record = make_run("p1", 1, "mock:m", [result("d1", "X")])
        bad = RunRecord(run_id="0" * 16, prompt_hash=record.prompt_hash,
                        schema_version=1, backend_id=record.backend_id,
                        results=record.results)
        with pytest.raises(IntegrityError):
            store.save_run(bad)

    def test_tampered_file_detected_on_load(self, tmp_path):
        store = Store(str(tmp_path / "st"))
        record = make_run("p1", 1, "mock:m", [result("d1", "X")])
        store.save_run(record)
        path = store.run_path(record.run_id)
        doc = json.loads(open(path).read())
        doc["results"][0]["parent"] = "Tampered"
        open(path, "w").write(json.dumps(doc))
        with pytest.raises(IntegrityError):
            store.load_run(record.run_id)

    def test_missing_run_raises(self, tmp_path):
        with pytest.raises(NotFound):
            Store(str(tmp_path / "st")).load_run("nope")

    def test_write_lock_is_exclusive(self, tmp_path):
        store = Store(str(tmp_path / "st"))
        with store.write_lock():
            with pytest.raises(StoreLocked):
                with store.write_lock():
                    pass
        with store.write_lock():
            pass  # released cleanly


class TestArtifacts:
    def test_save_and_load(self, tmp_path):
        store = Store(str(tmp_path / "st"))
        store.save_artifact("windows", "w1", {"a": 1})
        assert store.load_artifact("windows", "w1") == {"a": 1}

    def test_missing_artifact(self, tmp_path):
        with pytest.raises(NotFound):
            Store(str(tmp_path / "st")).load_artifact("windows", "nope")


class TestGolden:
    def write(self, tmp_path, lines):
        path = tmp_path / "g.jsonl"
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_load_with_schema_validation(self, tmp_path, schema):
        path = self.write(tmp_path, [
            json.dumps({"doc_id": "g1", "text": "t", "parent": "Red Fruits",
                        "child": "Cranberry"}),
            json.dumps({"doc_id": "g2", "text": "t", "parent": "Green Fruits"}),
        ])
        golden = load_golden(path, schema)
        assert len(golden.entries) == 2
        assert golden.entries[0].child_label == "Cranberry"

    def test_unknown_parent_rejected(self, tmp_path, schema):
        path = self.write(tmp_path, [
            json.dumps({"doc_id": "g1", "text": "t", "parent": "Purple Fruits"}),
        ])
        with pytest.raises(UnknownLabel):
            load_golden(path, schema)

    def test_child_of_wrong_parent_rejected(self, tmp_path, schema):
        path = self.write(tmp_path, [
            json.dumps({"doc_id": "g1", "text": "t", "parent": "Red Fruits",
                        "child": "Banana"}),
        ])
        with pytest.raises(UnknownLabel):
            load_golden(path, schema)

    def test_parse_error_has_line_number(self, tmp_path):
        path = self.write(tmp_path, ['{"doc_id": "a", "text": "t", "parent": "P"}',
                                     "broken"])
        with pytest.raises(ParseError) as exc:
            load_golden(path)
        assert exc.value.line == 2

    def test_empty_set_rejected(self, tmp_path):
        path = tmp_path / "g.jsonl"
        path.write_text("\n")
        with pytest.raises(EmptyGoldenSet):
            load_golden(str(path))
