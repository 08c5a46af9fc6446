import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taxonomist.corpus import (
    CLEANING_RULES,
    PreprocessConfig,
    ProcessedDocument,
    RawDocument,
    TOKENS_PER_WORD,
    corpus_from_documents,
    estimate_tokens,
    load_corpus,
    parse_raw_jsonl,
    partition_by_parent,
    preprocess,
)
from taxonomist.errors import (
    DuplicateId,
    EmptyAfterCleaning,
    InvalidConfig,
    MissingAssignment,
    ParseError,
)


def clean(text: str) -> str:
    for rule in PreprocessConfig().rules:
        text = CLEANING_RULES[rule](text)
    return text.strip()


class TestCleaning:
    def test_strips_markup(self):
        assert clean("a <b>bold</b> claim") == "a bold claim"

    def test_collapses_urls(self):
        assert clean("see https://example.com/x?q=1 now") == "see <URL> now"

    def test_strips_control_chars(self):
        assert clean("a\x00b\x07c") == "a b c"

    def test_collapses_whitespace(self):
        assert clean("a \t b\n\n  c") == "a b c"

    def test_url_placeholder_survives_markup_rule(self):
        assert clean("go to <URL> now") == "go to <URL> now"

    @given(st.text(max_size=300))
    @settings(max_examples=200)
    def test_cleaning_is_idempotent(self, text):
        once = clean(text)
        assert clean(once) == once


class TestTokenEstimate:
    @given(st.lists(st.text(alphabet="abc", min_size=1, max_size=8), max_size=50))
    def test_matches_word_count_formula(self, words):
        text = " ".join(words)
        assert estimate_tokens(text) == math.ceil(len(text.split()) * TOKENS_PER_WORD)

    def test_known_value(self):
        assert estimate_tokens("one two three four") == math.ceil(4 * 1.3)  # 6


class TestSegmentation:
    def make(self, text):
        return RawDocument(id="d", text=text)

    def test_short_doc_passes_through(self):
        docs = preprocess(self.make("one short sentence."), PreprocessConfig())
        assert len(docs) == 1
        assert docs[0].id == "d"
        assert docs[0].segment_index == 0

    def test_long_doc_splits_with_suffixed_ids(self):
        text = ". ".join("word " * 30 for _ in range(10))
        docs = preprocess(self.make(text), PreprocessConfig(max_segment_tokens=50))
        assert len(docs) > 1
        assert [d.id for d in docs] == [f"d#{i}" for i in range(len(docs))]
        assert all(d.source_id == "d" for d in docs)

    def test_segments_respect_budget_unless_single_sentence_overflows(self):
        text = ". ".join("word " * 20 for _ in range(8))
        config = PreprocessConfig(max_segment_tokens=60)
        for doc in preprocess(self.make(text), config):
            assert doc.token_estimate <= 60

    @given(st.lists(st.integers(min_value=1, max_value=40), min_size=1, max_size=12),
           st.integers(min_value=10, max_value=120))
    @settings(max_examples=100)
    def test_conservation_of_words(self, sentence_lengths, budget):
        text = " ".join(
            " ".join(f"w{i}x{j}" for j in range(n)) + "."
            for i, n in enumerate(sentence_lengths)
        )
        docs = preprocess(self.make(text), PreprocessConfig(max_segment_tokens=budget))
        joined = " ".join(d.text for d in docs)
        assert joined.split() == clean(text).split()

    def test_empty_after_cleaning_raises(self):
        with pytest.raises(EmptyAfterCleaning):
            preprocess(self.make("  \x00  "), PreprocessConfig())

    def test_bad_config_rejected(self):
        with pytest.raises(InvalidConfig):
            preprocess(self.make("x"), PreprocessConfig(max_segment_tokens=0))
        with pytest.raises(InvalidConfig):
            preprocess(self.make("x"), PreprocessConfig(rules=("nope",)))


class TestParsing:
    def test_parse_and_load(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            json.dumps({"id": "a", "text": "hello there"}) + "\n"
            + json.dumps({"id": "b", "text": "more text", "timestamp": "2026-01-02T03:04:05Z"})
            + "\n"
        )
        raws = parse_raw_jsonl(str(path))
        assert [r.id for r in raws] == ["a", "b"]
        assert raws[1].timestamp is not None
        corpus = load_corpus(str(path))
        assert corpus.ids() == ["a", "b"]

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "text": "ok"}\nnot json\n')
        with pytest.raises(ParseError) as exc:
            parse_raw_jsonl(str(path))
        assert exc.value.line == 2

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "text": "x"}\n{"id": "a", "text": "y"}\n')
        with pytest.raises(DuplicateId):
            parse_raw_jsonl(str(path))


class FakeResult:
    def __init__(self, doc_id, parent):
        self.doc_id = doc_id
        self.parent = parent


class TestPartition:
    def make_corpus(self, n):
        return corpus_from_documents(
            ProcessedDocument(id=f"d{i}", source_id=f"d{i}", text=f"text {i}")
            for i in range(n)
        )

    @given(st.lists(st.sampled_from(["A", "B", "C"]), min_size=1, max_size=30))
    @settings(max_examples=100)
    def test_partition_conserves_documents(self, parents):
        corpus = self.make_corpus(len(parents))
        results = [FakeResult(f"d{i}", p) for i, p in enumerate(parents)]
        parts = partition_by_parent(corpus, results)
        assert sum(len(c) for c in parts.values()) == len(corpus)
        assert sorted(i for c in parts.values() for i in c.ids()) == sorted(corpus.ids())

    def test_declared_parents_yield_empty_corpora(self):
        corpus = self.make_corpus(2)
        results = [FakeResult("d0", "A"), FakeResult("d1", "A")]
        parts = partition_by_parent(corpus, results, parent_names=["A", "B"])
        assert len(parts["B"]) == 0

    def test_missing_assignment_raises(self):
        corpus = self.make_corpus(2)
        with pytest.raises(MissingAssignment):
            partition_by_parent(corpus, [FakeResult("d0", "A")])
