"""Document ingestion, cleaning/segmentation, and parent-class partitioning."""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Callable, Iterable, Optional

from .errors import (
    DuplicateId,
    EmptyAfterCleaning,
    InvalidConfig,
    MissingAssignment,
    ParseError,
)

# A whitespace-delimited word is a cheap proxy for a model token; the 1.3
# multiplier absorbs subword splitting without a tokenizer dependency.
TOKENS_PER_WORD = 1.3

# Never re-strip the <URL> placeholder, so cleaning stays idempotent.
_MARKUP_RE = re.compile(r"<(?!URL>)[^>\s][^>]*>")
_URL_RE = re.compile(r"https?://\S+|www\.\S+")
_CONTROL_RE = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\x7f]")
_WS_RE = re.compile(r"\s+")


def _strip_markup(text: str) -> str:
    return _MARKUP_RE.sub(" ", text)


def _collapse_urls(text: str) -> str:
    return _URL_RE.sub("<URL>", text)


def _strip_control(text: str) -> str:
    return _CONTROL_RE.sub(" ", text)


def _collapse_whitespace(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


CLEANING_RULES: dict[str, Callable[[str], str]] = {
    "strip_markup": _strip_markup,
    "collapse_urls": _collapse_urls,
    "strip_control": _strip_control,
    "collapse_whitespace": _collapse_whitespace,
}

DEFAULT_RULES = ("strip_markup", "collapse_urls", "strip_control", "collapse_whitespace")


def estimate_tokens(text: str) -> int:
    words = text.split()
    return math.ceil(len(words) * TOKENS_PER_WORD)


@dataclass(frozen=True)
class PreprocessConfig:
    max_segment_tokens: int = 400
    rules: tuple[str, ...] = DEFAULT_RULES

    def config_hash(self) -> str:
        payload = json.dumps(
            {"max_segment_tokens": self.max_segment_tokens, "rules": list(self.rules)},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str
    timestamp: Optional[datetime] = None
    dimensions: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ProcessedDocument:
    id: str
    source_id: str
    text: str
    segment_index: int = 0
    token_estimate: int = 0


@dataclass(frozen=True)
class Provenance:
    source: str
    config_hash: str


@dataclass(frozen=True)
class Corpus:
    documents: tuple[ProcessedDocument, ...]
    provenance: Provenance

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def ids(self) -> list[str]:
        return [d.id for d in self.documents]


_SENTENCE_RE = re.compile(r"[^.!?\n]*[.!?\n]+|[^.!?\n]+$")


def _split_sentences(text: str) -> list[str]:
    return [m.group(0) for m in _SENTENCE_RE.finditer(text) if m.group(0).strip()]


def _segment(text: str, max_tokens: int) -> list[str]:
    """Pack sentences greedily under the token budget; hard-split only when a
    single sentence exceeds it. Segments are contiguous, whitespace-joinable
    slices of the input."""
    if estimate_tokens(text) <= max_tokens:
        return [text]
    word_budget = max(1, math.floor(max_tokens / TOKENS_PER_WORD))
    segments: list[str] = []
    current_words: list[str] = []
    for sentence in _split_sentences(text):
        words = sentence.split()
        if len(current_words) + len(words) <= word_budget:
            current_words.extend(words)
            continue
        if current_words:
            segments.append(" ".join(current_words))
            current_words = []
        while len(words) > word_budget:
            segments.append(" ".join(words[:word_budget]))
            words = words[word_budget:]
        current_words = words
    if current_words:
        segments.append(" ".join(current_words))
    return segments


def preprocess(raw: RawDocument, config: PreprocessConfig) -> list[ProcessedDocument]:
    if config.max_segment_tokens <= 0:
        raise InvalidConfig("max_segment_tokens must be positive")
    unknown = [r for r in config.rules if r not in CLEANING_RULES]
    if unknown:
        raise InvalidConfig(f"unknown cleaning rules: {unknown}")
    text = raw.text
    for rule in config.rules:
        text = CLEANING_RULES[rule](text)
    text = text.strip()
    if not text:
        raise EmptyAfterCleaning(raw.id)
    segments = _segment(text, config.max_segment_tokens)
    docs = []
    for i, seg in enumerate(segments):
        doc_id = raw.id if len(segments) == 1 else f"{raw.id}#{i}"
        docs.append(
            ProcessedDocument(
                id=doc_id,
                source_id=raw.id,
                text=seg,
                segment_index=i,
                token_estimate=estimate_tokens(seg),
            )
        )
    return docs


def parse_raw_jsonl(path: str) -> list[RawDocument]:
    docs: list[RawDocument] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(lineno, str(exc)) from exc
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise ParseError(lineno, "object must have 'id' and 'text'")
            doc_id = str(obj["id"])
            if doc_id in seen:
                raise DuplicateId(doc_id)
            seen.add(doc_id)
            ts = None
            if obj.get("timestamp"):
                try:
                    ts = datetime.fromisoformat(str(obj["timestamp"]).replace("Z", "+00:00"))
                except ValueError as exc:
                    raise ParseError(lineno, f"bad timestamp: {obj['timestamp']}") from exc
            docs.append(
                RawDocument(
                    id=doc_id,
                    text=str(obj["text"]),
                    timestamp=ts,
                    dimensions=dict(obj.get("dimensions") or {}),
                )
            )
    return docs


def load_corpus(path: str, config: Optional[PreprocessConfig] = None) -> Corpus:
    """Load a JSONL corpus and run it through preprocessing, preserving file order."""
    config = config or PreprocessConfig()
    processed: list[ProcessedDocument] = []
    for raw in parse_raw_jsonl(path):
        processed.extend(preprocess(raw, config))
    return Corpus(
        documents=tuple(processed),
        provenance=Provenance(source=str(path), config_hash=config.config_hash()),
    )


def corpus_from_documents(docs: Iterable[ProcessedDocument], source: str = "<memory>",
                          config: Optional[PreprocessConfig] = None) -> Corpus:
    config = config or PreprocessConfig()
    docs = tuple(docs)
    seen: set[str] = set()
    for d in docs:
        if d.id in seen:
            raise DuplicateId(d.id)
        seen.add(d.id)
    return Corpus(documents=docs, provenance=Provenance(source, config.config_hash()))


def partition_by_parent(corpus: Corpus, results, parent_names: Optional[Iterable[str]] = None
                        ) -> dict[str, Corpus]:
    """Split a classified corpus into per-parent sub-corpora.

    `results` is any iterable with .doc_id and .parent attributes. When
    `parent_names` is given, classes with no documents map to empty corpora.
    """
    assignment: dict[str, str] = {}
    for r in results:
        assignment[r.doc_id] = r.parent
    missing = [d.id for d in corpus.documents if d.id not in assignment]
    if missing:
        raise MissingAssignment(missing)
    buckets: dict[str, list[ProcessedDocument]] = {}
    for name in parent_names or []:
        buckets[name] = []
    for doc in corpus.documents:
        buckets.setdefault(assignment[doc.id], []).append(doc)
    return {
        name: Corpus(documents=tuple(docs), provenance=corpus.provenance)
        for name, docs in buckets.items()
    }
