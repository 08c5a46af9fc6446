"""Backend access: completion, hierarchical classification, topic discovery,
and embeddings, with a deterministic mock backend whose injectable biases make
the robustness suite testable offline."""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .corpus import Corpus, ProcessedDocument
from .errors import (
    BackendError,
    RateLimited,
    TransportError,
    Timeout,
    UnknownLabel,
    UnparseableResponse,
)
from .prompting import PromptSpec, attach_document, build_prompt, prompt_hash
from .schema import ClassSchema, Topic, TopicSet, make_topic_set

MOCK_EMBED_DIM = 256
MOCK_EMBED_PROVIDER = "mock-hash-256"


# -- configuration --------------------------------------------------------

@dataclass(frozen=True)
class MockRule:
    pattern: str                 # case-insensitive substring matched in the doc window
    parent: str                  # emitted label (an external alias in normal use)
    child: Optional[str] = None
    # When set, the rule only fires if this substring is present anywhere in
    # the rendered prompt. This models a backend that can only use a class
    # whose definition actually describes it, and makes prompt ablation
    # observable under the mock.
    requires_in_prompt: Optional[str] = None


@dataclass(frozen=True)
class MockFallback:
    mode: str = "fixed_label"    # fixed_label | last_example_label | first_token_label
    label: str = "UNMATCHED"
    child: Optional[str] = None


@dataclass(frozen=True)
class MockFlipRule:
    doc_ids: tuple[str, ...]
    parent: str
    child: Optional[str] = None


@dataclass(frozen=True)
class MockProfile:
    keyword_rules: tuple[MockRule, ...] = ()
    fallback: MockFallback = MockFallback()
    prefix_fraction: float = 1.0  # portion of the document the mock "reads"
    flip_rule: Optional[MockFlipRule] = None

    def __post_init__(self):
        if not 0 < self.prefix_fraction <= 1:
            raise ValueError("prefix_fraction must be in (0, 1]")
        for rule in self.keyword_rules:
            if not rule.pattern:
                raise ValueError("mock rule patterns must be non-empty")


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"           # mock | http
    endpoint: str = ""
    model_id: str = "mock"
    temperature: float = 0.0
    timeout: float = 30.0
    retry_limit: int = 2
    mock_profile: MockProfile = field(default_factory=MockProfile)

    @property
    def backend_id(self) -> str:
        return f"{self.kind}:{self.model_id}"


def load_mock_profile(path: str) -> MockProfile:
    with open(path, "rb") as fh:
        obj = tomllib.load(fh)
    rules = tuple(
        MockRule(
            pattern=r["pattern"],
            parent=r["parent"],
            child=r.get("child"),
            requires_in_prompt=r.get("requires_in_prompt"),
        )
        for r in obj.get("rules", [])
    )
    fb = obj.get("fallback", {})
    flip = obj.get("flip")
    return MockProfile(
        keyword_rules=rules,
        fallback=MockFallback(
            mode=fb.get("mode", "fixed_label"),
            label=fb.get("label", "UNMATCHED"),
            child=fb.get("child"),
        ),
        prefix_fraction=float(obj.get("read_window", {}).get("prefix_fraction", 1.0)),
        flip_rule=MockFlipRule(
            doc_ids=tuple(flip["doc_ids"]), parent=flip["parent"], child=flip.get("child")
        ) if flip else None,
    )


# -- results --------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationResult:
    doc_id: str
    parent: str                   # internal class name
    child: Optional[str]          # internal child name, if any
    raw_response: str
    prompt_hash: str
    backend_id: str
    latency: float = 0.0


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    dim: int
    provider_id: str


# -- prompt parsing shared by the mock -------------------------------------

_DOC_ID_RE = re.compile(r"^Document ID: (.*)$", re.MULTILINE)
_DOC_BLOCK_RE = re.compile(r"\nDocument:\n(.*?)(?:\nRespond with|\Z)", re.DOTALL)
_EXAMPLE_LABEL_RE = re.compile(r"^Label: (\{.*\})$", re.MULTILINE)
_CANDIDATES_RE = re.compile(r"^Candidates: (.*)$", re.MULTILINE)


def _extract_document(prompt: str) -> str:
    m = _DOC_BLOCK_RE.search(prompt)
    return m.group(1).strip() if m else ""


def _extract_doc_id(prompt: str) -> Optional[str]:
    m = _DOC_ID_RE.search(prompt)
    return m.group(1).strip() if m else None


def _extract_example_labels(prompt: str) -> list[dict]:
    labels = []
    for m in _EXAMPLE_LABEL_RE.finditer(prompt):
        try:
            labels.append(json.loads(m.group(1)))
        except json.JSONDecodeError:
            continue
    return labels


# -- backends -------------------------------------------------------------

class MockBackend:
    """Deterministic rule-table backend.

    With no flip rule configured, responses are a pure function of the prompt
    text and profile. The flip rule deliberately breaks statelessness for
    fault injection: listed documents get the alternate label on every second
    call (per-document call parity stands in for run parity).
    """

    def __init__(self, config: BackendConfig):
        self.config = config
        self.profile = config.mock_profile
        self._flip_counts: dict[str, int] = {}
        self._lock = threading.Lock()

    def complete(self, prompt: str) -> str:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        if '"topic"' in prompt:
            return self._topic_response(prompt)
        if _CANDIDATES_RE.search(prompt):
            return self._judge_response(prompt)
        return self._classify_response(prompt)

    # The mock only "reads" the leading fraction of the document, which lets
    # tests plant positional blind spots.
    def _window(self, text: str) -> str:
        words = text.split()
        keep = max(1, math.ceil(self.profile.prefix_fraction * len(words)))
        return " ".join(words[:keep])

    def _match_rule(self, doc_text: str, prompt: str) -> Optional[MockRule]:
        window = self._window(doc_text).casefold()
        prompt_fold = prompt.casefold()
        for rule in self.profile.keyword_rules:
            if rule.requires_in_prompt and rule.requires_in_prompt.casefold() not in prompt_fold:
                continue
            if rule.pattern.casefold() in window:
                return rule
        return None

    def _fallback_label(self, doc_text: str, prompt: str) -> tuple[str, Optional[str]]:
        fb = self.profile.fallback
        if fb.mode == "last_example_label":
            labels = _extract_example_labels(prompt)
            if labels:
                last = labels[-1]
                return last.get("parent", fb.label), last.get("child")
            return fb.label, fb.child
        if fb.mode == "first_token_label":
            words = doc_text.split()
            return (words[0] if words else fb.label), None
        return fb.label, fb.child

    def _classify_response(self, prompt: str) -> str:
        doc_text = _extract_document(prompt)
        rule = self._match_rule(doc_text, prompt)
        if rule is not None:
            parent, child = rule.parent, rule.child
        else:
            parent, child = self._fallback_label(doc_text, prompt)
        flip = self.profile.flip_rule
        if flip is not None:
            doc_id = _extract_doc_id(prompt)
            if doc_id is not None and doc_id in flip.doc_ids:
                with self._lock:
                    self._flip_counts[doc_id] = self._flip_counts.get(doc_id, 0) + 1
                    count = self._flip_counts[doc_id]
                if count % 2 == 0:
                    parent, child = flip.parent, flip.child
        payload = {"parent": parent}
        if child is not None:
            payload["child"] = child
        return json.dumps(payload)

    def _topic_response(self, prompt: str) -> str:
        doc_text = _extract_document(prompt)
        rule = self._match_rule(doc_text, prompt)
        topic = rule.parent if rule is not None else self.profile.fallback.label
        return json.dumps({"topic": topic})

    def _judge_response(self, prompt: str) -> str:
        m = _CANDIDATES_RE.search(prompt)
        candidates = [c.strip() for c in m.group(1).split("|")]
        doc_text = _extract_document(prompt)
        rule = self._match_rule(doc_text, prompt)
        if rule is not None and rule.parent in candidates:
            winner = rule.parent
        else:
            winner = candidates[0]
        return json.dumps({"winner": winner})


class HttpBackend:
    """Minimal chat-completion-style JSON POST adapter."""

    def __init__(self, config: BackendConfig):
        import httpx

        self.config = config
        headers = {}
        api_key = os.environ.get("TAXONOMIST_API_KEY")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(timeout=config.timeout, headers=headers)

    def complete(self, prompt: str) -> str:
        import httpx

        if not prompt:
            raise ValueError("prompt must be non-empty")
        payload = {
            "model": self.config.model_id,
            "temperature": self.config.temperature,
            "prompt": prompt,
        }
        last_exc: Exception = TransportError("no attempt made")
        for _ in range(self.config.retry_limit + 1):
            try:
                resp = self._client.post(self.config.endpoint, json=payload)
            except httpx.TimeoutException as exc:
                last_exc = Timeout(str(exc))
                continue
            except httpx.HTTPError as exc:
                last_exc = TransportError(str(exc))
                continue
            if resp.status_code == 429:
                last_exc = RateLimited("backend rate-limited the request")
                continue
            if resp.status_code >= 400:
                raise TransportError(f"backend returned HTTP {resp.status_code}")
            try:
                return resp.json()["text"]
            except (KeyError, ValueError) as exc:
                raise UnparseableResponse(resp.text) from exc
        raise last_exc


def get_backend(config: BackendConfig):
    if config.kind == "mock":
        return MockBackend(config)
    if config.kind == "http":
        return HttpBackend(config)
    raise BackendError(f"unknown backend kind {config.kind!r}")


def complete(prompt: str, config: BackendConfig) -> str:
    """One-shot completion against a fresh backend instance."""
    return get_backend(config).complete(prompt)


# -- response parsing -----------------------------------------------------

_JSON_OBJ_RE = re.compile(r"\{[^{}]*\}")


def extract_last_json(raw: str) -> dict:
    """Pull the last JSON object out of a response that may carry CoT prose."""
    matches = _JSON_OBJ_RE.findall(raw)
    for candidate in reversed(matches):
        try:
            obj = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    raise UnparseableResponse(raw)


def parse_classification(raw: str, schema: ClassSchema, doc_id: str,
                         prompt_digest: str, backend_id: str,
                         latency: float = 0.0) -> ClassificationResult:
    obj = extract_last_json(raw)
    if "parent" not in obj:
        raise UnparseableResponse(raw)
    alias_map = schema.alias_to_internal()
    parent_alias = str(obj["parent"])
    if parent_alias not in alias_map:
        raise UnknownLabel(parent_alias)
    parent = alias_map[parent_alias]
    parent_def = schema.parent(parent)
    if parent_def is None:
        # alias resolved to a child class; the output grammar wants a parent
        raise UnknownLabel(parent_alias)
    child = None
    if obj.get("child") is not None:
        child_alias = str(obj["child"])
        child_names = {c.internal_name for c in parent_def.children}
        if child_alias not in alias_map or alias_map[child_alias] not in child_names:
            raise UnknownLabel(child_alias)
        child = alias_map[child_alias]
    return ClassificationResult(
        doc_id=doc_id,
        parent=parent,
        child=child,
        raw_response=raw,
        prompt_hash=prompt_digest,
        backend_id=backend_id,
        latency=latency,
    )


# -- classification -------------------------------------------------------

def make_classifier(schema: ClassSchema, spec: PromptSpec, config: BackendConfig
                    ) -> Callable[[ProcessedDocument], ClassificationResult]:
    """Bind (schema, prompt, backend) once; returns doc -> ClassificationResult.

    Rendering happens a single time, so batch loops stay cheap.
    """
    base = build_prompt(schema, spec)
    digest = spec.hash or prompt_hash(schema, spec)
    backend = get_backend(config)

    def classify_fn(doc: ProcessedDocument) -> ClassificationResult:
        prompt = attach_document(base, doc.id, doc.text)
        start = time.perf_counter()
        raw = backend.complete(prompt)
        latency = time.perf_counter() - start
        return parse_classification(raw, schema, doc.id, digest, config.backend_id, latency)

    return classify_fn


def classify(doc: ProcessedDocument, spec: PromptSpec, schema: ClassSchema,
             config: BackendConfig) -> ClassificationResult:
    return make_classifier(schema, spec, config)(doc)


def classify_corpus(corpus: Corpus, spec: PromptSpec, schema: ClassSchema,
                    config: BackendConfig, workers: int = 1) -> list[ClassificationResult]:
    """Classify every document; results come back in corpus order regardless
    of worker scheduling."""
    classify_fn = make_classifier(schema, spec, config)
    if workers <= 1:
        return [classify_fn(doc) for doc in corpus.documents]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        by_id = dict(zip(corpus.ids(), pool.map(classify_fn, corpus.documents)))
    return [by_id[doc.id] for doc in corpus.documents]


def evaluate_prompt(schema: ClassSchema, spec: PromptSpec, golden, config: BackendConfig
                    ) -> float:
    """Validity score V(P): macro-F1 of the prompt against a golden set."""
    from .metrics import score_labels

    classify_fn = make_classifier(schema, spec, config)
    truth, predicted = [], []
    for entry in golden.entries:
        doc = ProcessedDocument(id=entry.doc_id, source_id=entry.doc_id, text=entry.text)
        result = classify_fn(doc)
        truth.append(entry.parent_label)
        predicted.append(result.parent)
    return score_labels(truth, predicted, schema.parent_names()).macro_f1


# -- topic discovery ------------------------------------------------------

DEFAULT_TOPIC_PROMPT = (
    "Read the document and name the single theme it is mostly about. "
    "Invent a short theme name; do not use any predefined category list."
)

TOPIC_INSTRUCTION = 'Respond with a single-line JSON object {"topic": "<name>"}.'


def discover_topics(corpus: Corpus, topic_prompt: str, max_topics: int,
                    config: BackendConfig) -> tuple[TopicSet, dict[str, str]]:
    """Unconstrained per-document topic elicitation.

    Topic names are deduplicated case-insensitively. If the backend proposes
    more than `max_topics` distinct names, the most frequent `max_topics - 1`
    are kept and the remainder collapse into an "other" bucket.
    """
    if max_topics < 1:
        raise ValueError("max_topics must be >= 1")
    backend = get_backend(config)
    raw_assign: dict[str, str] = {}
    canonical: dict[str, str] = {}  # casefolded -> first-seen casing
    order: list[str] = []
    for doc in corpus.documents:
        prompt = f"{topic_prompt}\n\nDocument:\n{doc.text}\n{TOPIC_INSTRUCTION}"
        obj = extract_last_json(backend.complete(prompt))
        if "topic" not in obj:
            raise UnparseableResponse(json.dumps(obj))
        name = str(obj["topic"]).strip()
        key = name.casefold()
        if key not in canonical:
            canonical[key] = name
            order.append(name)
        raw_assign[doc.id] = canonical[key]

    if len(order) > max_topics:
        freq = {name: 0 for name in order}
        for name in raw_assign.values():
            freq[name] += 1
        keep = sorted(order, key=lambda n: (-freq[n], order.index(n)))[: max_topics - 1]
        kept = set(keep)
        assign = {d: (t if t in kept else "other") for d, t in raw_assign.items()}
        topics = [Topic(name=n) for n in order if n in kept] + [Topic(name="other")]
    else:
        assign = raw_assign
        topics = [Topic(name=n) for n in order]
    return make_topic_set(topics), assign


# -- embeddings -----------------------------------------------------------

def embed(text: str, config: BackendConfig) -> EmbeddingVector:
    """Deterministic hashed bag-of-words embedding (mock backend only)."""
    if not text:
        raise ValueError("text must be non-empty")
    if config.kind != "mock":
        raise BackendError("embeddings are only available on the mock backend")
    vec = np.zeros(MOCK_EMBED_DIM)
    for token in text.casefold().split():
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        idx = int.from_bytes(digest[:4], "big") % MOCK_EMBED_DIM
        vec[idx] += 1.0
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec = vec / norm
    return EmbeddingVector(values=vec, dim=MOCK_EMBED_DIM, provider_id=MOCK_EMBED_PROVIDER)
