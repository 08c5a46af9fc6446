"""Sequence-robustness suite: batch shuffling, intra-document truncation,
few-shot permutation stability, adversarial input filtering, and the
nomenclature-obfuscation audit."""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .corpus import Corpus, ProcessedDocument
from .prompting import FewShotExample, permutations
from .schema import ClassSchema

Label = tuple[str, Optional[str]]


def _label(result) -> Label:
    if hasattr(result, "parent"):
        return (result.parent, result.child)
    if isinstance(result, tuple):
        return result
    return (result, None)


# -- Batch statelessness ---------------------------------------------------

@dataclass(frozen=True)
class ShuffleReport:
    inconsistency_count: int
    unstable_docs: dict[str, set[Label]]
    n_iter: int
    complete: bool = True

    def to_dict(self) -> dict:
        return {
            "inconsistency_count": self.inconsistency_count,
            "n_iter": self.n_iter,
            "complete": self.complete,
            "unstable_docs": {
                d: sorted(map(list, labels)) for d, labels in sorted(self.unstable_docs.items())
            },
        }


def test_statelessness(classify_fn: Callable[[ProcessedDocument], object],
                       test_set: Corpus, n_iter: int, seed: int = 0) -> ShuffleReport:
    """Classify the same documents across `n_iter` shuffled passes and count
    documents whose label set is not a singleton."""
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    rng = random.Random(seed)
    observed: dict[str, set[Label]] = {d.id: set() for d in test_set.documents}
    docs = list(test_set.documents)
    for _ in range(n_iter):
        rng.shuffle(docs)
        for doc in docs:
            observed[doc.id].add(_label(classify_fn(doc)))
    unstable = {d: labels for d, labels in observed.items() if len(labels) > 1}
    return ShuffleReport(
        inconsistency_count=len(unstable), unstable_docs=unstable, n_iter=n_iter,
    )


# -- Intra-document truncation --------------------------------------------

def truncate_prefix(text: str, p: float) -> str:
    words = text.split()
    drop = math.floor(p * len(words))
    return " ".join(words[drop:])


def truncate_suffix(text: str, p: float) -> str:
    words = text.split()
    drop = math.floor(p * len(words))
    return " ".join(words[: len(words) - drop]) if drop else " ".join(words)


def truncate_middle(text: str, p: float) -> str:
    """Remove a centered span, keeping the first and last ceil((1-p)/2 * n)
    words intact. Word order is never changed."""
    words = text.split()
    n = len(words)
    keep = math.ceil((1 - p) / 2 * n)
    if 2 * keep >= n:
        return " ".join(words)
    return " ".join(words[:keep] + words[n - keep:])


@dataclass(frozen=True)
class TruncationReport:
    i_prefix: int
    i_suffix: int
    i_middle: int
    p: float
    skipped: tuple[str, ...]
    per_doc: dict[str, dict[str, Label]]

    def to_dict(self) -> dict:
        return {
            "i_prefix": self.i_prefix,
            "i_suffix": self.i_suffix,
            "i_middle": self.i_middle,
            "p": self.p,
            "skipped": list(self.skipped),
            "per_doc": {
                d: {variant: list(lab) for variant, lab in variants.items()}
                for d, variants in sorted(self.per_doc.items())
            },
        }


def test_intradoc(classify_fn: Callable[[ProcessedDocument], object],
                  long_docs: Corpus, p: float, min_tokens: int = 60
                  ) -> TruncationReport:
    """Compare each document's baseline label against prefix-, suffix-, and
    middle-truncated variants; count mismatches per variant."""
    if not 0 < p < 1:
        raise ValueError("truncation proportion must be in (0, 1)")
    i_prefix = i_suffix = i_middle = 0
    skipped: list[str] = []
    per_doc: dict[str, dict[str, Label]] = {}
    for doc in long_docs.documents:
        if doc.token_estimate < min_tokens:
            skipped.append(doc.id)
            continue
        baseline = _label(classify_fn(doc))
        variants: dict[str, Label] = {"baseline": baseline}
        for name, truncate in (
            ("prefix", truncate_prefix),
            ("suffix", truncate_suffix),
            ("middle", truncate_middle),
        ):
            variant_doc = ProcessedDocument(
                id=doc.id, source_id=doc.source_id,
                text=truncate(doc.text, p),
                segment_index=doc.segment_index,
                token_estimate=doc.token_estimate,
            )
            variants[name] = _label(classify_fn(variant_doc))
        per_doc[doc.id] = variants
        if variants["prefix"] != baseline:
            i_prefix += 1
        if variants["suffix"] != baseline:
            i_suffix += 1
        if variants["middle"] != baseline:
            i_middle += 1
    return TruncationReport(
        i_prefix=i_prefix, i_suffix=i_suffix, i_middle=i_middle, p=p,
        skipped=tuple(skipped), per_doc=per_doc,
    )


# -- In-prompt permutation -------------------------------------------------

@dataclass(frozen=True)
class PermutationReport:
    i_prompt: int
    permutations_tested: int
    unstable_docs: dict[str, set[Label]]

    def to_dict(self) -> dict:
        return {
            "i_prompt": self.i_prompt,
            "permutations_tested": self.permutations_tested,
            "unstable_docs": {
                d: sorted(map(list, labels)) for d, labels in sorted(self.unstable_docs.items())
            },
        }


def test_inprompt(examples: Sequence[FewShotExample], test_set: Corpus,
                  classifier_for_order: Callable[[tuple[int, ...]], Callable],
                  cap: int = 120, seed: int = 0) -> PermutationReport:
    """Classify every test document under each (cap-bounded) example ordering
    and count documents whose label varies with the order.

    `classifier_for_order` maps a permutation of example indices to a
    document classifier built from the correspondingly reordered prompt.
    """
    if not examples:
        raise ValueError("need at least one few-shot example")
    perms = permutations(examples, cap=cap, seed=seed)
    observed: dict[str, set[Label]] = {d.id: set() for d in test_set.documents}
    for perm in perms:
        classify_fn = classifier_for_order(perm)
        for doc in test_set.documents:
            observed[doc.id].add(_label(classify_fn(doc)))
    unstable = {d: labels for d, labels in observed.items() if len(labels) > 1}
    return PermutationReport(
        i_prompt=len(unstable), permutations_tested=len(perms), unstable_docs=unstable,
    )


def classifier_factory(schema: ClassSchema, spec, config):
    """Convenience adapter for test_inprompt over a gateway-backed prompt."""
    from dataclasses import replace

    from .gateway import make_classifier

    def for_order(perm: tuple[int, ...]):
        return make_classifier(schema, replace(spec, example_order=perm, hash=None), config)

    return for_order


# -- Adversarial filtering -------------------------------------------------

DEFAULT_ADVERSARIAL_PHRASES = (
    "ignore previous instructions",
    "ignore all previous instructions",
    "disregard the above",
    "disregard previous instructions",
    "forget your instructions",
    "you are now",
    "new instructions:",
    "system prompt",
    "classify this as",
    "override your rules",
    "act as if",
    "do not follow the",
)


@dataclass(frozen=True)
class FilterOutcome:
    flagged: bool
    matches: tuple[tuple[str, int, int], ...] = ()  # (phrase, start, end)

    def to_dict(self) -> dict:
        return {"flagged": self.flagged, "matches": [list(m) for m in self.matches]}


def filter_adversarial(doc: ProcessedDocument,
                       phrase_list: Sequence[str] = DEFAULT_ADVERSARIAL_PHRASES
                       ) -> FilterOutcome:
    """Flag documents containing known injection phrases; the document itself
    is never modified."""
    text = doc.text.casefold()
    matches: list[tuple[str, int, int]] = []
    for phrase in phrase_list:
        needle = phrase.casefold()
        start = 0
        while True:
            idx = text.find(needle, start)
            if idx < 0:
                break
            matches.append((phrase, idx, idx + len(needle)))
            start = idx + 1
    return FilterOutcome(flagged=bool(matches), matches=tuple(matches))


# -- Nomenclature obfuscation audit ---------------------------------------

@dataclass(frozen=True)
class Leak:
    internal_name: str
    artifact: str
    position: int

    def to_dict(self) -> dict:
        return {
            "internal_name": self.internal_name,
            "artifact": self.artifact,
            "position": self.position,
        }


def obfuscation_audit(schema: ClassSchema, artifacts: dict[str, str]) -> list[Leak]:
    """Scan user-facing artifacts for internal class names (case-insensitive,
    word-boundary). An empty list means the alias boundary held."""
    leaks: list[Leak] = []
    for _, cls in schema.walk():
        pattern = re.compile(
            r"\b" + re.escape(cls.internal_name) + r"\b", re.IGNORECASE
        )
        for artifact_name, text in artifacts.items():
            for m in pattern.finditer(text):
                leaks.append(Leak(
                    internal_name=cls.internal_name,
                    artifact=artifact_name,
                    position=m.start(),
                ))
    return leaks
