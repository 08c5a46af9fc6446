"""Preference capture, embedding-based example ranking, KL-constrained
few-shot selection, and reviewer-agreement scoring."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from .corpus import Corpus, ProcessedDocument
from .errors import (
    DimensionMismatch,
    DuplicateJudgment,
    InsufficientOverlap,
    LabelEqualsLoser,
    MissingDescription,
    WinnerNotCandidate,
    ZeroVector,
)
from .gateway import (
    BackendConfig,
    EmbeddingVector,
    classify_corpus,
    embed,
    evaluate_prompt,
    extract_last_json,
    get_backend,
)
from .prompting import FewShotExample, PromptSpec
from .schema import ClassSchema
from .stats import ClassDistribution, class_distribution, kl_divergence

DEFAULT_EPSILON = 0.1  # nats; config-exposed tolerance on distribution shift


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    if u.dim != v.dim or u.provider_id != v.provider_id:
        raise DimensionMismatch(
            f"cannot compare {u.provider_id}/{u.dim} with {v.provider_id}/{v.dim}"
        )
    nu = np.linalg.norm(u.values)
    nv = np.linalg.norm(v.values)
    if nu == 0 or nv == 0:
        raise ZeroVector("cosine undefined for a zero vector")
    return float(np.dot(u.values, v.values) / (nu * nv))


@dataclass(frozen=True)
class RankedExample:
    doc_id: str
    class_name: str
    similarity: float


def rank_examples(candidates: Sequence[tuple[ProcessedDocument, str]],
                  class_descriptions: dict[str, str],
                  config: BackendConfig) -> list[RankedExample]:
    """Score each candidate against its own class description and sort by
    similarity descending (doc_id breaks ties)."""
    desc_vecs: dict[str, EmbeddingVector] = {}
    ranked: list[RankedExample] = []
    for doc, label in candidates:
        if label not in class_descriptions:
            raise MissingDescription(label)
        if label not in desc_vecs:
            desc_vecs[label] = embed(class_descriptions[label], config)
        sim = cosine_similarity(embed(doc.text, config), desc_vecs[label])
        ranked.append(RankedExample(doc_id=doc.id, class_name=label, similarity=sim))
    return sorted(ranked, key=lambda r: (-r.similarity, r.doc_id))


# -- preference store -----------------------------------------------------

@dataclass(frozen=True)
class PreferencePair:
    doc_id: str
    y_w: str
    y_l: str
    reviewer: str
    source: str  # human | judge
    round: int = 1
    created_at: str = ""

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id, "y_w": self.y_w, "y_l": self.y_l,
            "reviewer": self.reviewer, "source": self.source,
            "round": self.round, "created_at": self.created_at,
        }


class PreferenceStore:
    """Append-only JSONL store of preference pairs."""

    def __init__(self, path: str):
        self.path = path

    def load(self) -> list[PreferencePair]:
        if not os.path.exists(self.path):
            return []
        pairs = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    pairs.append(PreferencePair(**obj))
        return pairs

    def append(self, pair: PreferencePair) -> None:
        os.makedirs(os.path.dirname(self.path) or ".", exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(pair.to_dict(), sort_keys=True) + "\n")


def record_preference(store: PreferenceStore, doc: ProcessedDocument, y_w: str,
                      y_l: str, reviewer: str, source: str = "human",
                      round: int = 1) -> PreferencePair:
    if y_w == y_l:
        raise LabelEqualsLoser("winner and loser labels are identical")
    for existing in store.load():
        if (existing.doc_id, existing.reviewer, existing.round) == (doc.id, reviewer, round):
            raise DuplicateJudgment(
                f"{reviewer!r} already judged {doc.id!r} in round {round}"
            )
    pair = PreferencePair(
        doc_id=doc.id, y_w=y_w, y_l=y_l, reviewer=reviewer, source=source,
        round=round, created_at=datetime.now(timezone.utc).isoformat(),
    )
    store.append(pair)
    return pair


# -- constitutional judge --------------------------------------------------

@dataclass(frozen=True)
class Constitution:
    principles: tuple[str, ...]
    version: int = 1


def load_constitution(path: str, version: int = 1) -> Constitution:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    principles = tuple(p.strip() for p in text.split("\n\n") if p.strip())
    return Constitution(principles=principles, version=version)


JUDGE_INSTRUCTION = 'Respond with a single-line JSON object {"winner": "<candidate>"}.'


def judge_preference(doc: ProcessedDocument, candidates: Sequence[str],
                     constitution: Constitution, config: BackendConfig,
                     schema: Optional[ClassSchema] = None,
                     reviewer: str = "judge") -> PreferencePair:
    """Ask a judge backend to pick between exactly two candidate labels.

    Candidates are internal names when `schema` is given (the judge sees
    aliases); otherwise they are shown verbatim.
    """
    if len(candidates) != 2:
        raise ValueError("the judge takes exactly two candidates")
    if not constitution.principles:
        raise ValueError("constitution must not be empty")
    alias_of = schema.internal_to_alias() if schema else {}
    shown = [alias_of.get(c, c) for c in candidates]
    prompt = (
        "Principles:\n"
        + "\n".join(f"- {p}" for p in constitution.principles)
        + f"\n\nDocument:\n{doc.text}\n"
        + f"Candidates: {shown[0]} | {shown[1]}\n"
        + JUDGE_INSTRUCTION
    )
    raw = get_backend(config).complete(prompt)
    obj = extract_last_json(raw)
    winner_shown = str(obj.get("winner", ""))
    if winner_shown not in shown:
        raise WinnerNotCandidate(winner_shown, shown)
    winner = candidates[shown.index(winner_shown)]
    loser = candidates[1 - shown.index(winner_shown)]
    return PreferencePair(
        doc_id=doc.id, y_w=winner, y_l=loser, reviewer=reviewer, source="judge",
        created_at=datetime.now(timezone.utc).isoformat(),
    )


# -- reviewer agreement ----------------------------------------------------

def cohen_kappa(a: dict[str, str], b: dict[str, str]) -> float:
    shared = sorted(set(a) & set(b))
    if len(shared) < 2:
        raise InsufficientOverlap(f"only {len(shared)} shared documents")
    n = len(shared)
    po = sum(1 for d in shared if a[d] == b[d]) / n
    labels = {a[d] for d in shared} | {b[d] for d in shared}
    pe = sum(
        (sum(1 for d in shared if a[d] == lab) / n)
        * (sum(1 for d in shared if b[d] == lab) / n)
        for lab in labels
    )
    if pe == 1.0:
        return 1.0 if po == 1.0 else 0.0
    return (po - pe) / (1 - pe)


@dataclass(frozen=True)
class AgreementReport:
    inter_rater: dict[tuple[str, str], float]
    intra_rater: dict[str, float]
    mean_inter: Optional[float]
    mean_intra: Optional[float]

    def to_dict(self) -> dict:
        return {
            "inter_rater": {f"{a}|{b}": k for (a, b), k in sorted(self.inter_rater.items())},
            "intra_rater": dict(sorted(self.intra_rater.items())),
            "mean_inter": self.mean_inter,
            "mean_intra": self.mean_intra,
        }


def agreement(judgments: dict[str, dict[str, str]],
              rounds: Optional[dict[str, list[dict[str, str]]]] = None
              ) -> AgreementReport:
    """Pairwise Cohen's kappa across reviewers plus per-reviewer kappa across
    repeated rounds."""
    reviewers = sorted(judgments)
    inter: dict[tuple[str, str], float] = {}
    for i, a in enumerate(reviewers):
        for b in reviewers[i + 1:]:
            inter[(a, b)] = cohen_kappa(judgments[a], judgments[b])
    intra: dict[str, float] = {}
    for reviewer, repeat in (rounds or {}).items():
        if len(repeat) < 2:
            continue
        kappas = [
            cohen_kappa(repeat[i], repeat[i + 1]) for i in range(len(repeat) - 1)
        ]
        intra[reviewer] = sum(kappas) / len(kappas)
    return AgreementReport(
        inter_rater=inter,
        intra_rater=intra,
        mean_inter=sum(inter.values()) / len(inter) if inter else None,
        mean_intra=sum(intra.values()) / len(intra) if intra else None,
    )


# -- KL-constrained few-shot selection ------------------------------------

@dataclass(frozen=True)
class SelectionPoint:
    k: int
    validity: float
    kl: float
    feasible: bool

    def to_dict(self) -> dict:
        return {"k": self.k, "validity": self.validity, "kl": self.kl,
                "feasible": self.feasible}


@dataclass(frozen=True)
class SelectionReport:
    points: tuple[SelectionPoint, ...]
    k_star: int
    epsilon: float

    def to_dict(self) -> dict:
        return {
            "k_star": self.k_star,
            "epsilon": self.epsilon,
            "points": [p.to_dict() for p in self.points],
        }


def select_k(ranked: Sequence[RankedExample],
             example_texts: dict[str, tuple[str, str, Optional[str]]],
             validation, baseline: ClassDistribution, epsilon: float,
             config: BackendConfig, schema: ClassSchema, base_spec: PromptSpec,
             monitoring_corpus: Corpus,
             smoothing: Optional[float] = None) -> tuple[int, list[FewShotExample], SelectionReport]:
    """Sweep k = 0..|ranked| few-shot examples and pick the k maximizing
    validation macro-F1 subject to the KL drift constraint against the
    baseline distribution. Ties resolve to the smallest k.

    `example_texts` maps ranked doc_id -> (text, parent, child).
    """
    kl_kwargs = {} if smoothing is None else {"smoothing": smoothing}
    points: list[SelectionPoint] = []
    specs: list[PromptSpec] = []
    for k in range(len(ranked) + 1):
        examples = []
        for r in ranked[:k]:
            text, parent, child = example_texts[r.doc_id]
            examples.append(FewShotExample(
                text=text, expected_parent=parent, expected_child=child,
                origin="preference",
            ))
        spec_k = replace(
            base_spec,
            examples=tuple(examples),
            example_order=tuple(range(len(examples))),
            hash=None,
        )
        specs.append(spec_k)
        validity = evaluate_prompt(schema, spec_k, validation, config)
        results = classify_corpus(monitoring_corpus, spec_k, schema, config)
        dist_k = class_distribution(results, schema)
        kl = kl_divergence(dist_k, baseline, **kl_kwargs)
        points.append(SelectionPoint(
            k=k, validity=validity, kl=kl, feasible=kl <= epsilon,
        ))

    feasible = [p for p in points if p.feasible]
    if not feasible:
        # k = 0 matches the baseline up to sampling noise; with the baseline
        # taken from the same zero-shot run, KL(0) is exactly 0.
        k_star = 0
    else:
        best = max(feasible, key=lambda p: p.validity)
        k_star = min(p.k for p in feasible if p.validity == best.validity)
    report = SelectionReport(points=tuple(points), k_star=k_star, epsilon=epsilon)
    return k_star, list(specs[k_star].examples), report
