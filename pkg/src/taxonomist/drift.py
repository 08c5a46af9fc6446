"""Post-deployment monitoring: distributional drift with p-charts, centroid
cohesion, novelty scanning, golden-set tracking, and the combined verdict."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .corpus import Corpus, ProcessedDocument
from .errors import (
    EmptyGoldenSet,
    MissingCentroid,
    ProviderMismatch,
    ZeroCentroid,
)
from .fewshot import cosine_similarity
from .gateway import (
    BackendConfig,
    ClassificationResult,
    DEFAULT_TOPIC_PROMPT,
    EmbeddingVector,
    discover_topics,
    embed,
)
from .metrics import MetricsReport, score_labels
from .schema import ClassSchema
from .stats import (
    ClassDistribution,
    DEFAULT_ALPHA,
    TestResult,
    chi2_homogeneity,
    class_distribution,
)


@dataclass(frozen=True)
class Window:
    id: str
    start: str  # RFC3339
    end: str
    results: tuple[ClassificationResult, ...]
    distribution: ClassDistribution

    def to_dict(self) -> dict:
        return {
            "id": self.id, "start": self.start, "end": self.end,
            "distribution": self.distribution.to_dict(),
            "results": [
                {"doc_id": r.doc_id, "parent": r.parent, "child": r.child}
                for r in self.results
            ],
        }


def make_window(window_id: str, start: str, end: str,
                results: Sequence[ClassificationResult],
                schema: ClassSchema) -> Window:
    return Window(
        id=window_id, start=start, end=end, results=tuple(results),
        distribution=class_distribution(results, schema),
    )


def window_from_dict(obj: dict) -> Window:
    dist = obj["distribution"]
    results = tuple(
        ClassificationResult(
            doc_id=r["doc_id"], parent=r["parent"], child=r.get("child"),
            raw_response=r.get("raw_response", ""),
            prompt_hash=r.get("prompt_hash", ""),
            backend_id=r.get("backend_id", ""),
        )
        for r in obj.get("results", ())
    )
    return Window(
        id=obj["id"], start=obj.get("start", ""), end=obj.get("end", ""),
        results=results,
        distribution=ClassDistribution(
            labels=tuple(dist["labels"]), counts=tuple(dist["counts"]),
        ),
    )


# -- distributional drift --------------------------------------------------

@dataclass(frozen=True)
class PChartAlert:
    class_name: str
    proportion: float
    lower: float
    upper: float

    def to_dict(self) -> dict:
        return {
            "class_name": self.class_name, "proportion": self.proportion,
            "lower": self.lower, "upper": self.upper,
        }


def p_chart_limits(p_bar: float, n: int, sigmas: float = 3.0) -> tuple[float, float]:
    half_width = sigmas * math.sqrt(p_bar * (1 - p_bar) / n)
    return max(0.0, p_bar - half_width), min(1.0, p_bar + half_width)


def distributional_drift(ref: Window, cur: Window, alpha: float = DEFAULT_ALPHA
                         ) -> tuple[TestResult, list[PChartAlert]]:
    """Chi-squared homogeneity between the two windows plus 3-sigma p-chart
    alerts per class, with center lines taken from the reference window."""
    chi2 = chi2_homogeneity(ref.distribution, cur.distribution, alpha=alpha)
    alerts: list[PChartAlert] = []
    n_cur = cur.distribution.total
    ref_props = ref.distribution.proportions()
    cur_props = cur.distribution.proportions()
    if n_cur > 0:
        for name, p_bar, p_cur in zip(ref.distribution.labels, ref_props, cur_props):
            lower, upper = p_chart_limits(p_bar, n_cur)
            if not lower <= p_cur <= upper:
                alerts.append(PChartAlert(name, p_cur, lower, upper))
    return chi2, alerts


# -- semantic cohesion -----------------------------------------------------

@dataclass(frozen=True)
class ClassCentroid:
    class_name: str
    vector: EmbeddingVector
    member_count: int
    frozen_at: str = ""


def compute_centroids(stable: Window, embeddings: dict[str, EmbeddingVector],
                      min_members: int = 1
                      ) -> tuple[dict[str, ClassCentroid], list[str]]:
    """Normalized mean member embedding per class; classes with fewer than
    `min_members` members are omitted and listed."""
    members: dict[str, list[EmbeddingVector]] = {}
    for r in stable.results:
        if r.doc_id not in embeddings:
            continue
        members.setdefault(r.parent, []).append(embeddings[r.doc_id])
    centroids: dict[str, ClassCentroid] = {}
    omitted: list[str] = []
    for name, vecs in sorted(members.items()):
        if len({v.provider_id for v in vecs}) > 1 or len({v.dim for v in vecs}) > 1:
            raise ProviderMismatch(f"mixed embedding providers for class {name!r}")
        if len(vecs) < min_members:
            omitted.append(name)
            continue
        mean = np.mean([v.values for v in vecs], axis=0)
        norm = np.linalg.norm(mean)
        if norm == 0:
            raise ZeroCentroid(name)
        centroids[name] = ClassCentroid(
            class_name=name,
            vector=EmbeddingVector(values=mean / norm, dim=vecs[0].dim,
                                   provider_id=vecs[0].provider_id),
            member_count=len(vecs),
            frozen_at=stable.id,
        )
    return centroids, omitted


def cohesion(new_docs: Sequence[tuple[str, str]],
             centroids: dict[str, ClassCentroid],
             embeddings: dict[str, EmbeddingVector]) -> dict[str, float]:
    """Mean cosine distance (1 - cosine) of newly assigned documents from
    their class centroid. Classes with no new documents are absent from the
    result, not reported as zero."""
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for doc_id, class_name in new_docs:
        if class_name not in centroids:
            raise MissingCentroid(class_name)
        dist = 1.0 - cosine_similarity(embeddings[doc_id], centroids[class_name].vector)
        sums[class_name] = sums.get(class_name, 0.0) + dist
        counts[class_name] = counts.get(class_name, 0) + 1
    return {name: sums[name] / counts[name] for name in sums}


# -- novelty ---------------------------------------------------------------

def novelty_scan(recent: Corpus, schema: ClassSchema, tau: float,
                 config: BackendConfig, max_topics: int = 10,
                 topic_prompt: str = DEFAULT_TOPIC_PROMPT
                 ) -> list[tuple[str, float]]:
    """Emergent topics whose best similarity to every class definition falls
    strictly below `tau` (a conceptual gap in the schema)."""
    if not 0 < tau < 1:
        raise ValueError("tau must be in (0, 1)")
    topics, _assign = discover_topics(recent, topic_prompt, max_topics, config)
    class_vecs = [
        embed(f"{cls.internal_name}. {cls.definition}", config)
        for _, cls in schema.walk()
    ]
    novel: list[tuple[str, float]] = []
    for topic in topics.topics:
        text = topic.description or topic.name
        topic_vec = embed(text, config)
        best = max(cosine_similarity(topic_vec, cv) for cv in class_vecs)
        if best < tau:
            novel.append((topic.name, best))
    return novel


# -- golden-set tracking ---------------------------------------------------

def golden_eval(golden, classify_fn: Callable[[ProcessedDocument], ClassificationResult],
                parent_labels: Sequence[str]) -> MetricsReport:
    """Standard metrics of a classifier against the expert-labeled set.

    Accuracy is exact-match over (parent, child) pairs; per-class metrics are
    one-vs-rest over parents.
    """
    if not golden.entries:
        raise EmptyGoldenSet("golden set has no entries")
    truth, predicted = [], []
    for entry in golden.entries:
        doc = ProcessedDocument(id=entry.doc_id, source_id=entry.doc_id, text=entry.text)
        result = classify_fn(doc)
        truth.append((entry.parent_label, entry.child_label))
        predicted.append((result.parent, result.child))
    return score_labels(truth, predicted, list(parent_labels))


# -- combined verdict ------------------------------------------------------

@dataclass(frozen=True)
class DriftThresholds:
    alpha: float = DEFAULT_ALPHA
    novelty_tau: float = 0.35
    erosion_margin: float = 0.1
    erosion_windows: int = 2  # consecutive exceedances required ("sustained")
    golden_drop: float = 0.1


@dataclass(frozen=True)
class DriftReport:
    verdict: str  # stable | distribution_shift | cohesion_erosion | conceptual_gap | degraded
    chi2: Optional[TestResult]
    pchart_alerts: tuple[PChartAlert, ...]
    cohesion: dict[str, float]
    novel_topics: tuple[tuple[str, float], ...]
    golden_trend: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "chi2": self.chi2.to_dict() if self.chi2 else None,
            "pchart_alerts": [a.to_dict() for a in self.pchart_alerts],
            "cohesion": dict(sorted(self.cohesion.items())),
            "novel_topics": [[t, s] for t, s in self.novel_topics],
            "golden_trend": list(self.golden_trend),
        }


def evaluate_drift(chi2: Optional[TestResult],
                   pchart_alerts: Sequence[PChartAlert] = (),
                   cohesion_now: Optional[dict[str, float]] = None,
                   cohesion_history: Optional[dict[str, Sequence[float]]] = None,
                   baseline_cohesion: Optional[dict[str, float]] = None,
                   novel_topics: Sequence[tuple[str, float]] = (),
                   golden_trend: Sequence[float] = (),
                   thresholds: DriftThresholds = DriftThresholds()) -> DriftReport:
    """Combine component signals into one verdict.

    Precedence: degraded > conceptual_gap > cohesion_erosion >
    distribution_shift > stable. Lagging but definitive signals outrank
    leading ones. This function is pure: the verdict is replayable from the
    serialized report.
    """
    verdict = "stable"
    if chi2 is not None and (chi2.significant or pchart_alerts):
        verdict = "distribution_shift"

    eroded = False
    if baseline_cohesion and cohesion_history:
        for name, series in cohesion_history.items():
            if name not in baseline_cohesion:
                continue
            limit = baseline_cohesion[name] + thresholds.erosion_margin
            trailing = 0
            for value in reversed(list(series)):
                if value > limit:
                    trailing += 1
                else:
                    break
            if trailing >= thresholds.erosion_windows:
                eroded = True
                break
    if eroded:
        verdict = "cohesion_erosion"

    if novel_topics:
        verdict = "conceptual_gap"

    if len(golden_trend) >= 2:
        if max(golden_trend[:-1]) - golden_trend[-1] > thresholds.golden_drop:
            verdict = "degraded"

    return DriftReport(
        verdict=verdict,
        chi2=chi2,
        pchart_alerts=tuple(pchart_alerts),
        cohesion=dict(cohesion_now or {}),
        novel_topics=tuple(novel_topics),
        golden_trend=tuple(golden_trend),
    )
