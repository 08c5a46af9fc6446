"""One-vs-rest classification metrics shared by the optimizer, few-shot
selection, and golden-set tracking."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: dict[str, ClassMetrics]
    total: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "total": self.total,
            "per_class": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for name, m in sorted(self.per_class.items())
            },
        }


def score_labels(truth: list, predicted: list, labels: list[str]) -> MetricsReport:
    """Per-class one-vs-rest precision/recall/F1 with macro averages.

    `truth` and `predicted` are parallel lists of labels (any hashable; for
    hierarchical pairs pass (parent, child) tuples for accuracy but per-class
    metrics are computed over `labels`, usually parents).
    """
    if len(truth) != len(predicted):
        raise ValueError("truth and prediction lists differ in length")
    n = len(truth)
    exact = sum(1 for t, p in zip(truth, predicted) if t == p)
    per_class: dict[str, ClassMetrics] = {}
    for label in labels:
        tp = sum(1 for t, p in zip(truth, predicted) if _head(t) == label and _head(p) == label)
        fp = sum(1 for t, p in zip(truth, predicted) if _head(t) != label and _head(p) == label)
        fn = sum(1 for t, p in zip(truth, predicted) if _head(t) == label and _head(p) != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = ClassMetrics(precision, recall, f1, support=tp + fn)
    k = len(labels)
    return MetricsReport(
        accuracy=exact / n if n else 0.0,
        macro_precision=sum(m.precision for m in per_class.values()) / k if k else 0.0,
        macro_recall=sum(m.recall for m in per_class.values()) / k if k else 0.0,
        macro_f1=sum(m.f1 for m in per_class.values()) / k if k else 0.0,
        per_class=per_class,
        total=n,
    )


def _head(label):
    """Parent component of a label that may be a (parent, child) pair."""
    if isinstance(label, tuple):
        return label[0]
    return label
