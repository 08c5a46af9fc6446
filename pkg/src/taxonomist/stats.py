"""Statistical kernel: McNemar's paired test, chi-squared homogeneity, KL
divergence, and class-distribution vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy.stats import chi2 as _chi2_dist

from .errors import DegenerateTest, NoDiscordantPairs, UnsmoothedZero
from .schema import ClassSchema

DEFAULT_ALPHA = 0.05
DEFAULT_SMOOTHING = 0.5  # Jeffreys-style additive count smoothing


@dataclass(frozen=True)
class ClassDistribution:
    labels: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.counts):
            raise ValueError("labels and counts differ in length")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def proportions(self) -> list[float]:
        n = self.total
        return [c / n if n else 0.0 for c in self.counts]

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "counts": list(self.counts)}


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: int
    p_value: float
    significant: bool
    alpha: float = DEFAULT_ALPHA
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "significant": self.significant,
            "alpha": self.alpha,
            "note": self.note,
        }


def chi2_tail(statistic: float, df: int) -> float:
    """Upper-tail probability P[X >= statistic] for X ~ chi-squared(df)."""
    if statistic < 0:
        raise ValueError("statistic must be nonnegative")
    if df < 1:
        raise ValueError("df must be positive")
    return float(_chi2_dist.sf(statistic, df))


def mcnemar(paired: Sequence[tuple[bool, bool]], alpha: float = DEFAULT_ALPHA,
            continuity_correction: bool = False) -> TestResult:
    """Paired A/B comparison over shared documents.

    `paired` holds (A correct, B correct) flags per document. The statistic is
    (b - c)^2 / (b + c) over the discordant counts; the corrected variant
    (|b - c| - 1)^2 / (b + c) is available for small b + c.
    """
    b = sum(1 for a_ok, b_ok in paired if a_ok and not b_ok)
    c = sum(1 for a_ok, b_ok in paired if not a_ok and b_ok)
    if b + c == 0:
        raise NoDiscordantPairs("no discordant pairs; the test is undefined")
    if continuity_correction:
        statistic = (abs(b - c) - 1) ** 2 / (b + c)
    else:
        statistic = (b - c) ** 2 / (b + c)
    p = chi2_tail(statistic, 1)
    return TestResult(
        statistic=statistic, df=1, p_value=p,
        significant=p < alpha, alpha=alpha,
        note=f"b={b} c={c}",
    )


def chi2_homogeneity(a: ClassDistribution, b: ClassDistribution,
                     alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Homogeneity statistic sum (A_i - B_i)^2 / (A_i + B_i) over classes with
    any mass; empty classes drop out of the degrees of freedom.

    The two count vectors are treated as independent samples even when drawn
    from paired runs; see the note carried in the result.
    """
    if a.labels != b.labels:
        raise ValueError("distributions must share the same ordered label list")
    statistic = 0.0
    contributing = 0
    for ai, bi in zip(a.counts, b.counts):
        if ai + bi == 0:
            continue
        contributing += 1
        statistic += (ai - bi) ** 2 / (ai + bi)
    df = contributing - 1
    if df < 1:
        raise DegenerateTest("fewer than two classes carry any mass")
    p = chi2_tail(statistic, df)
    return TestResult(
        statistic=statistic, df=df, p_value=p,
        significant=p < alpha, alpha=alpha,
        note="counts treated as independent samples",
    )


def kl_divergence(p: ClassDistribution, q: ClassDistribution,
                  smoothing: float = DEFAULT_SMOOTHING) -> float:
    """KL divergence D(p || q) in nats, after additive `smoothing` on counts
    and renormalization."""
    if p.labels != q.labels:
        raise ValueError("distributions must share the same ordered label list")
    if smoothing < 0:
        raise ValueError("smoothing must be nonnegative")
    p_counts = [c + smoothing for c in p.counts]
    q_counts = [c + smoothing for c in q.counts]
    p_total = sum(p_counts)
    q_total = sum(q_counts)
    if p_total == 0 or q_total == 0:
        raise ValueError("cannot normalize an all-zero distribution")
    div = 0.0
    for pc, qc in zip(p_counts, q_counts):
        if pc == 0:
            continue
        if qc == 0:
            raise UnsmoothedZero(
                "q has zero mass where p does not; use smoothing > 0"
            )
        div += (pc / p_total) * math.log((pc / p_total) / (qc / q_total))
    return div


def class_distribution(results, schema: ClassSchema) -> ClassDistribution:
    """Parent-class counts over a result list, zero-count classes included."""
    labels = tuple(schema.parent_names())
    counts = {name: 0 for name in labels}
    for r in results:
        if r.parent not in counts:
            raise ValueError(f"result parent {r.parent!r} not in schema")
        counts[r.parent] += 1
    return ClassDistribution(labels=labels, counts=tuple(counts[n] for n in labels))


def distribution_from_counts(labels: Sequence[str], counts: Sequence[int]
                             ) -> ClassDistribution:
    return ClassDistribution(labels=tuple(labels), counts=tuple(int(c) for c in counts))
