"""Class-vs-topic co-occurrence matrix and the per-class four-way diagnosis."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional

from .errors import KeyMismatch


@dataclass(frozen=True)
class AlignmentMatrix:
    rows: tuple[str, ...]          # class internal names
    cols: tuple[str, ...]          # topic names
    counts: tuple[tuple[int, ...], ...]
    run_id: str = ""

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def row_sums(self) -> dict[str, int]:
        return {name: sum(row) for name, row in zip(self.rows, self.counts)}

    def col_sums(self) -> dict[str, int]:
        return {
            name: sum(self.counts[i][j] for i in range(len(self.rows)))
            for j, name in enumerate(self.cols)
        }

    def to_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "counts": [list(r) for r in self.counts],
            "run_id": self.run_id,
        }


def matrix_from_dict(obj: dict) -> AlignmentMatrix:
    return AlignmentMatrix(
        rows=tuple(obj["rows"]),
        cols=tuple(obj["cols"]),
        counts=tuple(tuple(int(c) for c in row) for row in obj["counts"]),
        run_id=obj.get("run_id", ""),
    )


def build_alignment(class_assign: dict[str, str], topic_assign: dict[str, str],
                    class_names: Optional[list[str]] = None,
                    topic_names: Optional[list[str]] = None,
                    run_id: str = "") -> AlignmentMatrix:
    """Count documents per (assigned class, discovered topic) cell.

    Declared `class_names`/`topic_names` keep empty rows/columns visible;
    otherwise labels are taken from the assignments in first-seen order.
    """
    only_class = set(class_assign) - set(topic_assign)
    only_topic = set(topic_assign) - set(class_assign)
    if only_class or only_topic:
        raise KeyMismatch(only_class | only_topic)

    rows = list(class_names) if class_names is not None else []
    cols = list(topic_names) if topic_names is not None else []
    for doc_id in class_assign:
        if class_assign[doc_id] not in rows:
            rows.append(class_assign[doc_id])
        if topic_assign[doc_id] not in cols:
            cols.append(topic_assign[doc_id])

    row_idx = {name: i for i, name in enumerate(rows)}
    col_idx = {name: j for j, name in enumerate(cols)}
    counts = [[0] * len(cols) for _ in rows]
    for doc_id, cls in class_assign.items():
        counts[row_idx[cls]][col_idx[topic_assign[doc_id]]] += 1
    return AlignmentMatrix(
        rows=tuple(rows), cols=tuple(cols),
        counts=tuple(tuple(r) for r in counts), run_id=run_id,
    )


@dataclass(frozen=True)
class DiagnosticThresholds:
    failed_share: float = 0.02
    vague_purity: float = 0.5
    validated_purity: float = 0.8

    def __post_init__(self):
        if not 0 < self.failed_share < 1:
            raise ValueError("failed_share must be in (0, 1)")
        if not 0 < self.vague_purity <= self.validated_purity <= 1:
            raise ValueError("need 0 < vague_purity <= validated_purity <= 1")


@dataclass(frozen=True)
class ClassDiagnostic:
    class_name: str
    row_sum: int
    purity: float
    support_share: float
    verdict: str  # validated | overlapping | vague | failed

    def to_dict(self) -> dict:
        return {
            "class_name": self.class_name,
            "row_sum": self.row_sum,
            "purity": self.purity,
            "support_share": self.support_share,
            "verdict": self.verdict,
        }


def diagnose(matrix: AlignmentMatrix,
             thresholds: DiagnosticThresholds = DiagnosticThresholds()
             ) -> list[ClassDiagnostic]:
    """Four-way row verdict: failed (near-empty row), vague (no dominant
    topic), validated (one dominant topic), overlapping (in between)."""
    total = matrix.total()
    out: list[ClassDiagnostic] = []
    for name, row in zip(matrix.rows, matrix.counts):
        row_sum = sum(row)
        purity = (max(row) / row_sum) if row_sum else 0.0
        share = (row_sum / total) if total else 0.0
        if share <= thresholds.failed_share:
            verdict = "failed"
        elif purity < thresholds.vague_purity:
            verdict = "vague"
        elif purity >= thresholds.validated_purity:
            verdict = "validated"
        else:
            verdict = "overlapping"
        out.append(ClassDiagnostic(name, row_sum, purity, share, verdict))
    return out


def export_heatmap(matrix: AlignmentMatrix, out_path: str, fmt: str = "csv") -> str:
    if fmt == "csv":
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["class"] + list(matrix.cols))
            for name, row in zip(matrix.rows, matrix.counts):
                writer.writerow([name] + list(row))
    elif fmt == "json":
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(matrix.to_dict(), fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    elif fmt == "svg":
        if not matrix.rows or not matrix.cols:
            raise ValueError("svg export needs at least one row and column")
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(_render_svg(matrix))
    else:
        raise ValueError(f"unknown heatmap format {fmt!r}")
    return out_path


def cell_intensity(count: int, lo: int, hi: int) -> float:
    """Min-max ramp position; a flat matrix renders mid-scale."""
    if hi == lo:
        return 0.5
    return (count - lo) / (hi - lo)


def _render_svg(matrix: AlignmentMatrix, cell: int = 40, margin: int = 120) -> str:
    flat = [c for row in matrix.counts for c in row]
    lo, hi = min(flat), max(flat)
    width = margin + cell * len(matrix.cols)
    height = margin + cell * len(matrix.rows)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
    ]
    for i, (name, row) in enumerate(zip(matrix.rows, matrix.counts)):
        y = margin + i * cell
        parts.append(
            f'<text x="4" y="{y + cell * 0.6:.0f}" font-size="11">{name}</text>'
        )
        for j, count in enumerate(row):
            t = cell_intensity(count, lo, hi)
            # dark purple (low) to bright yellow (high)
            r = int(68 + t * (253 - 68))
            g = int(1 + t * (231 - 1))
            b = int(84 + t * (37 - 84))
            x = margin + j * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="rgb({r},{g},{b})"><title>{count}</title></rect>'
            )
    for j, name in enumerate(matrix.cols):
        x = margin + j * cell
        parts.append(
            f'<text x="{x + 2}" y="{margin - 6}" font-size="11">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
