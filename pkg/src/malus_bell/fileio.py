"""Curve CSV and outcome event file formats.

Curve CSV: header ``beta,corr,stderr,n``, floats with 17 significant
digits so values round-trip exactly.

Event files: one ``alpha beta x y`` record per line, whitespace separated,
angles in radians, outcomes +-1. Blank lines and ``#`` comments are skipped.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .montecarlo import CorrelationCurve, EstimatedCorrelation, estimate_from_outcomes

CURVE_HEADER = ["beta", "corr", "stderr", "n"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def fmt(x: float) -> str:
    return "%.17g" % x


def write_curve_csv(curve: CorrelationCurve, f: TextIO) -> None:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for b, c, s, n in zip(curve.beta, curve.corr, curve.stderr, curve.n):
        w.writerow([fmt(b), fmt(c), fmt(s), int(n)])


def curve_to_csv(curve: CorrelationCurve) -> str:
    buf = io.StringIO()
    write_curve_csv(curve, buf)
    return buf.getvalue()


def read_curve_csv(f: TextIO) -> CorrelationCurve:
    reader = csv.reader(f)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty curve file") from None
    if [h.strip() for h in header] != CURVE_HEADER:
        raise ParseError(f"expected header {','.join(CURVE_HEADER)}", 1)
    cols: list[list] = [[], [], [], []]
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", lineno)
        try:
            b, c, s = float(row[0]), float(row[1]), float(row[2])
            n = int(row[3])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if cols[0] and not b > cols[0][-1]:
            raise ParseError("beta column must be strictly increasing", lineno)
        for col, v in zip(cols, (b, c, s, n)):
            col.append(v)
    return CorrelationCurve(
        np.array(cols[0], dtype=float),
        np.array(cols[1], dtype=float),
        np.array(cols[2], dtype=float),
        np.array(cols[3], dtype=np.int64),
    )


@dataclass(frozen=True)
class OutcomeRecord:
    alpha: float
    beta: float
    x: int
    y: int


def write_events(f: TextIO, alpha: float, beta: float, x, y) -> None:
    """Append one record per outcome pair for a single setting pair."""
    prefix = f"{fmt(alpha)} {fmt(beta)} "
    lines = {(1, 1): prefix + "1 1\n", (1, -1): prefix + "1 -1\n",
             (-1, 1): prefix + "-1 1\n", (-1, -1): prefix + "-1 -1\n"}
    f.writelines(lines[(int(a), int(b))] for a, b in zip(x, y))


def read_events(f: TextIO) -> list[OutcomeRecord]:
    records = []
    for lineno, raw in enumerate(f, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"expected 'alpha beta x y', got {len(parts)} fields", lineno)
        try:
            alpha, beta = float(parts[0]), float(parts[1])
            x, y = int(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if not (math.isfinite(alpha) and math.isfinite(beta)):
            raise ParseError("angles must be finite", lineno)
        if x not in (-1, 1) or y not in (-1, 1):
            raise ParseError("outcomes must be -1 or +1", lineno)
        records.append(OutcomeRecord(alpha, beta, x, y))
    if not records:
        raise ParseError("no records in event file")
    return records


def group_correlations(records: list[OutcomeRecord]) -> dict[tuple[float, float], EstimatedCorrelation]:
    """Per-setting correlation estimates, keyed and sorted by (alpha, beta)."""
    groups: dict[tuple[float, float], tuple[list[int], list[int]]] = {}
    for r in records:
        xs, ys = groups.setdefault((r.alpha, r.beta), ([], []))
        xs.append(r.x)
        ys.append(r.y)
    return {k: estimate_from_outcomes(*groups[k]) for k in sorted(groups)}


def write_group_csv(groups: dict[tuple[float, float], EstimatedCorrelation], f: TextIO) -> None:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["alpha", "beta", "corr", "stderr", "n"])
    for (a, b), e in groups.items():
        w.writerow([fmt(a), fmt(b), fmt(e.mean), fmt(e.stderr), e.n])


def open_text(path: str | Path, mode: str = "r"):
    return open(path, mode, encoding="utf-8", newline="")
