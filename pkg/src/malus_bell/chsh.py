"""CHSH statistic, setting searches and cosine amplitude fitting.

The statistic is ``S = E(a, b) - E(a, b') + E(a', b) + E(a', b')``. Local
hidden variable models obey ``|S| <= 2``. A correlation of the form
``-K cos 2(a - b)`` reaches ``max |S| = 2 sqrt(2) K``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import normalize_angle
from .montecarlo import CorrelationCurve, simulate_setting
from .rng import substream

CorrelationSource = Callable[[float, float], float]

CHSH_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class ChshSettings:
    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, normalize_angle(getattr(self, name)))

    def pairs(self) -> tuple[tuple[float, float], ...]:
        """Setting pairs in the order (a,b), (a,b'), (a',b), (a',b')."""
        return ((self.a, self.b), (self.a, self.b_prime),
                (self.a_prime, self.b), (self.a_prime, self.b_prime))


@dataclass(frozen=True)
class ChshResult:
    settings: ChshSettings
    e_ab: float
    e_ab_prime: float
    e_a_prime_b: float
    e_a_prime_b_prime: float
    s: float
    # standard error of s, only for empirical estimates
    s_stderr: float | None = None

    @property
    def abs_s(self) -> float:
        return abs(self.s)

    def satisfies_bound(self, tol: float = 0.0) -> bool:
        return self.abs_s <= CHSH_BOUND + tol


def combine(e_ab, e_abp, e_apb, e_apbp):
    return e_ab - e_abp + e_apb + e_apbp


def chsh_statistic(source: CorrelationSource, settings: ChshSettings) -> ChshResult:
    es = [float(source(x, y)) for x, y in settings.pairs()]
    return ChshResult(settings, *es, s=combine(*es))


def _correlation_matrix(source: CorrelationSource, grid: np.ndarray) -> np.ndarray:
    """``M[i, j] = source(grid[i], grid[j])``, vectorized when the source allows."""
    A, B = np.meshgrid(grid, grid, indexing="ij")
    try:
        m = np.asarray(source(A, B), dtype=float)
    except (TypeError, ValueError):
        m = None
    if m is None or m.shape != A.shape:
        m = np.array([[float(source(a, b)) for b in grid] for a in grid])
    return m


TIE_TOLERANCE = 1e-12


def _abs_s_block(m: np.ndarray, i: int) -> np.ndarray:
    """|S| for fixed a = grid[i], axes (a', b, b')."""
    r = m[i]
    return np.abs(r[None, :, None] - r[None, None, :] + m[:, :, None] + m[:, None, :])


def _block_max(m: np.ndarray, rows: np.ndarray) -> float:
    return max(float(_abs_s_block(m, i).max()) for i in rows)


def _first_at_least(m: np.ndarray, rows: np.ndarray, threshold: float):
    for i in rows:
        s = _abs_s_block(m, i)
        hits = np.flatnonzero(s.ravel() >= threshold)
        if hits.size:
            return (int(i), *(int(v) for v in np.unravel_index(hits[0], s.shape)))
    return None


def max_abs_chsh(source: CorrelationSource, grid_points_per_angle: int = 64,
                 workers: int = 1) -> ChshResult:
    """Exhaustive search of ``{0, pi/g, ..., (g-1)pi/g}^4`` for the largest |S|.

    Values within ``TIE_TOLERANCE`` of the maximum count as ties and resolve
    to the lexicographically smallest (a, a', b, b'). The result is
    independent of ``workers``.
    """
    g = int(grid_points_per_angle)
    if g < 2:
        raise ValueError(f"grid_points_per_angle must be >= 2, got {g}")
    grid = np.arange(g) * (math.pi / g)
    m = _correlation_matrix(source, grid)
    blocks = np.array_split(np.arange(g), min(max(workers, 1), g))
    if workers <= 1:
        best = max(_block_max(m, b) for b in blocks)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            best = max(pool.map(lambda b: _block_max(m, b), blocks))
    # blocks are scanned in ascending a, so the first hit is lexicographically smallest
    for b in blocks:
        idx = _first_at_least(m, b, best - TIE_TOLERANCE)
        if idx is not None:
            break
    i, j, k, l = idx
    settings = ChshSettings(grid[i], grid[j], grid[k], grid[l])
    es = [m[i, k], m[i, l], m[j, k], m[j, l]]
    return ChshResult(settings, *map(float, es), s=float(combine(*es)))


@dataclass(frozen=True)
class AmplitudeFit:
    """Fit of ``E(beta) ~ offset - amplitude * cos 2(alpha - beta)``.

    ``amplitude`` comes out negative if the curve is a positive cosine.
    """

    amplitude: float
    offset: float
    rmse: float


def fit_cosine_amplitude(curve: CorrelationCurve, alpha: float) -> AmplitudeFit:
    """Linear least squares on the basis ``{1, -cos 2(alpha - beta)}``.

    The phase is fixed by the model, so the fit is linear and closed-form.
    On a full-period uniform grid the two basis functions are orthogonal
    and the coefficients reduce to Fourier projections; the inclusive
    0..pi grid repeats one endpoint, so the coupled 2x2 system is solved
    rather than assuming orthogonality.
    """
    beta = np.asarray(curve.beta, dtype=float)
    corr = np.asarray(curve.corr, dtype=float)
    if len(np.unique(beta)) < 3:
        raise ValueError("need at least 3 distinct beta values to fit")
    design = np.column_stack([np.ones_like(beta), -np.cos(2.0 * (alpha - beta))])
    coef, _, rank, _ = np.linalg.lstsq(design, corr, rcond=None)
    if rank < 2:
        raise ValueError("beta values do not determine the cosine amplitude")
    offset, amplitude = (float(c) for c in coef)
    rmse = float(np.sqrt(np.mean((corr - design @ coef) ** 2)))
    return AmplitudeFit(amplitude, offset, rmse)


@dataclass(frozen=True)
class BoundReport:
    max_abs_s: float
    violations: int
    n: int
    tolerance: float
    worst: ChshSettings | None = None


def verify_lhv_bound(source: CorrelationSource, n_random_quadruples: int, seed: int,
                     tolerance: float = 1e-9) -> BoundReport:
    """Count random setting quadruples with ``|S| > 2 + tolerance``.

    Use ``tolerance`` of a few standard errors of S for simulated sources.
    """
    n = int(n_random_quadruples)
    if n < 1:
        raise ValueError(f"n_random_quadruples must be >= 1, got {n}")
    q = substream(seed, "chsh/verify").random((n, 4)) * math.pi
    a, ap, b, bp = q.T
    try:
        s = combine(*(np.asarray(source(x, y), dtype=float) for x, y in ((a, b), (a, bp), (ap, b), (ap, bp))))
        s = np.broadcast_to(s, (n,))
    except (TypeError, ValueError):
        s = np.array([chsh_statistic(source, ChshSettings(*row)).s for row in q])
    abs_s = np.abs(s)
    k = int(np.argmax(abs_s))
    return BoundReport(
        max_abs_s=float(abs_s[k]),
        violations=int(np.count_nonzero(abs_s > CHSH_BOUND + tolerance)),
        n=n,
        tolerance=tolerance,
        worst=ChshSettings(*q[k]),
    )


def empirical_chsh(model: str, settings: ChshSettings, n_pairs: int, seed: int) -> ChshResult:
    """CHSH from simulated outcomes, an independent substream per setting pair."""
    names = ("ab", "ab'", "a'b", "a'b'")
    ests = [simulate_setting(model, x, y, n_pairs, seed, f"chsh/{name}")
            for name, (x, y) in zip(names, settings.pairs())]
    es = [e.mean for e in ests]
    stderr = math.sqrt(sum(e.stderr ** 2 for e in ests))
    return ChshResult(settings, *es, s=combine(*es), s_stderr=stderr)
