"""Monte Carlo simulation of the hidden polarization experiment.

The reference experiment draws 100000 hidden polarizations plus one array
of unit uniforms per wing, fixes Alice at 0 and sweeps Bob over 1000
evenly spaced orientations in ``[0, pi]``. The same three arrays are reused
at every sweep point; :attr:`Mode.REPLICATE` reproduces that exactly and
:attr:`Mode.INDEPENDENT` draws a fresh substream per point instead.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import JointDistribution, lhv_detect_prob_a, lhv_detect_prob_b, qm_joint_distribution
from .rng import check_seed, substream

REPLICATE_STREAM = "main"


class Mode(str, enum.Enum):
    REPLICATE = "replicate"
    INDEPENDENT = "independent"


def point_stream(i: int) -> str:
    return f"point/{i}"


@dataclass(frozen=True)
class Sweep:
    beta_start: float = 0.0
    beta_end: float = math.pi
    n_points: int = 1000

    def betas(self) -> np.ndarray:
        # inclusive of both endpoints, spacing (end - start) / (n_points - 1)
        return np.linspace(self.beta_start, self.beta_end, self.n_points)


@dataclass(frozen=True)
class ExperimentConfig:
    n_pairs: int = 100_000
    seed: int = 0
    mode: Mode = Mode.REPLICATE
    alpha: float = 0.0
    sweep: Sweep = field(default_factory=Sweep)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        check_seed(self.seed)
        if int(self.n_pairs) < 1:
            raise ValueError(f"n_pairs must be >= 1, got {self.n_pairs}")
        if int(self.sweep.n_points) < 1:
            raise ValueError(f"n_points must be >= 1, got {self.sweep.n_points}")
        for name, value in (("alpha", self.alpha), ("beta_start", self.sweep.beta_start),
                            ("beta_end", self.sweep.beta_end)):
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        sweep = Sweep(**d.pop("sweep", {}))
        unknown = set(d) - {"n_pairs", "seed", "mode", "alpha"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(sweep=sweep, **d)


@dataclass(frozen=True)
class PairSample:
    theta: float
    u_a: float
    u_b: float


@dataclass(frozen=True, eq=False)
class PairSamples:
    """Column-oriented batch of :class:`PairSample`. Arrays are read-only."""

    theta: np.ndarray
    u_a: np.ndarray
    u_b: np.ndarray

    def __post_init__(self):
        for a in (self.theta, self.u_a, self.u_b):
            a.setflags(write=False)
        if not (len(self.theta) == len(self.u_a) == len(self.u_b)):
            raise ValueError("sample arrays must have equal length")

    def __len__(self) -> int:
        return len(self.theta)

    def __getitem__(self, i: int) -> PairSample:
        return PairSample(float(self.theta[i]), float(self.u_a[i]), float(self.u_b[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[PairSample]) -> "PairSamples":
        pairs = list(pairs)
        return cls(
            np.array([p.theta for p in pairs], dtype=float),
            np.array([p.u_a for p in pairs], dtype=float),
            np.array([p.u_b for p in pairs], dtype=float),
        )


def draw_samples(n: int, seed: int, stream_label: str = REPLICATE_STREAM) -> PairSamples:
    """Draw ``n`` hidden polarizations and per-wing unit uniforms."""
    if int(n) < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = substream(seed, stream_label)
    theta = rng.random(n) * math.pi
    # (1 - 2**-53) * pi can round up to pi
    theta[theta >= math.pi] = 0.0
    u_a = rng.random(n)
    u_b = rng.random(n)
    return PairSamples(theta, u_a, u_b)


@dataclass(frozen=True)
class OutcomePair:
    x: int
    y: int


def simulate_pair(s: PairSample, alpha: float, beta: float) -> OutcomePair:
    x = 1 if s.u_a < lhv_detect_prob_a(s.theta, alpha) else -1
    y = 1 if s.u_b < lhv_detect_prob_b(s.theta, beta) else -1
    return OutcomePair(x, y)


def outcomes_a(samples: PairSamples, alpha: float) -> np.ndarray:
    return np.where(samples.u_a < lhv_detect_prob_a(samples.theta, alpha), 1, -1).astype(np.int8)


def outcomes_b(samples: PairSamples, beta: float) -> np.ndarray:
    return np.where(samples.u_b < lhv_detect_prob_b(samples.theta, beta), 1, -1).astype(np.int8)


def simulate(samples: PairSamples, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`simulate_pair`; returns the x and y outcome arrays."""
    return outcomes_a(samples, alpha), outcomes_b(samples, beta)


@dataclass(frozen=True)
class EstimatedCorrelation:
    mean: float
    stderr: float
    n: int


def estimate_from_outcomes(x, y) -> EstimatedCorrelation:
    """Mean of x*y with its standard error (n - 1 variance denominator).

    Outcomes must be +-1, so every product squares to one.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    n = x.size
    if n == 0:
        raise ValueError("cannot estimate a correlation from zero samples")
    if y.size != n:
        raise ValueError("outcome arrays must have equal length")
    total = int(np.sum(x.astype(np.int64) * y.astype(np.int64)))
    mean = total / n
    if n == 1:
        return EstimatedCorrelation(mean, 0.0, 1)
    var = max(n - total * total / n, 0.0) / (n - 1)
    return EstimatedCorrelation(mean, math.sqrt(var / n), n)


def estimate_correlation(samples: PairSamples | Sequence[PairSample],
                         alpha: float, beta: float) -> EstimatedCorrelation:
    if not isinstance(samples, PairSamples):
        if len(samples) == 0:
            raise ValueError("cannot estimate a correlation from zero samples")
        samples = PairSamples.from_pairs(samples)
    return estimate_from_outcomes(*simulate(samples, alpha, beta))


@dataclass(frozen=True, eq=False)
class CorrelationCurve:
    """Correlation estimates along a beta sweep at fixed alpha.

    ``n`` is the sample count per point; analytic curves use ``n = 0``
    and ``stderr = 0``.
    """

    beta: np.ndarray
    corr: np.ndarray
    stderr: np.ndarray
    n: np.ndarray

    def __len__(self) -> int:
        return len(self.beta)

    def equals(self, other: "CorrelationCurve") -> bool:
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("beta", "corr", "stderr", "n"))


def analytic_curve(correlation: Callable, alpha: float, betas) -> CorrelationCurve:
    betas = np.asarray(betas, dtype=float)
    corr = np.asarray(correlation(alpha, betas), dtype=float) * np.ones_like(betas)
    return CorrelationCurve(betas, corr, np.zeros_like(betas), np.zeros(len(betas), dtype=np.int64))


def _sweep_points(config: ExperimentConfig, betas: np.ndarray, idx: np.ndarray,
                  shared: PairSamples | None, x_shared: np.ndarray | None):
    out = []
    for i in idx:
        if shared is not None:
            est = estimate_from_outcomes(x_shared, outcomes_b(shared, betas[i]))
        else:
            samples = draw_samples(config.n_pairs, config.seed, point_stream(int(i)))
            est = estimate_correlation(samples, config.alpha, betas[i])
        out.append(est)
    return out


def run_sweep(config: ExperimentConfig, workers: int = 1) -> CorrelationCurve:
    """Estimate the correlation at every beta of the sweep.

    ``workers`` splits the sweep across threads; the result does not
    depend on it.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    betas = config.sweep.betas()
    shared = x_shared = None
    if config.mode is Mode.REPLICATE:
        shared = draw_samples(config.n_pairs, config.seed, REPLICATE_STREAM)
        x_shared = outcomes_a(shared, config.alpha)

    chunks = np.array_split(np.arange(len(betas)), min(workers, len(betas)))
    if workers == 1:
        results = [_sweep_points(config, betas, c, shared, x_shared) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _sweep_points(config, betas, c, shared, x_shared), chunks))
    ests = [e for chunk in results for e in chunk]
    return CorrelationCurve(
        betas,
        np.array([e.mean for e in ests]),
        np.array([e.stderr for e in ests]),
        np.array([e.n for e in ests], dtype=np.int64),
    )


def sample_joint_outcomes(dist: JointDistribution, n: int,
                          rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` outcome pairs directly from a joint distribution."""
    if int(n) < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cum = np.cumsum(dist.as_tuple())
    cat = np.searchsorted(cum[:3], rng.random(n), side="right")
    # categories: 0 -> (+,+), 1 -> (+,-), 2 -> (-,+), 3 -> (-,-)
    x = np.where(cat < 2, 1, -1).astype(np.int8)
    y = np.where(cat % 2 == 0, 1, -1).astype(np.int8)
    return x, y


def simulate_setting(model: str, alpha: float, beta: float, n_pairs: int, seed: int,
                     stream_label: str) -> EstimatedCorrelation:
    """Monte Carlo estimate at one setting pair.

    ``model`` is ``"lhv"`` (the hidden polarization simulation) or ``"qm"``
    (sampling the Born-rule joint distribution).
    """
    if model == "lhv":
        return estimate_correlation(draw_samples(n_pairs, seed, stream_label), alpha, beta)
    if model == "qm":
        rng = substream(seed, stream_label)
        return estimate_from_outcomes(*sample_joint_outcomes(qm_joint_distribution(alpha, beta), n_pairs, rng))
    raise ValueError(f"unknown model {model!r}")


def mc_correlation_source(model: str, n_pairs: int, seed: int) -> Callable[[float, float], float]:
    """Correlation source backed by fresh simulation at each setting pair.

    The substream is keyed on the exact setting values, so repeated calls
    with the same settings return the same estimate.
    """
    def source(alpha: float, beta: float) -> float:
        label = f"setting/{float(alpha)!r}/{float(beta)!r}"
        return simulate_setting(model, alpha, beta, n_pairs, seed, label).mean

    return source
