"""Analytic form of the Malus-law hidden polarization model.

Photon A carries a hidden polarization ``theta`` drawn uniformly from
``[0, pi)``; photon B carries ``theta + pi/2``. Each polarizer passes its
photon with the Malus-law probability. All angles are radians, and every
quantity here has period ``pi`` in each angle argument.

Functions accept floats or numpy arrays and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HALF_PI = 0.5 * math.pi


def normalize_angle(x: float) -> float:
    """Reduce ``x`` modulo pi into the half-open interval ``[0, pi)``."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"angle must be finite, got {x!r}")
    r = math.fmod(x, math.pi)
    if r < 0.0:
        r += math.pi
    # -tiny + pi rounds up to pi
    if r >= math.pi:
        r = 0.0
    return r


# Detection probabilities use cos^2(phi) = (1 + cos 2phi) / 2. Squaring
# cos(pi/4) gives 0.5000000000000001, which would flip the strict
# u < p comparison at the u = p = 1/2 boundary.

def lhv_detect_prob_a(theta, alpha):
    """Probability that photon A (polarization theta) passes polarizer alpha."""
    return 0.5 * (1.0 + np.cos(2.0 * (np.subtract(theta, alpha))))


def lhv_detect_prob_b(theta, beta):
    """Probability that photon B (polarization theta + pi/2) passes polarizer beta."""
    # cos^2(theta + pi/2 - beta) = (1 - cos 2(theta - beta)) / 2
    return 0.5 * (1.0 - np.cos(2.0 * (np.subtract(theta, beta))))


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities of the four outcome pairs (x, y) for one setting pair."""

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    @property
    def marginal_a(self) -> float:
        """P(x = +1)."""
        return self.p_pp + self.p_pm

    @property
    def marginal_b(self) -> float:
        """P(y = +1)."""
        return self.p_pp + self.p_mp

    @property
    def correlation(self) -> float:
        """P(equal) - P(opposite)."""
        return (self.p_pp + self.p_mm) - (self.p_pm + self.p_mp)


def lhv_joint_distribution(alpha: float, beta: float) -> JointDistribution:
    c = math.cos(2.0 * (alpha - beta))
    same = 0.25 - 0.125 * c
    diff = 0.25 + 0.125 * c
    return JointDistribution(same, diff, diff, same)


def lhv_correlation(alpha, beta):
    """Correlation of the hidden polarization model, ``-cos(2(alpha - beta)) / 2``."""
    return -0.5 * np.cos(2.0 * np.subtract(alpha, beta))


def qm_joint_distribution(alpha: float, beta: float) -> JointDistribution:
    """Born-rule distribution for a photon pair in orthogonal polarization states.

    Marginals are 1/2 on both wings and the correlation is the full cosine.
    """
    c = math.cos(2.0 * (alpha - beta))
    same = 0.25 * (1.0 - c)
    diff = 0.25 * (1.0 + c)
    return JointDistribution(same, diff, diff, same)


def qm_correlation(alpha, beta):
    return -np.cos(2.0 * np.subtract(alpha, beta))


def quadrature_p_pp(alpha: float, beta: float, steps: int) -> float:
    """Composite midpoint approximation of P(++) by integrating over theta.

    Integrates ``cos^2(theta - alpha) * cos^2(theta + pi/2 - beta)`` on
    ``[0, pi]`` and divides by pi. Deliberately evaluates the raw integrand
    so it stays an independent check of :func:`lhv_joint_distribution`.
    The integrand is smooth and pi-periodic, so convergence is spectral.
    """
    steps = int(steps)
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    h = math.pi / steps
    theta = (np.arange(steps) + 0.5) * h
    f = np.cos(theta - alpha) ** 2 * np.cos(theta + HALF_PI - beta) ** 2
    # (1/pi) * h * sum(f) == mean(f)
    return float(np.mean(f))
