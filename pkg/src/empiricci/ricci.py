"""Empirical coarse Ricci curvature and bandwidth schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fields import PolarizedDistance, UnitPolarizedDistance
from .geometry import exp_map
from .kernels import _resolve, gamma2_hat
from .validation import check_bandwidth, check_positive_int

__all__ = [
    "SCHEDULE_BASES",
    "ScheduleConfig",
    "schedule_t",
    "CoarseRicciEstimate",
    "empirical_coarse_ricci",
    "empirical_life_sized",
    "LimitSchedule",
    "LimitPoint",
    "RicciLimit",
    "richardson",
    "ricci_limit_estimate",
]

# exponent base B in t_n = n^(-1 / (B + sigma)), as a function of d
SCHEDULE_BASES = {
    "gamma": lambda d: 2 * d,
    "gamma2": lambda d: 3 * d + 3,
    # conjectural: no convergence proof for the density-weighted operators
    "weighted": lambda d: 4 * d + 4,
}


@dataclass(frozen=True)
class ScheduleConfig:
    """Bandwidth schedule t_n = n^(-1/(B + sigma)).

    ``d`` may be an upper bound on the intrinsic dimension when it is unknown;
    a larger ``d`` makes t_n shrink more slowly, which keeps convergence.
    """

    d: int
    sigma: float = 0.5
    kind: str = "gamma2"

    def __post_init__(self):
        check_positive_int(self.d, "d")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.kind not in SCHEDULE_BASES:
            raise ValueError(f"kind must be one of {sorted(SCHEDULE_BASES)}, got {self.kind!r}")

    @property
    def exponent(self):
        return -1.0 / (SCHEDULE_BASES[self.kind](self.d) + self.sigma)


def schedule_t(n: int, cfg: ScheduleConfig) -> float:
    n = check_positive_int(n, "n", minimum=2)
    return float(n) ** cfg.exponent


@dataclass(frozen=True)
class CoarseRicciEstimate:
    x: np.ndarray
    y: np.ndarray
    t: float
    n: int
    value: float
    life_sized: bool


def _pair(cloud, x, y):
    P, _ = _resolve(cloud, None)
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != (P.shape[1],) or y.shape != (P.shape[1],):
        raise ValueError("x and y must be points of the cloud's ambient space")
    return P.shape[0], x, y


def empirical_coarse_ricci(cloud, t, x, y) -> CoarseRicciEstimate:
    """Γ̂₂ of the polarized squared distance f_{x,y}, evaluated at ``x``."""
    t = check_bandwidth(t)
    n, x, y = _pair(cloud, x, y)
    value = gamma2_hat(cloud, t, PolarizedDistance(x, y), x)
    return CoarseRicciEstimate(x, y, t, n, value, life_sized=False)


def empirical_life_sized(cloud, t, x, y) -> CoarseRicciEstimate:
    """Γ̂₂ of f_{x,y} / |x - y| at ``x``; equals the coarse value over |x - y|²."""
    t = check_bandwidth(t)
    n, x, y = _pair(cloud, x, y)
    value = gamma2_hat(cloud, t, UnitPolarizedDistance(x, y), x)
    return CoarseRicciEstimate(x, y, t, n, value, life_sized=True)


@dataclass(frozen=True)
class LimitSchedule:
    """Arclengths for the λ -> 0 sweep and how the bandwidth follows them.

    ``coupling="fixed"`` uses the same ``t`` for every λ; ``"quadratic"``
    sets t = c λ² and is meant for exploration.
    """

    lambdas: Sequence[float] = (0.5, 0.35, 0.25)
    t: Optional[float] = 0.005
    coupling: str = "fixed"
    c: float = 0.08

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        if not lam or any(v <= 0 for v in lam):
            raise ValueError("arclengths must be positive")
        if any(b >= a for a, b in zip(lam, lam[1:])):
            raise ValueError("arclengths must be strictly decreasing")
        if self.coupling not in ("fixed", "quadratic"):
            raise ValueError(f"unknown coupling {self.coupling!r}")
        if self.coupling == "fixed":
            check_bandwidth(self.t)
        object.__setattr__(self, "lambdas", lam)

    def bandwidth(self, lam):
        return self.t if self.coupling == "fixed" else self.c * lam * lam


@dataclass(frozen=True)
class LimitPoint:
    lam: float
    t: float
    value: float


@dataclass(frozen=True)
class RicciLimit:
    points: tuple
    limit: float
    richardson: Optional[float]


def richardson(lams, values):
    """Two-point linear extrapolation to λ = 0 from the two smallest arclengths."""
    if len(lams) < 2:
        return None
    (l1, v1), (l2, v2) = sorted(zip(lams, values))[:2]
    return (l2 * v1 - l1 * v2) / (l2 - l1)


def ricci_limit_estimate(cloud, spec, x, V, schedule: LimitSchedule = LimitSchedule()) -> RicciLimit:
    """Life-sized coarse Ricci along the geodesic from ``x`` in direction ``V``.

    The reported limit is the value at the smallest arclength; the Richardson
    extrapolation is returned alongside as a diagnostic.
    """
    pts = []
    for lam in schedule.lambdas:
        y = exp_map(spec, x, V, lam)
        t = schedule.bandwidth(lam)
        pts.append(LimitPoint(lam, t, empirical_life_sized(cloud, t, x, y).value))
    lams = [p.lam for p in pts]
    vals = [p.value for p in pts]
    return RicciLimit(tuple(pts), pts[-1].value, richardson(lams, vals))
