"""Concentration and covering-number calculators for the kernel estimators.

Closed-form tail bounds (Hoeffding, uniform Glivenko-Cantelli), reach-based
covering numbers of embedded submanifolds, Lipschitz constants of the kernel
function classes, and the deviation function ``q_t`` that controls the
normalized empirical operators. Everything here is a pure calculator except
:func:`greedy_epsilon_net`, which builds an empirical net from a cloud.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .kernels import _resolve
from .pointcloud import sq_dists

__all__ = [
    "lambda0",
    "BoundParams",
    "FunctionClass",
    "ClassConstants",
    "hoeffding_bound",
    "gc_bound",
    "ambient_covering_bound",
    "universal_c0",
    "class_constants",
    "upsilon_lipschitz",
    "q_t",
    "required_n",
    "greedy_epsilon_net",
    "check_net",
]


def lambda0(d):
    return (2.0 * math.pi) ** (d / 2) / 4.0


@dataclass(frozen=True)
class BoundParams:
    """Geometry entering the covering bounds.

    ``C_d`` defaults to 8^d. The dimensional constant is not known in closed
    form, so treat it as a calibration knob and prefer ratios that cancel it.
    ``t0`` is the bandwidth below which the density lower bound behind
    :func:`q_t` is assumed to hold; outputs at t >= t0 carry no guarantee.
    """

    V: float
    tau: float
    d: int
    C_d: Optional[float] = None
    t0: float = 0.2

    def __post_init__(self):
        if self.C_d is None:
            object.__setattr__(self, "C_d", 8.0**self.d)
        for name in ("V", "tau", "C_d", "t0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.d < 1:
            raise ValueError("d must be >= 1")

    @property
    def lambda0(self):
        return lambda0(self.d)

    @classmethod
    def from_spec(cls, spec, **kw):
        return cls(V=spec.volume, tau=spec.reach, d=spec.intrinsic_dim, **kw)


@dataclass(frozen=True)
class FunctionClass:
    """Which kernel class a deviation bound is about, with the norms it needs.

    ``kind`` is ``"F"`` (t^-1/2 w (f(ξ)-f(ζ))(h(ξ)-h(ζ)), needs Lipschitz and
    C¹ norms of f and h), ``"G"`` (t^1/2 w, kernel only) or ``"H"``
    (t^1/2 w h, needs sup |h|).
    """

    kind: str
    f_lip: Optional[float] = None
    h_lip: Optional[float] = None
    f_c1: Optional[float] = None
    h_c1: Optional[float] = None
    h_sup: Optional[float] = None

    def __post_init__(self):
        need = {"F": ("f_lip", "h_lip", "f_c1", "h_c1"), "G": (), "H": ("h_sup",)}
        if self.kind not in need:
            raise ValueError(f"unknown class kind {self.kind!r}")
        for name in need[self.kind]:
            value = getattr(self, name)
            if value is None:
                raise ValueError(f"class {self.kind} needs {name}")
            if value < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class ClassConstants:
    lipschitz: float
    sup_bound: float


def hoeffding_bound(eps, n, K):
    """P(|μ_n f - μ f| >= eps) <= 2 exp(-eps² n / 2K²) for |f| <= K, capped at 1."""
    return min(1.0, 2.0 * math.exp(-(eps * eps) * n / (2.0 * K * K)))


def gc_bound(n_cover, eps, n, M):
    """Uniform deviation bound 2 N exp(-eps² n / 8M²), N the cover at radius eps/4."""
    return min(1.0, 2.0 * n_cover * math.exp(-(eps * eps) * n / (8.0 * M * M)))


def _ambient_cover(p: BoundParams, eps):
    return p.C_d * p.V * (p.tau**-p.d + eps**-p.d)


def ambient_covering_bound(p: BoundParams, eps) -> int:
    """Reach-based bound C_d V (τ^-d + ε^-d) on the number of ε-balls covering Σ."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return math.ceil(_ambient_cover(p, eps))


def _golden_max(fun):
    res = minimize_scalar(lambda r: -fun(r), bracket=(0.0, 5.0, 10.0), method="golden", tol=1e-12)
    return -res.fun


@lru_cache(maxsize=None)
def universal_c0():
    """max(sup ρ³ e^(-ρ²/2), sup ρ e^(-ρ/2)) over ρ > 0."""
    return max(
        _golden_max(lambda r: r**3 * math.exp(-r * r / 2)),
        _golden_max(lambda r: r * math.exp(-r / 2)),
    )


def class_constants(desc: FunctionClass, t) -> ClassConstants:
    """Lipschitz constant in the index point and sup bound of a kernel class."""
    rt = math.sqrt(t)
    if desc.kind == "G":
        return ClassConstants(math.exp(-0.5), rt)
    if desc.kind == "H":
        return ClassConstants(desc.h_sup * math.exp(-0.5), rt * desc.h_sup)
    lip = universal_c0() * (
        desc.f_lip * desc.h_lip + desc.f_c1 * desc.h_lip + desc.h_c1 * desc.f_lip
    )
    return ClassConstants(lip, (2.0 / math.e) * rt * desc.f_lip * desc.h_lip)


def upsilon_lipschitz(f_lip, f_c1, t):
    """Lipschitz constant of ξ -> exp(-|ξ-ζ|²/2t)(f(ξ) - f(ζ))."""
    return (2.0 * t / math.e) * f_lip + f_c1


def _log_cover(desc, p, radius, t, cover):
    if cover is not None:
        return math.log(cover(radius / class_constants(desc, t).lipschitz))
    return math.log(_ambient_cover(p, radius / class_constants(desc, t).lipschitz))


def q_t(
    desc: FunctionClass,
    p: BoundParams,
    eps,
    M,
    n,
    t,
    *,
    cap: bool = True,
    log: bool = False,
    cover: Optional[Callable[[float], float]] = None,
):
    """Deviation probability for a t-normalized empirical average over ``desc``.

    Sum of a kernel-class term and a ``desc``-class term, each of the form
    2 N(class, radius) exp(-rate n). Covering numbers come from the reach
    bound unless ``cover`` maps an ambient radius to a count (e.g. the size
    of a greedy net). ``M`` excludes the t^1/2 factor carried by every class.
    With ``log=True`` the natural log of the uncapped value is returned, which
    stays finite where the value itself would overflow.
    """
    d, l0 = p.d, p.lambda0
    tm = math.sqrt(t) * M
    r_g = eps * t ** (d + 1) * l0**2 / (4.0 * tm)
    rate_g = eps**2 * t ** (2 * d + 1) * l0**4 / (8.0 * tm * tm)
    r_f = eps * l0 * t ** ((d + 1) / 2) / 4.0
    rate_f = eps**2 * l0**2 * t ** (d + 1) / (8.0 * tm * tm)
    log_terms = (
        math.log(2.0) + _log_cover(FunctionClass("G"), p, r_g, t, cover) - rate_g * n,
        math.log(2.0) + _log_cover(desc, p, r_f, t, cover) - rate_f * n,
    )
    log_value = float(np.logaddexp(*log_terms))
    if log:
        return log_value
    value = math.exp(log_value) if log_value < 709.0 else math.inf
    return min(1.0, value) if cap else value


def required_n(desc, p, eps, delta, t, M=None):
    """Smallest n with q_t <= delta, by doubling then bisection."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if M is None:
        M = class_constants(desc, t).sup_bound / math.sqrt(t)

    def ok(n):
        return q_t(desc, p, eps, M, n, t) <= delta

    if ok(1):
        return 1
    hi = 2
    while not ok(hi):
        hi *= 2
        if hi > 2**63:
            raise OverflowError("target probability unreachable below 2^63 samples")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def greedy_epsilon_net(cloud, eps) -> np.ndarray:
    """Indices of a greedy ε-net, scanning points in index order.

    A point joins the net iff it is farther than ``eps`` from every point
    already in it. The scan is sequential by construction.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    P, _ = _resolve(cloud, None)
    covered = np.zeros(P.shape[0], dtype=bool)
    net = []
    e2 = eps * eps
    i = 0
    while i < P.shape[0]:
        net.append(i)
        covered |= sq_dists(P[i : i + 1], P)[0] <= e2
        rest = np.flatnonzero(~covered[i + 1 :])
        if rest.size == 0:
            break
        i = i + 1 + int(rest[0])
    return np.array(net, dtype=np.intp)


def check_net(cloud, net, eps):
    """Return ``(separated, covering)`` for a candidate ε-net of ``cloud``."""
    P, _ = _resolve(cloud, None)
    D = sq_dists(P[net], P)
    e2 = eps * eps
    inner = D[:, net]
    np.fill_diagonal(inner, np.inf)
    return bool(np.all(inner > e2)), bool(np.all(D.min(axis=0) <= e2))
