"""Convergence sweeps: sample, evaluate an operator, compare to a reference.

Cells ``(n, seed)`` are independent and run in a thread pool. Their rows are
collected and written in canonical ``(n, seed)`` order, so the output bytes
do not depend on the number of workers.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import geometry, kernels
from .fields import Coordinate
from .pointcloud import Circle, CliffordTorus, Sphere, quadrature_grid, sample_uniform
from .ricci import ScheduleConfig, schedule_t

__all__ = [
    "OPERATORS",
    "ConvergenceRecord",
    "ExperimentConfig",
    "worker_count",
    "query_points",
    "evaluate",
    "oracle_values",
    "run_converge",
    "summarize",
    "format_csv",
]

OPERATORS = ("laplacian", "gamma", "gamma2")
CSV_COLUMNS = ("n", "t", "seed", "query", "estimate", "oracle", "abs_error")


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    t: float
    seed: int
    query: int
    estimate: float
    oracle: Optional[float]
    abs_error: Optional[float]


@dataclass
class ExperimentConfig:
    spec: object
    field: object
    op: str = "gamma2"
    ns: Sequence[int] = (500, 1000, 2000, 4000)
    seeds: Sequence[int] = tuple(range(10))
    schedule: Optional[ScheduleConfig] = None
    t: Optional[float] = None
    queries: Optional[np.ndarray] = None
    n_queries: int = 10
    alpha: float = 0.0
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise ValueError(f"op must be one of {OPERATORS}")
        ns = [int(n) for n in self.ns]
        if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n-sweep must be nonempty and strictly increasing")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.t is None and self.schedule is None:
            self.schedule = ScheduleConfig(
                d=self.spec.intrinsic_dim, kind="gamma" if self.op == "gamma" else "gamma2"
            )
        if self.queries is None:
            self.queries = query_points(self.spec, self.n_queries)
        self.ns = ns

    def bandwidth(self, n):
        return self.t if self.t is not None else schedule_t(n, self.schedule)


def worker_count():
    """Workers from ``RICCI_THREADS``; 0 or unset means one per CPU."""
    raw = os.environ.get("RICCI_THREADS", "").strip()
    k = int(raw) if raw else 0
    if k < 0:
        raise ValueError("RICCI_THREADS must be >= 0")
    return k or (os.cpu_count() or 1)


def query_points(spec, k):
    """``k`` deterministic, evenly spread query points on ``spec``."""
    i = np.arange(k)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    if isinstance(spec, Sphere) and spec.d == 2:
        z = 1.0 - (2.0 * i + 1.0) / k
        rho = np.sqrt(1.0 - z * z)
        phi = 2.0 * math.pi * ((i * golden) % 1.0)
        return spec.r * np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    if isinstance(spec, Circle) or (isinstance(spec, Sphere) and spec.d == 1):
        a = 2.0 * math.pi * (i + 0.5) / k
        return spec.r * np.column_stack([np.cos(a), np.sin(a)])
    if isinstance(spec, CliffordTorus):
        a = 2.0 * math.pi * (i + 0.5) / k
        b = 2.0 * math.pi * ((i * golden) % 1.0)
        return np.column_stack(
            [spec.r1 * np.cos(a), spec.r1 * np.sin(a), spec.r2 * np.cos(b), spec.r2 * np.sin(b)]
        )
    # fall back to a fixed-seed uniform sample
    return sample_uniform(spec, k, seed=0x5EED).points


def evaluate(op, cloud, t, field, X, alpha=0.0):
    if op == "laplacian":
        return kernels.l_t_alpha_hat(cloud, t, alpha, field, X)
    if op == "gamma":
        return kernels.gamma_hat(cloud, t, field, field, X)
    if op == "gamma2":
        return kernels.gamma2_hat(cloud, t, field, X)
    raise ValueError(f"unknown operator {op!r}")


_ANALYTIC = {
    "laplacian": geometry.analytic_laplacian,
    "gamma": geometry.analytic_gamma,
    "gamma2": geometry.analytic_gamma2,
}


def _grid_resolution(spec, n_max):
    target = 4 * n_max
    if isinstance(spec, Sphere) and spec.d == 2:
        return math.ceil(math.sqrt(target / 2))
    if isinstance(spec, CliffordTorus):
        return math.ceil(math.sqrt(target))
    return target


def oracle_values(cfg: ExperimentConfig, t):
    """Reference values at the queries: analytic when available, else quadrature."""
    if isinstance(cfg.field, Coordinate) and isinstance(cfg.spec, (Sphere, Circle)):
        fn = _ANALYTIC[cfg.op]
        return np.array([fn(cfg.spec, cfg.field.axis, q) for q in cfg.queries])
    grid = quadrature_grid(cfg.spec, _grid_resolution(cfg.spec, max(cfg.ns)))
    return np.asarray(evaluate(cfg.op, grid, t, cfg.field, cfg.queries, cfg.alpha))


def _cell(cfg, n, seed, oracle):
    t = cfg.bandwidth(n)
    cloud = sample_uniform(cfg.spec, n, seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", kernels.SparseKernelWarning)
        est = np.asarray(evaluate(cfg.op, cloud, t, cfg.field, cfg.queries, cfg.alpha))
    return [
        ConvergenceRecord(n, t, seed, q, float(e), float(o), float(abs(e - o)))
        for q, (e, o) in enumerate(zip(est, oracle))
    ]


def run_converge(cfg: ExperimentConfig, workers: Optional[int] = None):
    """All records of the sweep, in ``(n, seed, query)`` order."""
    workers = worker_count() if workers is None else workers
    oracles = {n: oracle_values(cfg, cfg.bandwidth(n)) for n in cfg.ns}
    cells = [(n, s) for n in cfg.ns for s in cfg.seeds]
    if workers <= 1:
        parts = [_cell(cfg, n, s, oracles[n]) for n, s in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _cell(cfg, c[0], c[1], oracles[c[0]]), cells))
    return [rec for part in parts for rec in part]


def summarize(records):
    """Median absolute error for each n, in increasing n."""
    by_n = {}
    for rec in records:
        by_n.setdefault(rec.n, []).append(rec.abs_error)
    return {n: float(np.median(v)) for n, v in sorted(by_n.items())}


def _g(x):
    return format(x, ".17g")


def format_csv(records, labels=None, timestamp=None):
    """CSV text: a comment header, one row per record, then a summary block."""
    head = " ".join(f"{k}={v}" for k, v in (labels or {}).items())
    lines = [f"# converge {head}".rstrip()]
    if timestamp is not None:
        lines.append(f"# generated={timestamp}")
    lines.append(",".join(CSV_COLUMNS))
    for r in records:
        lines.append(
            f"{r.n},{_g(r.t)},{r.seed},{r.query},{_g(r.estimate)},{_g(r.oracle)},{_g(r.abs_error)}"
        )
    for n, med in summarize(records).items():
        lines.append(f"# summary n={n} median_abs_error={_g(med)}")
    return "\n".join(lines) + "\n"
