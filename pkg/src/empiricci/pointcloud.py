"""Point clouds on reference manifolds.

Random clouds are drawn from a Philox4x64 counter-based generator. Point ``i``
of a cloud generated with seed ``s`` reads its uniforms from the block of
counters starting at ``i * blocks_per_point`` under key ``s``, so any slice of
a cloud can be regenerated on its own and chunked generation is bit-identical
to serial generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .validation import check_points, check_positive_int, check_weights

__all__ = [
    "Sphere",
    "Circle",
    "CliffordTorus",
    "ManifoldSpec",
    "PointCloud",
    "PointCloudFormatError",
    "parse_spec",
    "sample_uniform",
    "sample_weighted_circle",
    "quadrature_grid",
    "pairwise_sq_dists",
    "sq_dists",
    "save_csv",
    "load_csv",
]

_SEED_MASK = (1 << 64) - 1
_RESIDENCY_RTOL = 1e-12


def _fmt(x):
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


@dataclass(frozen=True)
class Sphere:
    """Round sphere S^d of radius ``r`` in R^(d+1)."""

    d: int = 2
    r: float = 1.0

    def __post_init__(self):
        check_positive_int(self.d, "d")
        if not self.r > 0:
            raise ValueError(f"sphere radius must be positive, got {self.r}")

    @property
    def intrinsic_dim(self):
        return self.d

    @property
    def ambient_dim(self):
        return self.d + 1

    @property
    def volume(self):
        k = self.d + 1
        return 2.0 * math.pi ** (k / 2) / math.gamma(k / 2) * self.r**self.d

    @property
    def reach(self):
        return float(self.r)

    def residuals(self, points):
        return np.abs(np.sqrt(np.sum(points**2, axis=1)) - self.r) / self.r

    def __str__(self):
        return f"sphere:d={self.d},r={_fmt(self.r)}"


@dataclass(frozen=True)
class Circle:
    """Circle of radius ``r`` in R^2."""

    r: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"circle radius must be positive, got {self.r}")

    intrinsic_dim = 1
    ambient_dim = 2

    @property
    def volume(self):
        return 2.0 * math.pi * self.r

    @property
    def reach(self):
        return float(self.r)

    def residuals(self, points):
        return np.abs(np.hypot(points[:, 0], points[:, 1]) - self.r) / self.r

    def __str__(self):
        return f"circle:r={_fmt(self.r)}"


@dataclass(frozen=True)
class CliffordTorus:
    """Flat torus (r1 cos a, r1 sin a, r2 cos b, r2 sin b) in R^4."""

    r1: float = 1.0
    r2: float = 1.0

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise ValueError(f"torus radii must be positive, got {self.r1}, {self.r2}")

    intrinsic_dim = 2
    ambient_dim = 4

    @property
    def volume(self):
        return 4.0 * math.pi**2 * self.r1 * self.r2

    @property
    def reach(self):
        return float(min(self.r1, self.r2))

    def residuals(self, points):
        e1 = np.abs(np.hypot(points[:, 0], points[:, 1]) - self.r1) / self.r1
        e2 = np.abs(np.hypot(points[:, 2], points[:, 3]) - self.r2) / self.r2
        return np.maximum(e1, e2)

    def __str__(self):
        return f"torus:r1={_fmt(self.r1)},r2={_fmt(self.r2)}"


ManifoldSpec = Union[Sphere, Circle, CliffordTorus]


def parse_spec(text: str) -> ManifoldSpec:
    """Parse ``sphere:d=2,r=1``, ``circle:r=1`` or ``torus:r1=1,r2=1``."""
    kind, _, rest = text.strip().partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"bad manifold parameter {item!r} in {text!r}")
            params[key.strip()] = value.strip()
    allowed = {"sphere": {"d", "r"}, "circle": {"r"}, "torus": {"r1", "r2"}}
    if kind not in allowed:
        raise ValueError(f"unknown manifold {kind!r}")
    unknown = set(params) - allowed[kind]
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)} for {kind}")
    if kind == "sphere":
        return Sphere(d=int(params.get("d", 2)), r=float(params.get("r", 1.0)))
    if kind == "circle":
        return Circle(r=float(params.get("r", 1.0)))
    return CliffordTorus(r1=float(params.get("r1", 1.0)), r2=float(params.get("r2", 1.0)))


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``n`` points in R^N with optional provenance and quadrature weights.

    ``weights`` is ``None`` for an i.i.d. sample (uniform mass 1/n).
    """

    points: np.ndarray
    spec: Optional[ManifoldSpec] = None
    seed: Optional[int] = None
    weights: Optional[np.ndarray] = None
    density: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = check_points(self.points, name="points").copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = check_weights(self.weights, pts.shape[0]).copy()
            if abs(math.fsum(w) - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1")
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)
        if self.spec is not None:
            if pts.shape[1] != self.spec.ambient_dim:
                raise ValueError(
                    f"{self.spec} lives in R^{self.spec.ambient_dim}, "
                    f"points have {pts.shape[1]} coordinates"
                )
            worst = float(np.max(self.spec.residuals(pts)))
            if worst > _RESIDENCY_RTOL:
                raise ValueError(f"points are off {self.spec} by {worst:.3g} (relative)")

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def ambient_dim(self):
        return self.points.shape[1]

    @property
    def mu(self):
        """Point masses: the weights, or 1/n each."""
        if self.weights is None:
            return np.full(self.n, 1.0 / self.n)
        return self.weights

    def __len__(self):
        return self.n


# -- random generation ------------------------------------------------------


def _uniform_block(seed, start, count, per_point):
    """Open-interval uniforms for points ``start .. start+count-1``.

    Returns an array of shape ``(count, per_point)``; ``per_point`` is a
    multiple of 4 so that each point owns whole Philox counters.
    """
    bg = np.random.Philox(key=int(seed) & _SEED_MASK, counter=start * (per_point // 4))
    raw = bg.random_raw(count * per_point).reshape(count, per_point)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _per_point(k):
    return 4 * math.ceil(k / 4)


def _gaussians(seed, n, dim):
    pairs = math.ceil(dim / 2)
    u = _uniform_block(seed, 0, n, _per_point(2 * pairs))
    rad = np.sqrt(-2.0 * np.log(u[:, 0 : 2 * pairs : 2]))
    ang = 2.0 * math.pi * u[:, 1 : 2 * pairs : 2]
    z = np.empty((n, 2 * pairs))
    z[:, 0::2] = rad * np.cos(ang)
    z[:, 1::2] = rad * np.sin(ang)
    return z[:, :dim]


def _check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError("seed must be an integer")
    return int(seed)


def sample_uniform(spec: ManifoldSpec, n: int, seed: int) -> PointCloud:
    """Draw ``n`` i.i.d. points from the normalized volume measure of ``spec``."""
    n = check_positive_int(n, "n")
    seed = _check_seed(seed)
    if isinstance(spec, Sphere):
        z = _gaussians(seed, n, spec.ambient_dim)
        pts = spec.r * z / np.sqrt(np.sum(z**2, axis=1))[:, None]
    elif isinstance(spec, Circle):
        a = 2.0 * math.pi * _uniform_block(seed, 0, n, 4)[:, 0]
        pts = spec.r * np.column_stack([np.cos(a), np.sin(a)])
    elif isinstance(spec, CliffordTorus):
        u = _uniform_block(seed, 0, n, 4)
        a, b = 2.0 * math.pi * u[:, 0], 2.0 * math.pi * u[:, 1]
        pts = np.column_stack(
            [spec.r1 * np.cos(a), spec.r1 * np.sin(a), spec.r2 * np.cos(b), spec.r2 * np.sin(b)]
        )
    else:
        raise TypeError(f"unsupported manifold {spec!r}")
    return PointCloud(pts, spec=spec, seed=seed)


def _invert_cdf(u, a, tol=1e-12):
    # CDF (theta + a sin theta) / (2 pi) is increasing on [0, 2 pi] for a < 1
    lo = np.zeros_like(u)
    hi = np.full_like(u, 2.0 * math.pi)
    target = 2.0 * math.pi * u
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        below = mid + a * np.sin(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sample_weighted_circle(r: float, a: float, n: int, seed: int) -> PointCloud:
    """Sample the circle of radius ``r`` with angular density (1 + a cos θ) / 2π."""
    if not 0.0 <= a < 1.0:
        raise ValueError(f"amplitude must lie in [0, 1), got {a}")
    n = check_positive_int(n, "n")
    seed = _check_seed(seed)
    spec = Circle(r=r)
    u = _uniform_block(seed, 0, n, 4)[:, 0]
    theta = 2.0 * math.pi * u if a == 0 else _invert_cdf(u, a)
    pts = spec.r * np.column_stack([np.cos(theta), np.sin(theta)])
    density = None if a == 0 else f"1+{_fmt(a)}cos"
    return PointCloud(pts, spec=spec, seed=seed, density=density, extra={"amplitude": float(a)})


def quadrature_grid(spec: ManifoldSpec, resolution: int) -> PointCloud:
    """Deterministic weighted grid standing in for the normalized volume measure.

    Circle: ``resolution`` equispaced angles. Sphere(d=2): ``resolution``
    Gauss-Legendre nodes in z = cos(colatitude) times ``2 * resolution``
    equispaced longitudes; after the longitude sum a Gaussian kernel is smooth
    in z, so the rule converges spectrally even at the poles.
    CliffordTorus: ``resolution`` x ``resolution`` product grid.
    """
    m = check_positive_int(resolution, "resolution", minimum=2)
    if isinstance(spec, Circle) or (isinstance(spec, Sphere) and spec.d == 1):
        a = 2.0 * math.pi * np.arange(m) / m
        pts = spec.r * np.column_stack([np.cos(a), np.sin(a)])
        w = np.full(m, 1.0 / m)
    elif isinstance(spec, Sphere) and spec.d == 2:
        z, gw = np.polynomial.legendre.leggauss(m)
        lon = 2.0 * math.pi * np.arange(2 * m) / (2 * m)
        Z, L = np.meshgrid(z, lon, indexing="ij")
        Z, L = Z.ravel(), L.ravel()
        s = np.sqrt((1.0 - Z) * (1.0 + Z))
        pts = np.column_stack([s * np.cos(L), s * np.sin(L), Z])
        pts = spec.r * pts / np.sqrt(np.sum(pts**2, axis=1))[:, None]
        w = np.repeat(gw, 2 * m)
        w = w / np.sum(w)
    elif isinstance(spec, CliffordTorus):
        ang = 2.0 * math.pi * np.arange(m) / m
        A, B = np.meshgrid(ang, ang, indexing="ij")
        A, B = A.ravel(), B.ravel()
        pts = np.column_stack(
            [spec.r1 * np.cos(A), spec.r1 * np.sin(A), spec.r2 * np.cos(B), spec.r2 * np.sin(B)]
        )
        w = np.full(m * m, 1.0 / (m * m))
    else:
        raise ValueError(f"no quadrature grid for {spec}")
    return PointCloud(pts, spec=spec, weights=w)


# -- distances -----------------------------------------------------------------


def sq_dists(A, B):
    """Squared Euclidean distances between rows of ``A`` (m, N) and ``B`` (n, N).

    Summed coordinate by coordinate over explicit differences, so the result
    is exactly symmetric, nonnegative and zero for identical rows.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    out = np.zeros((A.shape[0], B.shape[0]))
    for k in range(A.shape[1]):
        diff = A[:, k, None] - B[None, :, k]
        out += diff * diff
    return out


def pairwise_sq_dists(cloud: PointCloud) -> np.ndarray:
    """The n x n matrix of squared ambient distances within ``cloud``."""
    return sq_dists(cloud.points, cloud.points)


# -- CSV -------------------------------------------------------------------


class PointCloudFormatError(ValueError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


def save_csv(cloud: PointCloud, path) -> None:
    """Write ``cloud`` with a ``# n= N= spec= seed=`` header, 17 significant digits."""
    header = [
        f"n={cloud.n}",
        f"N={cloud.ambient_dim}",
        f"spec={cloud.spec if cloud.spec is not None else 'none'}",
        f"seed={cloud.seed if cloud.seed is not None else 'none'}",
    ]
    if cloud.density is not None:
        header.append(f"density={cloud.density}")
    data = cloud.points
    if cloud.weights is not None:
        header.append("weighted=1")
        data = np.column_stack([data, cloud.weights])
    lines = ["# " + " ".join(header)]
    lines.extend(",".join(format(v, ".17g") for v in row) for row in data)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_header(line, lineno):
    if not line.startswith("#"):
        raise PointCloudFormatError("missing '# n=... N=... spec=... seed=...' header", lineno)
    fields = {}
    for token in line[1:].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise PointCloudFormatError(f"malformed header token {token!r}", lineno)
        fields[key] = value
    for key in ("n", "N", "spec", "seed"):
        if key not in fields:
            raise PointCloudFormatError(f"header lacks {key}=", lineno)
    return fields


def load_csv(path) -> PointCloud:
    """Read a cloud written by :func:`save_csv`."""
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise PointCloudFormatError("empty file", 1)
    hdr = _parse_header(lines[0], 1)
    try:
        n, N = int(hdr["n"]), int(hdr["N"])
    except ValueError:
        raise PointCloudFormatError("n and N must be integers", 1) from None
    weighted = hdr.get("weighted") == "1"
    width = N + 1 if weighted else N
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != width:
            raise PointCloudFormatError(f"expected {width} values, found {len(parts)}", lineno)
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise PointCloudFormatError("non-numeric value", lineno) from None
    if len(rows) != n:
        raise PointCloudFormatError(f"header declares n={n} but file has {len(rows)} rows")
    data = np.array(rows, dtype=np.float64).reshape(n, width)
    spec = None if hdr["spec"] == "none" else parse_spec(hdr["spec"])
    seed = None if hdr["seed"] == "none" else int(hdr["seed"])
    weights = data[:, N] if weighted else None
    return PointCloud(
        data[:, :N], spec=spec, seed=seed, weights=weights, density=hdr.get("density")
    )
