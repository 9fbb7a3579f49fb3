"""Scalar test functions evaluated at ambient points.

Every field is a callable mapping an ``(m, N)`` array of points to ``m``
values. Plain Python callables with the same signature are accepted anywhere
a field is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .pointcloud import sq_dists
from .validation import check_points

__all__ = [
    "Coordinate",
    "Constant",
    "SquaredDistanceTo",
    "PolarizedDistance",
    "UnitPolarizedDistance",
    "Tabulated",
    "Product",
    "eval_field",
    "parse_field",
]


@dataclass(frozen=True)
class Coordinate:
    """The ambient coordinate ``z[axis]`` (zero-based)."""

    axis: int

    def __call__(self, Z):
        return np.asarray(Z, dtype=np.float64)[:, self.axis].copy()


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    def __call__(self, Z):
        return np.full(np.asarray(Z).shape[0], float(self.value))


@dataclass(frozen=True, eq=False)
class SquaredDistanceTo:
    y: np.ndarray

    def __call__(self, Z):
        return sq_dists(Z, np.atleast_2d(self.y))[:, 0]


@dataclass(frozen=True, eq=False)
class PolarizedDistance:
    """z -> (|x-y|^2 - |y-z|^2 + |z-x|^2) / 2.

    Vanishes at ``x`` and equals |x-y|^2 at ``y``.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64).ravel())
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.float64).ravel())

    @property
    def sq_sep(self):
        return float(sq_dists(self.x[None], self.y[None])[0, 0])

    def __call__(self, Z):
        to_y = sq_dists(Z, self.y[None])[:, 0]
        to_x = sq_dists(Z, self.x[None])[:, 0]
        return 0.5 * (self.sq_sep - to_y + to_x)


@dataclass(frozen=True, eq=False)
class UnitPolarizedDistance(PolarizedDistance):
    """:class:`PolarizedDistance` divided by |x-y|; equals |x-y| at ``y``."""

    def __post_init__(self):
        super().__post_init__()
        if self.sq_sep == 0.0:
            raise ValueError("x and y must differ")

    def __call__(self, Z):
        return super().__call__(Z) / math.sqrt(self.sq_sep)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Values stored at known points, with an optional evaluator elsewhere."""

    points: np.ndarray
    values: np.ndarray
    evaluator: Optional[Callable] = None

    def __post_init__(self):
        pts = check_points(self.points, name="points")
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if vals.shape[0] != pts.shape[0]:
            raise ValueError("one value per point required")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_index", {p.tobytes(): i for i, p in enumerate(pts)})

    def __call__(self, Z):
        Z = np.ascontiguousarray(Z, dtype=np.float64)
        out = np.empty(Z.shape[0])
        missing = []
        for i, z in enumerate(Z):
            j = self._index.get(z.tobytes())
            if j is None:
                missing.append(i)
            else:
                out[i] = self.values[j]
        if missing:
            if self.evaluator is None:
                raise KeyError(f"{len(missing)} query points are not tabulated")
            out[missing] = self.evaluator(Z[missing])
        return out


@dataclass(frozen=True)
class Product:
    f: Callable
    h: Callable

    def __call__(self, Z):
        return self.f(Z) * self.h(Z)


def eval_field(field, z):
    """Evaluate ``field`` at a single point (1-D ``z``) or at rows of ``z``."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 1:
        return float(field(z[None, :])[0])
    return field(z)


def _vector(text):
    return np.array([float(v) for v in text.split(";")])


def parse_field(text: str):
    """Parse ``coord:i``, ``const:c``, ``fxy:x1;x2;..|y1;y2;..`` or ``Fxy:...``."""
    kind, _, rest = text.partition(":")
    if kind == "coord":
        return Coordinate(int(rest))
    if kind == "const":
        return Constant(float(rest))
    if kind in ("fxy", "Fxy"):
        xs, sep, ys = rest.partition("|")
        if not sep:
            raise ValueError(f"{kind} needs 'x|y' points, got {rest!r}")
        cls = PolarizedDistance if kind == "fxy" else UnitPolarizedDistance
        return cls(_vector(xs), _vector(ys))
    raise ValueError(f"unknown field {text!r}")
