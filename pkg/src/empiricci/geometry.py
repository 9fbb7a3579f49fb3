"""Closed-form geometry of the reference manifolds.

Analytic values used as ground truth by the tests and the sweep harness:
exponential maps, tangent projections, and Γ, Γ₂, Δ of coordinate functions
on round spheres, plus Ricci curvature of every supported manifold.
"""

import math

import numpy as np

from .pointcloud import Circle, CliffordTorus, Sphere

__all__ = [
    "TANGENT_TOL",
    "normal_basis",
    "tangent_project",
    "exp_map",
    "analytic_gamma",
    "analytic_gamma2",
    "analytic_laplacian",
    "bochner_gamma2",
    "true_ricci",
]

TANGENT_TOL = 1e-10


def _vec(x):
    return np.asarray(x, dtype=np.float64).ravel()


def _on_manifold(spec, x):
    x = _vec(x)
    if x.shape[0] != spec.ambient_dim:
        raise ValueError(f"point has {x.shape[0]} coordinates, {spec} needs {spec.ambient_dim}")
    if spec.residuals(x[None])[0] > TANGENT_TOL:
        raise ValueError(f"point {x} is not on {spec}")
    return x


def normal_basis(spec, x):
    """Orthonormal basis of the normal space at ``x``, one row per vector."""
    x = _on_manifold(spec, x)
    if isinstance(spec, (Sphere, Circle)):
        return (x / np.linalg.norm(x))[None]
    if isinstance(spec, CliffordTorus):
        n1 = np.array([x[0], x[1], 0.0, 0.0]) / spec.r1
        n2 = np.array([0.0, 0.0, x[2], x[3]]) / spec.r2
        return np.stack([n1, n2])
    raise TypeError(f"unsupported manifold {spec!r}")


def tangent_project(spec, x, W):
    """Orthogonal projection of the ambient vector ``W`` onto T_x."""
    W = _vec(W)
    nb = normal_basis(spec, x)
    return W - nb.T @ (nb @ W)


def _check_unit_tangent(spec, x, V):
    V = _vec(V)
    normal = normal_basis(spec, x) @ V
    if np.max(np.abs(normal)) > TANGENT_TOL:
        raise ValueError("direction is not tangent at x")
    if abs(float(V @ V) - 1.0) > TANGENT_TOL:
        raise ValueError("direction is not a unit vector")
    return V


def exp_map(spec, x, V, lam):
    """Point reached from ``x`` after arclength ``lam`` along unit tangent ``V``."""
    if lam < 0:
        raise ValueError("arclength must be nonnegative")
    x = _on_manifold(spec, x)
    V = _check_unit_tangent(spec, x, V)
    if lam == 0:
        return x.copy()
    if isinstance(spec, (Sphere, Circle)):
        r = spec.r
        return math.cos(lam / r) * x + r * math.sin(lam / r) * V
    # flat torus: angular speeds along each factor circle
    a, b = math.atan2(x[1], x[0]), math.atan2(x[3], x[2])
    ea = np.array([-math.sin(a), math.cos(a), 0.0, 0.0])
    eb = np.array([0.0, 0.0, -math.sin(b), math.cos(b)])
    a += lam * float(V @ ea) / spec.r1
    b += lam * float(V @ eb) / spec.r2
    return np.array(
        [spec.r1 * math.cos(a), spec.r1 * math.sin(a), spec.r2 * math.cos(b), spec.r2 * math.sin(b)]
    )


def _sphere_coord(spec, axis, x):
    if not isinstance(spec, (Sphere, Circle)):
        raise ValueError(f"no analytic oracle for coordinate fields on {spec}")
    x = _on_manifold(spec, x)
    if not 0 <= axis < x.shape[0]:
        raise ValueError(f"axis {axis} out of range")
    d = spec.intrinsic_dim
    return d, spec.r, x[axis] / spec.r


def analytic_gamma(spec, axis, x):
    """|∇x_axis|² on a round sphere: 1 - x_axis²/r²."""
    _, _, u = _sphere_coord(spec, axis, x)
    return 1.0 - u * u


def analytic_gamma2(spec, axis, x):
    """Γ₂(x_axis, x_axis) on S^d(r): (d u² + (d-1)(1-u²)) / r², u = x_axis/r."""
    d, r, u = _sphere_coord(spec, axis, x)
    return (d * u * u + (d - 1) * (1.0 - u * u)) / (r * r)


def analytic_laplacian(spec, axis, x):
    """Δ x_axis on S^d(r): -d x_axis / r²."""
    d, r, u = _sphere_coord(spec, axis, x)
    return -d * u / r


def bochner_gamma2(spec, axis, x):
    """|Hess f|² + Ric(∇f, ∇f) for f = x_axis, built from the tangent projection.

    Independent of :func:`analytic_gamma2`: the gradient is the projected
    basis vector and the Hessian is the normal component of the constant
    ambient gradient paired with the second fundamental form.
    """
    if not isinstance(spec, (Sphere, Circle)):
        raise TypeError("bochner_gamma2 supports spheres and circles only")
    x = _on_manifold(spec, x)
    d, r = spec.intrinsic_dim, spec.r
    e = np.zeros(x.shape[0])
    e[axis] = 1.0
    grad = tangent_project(spec, x, e)
    # Hess f = -<e, N> / r * g with unit outward normal N
    hess_scalar = -float(normal_basis(spec, x)[0] @ e) / r
    return d * hess_scalar**2 + true_ricci(spec, x) * float(grad @ grad)


def true_ricci(spec, x=None, V=None):
    """Ric(V, V) for a unit tangent ``V`` (curvature is constant on each model)."""
    if x is not None and V is not None:
        _check_unit_tangent(spec, _on_manifold(spec, x), V)
    if isinstance(spec, Sphere):
        return (spec.d - 1) / spec.r**2
    if isinstance(spec, (Circle, CliffordTorus)):
        return 0.0
    raise TypeError(f"unsupported manifold {spec!r}")
