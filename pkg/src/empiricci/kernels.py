"""Empirical t-densities, t-Laplacians and Carré du champ operators.

All operators use the Gaussian kernel ``w = exp(-|x - ξ|² / 2t)`` against a
weighted point set and are normalized by the empirical t-density

    θ̂(x) = Σ_j μ_j w_j(x),

so every operator is invariant under rescaling the masses ``μ``. Query points
need not belong to the cloud. Sums run over contiguous rows in index order
(numpy pairwise summation), which makes results independent of how queries
are chunked.

``cloud`` arguments accept a :class:`~empiricci.pointcloud.PointCloud` or an
``(n, N)`` array; ``sample_weight`` overrides the masses (any positive scale).
Fields are callables mapping an ``(m, N)`` array to ``m`` values.
"""

import math
import warnings

import numpy as np

from .pointcloud import PointCloud, sq_dists
from .validation import BandwidthError, check_alpha, check_bandwidth, check_points, check_weights

__all__ = [
    "SparseKernelWarning",
    "theta_hat",
    "effective_count",
    "density_ratio",
    "l_t_hat",
    "gamma_hat",
    "gamma2_hat",
    "gamma2_hat_direct",
    "theta_alpha_hat",
    "l_t_alpha_hat",
]

THETA_FLOOR = 1e-300
NEFF_FRACTION = 1e-8
NEFF_WARN = 10.0
_BLOCK_ELEMS = 1 << 21


class SparseKernelWarning(RuntimeWarning):
    """Fewer than ten sample points carry appreciable kernel weight."""


def _resolve(cloud, sample_weight):
    if isinstance(cloud, PointCloud):
        P, mu = cloud.points, cloud.mu
    else:
        P = check_points(cloud, name="cloud")
        mu = np.full(P.shape[0], 1.0 / P.shape[0])
    if sample_weight is not None:
        mu = check_weights(sample_weight, P.shape[0])
    return P, mu


def _queries(x, N):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    return check_points(x, n_features=N, name="x"), single


def _out(values, single):
    return float(values[0]) if single else values


def _kernel_pass(P, mu, t, X, lap=(), carre=(), *, warn=True):
    """One sweep of the kernel between queries ``X`` and cloud ``P``.

    ``lap`` holds ``(g_cloud, g_query)`` pairs and ``carre`` holds
    ``(a_cloud, a_query, b_cloud, b_query)`` tuples. Returns ``theta``, the
    effective counts, the t-Laplacians of each ``lap`` entry and the Carré du
    champ of each ``carre`` entry, all at the rows of ``X``.
    """
    m, n = X.shape[0], P.shape[0]
    theta = np.empty(m)
    neff = np.empty(m)
    laps = [np.empty(m) for _ in lap]
    carres = [np.empty(m) for _ in carre]
    step = max(1, _BLOCK_ELEMS // max(n, 1))
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        W = np.exp(sq_dists(X[lo:hi], P) / (-2.0 * t))
        K = W * mu
        th = K.sum(axis=1)
        ne = W.sum(axis=1)
        bad = np.flatnonzero((th < THETA_FLOOR) | (ne < NEFF_FRACTION * n))
        if bad.size:
            i = lo + int(bad[0])
            raise BandwidthError(
                f"bandwidth too small for sample: theta={th[bad[0]]:.3g}, "
                f"n_eff={ne[bad[0]]:.3g} at query {i}",
                query_index=i,
            )
        theta[lo:hi], neff[lo:hi] = th, ne
        for out, (gp, gq) in zip(laps, lap):
            out[lo:hi] = (K * (gp[None, :] - gq[lo:hi, None])).sum(axis=1) * (2.0 / t) / th
        for out, (ap, aq, bp, bq) in zip(carres, carre):
            da = ap[None, :] - aq[lo:hi, None]
            db = bp[None, :] - bq[lo:hi, None]
            # product of differences first, so that swapping (a, b) is exact
            out[lo:hi] = (K * (da * db)).sum(axis=1) / (t * th)
    if warn and np.any(neff < NEFF_WARN):
        i = int(np.flatnonzero(neff < NEFF_WARN)[0])
        warnings.warn(
            f"effective sample count {neff[i]:.3g} < {NEFF_WARN:g} at query {i}",
            SparseKernelWarning,
            stacklevel=3,
        )
    return theta, neff, laps, carres


def theta_hat(cloud, t, x, *, sample_weight=None):
    """Empirical t-density Σ μ_j exp(-|x - ξ_j|² / 2t)."""
    t = check_bandwidth(t)
    P, mu = _resolve(cloud, sample_weight)
    X, single = _queries(x, P.shape[1])
    theta, _, _, _ = _kernel_pass(P, mu, t, X)
    return _out(theta, single)


def effective_count(cloud, t, x):
    """Σ_j exp(-|x - ξ_j|² / 2t): the number of points the kernel effectively sees."""
    t = check_bandwidth(t)
    P, mu = _resolve(cloud, None)
    X, single = _queries(x, P.shape[1])
    _, neff, _, _ = _kernel_pass(P, mu, t, X, warn=False)
    return _out(neff, single)


def density_ratio(cloud, t, x, dim, volume):
    """(2πt)^(d/2) / (θ̂(x) · volume), which tends to 1 as t -> 0 for uniform samples.

    This is the dimensional normalizer the t-Laplacian deliberately avoids;
    it is exposed only to check the small-t density expansion.
    """
    theta = theta_hat(cloud, t, x)
    return (2.0 * math.pi * check_bandwidth(t)) ** (dim / 2) / (np.asarray(theta) * volume)


def l_t_hat(cloud, t, field, x, *, sample_weight=None):
    """Empirical t-Laplacian (2 / t θ̂(x)) Σ μ_j w_j (f(ξ_j) - f(x))."""
    t = check_bandwidth(t)
    P, mu = _resolve(cloud, sample_weight)
    X, single = _queries(x, P.shape[1])
    fp, fq = field(P), field(X)
    _, _, (lf,), _ = _kernel_pass(P, mu, t, X, lap=[(fp, fq)])
    return _out(lf, single)


def gamma_hat(cloud, t, f, h, x, *, sample_weight=None):
    """Empirical Carré du champ (1 / t θ̂(x)) Σ μ_j w_j (f_j - f(x)) (h_j - h(x))."""
    t = check_bandwidth(t)
    P, mu = _resolve(cloud, sample_weight)
    X, single = _queries(x, P.shape[1])
    fp, fq = f(P), f(X)
    hp, hq = (fp, fq) if h is f else (h(P), h(X))
    _, _, _, (g,) = _kernel_pass(P, mu, t, X, carre=[(fp, fq, hp, hq)])
    return _out(g, single)


def gamma2_hat(cloud, t, f, x, *, sample_weight=None):
    """Iterated Carré du champ ½ (L̂(Γ̂(f,f)) - 2 Γ̂(L̂f, f)) at ``x``.

    Γ̂(f,f) and L̂f are first tabulated at every sample point (one n x n
    sweep), then composed at the queries. Cost is O(n² + m n).
    """
    t = check_bandwidth(t)
    P, mu = _resolve(cloud, sample_weight)
    X, single = _queries(x, P.shape[1])
    fp, fq = f(P), f(X)
    _, _, (vp,), (up,) = _kernel_pass(P, mu, t, P, lap=[(fp, fp)], carre=[(fp, fp, fp, fp)], warn=False)
    _, _, (vq,), (uq,) = _kernel_pass(P, mu, t, X, lap=[(fp, fq)], carre=[(fp, fq, fp, fq)])
    _, _, (lu,), (gvf,) = _kernel_pass(P, mu, t, X, lap=[(up, uq)], carre=[(vp, vq, fp, fq)], warn=False)
    return _out(0.5 * lu - gvf, single)


def gamma2_hat_direct(cloud, t, f, x, *, sample_weight=None):
    """Iterated Carré du champ written out as four explicit double sums.

    A cross-check for :func:`gamma2_hat` that never forms L̂f or Γ̂(f,f)::

        t² Γ̂₂ =   Σ_jk μ_j μ_k w_xj w_jk (f_k - f_j)²            / θ̂_x θ̂_j
                -  Σ_jk μ_j μ_k w_xj w_xk (f_k - f_x)²            / θ̂_x²
                - 2Σ_jk μ_j μ_k w_xj w_jk (f_k - f_j)(f_j - f_x)  / θ̂_x θ̂_j
                + 2Σ_jk μ_j μ_k w_xj w_xk (f_k - f_x)(f_j - f_x)  / θ̂_x²
    """
    t = check_bandwidth(t)
    P, mu = _resolve(cloud, sample_weight)
    X, single = _queries(x, P.shape[1])
    fp, fq = f(P), f(X)
    w_pp = np.exp(sq_dists(P, P) / (-2.0 * t))
    theta_p = (w_pp * mu).sum(axis=1)
    mm = mu[:, None] * mu[None, :]
    dkj = fp[None, :] - fp[:, None]  # [j, k] = f_k - f_j
    out = np.empty(X.shape[0])
    for i, xq in enumerate(X):
        w_x = np.exp(sq_dists(xq[None], P)[0] / (-2.0 * t))
        theta_x = float((w_x * mu).sum())
        if theta_x < THETA_FLOOR:
            raise BandwidthError("bandwidth too small for sample", query_index=i)
        dx = fp - fq[i]
        a = w_x[:, None] * w_pp  # w_xj w_jk
        b = w_x[:, None] * w_x[None, :]  # w_xj w_xk
        s1 = (mm * a * dkj**2 / (theta_x * theta_p[:, None])).sum()
        s2 = (mm * b * (dx**2)[None, :] / theta_x**2).sum()
        s3 = (mm * a * dkj * dx[:, None] / (theta_x * theta_p[:, None])).sum()
        s4 = (mm * b * dx[None, :] * dx[:, None] / theta_x**2).sum()
        out[i] = (s1 - s2 - 2.0 * s3 + 2.0 * s4) / t**2
    return _out(out, single)


def _alpha_masses(P, mu, t, alpha):
    if alpha == 0.0:
        return mu
    theta_p, _, _, _ = _kernel_pass(P, mu, t, P, warn=False)
    return mu / theta_p**alpha


def theta_alpha_hat(cloud, t, alpha, x, *, sample_weight=None):
    """Σ_j μ_j w_j / θ̂(ξ_j)^α, the density-corrected t-density."""
    t, alpha = check_bandwidth(t), check_alpha(alpha)
    P, mu = _resolve(cloud, sample_weight)
    X, single = _queries(x, P.shape[1])
    q = _alpha_masses(P, mu, t, alpha)
    theta, _, _, _ = _kernel_pass(P, q, t, X)
    return _out(theta, single)


def l_t_alpha_hat(cloud, t, alpha, field, x, *, sample_weight=None):
    """t-Laplacian with masses reweighted by θ̂(ξ_j)^-α.

    α = 0 is :func:`l_t_hat`; α = 1 cancels the sampling density to leading
    order so the limit is the Laplace-Beltrami operator itself.
    """
    t, alpha = check_bandwidth(t), check_alpha(alpha)
    P, mu = _resolve(cloud, sample_weight)
    q = _alpha_masses(P, mu, t, alpha)
    return l_t_hat(P, t, field, x, sample_weight=q)
