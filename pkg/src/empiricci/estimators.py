"""scikit-learn style wrappers around the kernel operators.

``fit`` stores the sample (and optional ``sample_weight``) and resolves the
bandwidth, either the fixed ``t`` or the schedule t_n for the fitted sample
size. ``predict`` evaluates the operator at new query points::

    est = IteratedCarreDuChamp(field=Coordinate(2), schedule="gamma2", dim=2)
    est.fit(cloud.points).predict(queries)
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import kernels
from .pointcloud import PointCloud
from .ricci import ScheduleConfig, empirical_coarse_ricci, empirical_life_sized, schedule_t
from .validation import check_bandwidth, check_points, check_weights

__all__ = [
    "ThetaDensity",
    "TLaplacian",
    "CarreDuChamp",
    "IteratedCarreDuChamp",
    "CoarseRicci",
]


class _KernelEstimator(BaseEstimator):
    def _fit_cloud(self, X, sample_weight):
        if isinstance(X, PointCloud):
            if sample_weight is None:
                sample_weight = X.weights
            X = X.points
        X = check_points(X)
        if sample_weight is not None:
            sample_weight = check_weights(sample_weight, X.shape[0])
        self.cloud_ = X
        self.sample_weight_ = sample_weight
        self.n_features_in_ = X.shape[1]
        if self.t is not None:
            self.t_ = check_bandwidth(self.t)
        else:
            if self.dim is None:
                raise ValueError("set either t or dim (for the bandwidth schedule)")
            cfg = ScheduleConfig(d=self.dim, sigma=self.sigma, kind=self.schedule)
            self.t_ = schedule_t(X.shape[0], cfg)
        return self

    def fit(self, X, y=None, sample_weight=None):
        """Store the sample ``X`` of shape (n, N) and resolve the bandwidth."""
        return self._fit_cloud(X, sample_weight)

    def _check_query(self, X):
        check_is_fitted(self, "cloud_")
        return check_points(X, n_features=self.n_features_in_)


class ThetaDensity(_KernelEstimator):
    """Empirical t-density, optionally density-corrected with exponent ``alpha``.

    Parameters
    ----------
    t : float, optional
        Fixed bandwidth. When ``None`` the schedule below is used.
    schedule : {"gamma", "gamma2", "weighted"}
    sigma : float
        Slack in the schedule exponent.
    dim : int, optional
        Intrinsic dimension (or an upper bound) for the schedule.
    alpha : float in [0, 1]
    """

    def __init__(self, t=None, schedule="gamma2", sigma=0.5, dim=None, alpha=0.0):
        self.t = t
        self.schedule = schedule
        self.sigma = sigma
        self.dim = dim
        self.alpha = alpha

    def predict(self, X):
        X = self._check_query(X)
        return kernels.theta_alpha_hat(
            self.cloud_, self.t_, self.alpha, X, sample_weight=self.sample_weight_
        )


class TLaplacian(_KernelEstimator):
    """Empirical t-Laplacian of ``field``; ``alpha`` > 0 removes density drift."""

    def __init__(self, field=None, t=None, schedule="gamma2", sigma=0.5, dim=None, alpha=0.0):
        self.field = field
        self.t = t
        self.schedule = schedule
        self.sigma = sigma
        self.dim = dim
        self.alpha = alpha

    def predict(self, X):
        X = self._check_query(X)
        return kernels.l_t_alpha_hat(
            self.cloud_, self.t_, self.alpha, self.field, X, sample_weight=self.sample_weight_
        )


class CarreDuChamp(_KernelEstimator):
    """Empirical Carré du champ Γ̂(field, field2); ``field2=None`` means Γ̂(f, f)."""

    def __init__(self, field=None, field2=None, t=None, schedule="gamma", sigma=0.5, dim=None):
        self.field = field
        self.field2 = field2
        self.t = t
        self.schedule = schedule
        self.sigma = sigma
        self.dim = dim

    def predict(self, X):
        X = self._check_query(X)
        h = self.field if self.field2 is None else self.field2
        return kernels.gamma_hat(
            self.cloud_, self.t_, self.field, h, X, sample_weight=self.sample_weight_
        )


class IteratedCarreDuChamp(_KernelEstimator):
    """Empirical Γ̂₂(field, field) at query points."""

    def __init__(self, field=None, t=None, schedule="gamma2", sigma=0.5, dim=None):
        self.field = field
        self.t = t
        self.schedule = schedule
        self.sigma = sigma
        self.dim = dim

    def predict(self, X):
        X = self._check_query(X)
        return kernels.gamma2_hat(
            self.cloud_, self.t_, self.field, X, sample_weight=self.sample_weight_
        )

    def predict_direct(self, X):
        """Same quantity through the explicit double sums (O(n²) per query)."""
        X = self._check_query(X)
        return kernels.gamma2_hat_direct(
            self.cloud_, self.t_, self.field, X, sample_weight=self.sample_weight_
        )


class CoarseRicci(_KernelEstimator):
    """Empirical coarse Ricci curvature for pairs of points.

    ``predict`` takes an array of shape (m, 2N) whose rows are ``[x, y]``.
    With ``life_sized=True`` the field is normalized by |x - y|, so along a
    short geodesic the output approaches Ric(V, V).
    """

    def __init__(self, t=None, schedule="gamma2", sigma=0.5, dim=None, life_sized=True):
        self.t = t
        self.schedule = schedule
        self.sigma = sigma
        self.dim = dim
        self.life_sized = life_sized

    def fit(self, X, y=None, sample_weight=None):
        if sample_weight is not None:
            raise ValueError("coarse Ricci estimates use the empirical measure of the sample")
        return self._fit_cloud(X, None)

    def predict(self, pairs):
        check_is_fitted(self, "cloud_")
        N = self.n_features_in_
        pairs = check_points(pairs, n_features=2 * N, name="pairs")
        estimate = empirical_life_sized if self.life_sized else empirical_coarse_ricci
        return np.array([estimate(self.cloud_, self.t_, p[:N], p[N:]).value for p in pairs])
