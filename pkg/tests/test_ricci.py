import math

import numpy as np
import pytest

from empiricci.fields import PolarizedDistance, UnitPolarizedDistance
from empiricci.geometry import exp_map
from empiricci.kernels import gamma2_hat, gamma2_hat_direct
from empiricci.pointcloud import Sphere, quadrature_grid, sample_uniform
from empiricci.ricci import (
    LimitSchedule,
    ScheduleConfig,
    empirical_coarse_ricci,
    empirical_life_sized,
    richardson,
    ricci_limit_estimate,
    schedule_t,
)

S2 = Sphere(2, 1.0)
X0 = np.array([1.0, 0.0, 0.0])
V0 = np.array([0.0, 1.0, 0.0])


@pytest.fixture(scope="module")
def cloud():
    return sample_uniform(S2, 800, 5)


# -- schedules -----------------------------------------------------------------


def test_schedule_examples():
    assert schedule_t(1024, ScheduleConfig(d=1, sigma=0.5)) == pytest.approx(0.344252362798567, rel=1e-14)
    assert schedule_t(1000, ScheduleConfig(d=2, sigma=0.1)) == pytest.approx(1000 ** (-1 / 9.1), rel=1e-15)
    assert schedule_t(1000, ScheduleConfig(d=2, sigma=0.1)) == pytest.approx(0.46809, abs=1e-5)


@pytest.mark.parametrize("kind", ["gamma", "gamma2", "weighted"])
def test_schedule_in_unit_interval_and_decreasing(kind):
    cfg = ScheduleConfig(d=3, sigma=0.5, kind=kind)
    values = [schedule_t(n, cfg) for n in (2, 3, 10, 1000, 10**8)]
    assert all(0 < v < 1 for v in values)
    assert all(b < a for a, b in zip(values, values[1:]))
    assert schedule_t(2000, cfg) < schedule_t(1000, cfg)


def test_schedule_bases():
    assert ScheduleConfig(d=2, sigma=0.5, kind="gamma").exponent == pytest.approx(-1 / 4.5)
    assert ScheduleConfig(d=2, sigma=0.5, kind="gamma2").exponent == pytest.approx(-1 / 9.5)
    assert ScheduleConfig(d=2, sigma=0.5, kind="weighted").exponent == pytest.approx(-1 / 12.5)


@pytest.mark.parametrize("kw", [dict(d=0), dict(d=2, sigma=0.0), dict(d=2, kind="other")])
def test_schedule_config_validation(kw):
    with pytest.raises(ValueError):
        ScheduleConfig(**kw)


def test_schedule_needs_two_samples():
    with pytest.raises(ValueError):
        schedule_t(1, ScheduleConfig(d=1))


# -- coarse curvature ----------------------------------------------------------


def test_equal_points_give_zero(cloud):
    est = empirical_coarse_ricci(cloud, 0.3, X0, X0)
    assert est.value == 0.0 and not est.life_sized


def test_life_sized_needs_distinct_points(cloud):
    with pytest.raises(ValueError):
        empirical_life_sized(cloud, 0.3, X0, X0)


def test_polarized_field_anchors():
    y = np.array([0.0, 1.0, 0.0])
    f = PolarizedDistance(X0, y)
    F = UnitPolarizedDistance(X0, y)
    Z = np.vstack([X0, y])
    assert np.allclose(f(Z), [0.0, 2.0])
    assert np.allclose(F(Z), [0.0, math.sqrt(2.0)])


def test_life_sized_homogeneity(cloud):
    y = exp_map(S2, X0, V0, 0.4)
    coarse = empirical_coarse_ricci(cloud, 0.3, X0, y).value
    life = empirical_life_sized(cloud, 0.3, X0, y).value
    assert life * np.sum((X0 - y) ** 2) == pytest.approx(coarse, rel=1e-10)


@pytest.mark.parametrize("c", [0.5, 3.0, -2.0])
def test_quadratic_homogeneity(cloud, c):
    y = exp_map(S2, X0, V0, 0.4)
    f = PolarizedDistance(X0, y)
    scaled = lambda Z: c * f(Z)  # noqa: E731
    assert gamma2_hat(cloud, 0.3, scaled, X0) == pytest.approx(c * c * gamma2_hat(cloud, 0.3, f, X0), rel=1e-12)


def test_matches_direct_form(cloud):
    y = exp_map(S2, X0, V0, 0.3)
    value = empirical_coarse_ricci(cloud, 0.3, X0, y).value
    assert value == pytest.approx(gamma2_hat_direct(cloud, 0.3, PolarizedDistance(X0, y), X0), rel=1e-9)


def test_permutation_invariance(cloud):
    y = exp_map(S2, X0, V0, 0.3)
    perm = np.random.default_rng(0).permutation(cloud.n)
    a = empirical_coarse_ricci(cloud, 0.3, X0, y).value
    b = empirical_coarse_ricci(cloud.points[perm], 0.3, X0, y).value
    assert a == pytest.approx(b, rel=1e-12)


def test_golden_value_on_sphere_sample():
    c = sample_uniform(S2, 8000, 0)
    y = exp_map(S2, X0, V0, 0.3)
    t = schedule_t(8000, ScheduleConfig(d=2))
    est = empirical_coarse_ricci(c, t, X0, y)
    assert est.n == 8000 and est.t == t
    # pinned after checking against the double-sum form
    assert est.value == pytest.approx(0.1126984638671678, rel=1e-10)


def test_single_arclength_on_grid():
    y = exp_map(S2, X0, V0, 0.3)
    value = empirical_life_sized(quadrature_grid(S2, 60), 0.005, X0, y).value
    assert abs(value - 1.0) <= 0.35


# -- limit extraction ----------------------------------------------------------


def test_richardson_is_exact_on_linear_models():
    assert richardson([0.4, 0.2], [1.0 + 2 * 0.4, 1.0 + 2 * 0.2]) == pytest.approx(1.0)
    assert richardson([0.5, 0.3, 0.1], [4.0, 4.0, 4.0]) == pytest.approx(4.0)
    assert richardson([0.5], [1.0]) is None


def test_limit_schedule_validation():
    with pytest.raises(ValueError):
        LimitSchedule(lambdas=(0.2, 0.3))
    with pytest.raises(ValueError):
        LimitSchedule(lambdas=(0.2, -0.1))
    with pytest.raises(ValueError):
        LimitSchedule(coupling="cubic")
    q = LimitSchedule(coupling="quadratic", t=None, c=0.1)
    assert q.bandwidth(0.5) == pytest.approx(0.025)


def test_limit_reports_smallest_arclength():
    grid = quadrature_grid(S2, 40)
    res = ricci_limit_estimate(grid, S2, X0, V0, LimitSchedule(lambdas=(0.6, 0.45), t=0.02))
    assert [p.lam for p in res.points] == [0.6, 0.45]
    assert res.limit == res.points[-1].value
    assert res.richardson == pytest.approx(richardson([0.6, 0.45], [p.value for p in res.points]))
