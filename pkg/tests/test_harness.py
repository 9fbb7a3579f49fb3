import numpy as np
import pytest

from empiricci.fields import Coordinate, PolarizedDistance
from empiricci.geometry import analytic_gamma
from empiricci.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    format_csv,
    oracle_values,
    query_points,
    run_converge,
    summarize,
    worker_count,
)
from empiricci.pointcloud import Circle, CliffordTorus, Sphere
from empiricci.ricci import ScheduleConfig, schedule_t

S2 = Sphere(2, 1.0)


@pytest.mark.parametrize("spec", [S2, Circle(2.0), CliffordTorus(1.0, 0.5), Sphere(3, 1.0)], ids=str)
def test_query_points_lie_on_manifold(spec):
    Q = query_points(spec, 12)
    assert Q.shape == (12, spec.ambient_dim)
    assert np.max(spec.residuals(Q)) < 1e-12
    assert np.array_equal(Q, query_points(spec, 12))


def test_config_defaults_and_validation():
    cfg = ExperimentConfig(spec=S2, field=Coordinate(2), op="gamma")
    assert cfg.schedule == ScheduleConfig(d=2, kind="gamma")
    assert cfg.bandwidth(1000) == schedule_t(1000, cfg.schedule)
    assert ExperimentConfig(spec=S2, field=Coordinate(2), t=0.2).bandwidth(10) == 0.2
    with pytest.raises(ValueError):
        ExperimentConfig(spec=S2, field=Coordinate(2), op="hessian")
    with pytest.raises(ValueError):
        ExperimentConfig(spec=S2, field=Coordinate(2), ns=[200, 100])
    with pytest.raises(ValueError):
        ExperimentConfig(spec=S2, field=Coordinate(2), seeds=[])


def test_worker_count(monkeypatch):
    monkeypatch.setenv("RICCI_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("RICCI_THREADS")
    assert worker_count() >= 1
    monkeypatch.setenv("RICCI_THREADS", "-2")
    with pytest.raises(ValueError):
        worker_count()


def test_analytic_oracle():
    cfg = ExperimentConfig(spec=S2, field=Coordinate(2), op="gamma", n_queries=5)
    expected = [analytic_gamma(S2, 2, q) for q in cfg.queries]
    assert np.allclose(oracle_values(cfg, 0.1), expected)


def test_quadrature_oracle_is_used_without_closed_form():
    T = CliffordTorus(1.0, 1.0)
    f = PolarizedDistance(np.array([1.0, 0.0, 1.0, 0.0]), np.array([0.0, 1.0, 1.0, 0.0]))
    cfg = ExperimentConfig(spec=T, field=f, op="gamma", ns=[50], seeds=[0], t=0.3, n_queries=3)
    vals = oracle_values(cfg, 0.3)
    assert vals.shape == (3,) and np.all(np.isfinite(vals))


def test_records_and_csv_are_worker_independent():
    cfg = ExperimentConfig(spec=Circle(1.0), field=Coordinate(0), op="laplacian", ns=[100, 200], seeds=[0, 1, 2], n_queries=4)
    serial = run_converge(cfg, workers=1)
    threaded = run_converge(cfg, workers=4)
    assert serial == threaded
    assert [(r.n, r.seed, r.query) for r in serial] == [
        (n, s, q) for n in (100, 200) for s in (0, 1, 2) for q in range(4)
    ]
    text = format_csv(serial, {"spec": "circle:r=1"})
    lines = text.splitlines()
    assert lines[0] == "# converge spec=circle:r=1"
    assert lines[1] == ",".join(CSV_COLUMNS)
    assert len([ln for ln in lines if not ln.startswith("#")]) == 1 + len(serial)
    assert lines[-1].startswith("# summary n=200 median_abs_error=")
    assert "# generated=now" in format_csv(serial, timestamp="now")


def test_summarize():
    cfg = ExperimentConfig(spec=Circle(1.0), field=Coordinate(0), op="gamma", ns=[100], seeds=[0], n_queries=3)
    recs = run_converge(cfg, workers=1)
    assert summarize(recs) == {100: float(np.median([r.abs_error for r in recs]))}
