import math

import numpy as np
import pytest

from empiricci.fields import (
    Constant,
    Coordinate,
    PolarizedDistance,
    Product,
    SquaredDistanceTo,
    Tabulated,
    UnitPolarizedDistance,
    eval_field,
    parse_field,
)

Z = np.array([[1.0, 2.0, 3.0], [0.0, -1.0, 0.5]])


def test_basic_fields():
    assert np.array_equal(Coordinate(1)(Z), [2.0, -1.0])
    assert np.array_equal(Constant(4.0)(Z), [4.0, 4.0])
    assert np.allclose(SquaredDistanceTo(np.zeros(3))(Z), [14.0, 1.25])
    assert np.allclose(Product(Coordinate(0), Coordinate(2))(Z), [3.0, 0.0])
    assert eval_field(Coordinate(2), Z[0]) == 3.0


def test_polarized_distance_anchors():
    x, y = np.array([1.0, 0.0]), np.array([0.0, 2.0])
    f = PolarizedDistance(x, y)
    F = UnitPolarizedDistance(x, y)
    assert f.sq_sep == pytest.approx(5.0)
    assert eval_field(f, x) == 0.0
    assert eval_field(f, y) == pytest.approx(5.0)
    assert eval_field(F, y) == pytest.approx(math.sqrt(5.0))
    z = np.array([[0.3, -0.7]])
    assert F(z)[0] * math.sqrt(5.0) == pytest.approx(f(z)[0])
    with pytest.raises(ValueError):
        UnitPolarizedDistance(x, x)


def test_tabulated():
    pts = np.array([[0.0, 1.0], [2.0, 3.0]])
    tab = Tabulated(pts, np.array([10.0, 20.0]))
    assert np.array_equal(tab(pts[::-1]), [20.0, 10.0])
    with pytest.raises(KeyError):
        tab(np.array([[5.0, 5.0]]))
    tab = Tabulated(pts, np.array([10.0, 20.0]), evaluator=Coordinate(0))
    assert np.array_equal(tab(np.array([[0.0, 1.0], [7.0, 7.0]])), [10.0, 7.0])


@pytest.mark.parametrize(
    "text, expected",
    [
        ("coord:2", Coordinate(2)),
        ("const:1.5", Constant(1.5)),
    ],
)
def test_parse_simple(text, expected):
    assert parse_field(text) == expected


def test_parse_polarized():
    f = parse_field("fxy:1;0|0;1")
    assert isinstance(f, PolarizedDistance) and not isinstance(f, UnitPolarizedDistance)
    assert np.array_equal(f.y, [0.0, 1.0])
    assert isinstance(parse_field("Fxy:1;0|0;1"), UnitPolarizedDistance)


@pytest.mark.parametrize("text", ["coord", "fxy:1;0", "banana:1", "const:x"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_field(text)
