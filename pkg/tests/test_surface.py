import json
import random

import pytest

from cddkit import data_path
from cddkit.errors import DimensionMismatch
from cddkit.surface import Interval, QuadraticResponseSurface, load_surfaces

from conftest import random_surface


@pytest.fixture(scope="module")
def table():
    surfaces = load_surfaces(data_path("emissions_tableI.json").read_text())
    return {s.name: s for s in surfaces}


def test_constants_at_origin(table):
    assert table["CO2"].evaluate((0.0, 0.0, 0.0)) == 5.97
    assert table["NOx"].evaluate((0.0, 0.0, 0.0)) == -4.01
    assert table["Soot"].evaluate((0.0, 0.0, 0.0)) == 1.22


def test_co2_at_unit_corner(table):
    # hand substitution: 5.97 - 1.21 - 11.31 - 0.07 + 0.30 + 6.27 + 0.03
    assert table["CO2"].evaluate((1.0, 1.0, 1.0)) == pytest.approx(-0.02, abs=1e-12)


def test_dimension_mismatch(table):
    with pytest.raises(DimensionMismatch):
        table["CO2"].evaluate((0.0, 0.0))


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)
    assert Interval(2.0, 2.0).width == 0.0


def test_mismatched_coefficient_lengths():
    with pytest.raises(DimensionMismatch):
        QuadraticResponseSurface("bad", "", 0.0, (1.0,), (1.0, 2.0))


def test_gradient_at_origin_is_linear_part(table):
    for s in table.values():
        assert s.gradient((0.0, 0.0, 0.0)) == s.linear


def test_nox_slope_along_first_factor(table):
    nox = table["NOx"]
    assert nox.gradient((0.0, 0.0, 0.0))[0] == pytest.approx(6.53, abs=1e-12)
    # 6.53 + 2 * (-2.37) * 0.5
    assert nox.gradient((0.5, 0.0, 0.0))[0] == pytest.approx(4.16, abs=1e-12)


def test_linear_surface_has_constant_gradient():
    s = QuadraticResponseSurface("lin", "", 1.0, (2.0, -3.0), (0.0, 0.0))
    assert s.gradient((0.0, 0.0)) == s.gradient((5.0, -7.0)) == (2.0, -3.0)


def test_gradient_matches_central_differences():
    rng = random.Random(7)
    h = 1e-4
    for _ in range(200):
        s = random_surface(rng, rng.randint(1, 4))
        x = [rng.uniform(-10.0, 10.0) for _ in range(s.dim)]
        grad = s.gradient(x)
        for j in range(s.dim):
            xp = list(x)
            xm = list(x)
            xp[j] += h
            xm[j] -= h
            fd = (s.evaluate(xp) - s.evaluate(xm)) / (2.0 * h)
            assert abs(grad[j] - fd) <= 1e-6 * max(1.0, abs(grad[j]))


def test_sensitivity_values(table):
    assert table["CO2"].sensitivity(1, (0.0, 0.0, 0.0)) == -11.31
    assert table["Soot"].sensitivity(2, (0.0, 0.0, 0.0)) == -0.02
    with pytest.raises(IndexError):
        table["CO2"].sensitivity(3, (0.0, 0.0, 0.0))


def test_sensitivity_vanishes_at_term_vertex(table):
    s = table["NOx"]
    vertex = s.term_vertex(0)
    point = (vertex, 0.0, 0.0)
    assert s.sensitivity(0, point) == pytest.approx(0.0, abs=1e-12)


def test_term_extrema_against_table_rows(table):
    # convex Soot term along factor 0: endpoint comparison 0 vs -0.07
    value, at = table["Soot"].term_extremum(0, Interval(0.0, 1.0), "max")
    assert value == 0.0 and at == 0.0
    # concave NOx term along factor 0: vertex outside [0, 1], endpoint 1 wins
    value, at = table["NOx"].term_extremum(0, Interval(0.0, 1.0), "max")
    assert at == 1.0
    assert value == pytest.approx(4.16, abs=1e-12)


def test_point_box_reduces_to_evaluate(table):
    s = table["CO2"]
    box = [Interval(0.3, 0.3), Interval(0.7, 0.7), Interval(0.1, 0.1)]
    value, at = s.box_extremum(box, "max")
    assert value == s.evaluate((0.3, 0.7, 0.1))
    assert at == (0.3, 0.7, 0.1)


def test_box_extremum_dominates_sampling():
    rng = random.Random(11)
    for _ in range(60):
        s = random_surface(rng, rng.randint(1, 4))
        box = []
        for _ in range(s.dim):
            lo = rng.uniform(-5.0, 5.0)
            box.append(Interval(lo, lo + rng.uniform(0.0, 4.0)))
        hi, hi_at = s.box_extremum(box, "max")
        lo_val, lo_at = s.box_extremum(box, "min")
        assert s.evaluate(hi_at) == hi
        assert s.evaluate(lo_at) == lo_val
        for _ in range(300):
            x = [rng.uniform(iv.lo, iv.hi) for iv in box]
            v = s.evaluate(x)
            assert lo_val <= v <= hi


def test_box_extremum_monotone_in_containment():
    rng = random.Random(13)
    for _ in range(100):
        s = random_surface(rng, 3)
        inner = []
        outer = []
        for _ in range(3):
            lo = rng.uniform(-3.0, 3.0)
            width = rng.uniform(0.1, 2.0)
            pad = rng.uniform(0.0, 1.0)
            inner.append(Interval(lo, lo + width))
            outer.append(Interval(lo - pad, lo + width + pad))
        assert s.box_extremum(inner, "max")[0] <= s.box_extremum(outer, "max")[0]
        assert s.box_extremum(inner, "min")[0] >= s.box_extremum(outer, "min")[0]


def test_separability_against_grid_oracle():
    rng = random.Random(17)
    steps = 10_000
    for _ in range(20):
        s = random_surface(rng, 3)
        box = []
        for _ in range(3):
            lo = rng.uniform(-4.0, 4.0)
            box.append(Interval(lo, lo + rng.uniform(0.5, 3.0)))
        total = s.beta0
        tolerance = 0.0
        for j, iv in enumerate(box):
            step = iv.width / steps
            best = max(
                s.term(j, iv.lo + k * step) for k in range(steps + 1)
            )
            total += best
            tolerance += step * step * abs(s.quadratic[j])
        assert s.box_extremum(box, "max")[0] == pytest.approx(total, abs=tolerance + 1e-12)


def test_surface_json_roundtrip(table):
    for s in table.values():
        assert QuadraticResponseSurface.from_json(json.loads(json.dumps(s.to_json()))) == s
