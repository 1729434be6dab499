"""Periodic points on a generic fiber."""

from fractions import Fraction

import numpy as np
import pytest

from quadmap import periodic as P
from quadmap.maps import curve_ideals

C0 = Fraction(11, 6)


def test_random_fiber_seeded():
    assert P.random_fiber(0) == C0
    assert P.random_fiber(5) == P.random_fiber(5)
    assert 1 <= P.random_fiber(3) <= 2


def test_orbit_system_roundtrip():
    osys = P.build_orbit_system(3, C0)
    assert osys.nvars == 6 and len(osys.equations) == 7
    rng = np.random.default_rng(0)
    orbit = rng.standard_normal((3, 4))
    sol = osys.solution_from_orbit(orbit)
    assert np.allclose(osys.solution_from_orbit(osys.orbit(sol)), sol)


def test_period_one():
    rep = P.count_fixed_points(1, C0)
    assert rep.isolated == 4
    assert rep.conservation_ok()
    # closed form: x = (a, a, a - a^3, -a) with a^4 - 2 a^2 - c = 0
    a = np.roots([1, 0, -2, 0, -float(C0)])
    want = sorted(np.round(a, 8), key=lambda z: (z.real, z.imag))
    got = sorted((np.round(p.x0[0], 8) for p in rep.points), key=lambda z: (z.real, z.imag))
    assert np.allclose(want, got)
    # every fixed point of F lies on C, where F is an involution: multiplier -1
    assert rep.non_hyperbolic == 4
    for p in rep.points:
        assert min(abs(abs(m) - 1) for m in p.multipliers) < 1e-9


def test_period_two_is_curve_C():
    rep = P.count_fixed_points(2, C0)
    assert rep.isolated == 0
    assert rep.curves == ["C"]
    assert rep.conservation_ok()


def test_period_three():
    rep = P.count_fixed_points(3, C0)
    assert rep.isolated == 10
    assert rep.growth == pytest.approx(2.15443469003, abs=5e-12)
    assert P.orbit_shifts_present(rep)
    # the six genuine period-3 points are hyperbolic; the four fixed points of F are not
    assert sum(p.hyperbolic for p in rep.points) == 6


def test_two_seeds_agree():
    a, b = P.count_two_seeds(3, C0)
    assert a.isolated == b.isolated == 10


def test_curve_periods():
    cs = curve_ideals(C0)
    assert [P.curve_period(c) for c in cs] == [2, 4, 4]
    assert [c.name for c in P.fixed_curves(2, C0)] == ["C"]
    assert [c.name for c in P.fixed_curves(4, C0)] == ["D1", "D2"]
    assert P.fixed_curves(3, C0) == []


def test_multipliers_of_hyperbolic_orbit():
    rep = P.count_fixed_points(3, C0)
    hyp = [p for p in rep.points if p.hyperbolic][0]
    mods = sorted(abs(m) for m in hyp.multipliers)
    assert mods == pytest.approx([0.14476515520852, 3.2123741629031, 5.7342756743613], rel=1e-8)
    assert P.is_hyperbolic(hyp.multipliers)
    assert not P.is_hyperbolic([1.0 + 1e-8, 2.0, 0.5])


def test_growth_table():
    rows = P.growth_table([(1, 4), (2, 0), (3, 10)])
    assert rows == [(1, 4, 4.0), (2, 0, 0.0), (3, 10, 2.15443469003)]


def test_report_json():
    rep = P.count_fixed_points(1, C0)
    js = rep.to_json()
    assert js["isolated"] == 4 and js["c"] == "11/6" and len(js["points"]) == 4
    assert rep.csv_row()["fixed_points"] == "4"
