"""The map, its inverse, lifts, leading-monomial checks, curves."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadmap.maps import (
    BudgetExceeded,
    curve_ideals,
    lift,
    make_F,
    make_F_inverse,
    make_family,
    make_identity,
    quadric,
    symbolic_iterates,
    verify_fibration,
    verify_inverse,
    verify_leading_terms,
    verify_square,
    F_params,
)
from quadmap.poly import SparsePoly

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=9)


def test_fibration_exact():
    assert verify_fibration(make_F())
    assert verify_fibration(make_F_inverse())


def test_inverse_both_orders():
    assert verify_inverse()


def test_square_matches_hand_formula():
    assert verify_square()


def test_family_reproduces_F():
    F, G = make_F(), make_family(F_params())
    assert all(a == b for a, b in zip(F.components, G.components))
    assert verify_fibration(G)


@settings(max_examples=40, deadline=None)
@given(st.tuples(rationals, rationals, rationals, rationals))
def test_inverse_pointwise(pt):
    F, G = make_F(), make_F_inverse()
    img = F(pt)
    if img[0] ** 2 == 1:
        return  # F^-1 is undefined where x1 = +-1
    assert G(img) == tuple(Fraction(v) for v in pt)
    q = quadric()
    assert q.evaluate(img) == q.evaluate(pt)


def test_lift_degrees():
    assert lift(make_F()).degree == 3
    assert lift(make_F_inverse()).degree == 3
    assert lift(make_identity()).degree == 1


def test_leading_term_rows():
    rows = verify_leading_terms(6)
    assert [r.degree for r in rows] == [3, 5, 9, 17, 31, 57]
    assert all(r.ok for r in rows)
    assert all(r.top_only_in_component4 for r in rows[1:])
    assert not rows[0].top_only_in_component4  # components 3 and 4 tie at n=1
    assert rows[1].leading_monomial == (1, 2, 0, 2)


def test_symbolic_budget():
    with pytest.raises(BudgetExceeded):
        verify_leading_terms(9, budget=8)


@settings(max_examples=25, deadline=None)
@given(st.tuples(rationals, rationals, rationals, rationals))
def test_iterates_agree_with_pointwise_iteration(pt):
    F = make_F()
    its = symbolic_iterates(F, 3)
    x = tuple(Fraction(v) for v in pt)
    for comps in its:
        x = F(x)
        assert tuple(c.evaluate(pt) for c in comps) == x


def test_curve_ideals_contain_sampled_points():
    c = Fraction(11, 6)
    C, D1, D2 = curve_ideals(c)
    # C: x4 = -x1, x3 = x2 - x1^2 x2, and q = c gives x2 = -c / (x1^2 (1 - x1^2)) ... sample numerically
    x1 = 0.3 + 0.2j
    x4 = -x1
    # q = x1 x4 - x2 x3 = -x1^2 - x2^2 (1 - x1^2) = c
    x2 = np.sqrt((-float(c) - x1**2) / (1 - x1**2))
    x3 = x2 - x1**2 * x2
    pt = (x1, x2, x3, x4)
    assert C.contains(pt, 1e-10)
    assert D1.contains(pt, 1e-10)  # C is a component of D1
    assert not D2.contains(pt, 1e-3)
