"""Sparse multivariate and dense modular arithmetic."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadmap.poly import GF, QQ, SparsePoly, modular
from quadmap.poly.modular import ModularError

P = 998244353  # 119 * 2^23 + 1


def naive_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + int(x) * int(y)) % p
    return np.array(out, dtype=np.int64)


def naive_divmod(a, b, p):
    a = [int(x) % p for x in a]
    b = [int(x) % p for x in b]
    while b and b[-1] == 0:
        b.pop()
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(1, len(a) - len(b) + 1)
    r = a[:]
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] * inv % p
        q[k] = c
        for j, y in enumerate(b):
            r[k + j] = (r[k + j] - c * y) % p
    return modular.trim(np.array(q, dtype=np.int64)), modular.trim(np.array(r[: len(b) - 1] or [0], dtype=np.int64))


coeffs = st.lists(st.integers(0, P - 1), min_size=1, max_size=60)


@settings(max_examples=60, deadline=None)
@given(coeffs, coeffs)
def test_mul_matches_schoolbook(a, b):
    a, b = np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)
    assert np.array_equal(modular.trim(modular.mul(a, b, P)), modular.trim(naive_mul(a, b, P)))


@settings(max_examples=60, deadline=None)
@given(coeffs, st.lists(st.integers(0, P - 1), min_size=1, max_size=30).filter(lambda b: b[-1] != 0))
def test_divmod_matches_long_division(a, b):
    a, b = np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)
    q, r = modular.divmod_poly(a, b, P)
    q0, r0 = naive_divmod(a, b, P)
    assert np.array_equal(modular.trim(q), q0)
    assert np.array_equal(modular.trim(r), r0)


def test_ntt_roundtrip_large():
    rng = np.random.default_rng(1)
    a = rng.integers(0, P, 1 << 14, dtype=np.int64)
    assert np.array_equal(modular.ntt(modular.ntt(a, P), P, inverse=True), a)


def test_large_mul_against_split_convolution():
    rng = np.random.default_rng(2)
    a = rng.integers(0, P, 3000, dtype=np.int64)
    b = rng.integers(0, P, 2500, dtype=np.int64)
    # exact product via Python ints on a random evaluation point
    x = 123456789
    got = modular.mul(a, b, P)
    assert int(modular.evaluate(got, np.array([x]), P)[0]) == int(modular.evaluate(a, np.array([x]), P)[0]) * int(
        modular.evaluate(b, np.array([x]), P)[0]
    ) % P


def test_eval_interpolate_roundtrip_at_3_pow_8():
    n = 3**8
    size = modular.next_pow2(n + 1)
    p = modular.pick_prime(size)
    rng = np.random.default_rng(3)
    a = rng.integers(0, p, n + 1, dtype=np.int64)
    a[-1] = a[-1] or 1
    vals = modular.evaluate_on_coset(a, size, p)
    w = modular.root_of_unity(size, p)
    xs = modular.powers(w, size, p)
    back = modular.interpolate(xs, vals, p, n)
    assert np.array_equal(back, modular.trim(a))
    # the generic (non-coset) path on a few hundred points
    xs2 = np.arange(1, 301, dtype=np.int64)
    b = a[:300]
    assert np.array_equal(modular.interpolate(xs2, modular.evaluate(b, xs2, p), p, 299), modular.trim(b))


def _random_poly(rng, deg, p):
    a = rng.integers(0, p, deg + 1, dtype=np.int64)
    a[-1] = rng.integers(1, p)
    return a


@pytest.mark.parametrize("dg,da,db", [(5, 40, 30), (200, 600, 500), (2000, 3000, 2600)])
def test_half_gcd_matches_classical(dg, da, db):
    rng = np.random.default_rng(dg)
    g = _random_poly(rng, dg, P)
    a = modular.mul(g, _random_poly(rng, da, P), P)
    b = modular.mul(g, _random_poly(rng, db, P), P)
    fast = modular.gcd(a, b, P, threshold=0)
    slow = modular.gcd_classical(a, b, P)
    assert np.array_equal(modular.monic(fast, P), modular.monic(slow, P))
    assert modular.degree(fast) == dg  # random cofactors are coprime with high probability
    assert modular.degree(modular.divmod_poly(a, fast, P)[1]) < 0 or not modular.trim(modular.divmod_poly(a, fast, P)[1]).any()


def test_gcd_roundtrip_at_3_pow_8():
    rng = np.random.default_rng(8)
    n = 3**8
    g = _random_poly(rng, 1000, P)
    a = modular.mul(g, _random_poly(rng, n - 1000, P), P)
    b = modular.mul(g, _random_poly(rng, n - 1200, P), P)
    assert np.array_equal(modular.monic(modular.gcd(a, b, P, threshold=0), P), modular.monic(g, P))


def test_interpolate_rejects_bad_input():
    with pytest.raises(ModularError):
        modular.interpolate([1, 1], [2, 3], P, 1)
    with pytest.raises(ModularError):
        modular.interpolate([1, 2], [2, 3], P, 5)


def test_primes_support_transforms():
    for m in (10, 20):
        p = modular.pick_prime(1 << m)
        assert (p - 1) % (1 << m) == 0
        w = modular.root_of_unity(1 << m, p)
        assert pow(w, 1 << m, p) == 1 and pow(w, 1 << (m - 1), p) != 1


# ---------------------------------------------------------------- sparse


small_terms = st.dictionaries(
    st.tuples(*[st.integers(0, 3)] * 3),
    st.fractions(min_value=-5, max_value=5, max_denominator=7),
    max_size=8,
)


@settings(max_examples=50, deadline=None)
@given(small_terms, small_terms, small_terms)
def test_sparse_ring_axioms(a, b, c):
    A, B, C = (SparsePoly.from_dict(t, 3) for t in (a, b, c))
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A * B == B * A
    assert (A - A).is_zero()


@settings(max_examples=40, deadline=None)
@given(small_terms, small_terms, st.tuples(*[st.fractions(-3, 3, max_denominator=5)] * 3))
def test_sparse_evaluation_is_a_homomorphism(a, b, pt):
    A, B = SparsePoly.from_dict(a, 3), SparsePoly.from_dict(b, 3)
    assert (A * B).evaluate(pt) == A.evaluate(pt) * B.evaluate(pt)
    assert (A + B).evaluate(pt) == A.evaluate(pt) + B.evaluate(pt)


def test_sparse_compose_and_degree():
    x, y = SparsePoly.gens(2)
    f = x**2 * y - 3 * y + 1
    g = f.compose([x + y, x - y])
    pt = (Fraction(2, 3), Fraction(-5, 7))
    assert g.evaluate(pt) == f.evaluate((pt[0] + pt[1], pt[0] - pt[1]))
    assert g.degree() == 3


def test_big_coefficients_stay_exact():
    x, y = SparsePoly.gens(2)
    f = (3 * x + 7 * y) ** 40
    assert f.coefficient((40, 0)) == 3**40
    assert f.coefficient((0, 40)) == 7**40
    assert f.coefficient((20, 20)) == 137846528820 * 3**20 * 7**20


def test_finite_field_domain():
    p = 101
    x, y = SparsePoly.gens(2, GF(p))
    f = (x + y) ** p
    assert f == x**p + y**p  # Frobenius
    q = SparsePoly.gens(2, QQ)[0]
    with pytest.raises(Exception):
        _ = f + q
