"""Exact sequence arithmetic, cubic roots, log concavity and question verdicts."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadmap import analysis as A
from quadmap import golden
from quadmap.report import golden_report, render_markdown, table_checks


@pytest.fixture(scope="module")
def seqs():
    return golden.degree_sequences()


@pytest.fixture(scope="module")
def counts():
    return golden.isolated_counts()


def test_reference_sequences_exact():
    b = A.reference_sequence("b", 14)
    c = A.reference_sequence("c", 14)
    assert [b[n] for n in (1, 2, 3)] == [3, 7, 17]
    assert b[6] == Fraction(317, 2)
    assert A.exact_decimal(b[13]) == "29756.81640625"
    assert A.exact_decimal(c[11]) == "9406.1171875"
    assert A.exact_decimal(c[14]) == "88384.1572265625"
    # the recurrence forces b_14 = 62802.560546875; see the b-table check below
    assert b[14] == Fraction(32154911, 512)


def test_reference_sequence_validates():
    with pytest.raises(ValueError):
        A.ReferenceSequence("x", [Fraction(v) for v in (1, 1, 1, 5)])


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(-50, 50)] * 3), st.integers(4, 20))
def test_reference_residuals_vanish(init, length):
    ref = A.reference_sequence("x", length, init)
    rows = A.recurrence_residuals(ref.values)
    assert all(r.residual == 0 for r in rows[3:])


def test_residual_examples(seqs):
    r2 = {r.n: r.residual for r in A.recurrence_residuals(seqs["d2"], "d2")}
    r3 = {r.n: r.residual for r in A.recurrence_residuals(seqs["d3"], "d3")}
    assert r2[7] == -5 and r2[14] == -183
    assert r3[14] == -136 and r3[4] == 2
    assert r2[1] is None


def test_reference_diff_examples(seqs):
    db = {r.n: r.difference for r in A.reference_diff(seqs["d3"], A.reference_sequence("b", 14))}
    dc = {r.n: r.difference for r in A.reference_diff(seqs["d2"], A.reference_sequence("c", 14))}
    assert db[6] == Fraction(17, 2) and db[3] == 0
    assert A.exact_decimal(db[13]) == "1218.18359375"
    assert A.exact_decimal(dc[11]) == "-5.1171875"
    assert dc[3] == 0
    with pytest.raises(ValueError):
        A.reference_diff([1, 2], A.reference_sequence("b", 3))


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=-10**6, max_value=10**6).filter(lambda f: f.denominator & (f.denominator - 1) == 0))
def test_exact_decimal_roundtrip(x):
    assert Fraction(A.exact_decimal(x)) == x


def test_exact_decimal_nonterminating():
    assert A.exact_decimal(Fraction(1, 3)) == "1/3"


def test_cubic_roots():
    z1 = A.cubic_roots(A.TRIBONACCI)
    assert z1.largest_rounded == 1.839286755214
    assert max(z1.residuals) < 1e-12
    z2 = A.cubic_roots(A.ZETA2_CUBIC)
    assert len(z2.roots) == 3
    assert z2.roots[0] == pytest.approx(-1.202, abs=5e-4)
    assert z2.roots[1] == pytest.approx(0.591, abs=5e-4)
    assert round(z2.largest, 4) == 2.1108
    assert max(z2.residuals) < 1e-12
    assert A.cubic_roots((1, 0, 0, -1)).roots == [1.0]
    with pytest.raises(ValueError):
        A.cubic_roots((0, 1, 2, 3))


@settings(max_examples=30, deadline=None)
@given(st.tuples(*[st.integers(-6, 6)] * 3))
def test_cubic_roots_against_bisection(rts):
    a, b, c = sorted(set(rts)) + [None] * (3 - len(set(rts)))
    if c is None:
        return  # repeated roots are not sign changes
    coeffs = (1, -(a + b + c), a * b + a * c + b * c, -a * b * c)
    assert A.cubic_roots(coeffs).roots == pytest.approx(A.bisection_roots(coeffs), abs=1e-9)


def test_bisection_oracle_matches():
    for spec in (A.TRIBONACCI, A.ZETA2_CUBIC):
        assert A.cubic_roots(spec).roots == pytest.approx(A.bisection_roots(spec), abs=1e-9)


def test_half_integer_check():
    assert A.half_integer_root_check(A.ZETA2_CUBIC)
    assert not A.half_integer_root_check((2, 0, -2, 0))
    assert not A.half_integer_root_check((2, -1, 0, 0))
    assert A.rational_roots((2, -1, 0, 0)) == [0, Fraction(1, 2)]
    assert A.rational_roots((2, -3, -1, 1))  # 1/2 is a root


def test_log_concavity(seqs):
    for k in ("d1", "d2", "d3"):
        lc = A.log_concavity_check(seqs[k])
        assert lc.holds and lc.pairs_checked == 49
    assert A.log_concavity_check([1] * 10).holds
    bad = A.log_concavity_check([2, 5])
    assert bad.pair_violations == [(1, 1)] and bad.root_violations == [2]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(1, 12))
def test_geometric_sequences_are_log_concave(r, length):
    assert A.log_concavity_check([r**n for n in range(1, length + 1)]).holds


def test_lefschetz():
    assert A.lefschetz_sum(1, 1, 1, 1) == 4
    assert A.lefschetz_bound((1, 3, 5, 3), (1, 5, 9, 7))
    with pytest.raises(ValueError):
        A.lefschetz_sum(1, 0, 1, 1)


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.integers(1, 100)] * 4), st.tuples(*[st.integers(1, 100)] * 4))
def test_lefschetz_product_bound(a, b):
    assert A.lefschetz_sum(*a) > 0
    assert A.lefschetz_bound(a, b)


def test_questions_on_reference_tables(seqs, counts):
    v = {q.qid: q for q in A.evaluate_questions(seqs, counts)}
    assert v["Q1a"].per_n[4] is False
    assert v["Q1a"].holds_on(range(9, 15))
    assert v["Q1b"].holds_on(range(2, 15))
    assert v["Q3"].holds_on(range(1, 15))
    assert sorted(v["Q4"].per_n) == [3, 5, 7, 9, 11] and v["Q4"].summary == "holds-on-data"
    assert v["Q5"].summary == "holds-on-data"
    assert v["Q6"].summary == "holds-on-data"
    assert v["Q2"].values[14].startswith(str(Fraction(-136, 65263)) + " ")


def test_verdicts_survive_serialisation(seqs, counts):
    a = A.analyze(seqs, counts)
    js = json.loads(json.dumps(a.to_json()))
    seqs2 = js["sequences"]
    counts2 = {int(k): v for k, v in js["isolated_counts"].items()}
    b = A.analyze(seqs2, counts2)
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)


def test_growth_sanity(seqs):
    assert A.growth_ratio_check(seqs["d1"])
    assert abs(7473 / 4063 - A.cubic_roots(A.TRIBONACCI).largest) < 0.01


def test_golden_tables_load():
    tabs = golden.load_all()
    assert len(tabs) == 6
    assert tabs["degrees"].ints("d1")[-1] == 7473
    assert golden.isolated_counts()[12] == 6908


def test_report_flags_known_reference_quirks(seqs, counts):
    checks = {c.name: c for c in table_checks(seqs, counts)}
    assert all(c.matches for name, c in checks.items() if "reference sequence" not in name)
    b = checks["d3 against reference sequence b"].mismatches
    c = checks["d2 against reference sequence c"].mismatches
    assert b == ["N=14: reference (62802.0560546875, 2460.9439453125015), exact (62802.560546875, 2460.439453125)"]
    assert c == ["row 4: printed label N=3"]
    rep, checks = golden_report()
    md = render_markdown(rep, checks)
    assert "MISMATCH" in md and md.count("| Q") == 7
