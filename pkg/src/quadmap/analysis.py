"""Verdicts on degree and periodic-point tables.

Sequence arithmetic is exact (Fractions); floats appear only when rendering
or when comparing growth roots.  Every verdict is a pure function of the
input tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

REC_WEIGHTS = (Fraction(3, 2), Fraction(2), Fraction(-3, 2))  # w_n = 3/2 w_{n-1} + 2 w_{n-2} - 3/2 w_{n-3}
B_INITIAL = (3, 7, 17)
C_INITIAL = (5, 9, 25)
TRIBONACCI = (1, -1, -1, -1)
ZETA2_CUBIC = (2, -3, -4, 3)
ROOT_RESIDUAL = 1e-12

QUESTIONS = ("Q1a", "Q1b", "Q2", "Q3", "Q4", "Q5", "Q6")


# ---------------------------------------------------------------- exact sequences


def _as_fractions(seq) -> list[Fraction]:
    return [Fraction(v) for v in seq]


def recurrence_value(seq, n: int) -> Fraction:
    """(3/2)(v_{n-1} - v_{n-3}) + 2 v_{n-2}, with 1-based n >= 4."""
    if n < 4 or n > len(seq):
        raise IndexError(f"recurrence needs 4 <= n <= {len(seq)}, got {n}")
    v = _as_fractions(seq[n - 4 : n - 1])
    return Fraction(3, 2) * (v[2] - v[0]) + 2 * v[1]


@dataclass
class ReferenceSequence:
    name: str
    values: list[Fraction]

    def __post_init__(self):
        for n in range(4, len(self.values) + 1):
            if recurrence_value(self.values, n) != self.values[n - 1]:
                raise ValueError(f"{self.name}: term {n} breaks the recurrence")

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n - 1]

    def __len__(self) -> int:
        return len(self.values)


def reference_sequence(name: str, length: int = 14, initial=None) -> ReferenceSequence:
    """b (initial 3, 7, 17) or c (initial 5, 9, 25) extended by the recurrence."""
    if initial is None:
        initial = {"b": B_INITIAL, "c": C_INITIAL}[name]
    vals = _as_fractions(initial)
    while len(vals) < length:
        vals.append(recurrence_value(vals + [Fraction(0)], len(vals) + 1))
    return ReferenceSequence(name, vals[:length])


@dataclass
class ResidualRow:
    n: int
    value: Fraction
    recurrence: Fraction | None
    residual: Fraction | None


def recurrence_residuals(seq, kind: str = "") -> list[ResidualRow]:
    """v_n minus the recurrence prediction, exact; rows n < 4 carry None."""
    if len(seq) < 4:
        raise ValueError(f"{kind or 'sequence'} needs at least 4 terms, got {len(seq)}")
    vals = _as_fractions(seq)
    rows = []
    for n in range(1, len(vals) + 1):
        if n < 4:
            rows.append(ResidualRow(n, vals[n - 1], None, None))
        else:
            r = recurrence_value(vals, n)
            rows.append(ResidualRow(n, vals[n - 1], r, vals[n - 1] - r))
    return rows


@dataclass
class DiffRow:
    n: int
    value: Fraction
    reference: Fraction
    difference: Fraction


def reference_diff(degree_seq, reference: ReferenceSequence | Sequence) -> list[DiffRow]:
    ref = reference.values if isinstance(reference, ReferenceSequence) else _as_fractions(reference)
    if len(degree_seq) != len(ref):
        raise ValueError(f"lengths differ: {len(degree_seq)} vs {len(ref)}")
    vals = _as_fractions(degree_seq)
    return [DiffRow(n, v, r, v - r) for n, (v, r) in enumerate(zip(vals, ref), start=1)]


def exact_decimal(x: Fraction) -> str:
    """Terminating decimal expansion of x; falls back to p/q when none exists."""
    x = Fraction(x)
    q = x.denominator
    twos = fives = 0
    while q % 2 == 0:
        q //= 2
        twos += 1
    while q % 5 == 0:
        q //= 5
        fives += 1
    if q != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = abs(x.numerator) * 10**digits // x.denominator
    sign = "-" if x < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0').rstrip('0')}"


# ---------------------------------------------------------------- cubics


@dataclass
class CubicSpec:
    coefficients: tuple[int, ...]  # highest degree first
    roots: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)

    @property
    def largest(self) -> float:
        return max(self.roots)

    @property
    def largest_rounded(self) -> float:
        return round(self.largest, 12)

    def __call__(self, t: float) -> float:
        return float(np.polyval(np.array(self.coefficients, dtype=float), t))


def _cauchy_bound(coeffs) -> float:
    a = np.abs(np.array(coeffs, dtype=float))
    return 1.0 + float(a[1:].max() / a[0]) if len(a) > 1 else 1.0


def _newton_polish(coeffs, x: float, steps: int = 50) -> float:
    p = np.array(coeffs, dtype=float)
    dp = np.polyder(p)
    for _ in range(steps):
        d = np.polyval(dp, x)
        if d == 0:
            break
        nx = x - np.polyval(p, x) / d
        if nx == x:
            break
        x = nx
    return float(x)


def cubic_roots(coefficients) -> CubicSpec:
    """All real roots of a cubic (highest coefficient first), sorted and polished.

    Repeated real roots are reported once.
    """
    coeffs = tuple(int(c) for c in coefficients)
    if len(coeffs) != 4 or coeffs[0] == 0:
        raise ValueError(f"degree must be exactly 3: {coefficients}")
    cands = np.roots(np.array(coeffs, dtype=float))
    scale = max(1.0, float(np.abs(cands).max()))
    real = sorted(float(z.real) for z in cands if abs(z.imag) <= 1e-7 * scale)
    roots: list[float] = []
    for r in real:
        r = _newton_polish(coeffs, r)
        if not roots or abs(r - roots[-1]) > 1e-9 * scale:
            roots.append(r)
    spec = CubicSpec(coeffs, roots)
    spec.residuals = [abs(spec(r)) for r in roots]
    return spec


def bisection_roots(coefficients, grid: int = 1_000_000, tol: float = 1e-15) -> list[float]:
    """Independent oracle: sign changes on a fine grid, then bisection.

    Only odd-multiplicity roots are found; exact grid hits are kept as is.
    """
    p = np.array(coefficients, dtype=float)
    B = _cauchy_bound(coefficients)
    xs = np.linspace(-B, B, grid + 1)
    ys = np.polyval(p, xs)
    roots = list(xs[ys == 0])
    for i in np.flatnonzero(ys[:-1] * ys[1:] < 0):
        lo, hi, flo = xs[i], xs[i + 1], ys[i]
        while hi - lo > tol * max(1.0, abs(lo)):
            mid = 0.5 * (lo + hi)
            fm = np.polyval(p, mid)
            if fm == 0:
                lo = hi = mid
                break
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return sorted(float(r) for r in roots)


def _divisors(k: int) -> list[int]:
    k = abs(k)
    return [d for d in range(1, k + 1) if k % d == 0]


def rational_roots(coefficients) -> list[Fraction]:
    """Rational roots by the rational root theorem, exact."""
    coeffs = [int(c) for c in coefficients]
    if any(Fraction(c) != Fraction(coefficients[i]) for i, c in enumerate(coeffs)):
        raise ValueError("coefficients must be integers")
    found = set()
    while coeffs and coeffs[-1] == 0:  # factor out t
        found.add(Fraction(0))
        coeffs.pop()
    if len(coeffs) <= 1:
        return sorted(found)
    for num in _divisors(coeffs[-1]):
        for den in _divisors(coeffs[0]):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                acc = Fraction(0)
                for c in coeffs:
                    acc = acc * cand + c
                if acc == 0:
                    found.add(cand)
    return sorted(found)


def half_integer_root_check(coefficients) -> bool:
    """True iff no rational root; for a cubic this certifies irreducibility over Q.

    With leading coefficient 2 the candidates are ±(divisor of constant)/(1 or 2).
    """
    return not rational_roots(coefficients)


# ---------------------------------------------------------------- log concavity, Lefschetz


@dataclass
class LogConcavity:
    pairs_checked: int
    pair_violations: list[tuple[int, int]]
    root_violations: list[int]

    @property
    def submultiplicative(self) -> bool:
        return not self.pair_violations

    @property
    def roots_decreasing(self) -> bool:
        return not self.root_violations

    @property
    def holds(self) -> bool:
        return self.submultiplicative and self.roots_decreasing


def log_concavity_check(seq) -> LogConcavity:
    """v_{n+m} <= v_n v_m for every pair in range, and v_n^{1/n} non-increasing."""
    vals = [int(v) if Fraction(v).denominator == 1 else Fraction(v) for v in seq]
    if any(v <= 0 for v in vals):
        raise ValueError("log concavity needs a positive sequence")
    N = len(vals)
    bad = []
    checked = 0
    for n in range(1, N + 1):
        for m in range(n, N + 1 - n):
            checked += 1
            if vals[n + m - 1] > vals[n - 1] * vals[m - 1]:
                bad.append((n, m))
    # v_{n+1}^{1/(n+1)} <= v_n^{1/n}  <=>  v_{n+1}^n <= v_n^{n+1}, exact in integers
    root_bad = [n + 1 for n in range(1, N) if vals[n] ** n > vals[n - 1] ** (n + 1)]
    return LogConcavity(checked, bad, root_bad)


def lefschetz_sum(d0, d1, d2, d3):
    """Sum of the per-codimension degrees on a quadric 3-fold; always positive."""
    total = d0 + d1 + d2 + d3
    if not all(d > 0 for d in (d0, d1, d2, d3)):
        raise ValueError("degrees must be positive")
    assert total > 0
    return total


def lefschetz_bound(a: Sequence, b: Sequence) -> bool:
    """sum a_j b_j <= (sum a_j)(sum b_j): the product bound behind multiplicativity."""
    return sum(x * y for x, y in zip(a, b)) <= lefschetz_sum(*a) * lefschetz_sum(*b)


def lefschetz_table(d1, d2, d3) -> list[int]:
    return [lefschetz_sum(1, a, b, c) for a, b, c in zip(d1, d2, d3)]


# ---------------------------------------------------------------- questions


@dataclass
class QuestionVerdict:
    qid: str
    statement: str
    per_n: dict[int, bool]
    values: dict[int, str] = field(default_factory=dict)

    @property
    def failures(self) -> list[int]:
        return sorted(n for n, ok in self.per_n.items() if not ok)

    @property
    def summary(self) -> str:
        if not self.per_n:
            return "no-data"
        f = self.failures
        return "holds-on-data" if not f else "fails-at-n=" + ",".join(map(str, f))

    def holds_on(self, ns) -> bool:
        return all(self.per_n[n] for n in ns)

    def to_json(self) -> dict:
        return {
            "id": self.qid,
            "statement": self.statement,
            "summary": self.summary,
            "per_n": {str(n): v for n, v in sorted(self.per_n.items())},
            "values": {str(n): v for n, v in sorted(self.values.items())},
        }


def _sequences(degree_table) -> dict[str, list[int]]:
    if isinstance(degree_table, Mapping):
        return {k: list(v) for k, v in degree_table.items()}
    return {f"d{k}": degree_table.sequence(k) for k in (1, 2, 3)}


def _counts(fixed_point_reports) -> dict[int, int]:
    if isinstance(fixed_point_reports, Mapping):
        return {int(n): int(v) for n, v in fixed_point_reports.items()}
    return {r.n: r.isolated for r in fixed_point_reports}


def _root_ge(a: int, m: int, b: int, k: int) -> bool:
    # a^(1/m) >= b^(1/k) exactly: a^k >= b^m
    return a**k >= b**m


def evaluate_questions(degree_table, fixed_point_reports) -> list[QuestionVerdict]:
    """Per-n truth of each question's data proposition, over available n only."""
    seqs = _sequences(degree_table)
    counts = _counts(fixed_point_reports)
    d3 = seqs.get("d3", [])
    out = []

    res = {r.n: r for r in recurrence_residuals(d3, "d3")} if len(d3) >= 4 else {}
    q1a = {n: r.residual <= 0 for n, r in res.items() if r.residual is not None}
    out.append(
        QuestionVerdict(
            "Q1a",
            "d3_n <= 3/2 (d3_{n-1} - d3_{n-3}) + 2 d3_{n-2}",
            q1a,
            {n: exact_decimal(res[n].residual) for n in q1a},
        )
    )
    q1b = {n: d3[n - 1] >= 2 * d3[n - 2] for n in range(2, len(d3) + 1)}
    out.append(QuestionVerdict("Q1b", "d3_n >= 2 d3_{n-1}", q1b, {n: f"{d3[n - 1]} vs {2 * d3[n - 2]}" for n in q1b}))

    # Q2 is a limit statement; its data proposition is that |residual/d3_n| does not grow
    ratios = {n: r.residual / r.value for n, r in res.items() if r.residual is not None}
    q2 = {n: abs(ratios[n]) <= abs(ratios[n - 1]) for n in ratios if n - 1 in ratios}
    out.append(
        QuestionVerdict(
            "Q2",
            "|residual_n / d3_n| is non-increasing (ratio tends to 0)",
            q2,
            {n: f"{ratios[n]} ~ {float(ratios[n]):.6g}" for n in ratios},
        )
    )
    b = reference_sequence("b", len(d3)) if d3 else None
    q3 = {n: Fraction(d3[n - 1]) >= b[n] for n in range(1, len(d3) + 1)} if b else {}
    out.append(
        QuestionVerdict("Q3", "d3_n >= b_n", q3, {n: exact_decimal(d3[n - 1] - b[n]) for n in q3} if b else {})
    )

    odd = sorted(n for n in counts if n % 2 == 1 and counts[n] > 0)
    q4 = {m: _root_ge(counts[n], n, counts[m], m) for n, m in zip(odd, odd[1:]) if m == n + 2}
    out.append(
        QuestionVerdict(
            "Q4",
            "#IsoFix_{2k+1}^{1/(2k+1)} is decreasing",
            q4,
            {n: f"{counts[n] ** (1 / n):.11f}" for n in odd},
        )
    )
    q5 = {}
    for n in sorted(counts):
        if n % 2 == 1 and n + 1 in counts:
            a, c = counts[n], counts[n + 1]
            q5[n] = c == 0 or _root_ge(a, n, c, n + 1)
    out.append(QuestionVerdict("Q5", "#IsoFix_{2k+1}^{1/(2k+1)} >= #IsoFix_{2k+2}^{1/(2k+2)}", q5))
    q6 = {n: counts[n] >= counts[n - 1] for n in sorted(counts) if n % 2 == 1 and n >= 3 and n - 1 in counts}
    out.append(QuestionVerdict("Q6", "#IsoFix_{2k+1} >= #IsoFix_{2k}", q6))
    return out


# ---------------------------------------------------------------- report object


@dataclass
class AnalysisReport:
    sequences: dict[str, list[int]]
    counts: dict[int, int]
    verdicts: list[QuestionVerdict]
    residuals: dict[str, list[ResidualRow]]
    diffs: dict[str, list[DiffRow]]
    cubics: dict[str, CubicSpec]
    irreducible: bool
    log_concavity: dict[str, LogConcavity]
    lefschetz: list[int]
    growth_bracket: tuple[float, float] | None
    seed: int = 0

    def verdict(self, qid: str) -> QuestionVerdict:
        return next(v for v in self.verdicts if v.qid == qid)

    def to_json(self) -> dict:
        def rrow(r: ResidualRow):
            return {
                "n": r.n,
                "value": str(r.value),
                "recurrence": None if r.recurrence is None else exact_decimal(r.recurrence),
                "residual": None if r.residual is None else exact_decimal(r.residual),
            }

        def drow(r: DiffRow):
            return {"n": r.n, "value": str(r.value), "reference": exact_decimal(r.reference), "difference": exact_decimal(r.difference)}

        return {
            "schema": 1,
            "seed": self.seed,
            "sequences": self.sequences,
            "isolated_counts": {str(n): c for n, c in sorted(self.counts.items())},
            "questions": [v.to_json() for v in self.verdicts],
            "residuals": {k: [rrow(r) for r in v] for k, v in self.residuals.items()},
            "reference_diffs": {k: [drow(r) for r in v] for k, v in self.diffs.items()},
            "cubics": {
                k: {"coefficients": list(c.coefficients), "roots": c.roots, "largest": c.largest_rounded, "residuals": c.residuals}
                for k, c in self.cubics.items()
            },
            "zeta2_cubic_irreducible": self.irreducible,
            "log_concavity": {
                k: {"pairs": v.pairs_checked, "pair_violations": v.pair_violations, "root_violations": v.root_violations}
                for k, v in self.log_concavity.items()
            },
            "lefschetz": self.lefschetz,
            "isofix_growth_bracket": self.growth_bracket,
        }


def growth_bracket(counts: Mapping[int, int]) -> tuple[float, float] | None:
    """(latest even-n growth, latest odd-n growth) from the available counts."""
    even = [n for n in counts if n % 2 == 0 and counts[n] > 0]
    odd = [n for n in counts if n % 2 == 1 and counts[n] > 0]
    if not even or not odd:
        return None
    ne, no = max(even), max(odd)
    return (counts[ne] ** (1 / ne), counts[no] ** (1 / no))


def analyze(degree_table, fixed_point_reports, seed: int = 0) -> AnalysisReport:
    seqs = _sequences(degree_table)
    counts = _counts(fixed_point_reports)
    residuals = {k: recurrence_residuals(v, k) for k, v in seqs.items() if k in ("d2", "d3") and len(v) >= 4}
    diffs = {}
    if seqs.get("d3"):
        diffs["b"] = reference_diff(seqs["d3"], reference_sequence("b", len(seqs["d3"])))
    if seqs.get("d2") and len(seqs["d2"]) >= 3:
        diffs["c"] = reference_diff(seqs["d2"], reference_sequence("c", len(seqs["d2"])))
    return AnalysisReport(
        sequences=seqs,
        counts=counts,
        verdicts=evaluate_questions(seqs, counts),
        residuals=residuals,
        diffs=diffs,
        cubics={"zeta1": cubic_roots(TRIBONACCI), "zeta2": cubic_roots(ZETA2_CUBIC)},
        irreducible=half_integer_root_check(ZETA2_CUBIC),
        log_concavity={k: log_concavity_check(v) for k, v in seqs.items() if v},
        lefschetz=lefschetz_table(seqs["d1"], seqs["d2"], seqs["d3"]) if all(seqs.get(k) for k in ("d1", "d2", "d3")) else [],
        growth_bracket=growth_bracket(counts),
        seed=seed,
    )


def growth_ratio_check(d1: Sequence[int], tol: float = 0.01) -> bool:
    """Last ratio d1_N / d1_{N-1} against the largest tribonacci root."""
    return math.isclose(d1[-1] / d1[-2], cubic_roots(TRIBONACCI).largest, abs_tol=tol)
