"""Degrees d_n^(1), d_n^(2), d_n^(3) of the iterates of the lifted map.

* Kind 1 (and kind 3, via the inverse map): restrict the formal n-fold
  composition of a degree-D lift to a random projective line over F_p.  The
  five coordinates become univariate polynomials of degree <= D^n; their
  common factor is the base divisor, and the degree is what remains.
* Kind 2: count the points of a random 2-plane that F^n sends into a random
  codimension-2 linear subspace, with the homotopy solver.  An exact modular
  count (degree of a resultant) serves as an independent oracle.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .homotopy import CONVERGED, TrackSettings, certify, dedup, track
from .maps import AffineMap, MapLift, lift, make_F, make_F_inverse
from .poly import modular

log = logging.getLogger(__name__)

KIND2_BUDGET = 6


class WitnessDisagreement(RuntimeError):
    def __init__(self, message, values):
        super().__init__(message)
        self.values = values


class CountDisagreement(RuntimeError):
    pass


class DegreePredictionError(RuntimeError):
    """Leading forms cancelled, so the padded straight-line program is not valid."""


# ---------------------------------------------------------------- line slices


@dataclass
class WitnessRecord:
    prime: int
    seed: int
    value: int
    formal_degree: int
    max_degree: int
    gcd_degree: int
    division_verified: bool


@dataclass
class SliceResult:
    n: int
    value: int
    witnesses: list[WitnessRecord]
    redrawn: bool = False

    def to_json(self) -> dict:
        return {"n": self.n, "value": self.value, "redrawn": self.redrawn, "witnesses": [asdict(w) for w in self.witnesses]}


def _evaluate_iterate(lift_map: MapLift, n: int, anchor, direction, p: int, size: int, block: int) -> list[np.ndarray]:
    """Values of the n-fold lift on the line anchor + t*direction at t = w^j, j < size."""
    w = modular.root_of_unity(size, p)
    ts = modular.powers(w, size, p)
    out = [np.empty(size, dtype=np.int64) for _ in range(5)]
    for lo in range(0, size, block):
        t = ts[lo : lo + block]
        vals = [(int(a) + int(b) * t % p) % p for a, b in zip(anchor, direction)]
        for _ in range(n):
            vals = lift_map.eval_mod_p(vals, p)
        for o, v in zip(out, vals):
            o[lo : lo + block] = v
    return out


def line_slice_witness(
    lift_map: MapLift,
    n: int,
    prime: int,
    seed: int,
    threshold: int = modular.DEFAULT_HALF_GCD_THRESHOLD,
    block: int = 1 << 18,
) -> WitnessRecord:
    rng = np.random.default_rng([seed, prime, n])
    formal = lift_map.degree**n
    size = modular.next_pow2(formal + 1)
    if (prime - 1) % size:
        raise modular.ModularError(f"F_{prime} has no {size}-th roots of unity (needed for n={n})")
    anchor = rng.integers(1, prime, size=5)
    direction = rng.integers(1, prime, size=5)
    vals = _evaluate_iterate(lift_map, n, anchor, direction, prime, size, block)
    polys = [modular.trim(modular.ntt(v, prime, inverse=True)) for v in vals]
    if any(len(q) > formal + 1 for q in polys):
        raise modular.ModularError("interpolated coordinate exceeds the formal degree")
    r = rng.integers(1, prime, size=(2, 5))
    u = np.zeros(formal + 1, dtype=np.int64)
    v = np.zeros(formal + 1, dtype=np.int64)
    for i, q in enumerate(polys):
        u[: len(q)] = (u[: len(q)] + int(r[0, i]) * q % prime) % prime
        v[: len(q)] = (v[: len(q)] + int(r[1, i]) * q % prime) % prime
    g = modular.gcd(u, v, prime, threshold)
    verified = True
    for q in polys:
        if not len(q):
            continue
        _, rem = modular.divmod_poly(q, g, prime)
        if len(rem):
            # the two combinations shared an extra factor: fold this coordinate in
            verified = False
            g = modular.gcd(g, q, prime, threshold)
    max_deg = max(len(q) - 1 for q in polys if len(q))
    gdeg = len(g) - 1
    # max_deg < formal only when the chart point t = infinity is itself a base point
    return WitnessRecord(prime, seed, max_deg - gdeg, formal, max_deg, gdeg, verified)


def line_slice(
    lift_map: MapLift,
    n: int,
    witnesses: int = 2,
    seed: int = 0,
    threshold: int = modular.DEFAULT_HALF_GCD_THRESHOLD,
    workers: int = 1,
) -> SliceResult:
    """Degree of the n-th iterate by restriction to random lines, with independent witnesses.

    Each witness uses its own prime (cycling through the transform primes if
    more witnesses than primes are requested) and its own random line.  On
    disagreement one more witness is drawn and the value must then hold a
    strict majority; otherwise :class:`WitnessDisagreement` is raised.
    """
    if n < 1:
        raise ValueError("n must be positive")
    size = modular.next_pow2(lift_map.degree**n + 1)
    primes = [p for p, m in modular.NTT_PRIMES if (1 << m) >= size]
    if not primes:
        raise modular.ModularError(f"no listed prime admits a transform of length {size}")
    jobs = [(primes[i % len(primes)], seed * 1000 + i) for i in range(witnesses)]

    def run(batch):
        if workers > 1 and len(batch) > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=workers) as pool:
                futs = [pool.submit(line_slice_witness, lift_map, n, p, s, threshold) for p, s in batch]
                return [f.result() for f in futs]
        return [line_slice_witness(lift_map, n, p, s, threshold) for p, s in batch]

    records = run(jobs)
    values = [r.value for r in records]
    if len(set(values)) == 1:
        return SliceResult(n, values[0], records)
    k = len(jobs)
    records += run([(primes[k % len(primes)], seed * 1000 + k)])
    tally = Counter(r.value for r in records)
    value, votes = tally.most_common(1)[0]
    if votes * 2 > len(records):
        log.warning("degree n=%d: witnesses disagreed %s, majority %d", n, [r.value for r in records], value)
        return SliceResult(n, value, records, redrawn=True)
    raise WitnessDisagreement(f"witnesses disagree at n={n}: {[r.value for r in records]}", [r.value for r in records])


def degree_line_slice(lift_map: MapLift, n: int, witnesses: int = 2, seed: int = 0, **kwargs) -> int:
    return line_slice(lift_map, n, witnesses, seed, **kwargs).value


def base_factor_valuation(lift_map: MapLift, n: int, prime: int | None = None, seed: int = 0) -> tuple[int, int]:
    """(formal degree, order of vanishing at the root of the line's z-coordinate).

    For maps whose base divisor is supported on {z = 0} this is an oracle for
    the gcd degree that does not use any gcd: divide one coordinate by
    (t - t0) for as long as the remainder is zero.
    """
    formal = lift_map.degree**n
    size = modular.next_pow2(formal + 1)
    p = prime or modular.pick_prime(size)
    rng = np.random.default_rng([seed, p, n, 5])
    anchor = rng.integers(1, p, size=5)
    direction = rng.integers(1, p, size=5)
    vals = _evaluate_iterate(lift_map, n, anchor, direction, p, size, 1 << 18)
    polys = [modular.trim(modular.ntt(v, p, inverse=True)) for v in vals]
    t0 = (-int(anchor[4]) * pow(int(direction[4]), p - 2, p)) % p
    lin = np.array([(-t0) % p, 1], dtype=np.int64)
    orders = []
    for q in polys:
        k = 0
        while len(q) > 1:
            quo, rem = modular.divmod_poly(q, lin, p)
            if len(rem):
                break
            q, k = quo, k + 1
        orders.append(k if len(q) else math.inf)
    return formal, int(min(orders))


def symbolic_degrees(n_max: int, fmap: AffineMap | None = None) -> list[int]:
    from .maps import symbolic_iterates

    fmap = fmap or make_F()
    return [max(c.degree() for c in comps) for comps in symbolic_iterates(fmap, n_max)]


def affine_component_degrees(fmap: AffineMap, n: int, seed: int = 0) -> tuple[int, ...]:
    """Exact degrees of the four components of F^n (polynomial F), mod-p line restriction."""
    if not fmap.is_polynomial:
        raise ValueError("component degrees need a polynomial map")
    bound = fmap.degree() ** n
    size = modular.next_pow2(bound + 1)
    p = modular.pick_prime(size, skip=1)
    rng = np.random.default_rng([seed, n, 11])
    a, b = rng.integers(1, p, size=4), rng.integers(1, p, size=4)
    ts = modular.powers(modular.root_of_unity(size, p), size, p)
    vals = [(int(x) + int(y) * ts % p) % p for x, y in zip(a, b)]
    cache: dict = {}
    for _ in range(n):
        cache = {}
        vals = [c.eval_mod_p(vals, p, cache) for c in fmap.components]
    return tuple(len(modular.trim(modular.ntt(v, p, inverse=True))) - 1 for v in vals)


# ---------------------------------------------------------------- plane slices (solver)


class _Jet:
    """Value and gradient (with respect to the homogeneous slice coordinates)."""

    __slots__ = ("v", "g")

    def __init__(self, v, g):
        self.v = v
        self.g = g

    def __mul__(self, o):
        return _Jet(self.v * o.v, self.g * o.v[:, None] + o.g * self.v[:, None])

    def __add__(self, o):
        return _Jet(self.v + o.v, self.g + o.g)

    def scale(self, c):
        return _Jet(c * self.v, c * self.g)

    def power(self, k: int):
        if k == 0:
            return _Jet(np.ones_like(self.v), np.zeros_like(self.g))
        return _Jet(self.v**k, (k * self.v ** (k - 1))[:, None] * self.g)


class PullbackSliceSystem:
    """H_k(F^n(point of a random affine r-plane)) = 0 for k = 1..r, homogenised.

    Each component of F^n is carried as a form of its exact degree in the
    slice coordinates (w, s_1..s_r): applying a term c*prod y_i^{m_i} to forms
    of degrees delta_i gives a form of degree sum m_i delta_i, padded by w
    up to the new component degree.  This avoids the base factor that a
    plain homogenisation of the lift would introduce, so the Bezout number is
    (deg F^n)^r instead of 3^(n r).
    """

    def __init__(self, fmap: AffineMap, n: int, dim: int, seed: int = 0, check_degrees: bool = True):
        if not fmap.is_polynomial:
            raise ValueError("the slice system needs a polynomial map")
        rng = np.random.default_rng([seed, n, dim, 4242])

        def crandn(*shape):
            return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

        self.fmap, self.n, self.dim = fmap, n, dim
        self.plane = crandn(dim + 1, 4)  # row 0: base point, rows 1..dim: directions
        self.hyper = crandn(dim + 1, 5)  # dim equations plus one base-locus probe; column 0 constant
        self._terms = [(c.exponents(), np.array([complex(x) for x in c.coeffs])) for c in fmap.components]
        deltas = [(1, 1, 1, 1)]
        for _ in range(n):
            deltas.append(tuple(int((e @ np.array(deltas[-1])).max()) for e, _ in self._terms))
        self.deltas = deltas
        if check_degrees:
            exact = affine_component_degrees(fmap, n, seed)
            if exact != deltas[-1]:
                raise DegreePredictionError(f"predicted component degrees {deltas[-1]} but found {exact}")
        self.D = max(deltas[-1])
        self.nvars = dim
        self.degrees = (self.D,) * dim
        self._probe_points = crandn(16, dim + 1)
        self.calibrate()

    def calibrate(self):
        """Rescale each equation to unit RMS on random unit vectors.

        The raw equations are many orders of magnitude larger than the start
        system there, which stalls the first steps of every path.
        """
        self.scale = np.ones(self.dim)
        probe = self._probe_points / np.linalg.norm(self._probe_points, axis=1, keepdims=True)
        vals, _ = self.evaluate(probe)
        self.scale = 1.0 / np.sqrt(np.mean(np.abs(vals) ** 2, axis=0))

    def _components(self, X):
        B = len(X)
        eye = np.eye(self.dim + 1, dtype=complex)
        w = _Jet(X[:, 0], np.broadcast_to(eye[0], (B, self.dim + 1)).copy())
        comps = []
        for i in range(4):
            v = X @ self.plane[:, i]
            comps.append(_Jet(v, np.broadcast_to(self.plane[:, i], (B, self.dim + 1)).copy()))
        for step in range(self.n):
            delta = np.array(self.deltas[step])
            new_deg = self.deltas[step + 1]
            nxt = []
            for j, (exps, coeffs) in enumerate(self._terms):
                acc = None
                for e, c in zip(exps, coeffs):
                    term = w.power(int(new_deg[j] - e @ delta))
                    for i, k in enumerate(e):
                        if k:
                            term = term * comps[i].power(int(k))
                    term = term.scale(c)
                    acc = term if acc is None else acc + term
                nxt.append(acc)
            comps = nxt
        return w, comps

    def _equations(self, X, rows):
        w, comps = self._components(np.asarray(X, dtype=complex))
        deg = self.deltas[-1]
        out = []
        for k in rows:
            h = self.hyper[k]
            acc = w.power(self.D).scale(h[0])
            for i in range(4):
                acc = acc + (w.power(self.D - deg[i]) * comps[i]).scale(h[i + 1])
            out.append(acc)
        return out

    def evaluate(self, X):
        eqs = self._equations(X, range(self.dim))
        vals = np.stack([e.v for e in eqs], axis=1) * self.scale
        jac = np.stack([e.g for e in eqs], axis=1) * self.scale[:, None]
        return vals, jac

    def probe(self, x) -> np.ndarray:
        """The extra random hyperplane at F^n of affine points x (B, dim)."""
        X = np.hstack([np.ones((len(x), 1), dtype=complex), np.asarray(x, dtype=complex)])
        return self._equations(X, [self.dim])[0].v

    def image(self, x) -> np.ndarray:
        y = np.asarray(self.plane[0] + np.asarray(x) @ self.plane[1:], dtype=complex)
        for _ in range(self.n):
            y = self.fmap.eval_numeric(y)
        return y

    def evaluate_mp(self, x) -> list:
        import mpmath

        y = [mpmath.mpc(complex(self.plane[0, i])) + sum(xk * mpmath.mpc(complex(self.plane[k + 1, i])) for k, xk in enumerate(x)) for i in range(4)]
        terms = [(e, [mpmath.mpc(complex(c)) for c in cs]) for e, cs in self._terms]
        for _ in range(self.n):
            nxt = []
            for exps, cs in terms:
                acc = mpmath.mpc(0)
                for e, c in zip(exps, cs):
                    t = c
                    for yi, k in zip(y, e):
                        if k:
                            t *= yi ** int(k)
                    acc += t
                nxt.append(acc)
            y = nxt
        return [
            mpmath.mpf(float(self.scale[k]))
            * (mpmath.mpc(complex(self.hyper[k, 0])) + sum(mpmath.mpc(complex(self.hyper[k, i + 1])) * y[i] for i in range(4)))
            for k in range(self.dim)
        ]


@dataclass
class SliceCount:
    n: int
    dim: int
    count: int
    paths: int
    converged: int
    diverged: int
    failed: int
    base_rejected: int
    seed: int


def count_slice_solutions(
    fmap: AffineMap, n: int, dim: int, seed: int = 0, settings: TrackSettings | None = None, workers: int = 1
) -> SliceCount:
    """Distinct finite, certified solutions of the pullback slice system off the probe hyperplane."""
    settings = settings or TrackSettings()
    system = PullbackSliceSystem(fmap, n, dim, seed)
    run = track(system, settings, seed=seed, workers=workers)
    conv = [p for p in run.paths if p.status == CONVERGED]
    pts = [p.endpoint for p in conv]
    clusters = dedup(pts, settings.dedup_radius)
    reps = np.array([pts[c.members[0]] for c in clusters]).reshape(-1, dim)
    count = 0
    rejected = 0
    if len(reps):
        probe = np.abs(system.probe(reps))
        scale = np.maximum(1.0, np.abs(system.image(reps)).max(axis=1))
        cert = certify(system, reps)
        for k in range(len(reps)):
            if probe[k] < 1e-8 * scale[k] or cert[k] > 1e-6 * scale[k]:
                rejected += 1
            else:
                count += 1
    return SliceCount(n, dim, count, len(run.paths), len(conv), run.count("diverged"), run.count("failed"), rejected, seed)


def degree_codim2(
    fmap: AffineMap | None = None,
    n: int = 1,
    solver: TrackSettings | None = None,
    seeds: Sequence[int] = (0, 1),
    workers: int = 1,
) -> int:
    """d_n^(2) by homotopy continuation on random plane slices; seeds must agree."""
    fmap = fmap or make_F()
    counts = [count_slice_solutions(fmap, n, 2, s, solver, workers) for s in seeds]
    values = {c.count for c in counts}
    if len(values) != 1:
        raise CountDisagreement(f"d2 at n={n}: seeds {list(seeds)} give {[c.count for c in counts]}")
    return counts[0].count


# ---------------------------------------------------------------- plane slices (exact oracle)


def _batched_resultant(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Resultants of row pairs (coefficients lowest first, common formal degrees).

    Rows whose remainder sequence is not the generic one (degree dropping by
    one each step) are redone one at a time.
    """
    B = a.shape[0]
    out = np.empty(B, dtype=np.int64)
    generic = np.ones(B, dtype=bool)
    res = np.ones(B, dtype=np.int64)
    A, Bm = a.copy(), b.copy()
    da, db = A.shape[1] - 1, Bm.shape[1] - 1
    generic &= (A[:, -1] != 0) & (Bm[:, -1] != 0)
    while db > 0:
        lcb = Bm[:, -1]
        inv = modular.inv_vec(np.where(lcb == 0, 1, lcb), p)
        R = A.copy()
        for k in range(da, db - 1, -1):
            c = R[:, k] * inv % p
            R[:, k - db : k + 1] = (R[:, k - db : k + 1] - c[:, None] * Bm) % p
        R = R[:, :db]
        dr = db - 1
        generic &= R[:, dr] != 0
        sign = -1 if (da * db) % 2 else 1
        res = res * modular.powmod_vec(lcb, da - dr, p) % p * (sign % p) % p
        A, Bm, da, db = Bm, R, db, dr
    res = res * modular.powmod_vec(Bm[:, 0], da, p) % p
    out[:] = res
    for i in np.flatnonzero(~generic):
        out[i] = _resultant_scalar(modular.trim(a[i]), modular.trim(b[i]), a.shape[1] - 1, b.shape[1] - 1, p)
    return out


def _resultant_scalar(a, b, da_formal, db_formal, p) -> int:
    # formal degrees larger than the true degrees make the resultant vanish
    if len(a) - 1 < da_formal or len(b) - 1 < db_formal:
        return 0
    res = 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db < 0:
            return 0
        if db == 0:
            return res * pow(int(b[0]), da, p) % p
        _, r = modular.divmod_poly(a, b, p)
        if not len(r):
            return 0
        dr = len(r) - 1
        sign = -1 if (da * db) % 2 else 1
        res = res * pow(int(b[-1]), da - dr, p) * sign % p
        a, b = b, r


def degree_codim2_modular(fmap: AffineMap | None = None, n: int = 1, seed: int = 0, prime: int | None = None) -> int:
    """Exact d_n^(2): degree in s of Res_t(H1(F^n(P(s,t))), H2(F^n(P(s,t)))) over F_p.

    For a random plane the t^D coefficients of both equations are nonzero
    constants, so the resultant has exactly one root per finite intersection
    point; its degree is the number of points of the plane sent into the
    codimension-2 subspace.
    """
    fmap = fmap or make_F()
    degs = affine_component_degrees(fmap, n, seed)
    D = max(degs)
    p = prime or modular.pick_prime(1 << 4, skip=2)
    rng = np.random.default_rng([seed, n, 99])
    P = rng.integers(0, p, size=(3, 4))
    H = rng.integers(1, p, size=(2, 5))
    nt = D + 1
    ns = D * D + 1
    ts = np.arange(1, nt + 1, dtype=np.int64)
    ss = np.arange(nt + 1, nt + 1 + ns, dtype=np.int64)
    S = np.repeat(ss, nt)
    T = np.tile(ts, ns)
    y = [(int(P[0, i]) + int(P[1, i]) * S + int(P[2, i]) * T) % p for i in range(4)]
    for _ in range(n):
        cache: dict = {}
        y = [c.eval_mod_p(y, p, cache) for c in fmap.components]
    e = [(int(h[0]) + sum(int(h[i + 1]) * y[i] % p for i in range(4))) % p for h in H]
    # interpolate in t for every s at once: solve with the (shared) inverse Vandermonde
    V = np.array([[pow(int(t), k, p) for k in range(nt)] for t in ts], dtype=object)
    Vinv = _inverse_mod(V, p)
    coeffs = []
    for ek in e:
        M = ek.reshape(ns, nt)
        coeffs.append(_matmul_mod(M, Vinv.T, p))
    r = _batched_resultant(coeffs[0], coeffs[1], p)
    poly = modular.interpolate(ss, r, p, ns - 1)
    return int(modular.degree(poly)) if len(poly) else 0


def _inverse_mod(M, p: int) -> np.ndarray:
    n = len(M)
    A = [[int(x) % p for x in row] + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        inv = pow(A[col][col], p - 2, p)
        A[col] = [x * inv % p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[col])]
    return np.array([row[n:] for row in A], dtype=np.int64)


def _matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    # split B into 16-bit halves so every partial dot product stays inside int64
    lo, hi = B & 0xFFFF, B >> 16
    out_lo = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    out_hi = np.zeros_like(out_lo)
    step = max(1, (1 << 62) // ((p - 1) * 0xFFFF) // 2)
    for k in range(0, A.shape[1], step):
        out_lo = (out_lo + A[:, k : k + step] @ lo[k : k + step]) % p
        out_hi = (out_hi + A[:, k : k + step] @ hi[k : k + step]) % p
    return (out_hi * 65536 + out_lo) % p


# ---------------------------------------------------------------- table


def format_growth(x: float) -> str:
    """Eleven decimals with trailing zeros dropped, the layout of the reference tables."""
    return f"{x:.11f}".rstrip("0").rstrip(".")


@dataclass
class DegreeRow:
    n: int
    d1: int | None = None
    d2: int | None = None
    d3: int | None = None
    methods: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)


@dataclass
class DegreeTable:
    rows: dict[int, DegreeRow]
    seed: int = 0

    def sequence(self, kind: int) -> list[int]:
        key = f"d{kind}"
        out = []
        for n in sorted(self.rows):
            v = getattr(self.rows[n], key)
            if v is None:
                break
            out.append(v)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["N", "d1", "d2", "d3", "d1^(1/N)", "d2^(1/N)", "d3^(1/N)", "d1_method", "d2_method", "d3_method"]
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(cols)
        for n in sorted(self.rows):
            r = self.rows[n]
            vals = [r.d1, r.d2, r.d3]
            growth = ["" if v is None else format_growth(v ** (1.0 / n)) for v in vals]
            wr.writerow(
                [n, *("" if v is None else v for v in vals), *growth]
                + [r.methods.get(k, "") for k in ("d1", "d2", "d3")]
            )
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"seed": self.seed, "rows": [asdict(self.rows[n]) for n in sorted(self.rows)]}

    @classmethod
    def from_json(cls, data) -> "DegreeTable":
        rows = {r["n"]: DegreeRow(**r) for r in data["rows"]}
        return cls(rows, data.get("seed", 0))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def degree_table(
    n_max: int,
    kind2_budget: int = KIND2_BUDGET,
    witnesses: int = 2,
    seed: int = 0,
    symbolic_check: int = 8,
    solver: TrackSettings | None = None,
    kind2_method: str = "solver",
    workers: int = 1,
    progress=None,
) -> DegreeTable:
    """All three degree sequences for n <= n_max."""
    F, Finv = make_F(), make_F_inverse()
    lf, lg = lift(F), lift(Finv)
    sym = symbolic_degrees(min(n_max, symbolic_check), F) if symbolic_check else []
    rows: dict[int, DegreeRow] = {}
    for n in range(1, n_max + 1):
        row = DegreeRow(n)
        r1 = line_slice(lf, n, witnesses, seed, workers=workers)
        r3 = line_slice(lg, n, witnesses, seed, workers=workers)
        row.d1, row.d3 = r1.value, r3.value
        row.methods["d1"] = "line-slice"
        row.methods["d3"] = "line-slice"
        row.witnesses["d1"] = r1.to_json()["witnesses"]
        row.witnesses["d3"] = r3.to_json()["witnesses"]
        if n <= len(sym):
            if sym[n - 1] != row.d1:
                raise WitnessDisagreement(f"line slice {row.d1} vs symbolic {sym[n - 1]} at n={n}", [row.d1, sym[n - 1]])
            row.methods["d1"] = "line-slice+symbolic"
        if n <= kind2_budget:
            if kind2_method == "solver":
                row.d2 = degree_codim2(F, n, solver, seeds=(seed, seed + 1), workers=workers)
                row.methods["d2"] = "plane-count"
            else:
                row.d2 = degree_codim2_modular(F, n, seed)
                row.methods["d2"] = "plane-resultant"
        rows[n] = row
        if progress:
            progress(row)
    return DegreeTable(rows, seed)
