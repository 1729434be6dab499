"""Isolated periodic points of F restricted to a fiber q = c.

A point of period dividing n is encoded by its orbit x^(0), ..., x^(n-1).
Because F copies coordinates (x1' = x2, x2' = -x4), every x1^(k), x2^(k) is
a signed copy of an earlier x4, so the unknowns reduce to (x3^(k), x4^(k))
for k < n: 2n unknowns, 2n cubic step equations and the fiber quadric.  A
random complex matrix squares the 2n+1 equations to 2n, and endpoints are
filtered against the full system afterwards.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .homotopy import (
    CONVERGED,
    DIVERGED,
    FAILED,
    PathFailureError,
    PolySystem,
    RandomizedSystem,
    TrackSettings,
    certify,
    dedup,
    track,
)
from .maps import curve_ideals
from .poly import QQ, SparsePoly

log = logging.getLogger(__name__)

CURVE_TOL = 1e-6
CURVE_RETRY_TOL = 1e-10
FULL_RESIDUAL_TOL = 1e-8
HYPERBOLIC_TOL = 1e-6


class CountDisagreement(RuntimeError):
    pass


def random_fiber(seed: int) -> Fraction:
    """A seeded rational in [1, 2] with a small denominator."""
    rng = np.random.default_rng([seed, 7919])
    den = int(rng.integers(2, 10))
    return 1 + Fraction(int(rng.integers(1, den)), den)


def _x1_x2_index(n: int, k: int) -> tuple[int, int]:
    """Indices j with x1^(k) = -x4^(j1), x2^(k) = -x4^(j2)."""
    return (k - 2) % n, (k - 1) % n


@dataclass
class OrbitSystem:
    n: int
    c: Fraction
    seed: int
    equations: list[SparsePoly]
    matrix: np.ndarray

    @property
    def nvars(self) -> int:
        return 2 * self.n

    def x3(self, k):
        return 2 * k

    def x4(self, k):
        return 2 * k + 1

    @property
    def system(self) -> RandomizedSystem:
        base = PolySystem.from_sparse(self.equations, degrees=[3] * len(self.equations))
        return RandomizedSystem(base, self.matrix)

    def orbit(self, sol) -> np.ndarray:
        """Rebuild x^(0..n-1) (shape (n, 4)) from a solution vector."""
        sol = np.asarray(sol)
        out = np.empty((self.n, 4), dtype=sol.dtype)
        for k in range(self.n):
            j1, j2 = _x1_x2_index(self.n, k)
            out[k] = (-sol[self.x4(j1)], -sol[self.x4(j2)], sol[self.x3(k)], sol[self.x4(k)])
        return out

    def solution_from_orbit(self, orbit) -> np.ndarray:
        orbit = np.asarray(orbit)
        sol = np.empty(2 * self.n, dtype=orbit.dtype)
        for k in range(self.n):
            sol[self.x3(k)] = orbit[k, 2]
            sol[self.x4(k)] = orbit[k, 3]
        return sol

    def full_residual(self, sols: np.ndarray) -> np.ndarray:
        """Max modulus of all 2n+1 unrandomised equations."""
        sols = np.atleast_2d(sols)
        cols = [sols[:, i] for i in range(self.nvars)]
        vals = np.stack([e.eval_numeric(cols) for e in self.equations], axis=1)
        return np.abs(vals).max(axis=1)


def build_orbit_system(n: int, c=None, seed: int = 0) -> OrbitSystem:
    if n < 1:
        raise ValueError("period must be at least 1")
    c = random_fiber(seed) if c is None else Fraction(c)
    if c == 0:
        raise ValueError("the fiber q = 0 is not generic")
    m = 2 * n
    gens = SparsePoly.gens(m, QQ)
    x3 = [gens[2 * k] for k in range(n)]
    x4 = [gens[2 * k + 1] for k in range(n)]
    eqs = []
    for k in range(n):
        j = (k + 1) % n
        i1, i2 = _x1_x2_index(n, k)
        x1k, x2k = -x4[i1], -x4[i2]
        eqs.append(x3[j] - (x1k - x1k * x2k**2))
        eqs.append(x4[j] - (-x3[k] + x1k * x2k * x4[k]))
    i1, i2 = _x1_x2_index(n, 0)
    x10, x20 = -x4[i1], -x4[i2]
    eqs.append(x10 * x4[0] - x20 * x3[0] - c)
    rng = np.random.default_rng([seed, n, 31337])
    R = rng.standard_normal((m, m + 1)) + 1j * rng.standard_normal((m, m + 1))
    return OrbitSystem(n, c, seed, eqs, R)


# ---------------------------------------------------------------- geometry


def jacobian_F(x) -> np.ndarray:
    x1, x2, x3, x4 = x
    return np.array(
        [
            [0, 1, 0, 0],
            [0, 0, 0, -1],
            [1 - x2**2, -2 * x1 * x2, 0, 0],
            [x2 * x4, x1 * x4, -1, x1 * x2],
        ],
        dtype=complex,
    )


def F_numeric(x) -> np.ndarray:
    x1, x2, x3, x4 = x
    return np.array([x2, -x4, x1 - x1 * x2**2, -x3 + x1 * x2 * x4], dtype=complex)


def multipliers(orbit, c=None) -> np.ndarray:
    """Eigenvalues of D(f_c^n) on the tangent space of the fiber at x^(0).

    q o F = q makes the Jacobian product map ker dq(x0) into itself, so its
    restriction to a basis V of that kernel is a 3x3 matrix.
    """
    orbit = np.atleast_2d(np.asarray(orbit, dtype=complex))
    J = np.eye(4, dtype=complex)
    for x in orbit:
        J = jacobian_F(x) @ J
    x1, x2, x3, x4 = orbit[0]
    grad = np.array([x4, -x3, -x2, x1])
    if np.linalg.norm(grad) == 0:
        raise ValueError("dq vanishes: the point is not on a smooth fiber")
    _, _, vh = np.linalg.svd(grad[None, :])
    V = vh[1:].conj().T  # orthonormal basis of {v : grad . v = 0}
    M = np.linalg.pinv(V) @ J @ V
    return np.sort_complex(np.linalg.eigvals(M))


def is_hyperbolic(mults, tol: float = HYPERBOLIC_TOL) -> bool:
    return bool(np.all(np.abs(np.abs(mults) - 1) > tol))


def is_nondegenerate(mults, tol: float = HYPERBOLIC_TOL) -> bool:
    """No multiplier equal to 1, i.e. the fixed point of f_c^n has multiplicity one."""
    return bool(np.all(np.abs(np.asarray(mults) - 1) > tol))


def classify_on_curve(point, c, tolerance: float = CURVE_TOL, curves=None) -> str | None:
    """Name of the first curve (C, D1, D2 in that order) whose ideal vanishes at point."""
    for curve in curve_ideals(c) if curves is None else curves:
        if curve.contains(point, tolerance):
            return curve.name
    return None


def _curve_residual(point, c, curves=None) -> float:
    return min(curve.residual(point) for curve in (curve_ideals(c) if curves is None else curves))


def sample_curve_point(generators, rng: np.random.Generator, attempts: int = 20) -> np.ndarray:
    """A random complex point on the curve cut out by three generators in C^4.

    Newton on the generators plus one random affine-linear equation.
    """
    grads = [[g.diff(i) for i in range(4)] for g in generators]
    for _ in range(attempts):
        ell = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        rhs = complex(rng.standard_normal() + 1j * rng.standard_normal())
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        for _ in range(60):
            cols = [x[i : i + 1] for i in range(4)]
            f = np.array([g.eval_numeric(cols)[0] for g in generators] + [ell @ x - rhs])
            J = np.array([[d.eval_numeric(cols)[0] for d in row] for row in grads] + [ell])
            try:
                delta = np.linalg.solve(J, -f)
            except np.linalg.LinAlgError:
                break
            x = x + delta
            if not np.isfinite(x).all():
                break
            if np.linalg.norm(delta) < 1e-14 * max(1.0, np.linalg.norm(x)):
                return x
    raise RuntimeError("could not sample a point on the curve")


def curve_period(curve, seed: int = 0, max_period: int = 12) -> int:
    """Smallest k with F^k = id on every component (sampled numerically); 0 if none <= max_period."""
    rng = np.random.default_rng([seed, 271828])
    period = 1
    for gens in curve.components:
        x0 = sample_curve_point(gens, rng)
        x, k = F_numeric(x0), 1
        while np.linalg.norm(x - x0) > 1e-8 * max(1.0, np.linalg.norm(x0)):
            if k >= max_period:
                return 0
            x, k = F_numeric(x), k + 1
        period = int(np.lcm(period, k))
    return period


def fixed_curves(n: int, c) -> list:
    """Curves among C, D1, D2 lying pointwise in Fix(f_c^n), minus those contained in another."""
    fixed = [cv for cv in curve_ideals(c) if (p := curve_period(cv)) and n % p == 0]

    def comp_keys(cv):
        return {tuple(sorted(g.to_str() for g in comp)) for comp in cv.components}

    return [
        cv for cv in fixed
        if not any(other is not cv and comp_keys(cv) < comp_keys(other) for other in fixed)
    ]


# ---------------------------------------------------------------- counting


@dataclass
class PointRecord:
    x0: list
    residual: float
    certified_residual: float
    multipliers: list
    hyperbolic: bool
    nondegenerate: bool
    cluster_size: int

    def to_json(self) -> dict:
        def cz(z):
            return [float(np.real(z)), float(np.imag(z))]

        return {
            "x0": [cz(z) for z in self.x0],
            "residual": self.residual,
            "certified_residual": self.certified_residual,
            "multipliers": [cz(z) for z in self.multipliers],
            "multiplier_moduli": [float(abs(z)) for z in self.multipliers],
            "hyperbolic": self.hyperbolic,
            "nondegenerate": self.nondegenerate,
            "cluster_size": self.cluster_size,
        }


@dataclass
class FixedPointReport:
    n: int
    c: Fraction
    seed: int
    paths: int
    isolated: int
    points: list[PointRecord]
    on_curve_solutions: dict[str, int]
    on_curve_points: dict[str, int]
    raw_distinct: int
    spurious: int
    diverged: int
    failed: int
    retracked: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def growth(self) -> float:
        return self.isolated ** (1.0 / self.n) if self.isolated else 0.0

    @property
    def curves(self) -> list[str]:
        return sorted(k for k, v in self.on_curve_solutions.items() if v)

    @property
    def all_hyperbolic(self) -> bool:
        return all(p.hyperbolic for p in self.points)

    @property
    def non_hyperbolic(self) -> int:
        return sum(not p.hyperbolic for p in self.points)

    def conservation_ok(self) -> bool:
        converged = self.paths - self.diverged - self.failed
        on_curve = sum(self.on_curve_solutions.values())
        isolated_paths = sum(p.cluster_size for p in self.points)
        return on_curve + isolated_paths + self.spurious == converged

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "c": str(self.c),
            "seed": self.seed,
            "paths": self.paths,
            "isolated": self.isolated,
            "growth": self.growth,
            "raw_distinct": self.raw_distinct,
            "on_curve_solutions": self.on_curve_solutions,
            "on_curve_points": self.on_curve_points,
            "spurious": self.spurious,
            "diverged": self.diverged,
            "failed": self.failed,
            "retracked": self.retracked,
            "all_hyperbolic": self.all_hyperbolic,
            "non_hyperbolic": self.non_hyperbolic,
            "warnings": self.warnings,
            "points": [p.to_json() for p in self.points],
        }

    def csv_row(self) -> dict:
        label = " & ".join(self.curves)
        if label and self.isolated:
            label = f"{label} AND {self.isolated}"
        elif not label:
            label = str(self.isolated)
        return {"N": self.n, "fixed_points": label, "isolated": self.isolated, "growth": f"{self.growth:.11f}"}


def _polish(osys: OrbitSystem, sol: np.ndarray, iterations: int = 20) -> np.ndarray:
    """Gauss-Newton on the full (overdetermined) orbit system."""
    x = sol.copy()
    for _ in range(iterations):
        cols = [x[i : i + 1] for i in range(osys.nvars)]
        f = np.array([e.eval_numeric(cols)[0] for e in osys.equations])
        J = np.array([[e.diff(i).eval_numeric(cols)[0] for i in range(osys.nvars)] for e in osys.equations])
        delta, *_ = np.linalg.lstsq(J, -f, rcond=None)
        x = x + delta
        if np.linalg.norm(delta) < 1e-15 * max(1.0, np.linalg.norm(x)):
            break
    return x


def count_fixed_points(
    n: int,
    c=None,
    seed: int = 0,
    settings: TrackSettings | None = None,
    workers: int = 1,
    log_path: str | None = None,
    retries: int = 2,
) -> FixedPointReport:
    """Count isolated fixed points of f_c^n by homotopy continuation."""
    settings = settings or TrackSettings()
    osys = build_orbit_system(n, c, seed)
    run = None
    for attempt in range(retries + 1):
        try:
            run = track(osys.system, settings, seed=seed + 1000 * attempt, workers=workers, log_path=log_path)
            break
        except PathFailureError as exc:
            log.warning("period %d attempt %d: %s", n, attempt, exc)
            if attempt == retries:
                raise
    assert run is not None
    conv = [p for p in run.paths if p.status == CONVERGED]
    sols = np.array([p.endpoint for p in conv]).reshape(-1, osys.nvars)
    full = osys.full_residual(sols) if len(sols) else np.zeros(0)
    keep = full < FULL_RESIDUAL_TOL * np.maximum(1.0, np.abs(sols).max(axis=1) ** 3 if len(sols) else 1.0)
    spurious = int((~keep).sum())
    sols, full = sols[keep], full[keep]
    orbits = [osys.orbit(s) for s in sols]
    x0 = [o[0] for o in orbits]

    warnings: list[str] = []
    labels: list[str | None] = []
    curves = fixed_curves(n, osys.c)
    for k, pt in enumerate(x0):
        if not curves:
            labels.append(None)
            continue
        label = classify_on_curve(pt, osys.c, curves=curves)
        if label is None and _curve_residual(pt, osys.c, curves) < 1e-3:
            # borderline: polish against the full system and decide at a tighter tolerance
            sols[k] = _polish(osys, sols[k])
            orbits[k] = osys.orbit(sols[k])
            x0[k] = orbits[k][0]
            label = classify_on_curve(x0[k], osys.c, CURVE_RETRY_TOL, curves)
        labels.append(label)

    on_curve_solutions = {"C": 0, "D1": 0, "D2": 0}
    for lab in labels:
        if lab is not None:
            on_curve_solutions[lab] += 1
    curve_idx = [k for k, lab in enumerate(labels) if lab is not None]
    on_curve_points = {name: 0 for name in on_curve_solutions}
    for cl in dedup([x0[k] for k in curve_idx], settings.dedup_radius):
        on_curve_points[labels[curve_idx[cl.members[0]]]] += 1

    iso_idx = [k for k, lab in enumerate(labels) if lab is None]
    clusters = dedup([x0[k] for k in iso_idx], settings.dedup_radius)
    points: list[PointRecord] = []
    if clusters:
        reps = [iso_idx[cl.members[0]] for cl in clusters]
        cert = certify(osys.system, [sols[k] for k in reps])
    for j, cl in enumerate(clusters):
        k = iso_idx[cl.members[0]]
        mults = multipliers(orbits[k])
        if cl.size > 1:
            warnings.append(f"isolated point reached by {cl.size} paths; counted once")
        if cl.ambiguous:
            warnings.append("two isolated clusters within ten dedup radii")
        points.append(
            PointRecord(
                x0=list(orbits[k][0]),
                residual=float(full[k]),
                certified_residual=float(cert[j]),
                multipliers=list(mults),
                hyperbolic=is_hyperbolic(mults),
                nondegenerate=is_nondegenerate(mults),
                cluster_size=cl.size,
            )
        )
    all_clusters = dedup(x0, settings.dedup_radius) if x0 else []
    return FixedPointReport(
        n=n,
        c=osys.c,
        seed=seed,
        paths=len(run.paths),
        isolated=len(points),
        points=points,
        on_curve_solutions=on_curve_solutions,
        on_curve_points=on_curve_points,
        raw_distinct=len(all_clusters),
        spurious=spurious,
        diverged=run.count(DIVERGED),
        failed=run.count(FAILED),
        retracked=run.retracked,
        warnings=warnings,
    )


def count_two_seeds(n: int, c=None, seeds=(0, 1), **kwargs) -> tuple[FixedPointReport, FixedPointReport]:
    """Run two independent randomisations on the same fiber and demand equal counts."""
    c = random_fiber(seeds[0]) if c is None else c
    a = count_fixed_points(n, c, seeds[0], **kwargs)
    b = count_fixed_points(n, c, seeds[1], **kwargs)
    if a.isolated != b.isolated or a.curves != b.curves:
        raise CountDisagreement(
            f"period {n}: seed {seeds[0]} gives {a.isolated} {a.curves}, seed {seeds[1]} gives {b.isolated} {b.curves}"
        )
    return a, b


def orbit_shifts_present(report: FixedPointReport, radius: float = 1e-6) -> bool:
    """Every isolated x0 has F(x0) among the isolated points as well."""
    pts = np.array([p.x0 for p in report.points])
    if len(pts) == 0:
        return True
    images = np.array([F_numeric(p) for p in pts])
    d = np.linalg.norm(images[:, None, :] - pts[None, :, :], axis=2)
    return bool(np.all(d.min(axis=1) < radius * max(1.0, np.abs(pts).max())))


def growth_table(reports) -> list[tuple[int, int, float]]:
    """(n, isolated count, count^(1/n)) rows; zero count gives growth 0."""
    pairs = [(r.n, r.isolated) if hasattr(r, "isolated") else (int(r[0]), int(r[1])) for r in reports]
    return [(n, count, round(count ** (1.0 / n), 11) if count else 0.0) for n, count in sorted(pairs)]
