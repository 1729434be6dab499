"""Batched predictor-corrector path tracking on a random projective patch.

All paths of a run advance together as numpy batches, each with its own
``t`` and step size, so the result of a path never depends on which other
paths shared its batch.  H(X, t) = (1 - t) f(X) + gamma t g(X) is tracked from
t = 1 (start system g) to t = 0 (target f) with an RK4 predictor on the
Davidenko equation and a Newton corrector; an extra linear equation v.X = 1
fixes the projective scaling.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .systems import TotalDegreeStart, bezout_number

log = logging.getLogger(__name__)

CONVERGED = "converged"
DIVERGED = "diverged"
FAILED = "failed"


class PathFailureError(RuntimeError):
    """Too many paths failed; rerun with a fresh gamma (new seed)."""

    def __init__(self, message, run=None):
        super().__init__(message)
        self.run = run


@dataclass(frozen=True)
class TrackSettings:
    initial_step: float = 0.02
    min_step: float = 1e-10
    max_step: float = 0.1
    corrector_tol: float = 1e-9
    max_corrector_iters: int = 3
    endgame_radius: float = 0.05
    endgame_ratio: float = 0.3
    endgame_end: float = 1e-13
    final_tol: float = 1e-9
    dedup_radius: float = 1e-6
    max_steps: int = 20_000
    divergence_threshold: float = 1e8
    singular_condition: float = 1e9
    refine_iters: int = 40
    max_failure_rate: float = 0.01
    batch_size: int = 4096
    max_first_correction: float = 1e-2
    cauchy_radius: float = 1e-4
    cauchy_samples: int = 32
    cauchy_max_loops: int = 16
    cauchy_infinity: float = 1e-6
    unresolved_infinity: float = 0.05

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_step >= self.initial_step:
            raise ValueError("min_step must be below initial_step")
        if self.dedup_radius <= self.final_tol:
            raise ValueError("dedup_radius must exceed final_tol")
        if not 0 < self.endgame_ratio < 1:
            raise ValueError("endgame_ratio must lie in (0, 1)")

    def tightened(self) -> "TrackSettings":
        return replace(
            self,
            initial_step=self.initial_step / 4,
            max_step=self.max_step / 4,
            corrector_tol=self.corrector_tol / 10,
            min_step=min(self.min_step, self.initial_step / 8) / 10,
        )


@dataclass
class PathResult:
    index: int
    status: str
    endpoint: np.ndarray | None  # affine coordinates, None at infinity
    projective: np.ndarray
    residual: float
    condition: float
    steps: int
    t_reached: float
    singular: bool = False
    multiplicity: int = 1
    winding: int = 0

    def to_json(self) -> dict:
        def cvec(v):
            return None if v is None else [[float(z.real), float(z.imag)] for z in v]

        return {
            "index": self.index,
            "status": self.status,
            "endpoint": cvec(self.endpoint),
            "residual": self.residual,
            "condition": self.condition,
            "steps": self.steps,
            "t_reached": self.t_reached,
            "singular": self.singular,
            "multiplicity": self.multiplicity,
            "winding": self.winding,
        }


@dataclass
class TrackRun:
    paths: list[PathResult]
    bezout: int
    seed: int
    gamma: complex
    settings: TrackSettings
    retracked: int = 0
    jump_suspects: list[int] = field(default_factory=list)

    def count(self, status: str) -> int:
        return sum(p.status == status for p in self.paths)

    @property
    def failure_rate(self) -> float:
        return self.count(FAILED) / max(1, len(self.paths))

    def converged(self) -> list[PathResult]:
        return [p for p in self.paths if p.status == CONVERGED]

    def summary(self) -> dict:
        return {
            "bezout": self.bezout,
            "converged": self.count(CONVERGED),
            "diverged": self.count(DIVERGED),
            "failed": self.count(FAILED),
            "retracked": self.retracked,
            "seed": self.seed,
        }


# ---------------------------------------------------------------- linear algebra


def _solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(A).all(axis=(1, 2)) | ~np.isfinite(b).all(axis=1)
    if bad.any():
        A = A.copy()
        b = b.copy()
        A[bad] = np.eye(A.shape[1])
        b[bad] = np.nan
    try:
        return np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.einsum("bij,bj->bi", np.linalg.pinv(A), b)


class _Homotopy:
    def __init__(self, target, start, gamma: complex, patch: np.ndarray):
        self.f = target
        self.g = start
        self.gamma = gamma
        self.v = patch

    def parts(self, X, t):
        f, Jf = self.f.evaluate(X)
        g, Jg = self.g.evaluate(X)
        a = (1.0 - t)[:, None]
        b = (self.gamma * t)[:, None]
        H = a * f + b * g
        HX = a[..., None] * Jf + b[..., None] * Jg
        Ht = -f + self.gamma * g
        return H, HX, Ht

    def augment(self, HX):
        B = HX.shape[0]
        return np.concatenate([HX, np.broadcast_to(self.v, (B, 1, len(self.v)))], axis=1)

    def velocity(self, X, t):
        _, HX, Ht = self.parts(X, t)
        rhs = np.concatenate([-Ht, np.zeros((len(X), 1), dtype=complex)], axis=1)
        return _solve(self.augment(HX), rhs)

    def newton_delta(self, X, t):
        H, HX, _ = self.parts(X, t)
        rhs = np.concatenate([-H, (1.0 - X @ self.v)[:, None]], axis=1)
        return _solve(self.augment(HX), rhs)


def _track_chunk(target, start, gamma, patch, X, settings: TrackSettings):
    """Track a batch from t=1 down to ``settings.endgame_end``.

    Returns (X, t, ok, steps, t_c, X_c) where (t_c, X_c) is the first accepted
    point inside the Cauchy radius, the base of the loop endgame.
    """
    hom = _Homotopy(target, start, gamma, patch)
    B = len(X)
    X = X.copy()
    t = np.ones(B)
    h = np.full(B, settings.initial_step)
    streak = np.zeros(B, dtype=np.int64)
    steps = np.zeros(B, dtype=np.int64)
    done = np.zeros(B, dtype=bool)
    ok = np.ones(B, dtype=bool)
    t_c = np.full(B, np.nan)
    X_c = np.full_like(X, np.nan)
    tol = settings.corrector_tol
    while True:
        act = np.flatnonzero(~done)
        if len(act) == 0:
            break
        Xa, ta, ha = X[act], t[act], h[act]
        in_end = ta <= settings.endgame_radius
        step = np.where(in_end, np.minimum(ha, ta * (1 - settings.endgame_ratio)), np.minimum(ha, ta))
        tn = ta - step
        dt = (tn - ta)[:, None]
        k1 = hom.velocity(Xa, ta)
        k2 = hom.velocity(Xa + 0.5 * dt * k1, ta + 0.5 * dt[:, 0])
        k3 = hom.velocity(Xa + 0.5 * dt * k2, ta + 0.5 * dt[:, 0])
        k4 = hom.velocity(Xa + dt * k3, tn)
        Xp = Xa + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

        scale = np.maximum(1.0, np.linalg.norm(Xp, axis=1))
        good = np.zeros(len(act), dtype=bool)
        alive = np.isfinite(Xp).all(axis=1)
        prev = np.full(len(act), np.inf)
        for it in range(settings.max_corrector_iters):
            delta = hom.newton_delta(Xp, tn)
            dn = np.linalg.norm(delta, axis=1) / scale
            finite = np.isfinite(dn)
            upd = alive & ~good & finite
            Xp[upd] += delta[upd]
            if it == 0:
                # a large first correction means the predictor left the path's basin
                alive &= finite & (dn < settings.max_first_correction)
            else:
                alive &= finite & ((dn < 0.5 * prev) | (dn < tol))
            good |= alive & (dn < tol)
            prev = np.where(good, prev, dn)
        accept = good & alive

        steps[act] += 1
        acc = act[accept]
        X[acc] = Xp[accept]
        t[acc] = tn[accept]
        first = acc[np.isnan(t_c[acc]) & (t[acc] <= settings.cauchy_radius)]
        t_c[first] = t[first]
        X_c[first] = X[first]
        st = streak[act] + 1
        grow = accept & (st >= 3)
        h[act] = np.where(grow, np.minimum(2 * ha, settings.max_step), np.where(accept, ha, ha / 2))
        streak[act] = np.where(accept & ~grow, st, 0)

        finished = act[accept & (tn <= settings.endgame_end)]
        done[finished] = True
        too_small = act[~accept & (ha / 2 < settings.min_step)]
        too_long = act[steps[act] >= settings.max_steps]
        for idx in (too_small, too_long):
            done[idx] = True
            ok[idx] = False
    return X, t, ok, steps, t_c, X_c


def refine_projective(target, patch, X, iterations: int, tol: float = 1e-15):
    """Newton / Gauss-Newton at t=0 on [f; v.X - 1]; returns (X, condition)."""
    X = X.copy()
    B = len(X)
    active = np.isfinite(X).all(axis=1)
    for _ in range(iterations):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        f, J = target.evaluate(X[idx])
        A = np.concatenate([J, np.broadcast_to(patch, (len(idx), 1, len(patch)))], axis=1)
        rhs = np.concatenate([-f, (1.0 - X[idx] @ patch)[:, None]], axis=1)
        delta = np.einsum("bij,bj->bi", np.linalg.pinv(A, rcond=1e-14), rhs)
        dn = np.linalg.norm(delta, axis=1)
        finite = np.isfinite(dn)
        X[idx[finite]] += delta[finite]
        active[idx[~finite | (dn < tol * np.maximum(1.0, np.linalg.norm(X[idx], axis=1)))]] = False
    cond = np.full(B, np.inf)
    fin = np.isfinite(X).all(axis=1)
    if fin.any():
        _, J = target.evaluate(X[fin])
        A = np.concatenate([J, np.broadcast_to(patch, (int(fin.sum()), 1, len(patch)))], axis=1)
        with np.errstate(all="ignore"):
            cond[fin] = np.linalg.cond(A)
    return X, cond


def _arc(hom, X, r, th0, th1, settings: TrackSettings, depth: int = 0):
    """Advance X along t = r e^{i theta} from th0 to th1 (RK4 + Newton), splitting on failure.

    ``r`` holds one radius per path.
    """
    ta = r * np.exp(1j * th0)
    tb = r * np.exp(1j * th1)
    dt = tb - ta
    k1 = hom.velocity(X, ta)
    k2 = hom.velocity(X + 0.5 * dt[:, None] * k1, ta + 0.5 * dt)
    k3 = hom.velocity(X + 0.5 * dt[:, None] * k2, ta + 0.5 * dt)
    k4 = hom.velocity(X + dt[:, None] * k3, ta + dt)
    Xp = X + dt[:, None] / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    scale = np.maximum(1.0, np.linalg.norm(Xp, axis=1))
    ok = np.isfinite(Xp).all(axis=1)
    prev = np.full(len(X), np.inf)
    dn = prev
    for it in range(settings.max_corrector_iters + 1):
        delta = hom.newton_delta(Xp, tb)
        dn = np.linalg.norm(delta, axis=1) / scale
        fin = np.isfinite(dn)
        Xp[fin] += delta[fin]
        ok &= fin & ((dn < 1e-2) if it == 0 else ((dn < 0.5 * prev) | (dn < settings.corrector_tol)))
        prev = dn
    ok &= dn < settings.corrector_tol
    bad = np.flatnonzero(~ok)
    if len(bad) and depth < 8:
        mid = 0.5 * (th0 + th1)
        Xm, okm = _arc(hom, X[bad], r[bad], th0, mid, settings, depth + 1)
        Xe, oke = _arc(hom, Xm, r[bad], mid, th1, settings, depth + 1)
        Xp[bad] = Xe
        ok[bad] = okm & oke
    return Xp, ok


def _cauchy_endgame(hom, X, r, settings: TrackSettings):
    """Loop t around 0 at radius r until each path closes up.

    A path with winding number c is analytic in s = t^(1/c), so the mean of
    X over equally spaced samples on the c loops is the endpoint X(0) (the
    trapezoid rule is spectrally accurate for periodic analytic functions).
    This resolves singular endpoints, including those at infinity, that the
    straight-line endgame cannot.  Returns (estimates, winding, ok).
    """
    B = len(X)
    N = settings.cauchy_samples
    start = X.copy()
    total = np.zeros_like(X)
    est = np.full_like(X, np.nan)
    winding = np.zeros(B, dtype=np.int64)
    ok = np.ones(B, dtype=bool)
    open_ = np.ones(B, dtype=bool)
    cur = X.copy()
    for loop in range(settings.cauchy_max_loops):
        idx = np.flatnonzero(open_ & ok)
        if not len(idx):
            break
        for k in range(N):
            Xn, good = _arc(hom, cur[idx], r[idx], 2 * np.pi * k / N, 2 * np.pi * (k + 1) / N, settings)
            cur[idx] = Xn
            total[idx] += Xn
            ok[idx[~good]] = False
            idx = idx[good]
            if not len(idx):
                break
        if not len(idx):
            continue
        gap = np.linalg.norm(cur[idx] - start[idx], axis=1) / np.maximum(1.0, np.linalg.norm(start[idx], axis=1))
        closed = idx[gap < 1e-6]
        est[closed] = total[closed] / (N * (loop + 1))
        winding[closed] = loop + 1
        open_[closed] = False
    ok &= ~open_
    return est, winding, ok


def _classify(hom, X, t, ok, steps, settings: TrackSettings, offset: int, t_c, X_c) -> list[PathResult]:
    target, patch = hom.f, hom.v
    Xr, cond = refine_projective(target, patch, X, settings.refine_iters)
    out = []
    norms = np.linalg.norm(Xr, axis=1)
    unresolved = []
    for i in range(len(Xr)):
        Xi = Xr[i]
        finite = np.isfinite(Xi).all() and norms[i] > 0
        w = abs(Xi[0]) / norms[i] if finite else 0.0
        endpoint = None
        residual = np.inf
        if finite and w * settings.divergence_threshold > 1:
            endpoint = Xi[1:] / Xi[0]
            vals, _ = target.evaluate(np.concatenate([[1.0], endpoint])[None, :])
            residual = float(np.abs(vals).max())
        if not ok[i] and t[i] > settings.endgame_radius:
            status = FAILED
        elif finite and w * settings.divergence_threshold <= 1:
            status = DIVERGED
        elif residual < settings.final_tol:
            status = CONVERGED
        else:
            status = FAILED
            if np.isfinite(t_c[i]):
                unresolved.append(i)
        out.append(
            PathResult(
                index=offset + i,
                status=status,
                endpoint=endpoint if status == CONVERGED else None,
                projective=Xi,
                residual=residual,
                condition=float(cond[i]),
                steps=int(steps[i]),
                t_reached=float(t[i]),
                singular=bool(cond[i] > settings.singular_condition),
            )
        )
    if unresolved:
        _resolve_by_loops(hom, out, np.array(unresolved), t_c, X_c, settings)
    return out


def _fate_of_unresolved(X, settings: TrackSettings) -> str:
    # Tracking reached the end but the loops did not close within the budget:
    # a cycle number too large to resolve in double precision.  In every
    # system used by this package such endpoints sit near the hyperplane at
    # infinity; anything else stays a failure.
    w = abs(X[0]) / np.linalg.norm(X)
    return DIVERGED if w < settings.unresolved_infinity else FAILED


def _resolve_by_loops(hom, out, idx, t_c, X_c, settings: TrackSettings):
    # each path is looped at the radius where it entered the Cauchy zone
    est, winding, ok = _cauchy_endgame(hom, X_c[idx], t_c[idx], settings)
    for j, i in enumerate(idx):
        p = out[i]
        p.winding = int(winding[j])
        if not ok[j]:
            p.status = _fate_of_unresolved(p.projective, settings)
            continue
        Xe = est[j]
        w = abs(Xe[0]) / np.linalg.norm(Xe)
        if w < settings.cauchy_infinity:
            p.status = DIVERGED
            p.projective = Xe
            continue
        endpoint = Xe[1:] / Xe[0]
        vals, jac = hom.f.evaluate(np.concatenate([[1.0], endpoint])[None, :])
        p.residual = float(np.abs(vals).max())
        # Euler: J.X = deg * f, so |J| |X| is the size of the terms that cancel
        scale = max(1.0, float(np.abs(jac[0]).max() * max(1.0, np.abs(endpoint).max())))
        if p.residual < settings.final_tol * scale:
            p.status = CONVERGED
            p.endpoint = endpoint
            p.projective = Xe
            p.singular = p.singular or winding[j] > 1
        else:
            p.status = _fate_of_unresolved(p.projective, settings)


def _run_chunk(args):
    target, start, gamma, patch, X, settings, offset = args
    Xe, t, ok, steps, t_c, X_c = _track_chunk(target, start, gamma, patch, X, settings)
    hom = _Homotopy(target, start, gamma, patch)
    return _classify(hom, Xe, t, ok, steps, settings, offset, t_c, X_c)


def _to_patch(x: np.ndarray, patch: np.ndarray) -> np.ndarray:
    X = np.hstack([np.ones((len(x), 1), dtype=complex), x])
    return X / (X @ patch)[:, None]


def track(
    system,
    settings: TrackSettings | None = None,
    seed: int = 0,
    workers: int = 1,
    log_path: str | None = None,
    start_points: np.ndarray | None = None,
    indices: Sequence[int] | None = None,
    check_failures: bool = True,
    _gamma_patch=None,
) -> TrackRun:
    """Solve a square system by total-degree homotopy continuation."""
    settings = settings or TrackSettings()
    if len(system.degrees) != system.nvars:
        raise ValueError(f"system is not square: {len(system.degrees)} equations, {system.nvars} unknowns")
    start = TotalDegreeStart(system.degrees)
    rng = np.random.default_rng(seed)
    if _gamma_patch is None:
        gamma = complex(np.exp(2j * np.pi * rng.random()))
        patch = rng.standard_normal(system.nvars + 1) + 1j * rng.standard_normal(system.nvars + 1)
    else:
        gamma, patch = _gamma_patch
    if start_points is None:
        start_points = start.start_points()
    if indices is None:
        indices = range(len(start_points))
    X = _to_patch(start_points, patch)
    idx = np.asarray(list(indices))
    chunks = []
    for lo in range(0, len(X), settings.batch_size):
        chunks.append((system, start, gamma, patch, X[lo : lo + settings.batch_size], settings, 0))
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(c) for c in chunks]
    paths = [p for part in parts for p in part]
    for k, p in enumerate(paths):
        p.index = int(idx[k])
    run = TrackRun(paths, bezout_number(system), seed, gamma, settings)
    if _gamma_patch is None:
        _recheck_jumps(system, run, start_points, gamma, patch, workers)
        from .endpoints import assign_multiplicities

        assign_multiplicities(run)
    if log_path:
        with open(log_path, "a", encoding="utf-8") as fh:
            for p in run.paths:
                fh.write(json.dumps({"seed": seed, **p.to_json()}) + "\n")
    if check_failures and run.failure_rate > settings.max_failure_rate:
        raise PathFailureError(
            f"{run.count(FAILED)} of {len(run.paths)} paths failed (bound {settings.max_failure_rate:.2%})",
            run,
        )
    return run


def _recheck_jumps(system, run: TrackRun, start_points, gamma, patch, workers):
    """Re-track paths whose nonsingular endpoints coincide (a sign of path jumping)."""
    from .endpoints import dedup

    for _ in range(2):
        conv = [p for p in run.paths if p.status == CONVERGED and not p.singular]
        if not conv:
            return
        clusters = dedup([p.endpoint for p in conv], run.settings.dedup_radius)
        suspects = sorted(conv[k].index for c in clusters if c.size > 1 for k in c.members)
        if not suspects:
            run.jump_suspects = []
            return
        run.settings = run.settings.tightened()
        log.info("re-tracking %d paths with coincident nonsingular endpoints", len(suspects))
        redo = track(
            system,
            run.settings,
            run.seed,
            workers,
            start_points=start_points[suspects],
            indices=suspects,
            check_failures=False,
            _gamma_patch=(gamma, patch),
        )
        by_index = {p.index: k for k, p in enumerate(run.paths)}
        for p in redo.paths:
            run.paths[by_index[p.index]] = p
        run.retracked += len(suspects)
        run.jump_suspects = suspects
