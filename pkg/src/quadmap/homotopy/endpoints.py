"""Endpoint post-processing: Newton refinement, clustering, high-precision residual checks."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.spatial import cKDTree


@dataclass
class RefineResult:
    point: np.ndarray
    residual: float
    condition: float
    iterations: int
    converged: bool
    linear_rate: bool

    @property
    def singular(self) -> bool:
        return self.linear_rate or not np.isfinite(self.condition) or self.condition > 1e12


def _affine_eval(system, x):
    X = np.concatenate([[1.0 + 0j], np.asarray(x, dtype=complex)])[None, :]
    vals, jac = system.evaluate(X)
    return vals[0], jac[0, :, 1:]


def refine(point, system, iterations: int = 10, tol: float = 1e-14) -> RefineResult:
    """Affine Newton refinement; flags linear convergence (a singular root)."""
    x = np.array(point, dtype=complex).reshape(-1)
    f, J = _affine_eval(system, x)
    res = [float(np.abs(f).max())]
    it = 0
    while it < iterations and res[-1] > tol:
        delta, *_ = np.linalg.lstsq(J, -f, rcond=None)
        x = x + delta
        f, J = _affine_eval(system, x)
        res.append(float(np.abs(f).max()))
        it += 1
    cond = float(np.linalg.cond(J)) if np.isfinite(J).all() else np.inf
    # quadratic convergence squares the residual; a steady ratio means a multiple root
    ratios = [b / a for a, b in zip(res[:-1], res[1:]) if a > 0 and b > 0]
    linear = len(ratios) >= 3 and all(0.05 < r < 0.95 for r in ratios[-3:])
    return RefineResult(x, res[-1], cond, it, res[-1] <= max(tol, 1e-12), linear)


@dataclass
class Cluster:
    members: list[int]
    center: np.ndarray
    ambiguous: bool = False

    @property
    def size(self) -> int:
        return len(self.members)


def _embed(points) -> np.ndarray:
    P = np.array([np.asarray(p, dtype=complex).reshape(-1) for p in points])
    return np.hstack([P.real, P.imag])


def _components(n: int, pairs) -> list[list[int]]:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def dedup(points, radius: float) -> list[Cluster]:
    """Single-linkage clusters of points closer than ``radius`` (Euclidean in C^m).

    Clusters with another cluster within ten times the radius are flagged
    ambiguous so callers can re-refine with a tighter tolerance.
    """
    points = list(points)
    if not points:
        return []
    emb = _embed(points)
    tree = cKDTree(emb)
    groups = _components(len(points), tree.query_pairs(radius))
    label = np.empty(len(points), dtype=np.int64)
    for k, g in enumerate(groups):
        label[g] = k
    near = {(label[a], label[b]) for a, b in tree.query_pairs(10 * radius) if label[a] != label[b]}
    flagged = {k for pair in near for k in pair}
    P = np.array([np.asarray(p, dtype=complex).reshape(-1) for p in points])
    return [Cluster(g, P[g].mean(axis=0), k in flagged) for k, g in enumerate(groups)]


def assign_multiplicities(run) -> list[Cluster]:
    """Cluster converged endpoints and record the cluster size on each path."""
    conv = run.converged()
    clusters = dedup([p.endpoint for p in conv], run.settings.dedup_radius)
    for c in clusters:
        for k in c.members:
            conv[k].multiplicity = c.size
            if c.size > 1:
                conv[k].singular = True
    return clusters


def certify(system, points, digits: int = 40) -> np.ndarray:
    """Max-norm residuals re-evaluated in ``digits``-digit arithmetic.

    The double-precision endpoint is taken as exact input; the residual is
    computed without double rounding, so a small value certifies that the
    reported point itself (not an artefact of float evaluation) solves the
    system to that accuracy.
    """
    out = np.empty(len(points))
    with mpmath.workdps(digits):
        for i, x in enumerate(points):
            vals = system.evaluate_mp([mpmath.mpc(complex(v)) for v in np.asarray(x).reshape(-1)])
            out[i] = float(max(abs(v) for v in vals)) if len(vals) else 0.0
    return out
