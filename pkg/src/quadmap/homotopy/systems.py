"""Square polynomial systems evaluated in homogeneous coordinates.

Every system exposes ``nvars`` (affine unknowns ``m``), per-equation
``degrees`` and ``evaluate(X)`` which takes a batch ``X`` of shape
``(B, m+1)`` (column 0 is the homogenising coordinate) and returns the values
``(B, m)`` of the homogenised equations together with their Jacobian
``(B, m, m+1)``.  Working homogeneously lets the tracker follow paths through
infinity on a random affine patch.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Protocol, Sequence

import mpmath
import numpy as np

from ..poly import SparsePoly


class SquareSystem(Protocol):
    nvars: int
    degrees: tuple[int, ...]

    def evaluate(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...


def bezout_number(system) -> int:
    return int(np.prod(system.degrees, dtype=object))


def _power_table(X: np.ndarray, top: int) -> np.ndarray:
    """pw[k, b, j] = X[b, j] ** k for k <= top."""
    pw = np.empty((top + 1, *X.shape), dtype=complex)
    pw[0] = 1.0
    for k in range(1, top + 1):
        pw[k] = pw[k - 1] * X
    return pw


@dataclass
class _Equation:
    exps: np.ndarray  # (T, m+1), column 0 = homogenising exponent
    coeffs: np.ndarray  # (T,)


class PolySystem:
    """Dense evaluation of sparse equations given as (exponents, coefficients).

    The equation count may differ from ``nvars`` (overdetermined systems are
    squared up by :class:`RandomizedSystem`); the tracker checks squareness.
    """

    def __init__(self, equations: Sequence[tuple[np.ndarray, np.ndarray]], nvars: int, degrees: Sequence[int] | None = None):
        self.nvars = nvars
        eqs = []
        degs = []
        for i, (exps, coeffs) in enumerate(equations):
            exps = np.asarray(exps, dtype=np.int64).reshape(-1, nvars)
            coeffs = np.asarray(coeffs, dtype=complex)
            keep = coeffs != 0
            exps, coeffs = exps[keep], coeffs[keep]
            natural = int(exps.sum(axis=1).max()) if len(exps) else 0
            d = natural if degrees is None else int(degrees[i])
            if d < natural:
                raise ValueError(f"equation {i} has degree {natural} above requested {d}")
            if d < 1:
                raise ValueError(f"equation {i} is constant")
            hom = np.hstack([d - exps.sum(axis=1, keepdims=True), exps])
            eqs.append(_Equation(hom, coeffs))
            degs.append(d)
        self._eqs = eqs
        self.degrees = tuple(degs)
        self._top = max(int(e.exps.max()) if len(e.exps) else 0 for e in eqs)

    @classmethod
    def from_sparse(cls, polys: Sequence[SparsePoly], degrees: Sequence[int] | None = None) -> "PolySystem":
        nv = polys[0].nvars
        eqs = [(p.exponents(), np.array([complex(c) for c in p.coeffs])) for p in polys]
        return cls(eqs, nv, degrees)

    @classmethod
    def from_dicts(cls, dicts: Sequence[dict], nvars: int, degrees: Sequence[int] | None = None) -> "PolySystem":
        eqs = []
        for d in dicts:
            exps = np.array(list(d.keys()), dtype=np.int64).reshape(-1, nvars)
            eqs.append((exps, np.array(list(d.values()), dtype=complex)))
        return cls(eqs, nvars, degrees)

    def evaluate(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=complex)
        B, m1 = X.shape
        pw = _power_table(X, self._top)
        vals = np.empty((B, len(self._eqs)), dtype=complex)
        jac = np.zeros((B, len(self._eqs), m1), dtype=complex)
        for i, eq in enumerate(self._eqs):
            # factors[j, t, b] = X[b, j] ** e[t, j]
            factors = np.stack([pw[eq.exps[:, j], :, j] for j in range(m1)])
            mono = factors.prod(axis=0)
            vals[:, i] = eq.coeffs @ mono
            for j in range(m1):
                e = eq.exps[:, j]
                has = e > 0
                if not has.any():
                    continue
                d = pw[np.maximum(e[has] - 1, 0), :, j]  # (T', B)
                rest = np.prod(np.delete(factors[:, has, :], j, axis=0), axis=0)
                jac[:, i, j] = (eq.coeffs[has] * e[has]) @ (d * rest)
        return vals, jac

    def evaluate_mp(self, x) -> list:
        """Affine values at one point with mpmath scalars (dehomogenised at X0 = 1)."""
        out = []
        for eq in self._eqs:
            acc = 0
            for e, c in zip(eq.exps[:, 1:], eq.coeffs):
                term = mpmath.mpc(complex(c))
                for xi, k in zip(x, e):
                    if k:
                        term *= xi ** int(k)
                acc += term
            out.append(acc)
        return out


class RandomizedSystem:
    """Square-up ``k`` equations in ``m < k`` unknowns with a random ``m x k`` matrix.

    All base equations must share one homogeneous degree (pad lower-degree
    equations through the ``degrees`` argument of the base system).
    """

    def __init__(self, base, matrix: np.ndarray):
        self.base = base
        self.matrix = np.asarray(matrix, dtype=complex)
        m, k = self.matrix.shape
        if len(base.degrees) != k:
            raise ValueError("matrix width must equal the number of base equations")
        if len(set(base.degrees)) != 1:
            raise ValueError("base equations must be padded to a common degree")
        self.nvars = m
        self.degrees = (base.degrees[0],) * m
        self._base_nvars = base.nvars
        if base.nvars != m:
            raise ValueError("randomised system must be square in the base unknowns")

    def evaluate(self, X):
        vals, jac = self.base.evaluate(X)
        return vals @ self.matrix.T, np.einsum("ik,bkj->bij", self.matrix, jac)

    def evaluate_mp(self, x) -> list:
        base = self.base.evaluate_mp(x)
        return [sum(mpmath.mpc(complex(r)) * b for r, b in zip(row, base)) for row in self.matrix]

    def evaluate_base(self, X):
        return self.base.evaluate(X)


class TotalDegreeStart:
    """g_i = X_i^{d_i} - X_0^{d_i}."""

    def __init__(self, degrees: Sequence[int]):
        self.degrees = tuple(int(d) for d in degrees)
        if any(d < 1 for d in self.degrees):
            raise ValueError("degrees must be positive")
        self.nvars = len(self.degrees)

    def evaluate(self, X):
        X = np.asarray(X, dtype=complex)
        B = X.shape[0]
        d = np.array(self.degrees)
        x0 = X[:, :1]
        xi = X[:, 1:]
        vals = xi**d - x0**d
        jac = np.zeros((B, self.nvars, self.nvars + 1), dtype=complex)
        idx = np.arange(self.nvars)
        jac[:, idx, idx + 1] = d * xi ** (d - 1)
        jac[:, :, 0] = -d * x0 ** (d - 1)
        return vals, jac

    def start_points(self) -> np.ndarray:
        """All prod(d_i) affine roots, in lexicographic order of root indices."""
        roots = [np.exp(2j * np.pi * np.arange(d) / d) for d in self.degrees]
        return np.array(list(product(*roots)), dtype=complex).reshape(-1, self.nvars)


def start_system(degrees: Sequence[int]) -> tuple[TotalDegreeStart, np.ndarray]:
    """Total-degree start system x_i^{d_i} - 1 and its roots."""
    g = TotalDegreeStart(degrees)
    return g, g.start_points()


def affine_residual(system, x: np.ndarray) -> np.ndarray:
    """Max-norm of the system at affine points ``x`` (B, m)."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    X = np.hstack([np.ones((len(x), 1), dtype=complex), x])
    vals, _ = system.evaluate(X)
    return np.abs(vals).max(axis=1)
