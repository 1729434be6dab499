"""The quadric-preserving map F of affine 4-space, its family, inverse and lifts.

F(x1, x2, x3, x4) = (x2, -x4, x1 - x1*x2^2, -x3 + x1*x2*x4) preserves the
quadric function q = x1*x4 - x2*x3, so every fiber {q = c} is invariant.
Everything here is exact (rational coefficients); numeric evaluation helpers
are provided for the solver-facing modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .poly import QQ, SparsePoly, compose
from .poly import modular

NAMES4 = ("x1", "x2", "x3", "x4")
NAMES5 = ("x1", "x2", "x3", "x4", "z")

SYMBOLIC_BUDGET = 8


class BudgetExceeded(ValueError):
    pass


class CommonFactorError(ValueError):
    pass


def _gens4():
    return SparsePoly.gens(4, QQ)


def quadric() -> SparsePoly:
    x1, x2, x3, x4 = _gens4()
    return x1 * x4 - x2 * x3


@dataclass(frozen=True)
class AffineMap:
    """Four polynomial numerators over a common polynomial denominator."""

    components: tuple[SparsePoly, ...]
    denominator: SparsePoly = field(default_factory=lambda: SparsePoly.const(1, 4))
    name: str = "map"

    def __post_init__(self):
        if len(self.components) != 4:
            raise ValueError("an affine map of C^4 has four components")
        if self.denominator.is_zero():
            raise ValueError("denominator is identically zero")
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def is_polynomial(self) -> bool:
        return self.denominator == 1

    def degree(self) -> int:
        return max(c.degree() for c in (*self.components, self.denominator) if not c.is_zero())

    def __call__(self, point: Sequence):
        den = self.denominator.evaluate(point)
        if den == 0:
            raise ZeroDivisionError("point lies on the polar locus")
        vals = [c.evaluate(point) for c in self.components]
        if isinstance(den, (int, Fraction)):
            return tuple(Fraction(v) / den for v in vals)
        return tuple(v / den for v in vals)

    def eval_numeric(self, x: np.ndarray) -> np.ndarray:
        """Evaluate on an array of points with trailing dimension 4."""
        x = np.asarray(x, dtype=complex)
        cols = [x[..., i] for i in range(4)]
        den = self.denominator.eval_numeric(cols)
        return np.stack([c.eval_numeric(cols) / den for c in self.components], axis=-1)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "variables": list(NAMES4),
            "components": [c.to_json() for c in self.components],
            "denominator": self.denominator.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AffineMap":
        return cls(
            tuple(SparsePoly.from_json(c) for c in data["components"]),
            SparsePoly.from_json(data["denominator"]),
            data.get("name", "map"),
        )


@dataclass(frozen=True)
class FamilyParams:
    """P = x1*Q1 + x3*Q3 + R with Q1, Q3, R polynomials in (x2, x4) only."""

    Q1: SparsePoly
    Q3: SparsePoly
    R: SparsePoly

    def __post_init__(self):
        for name in ("Q1", "Q3", "R"):
            poly = getattr(self, name)
            if poly.nvars != 4:
                raise ValueError(f"{name} must be written in x1..x4")
            if not poly.is_zero() and (poly.degree_in(0) > 0 or poly.degree_in(2) > 0):
                raise ValueError(f"{name} may depend on x2 and x4 only")

    def P(self) -> SparsePoly:
        x1, _, x3, _ = _gens4()
        return x1 * self.Q1 + x3 * self.Q3 + self.R


def make_F() -> AffineMap:
    x1, x2, x3, x4 = _gens4()
    return AffineMap((x2, -x4, x1 - x1 * x2**2, -x3 + x1 * x2 * x4), name="F")


def make_F_inverse() -> AffineMap:
    # common denominator x1^2 - 1; the numerators match the inverse formula
    # after one global sign normalisation
    x1, x2, x3, x4 = _gens4()
    den = x1**2 - 1
    return AffineMap(
        (-x3, x1 * den, x1 * x2 * x3 + x4 - x1**2 * x4, -x2 * den),
        den,
        name="F_inverse",
    )


def square_reference() -> tuple[SparsePoly, ...]:
    """The second iterate written out by hand, used to check composition term by term."""
    x1, x2, x3, x4 = _gens4()
    return (
        -x4,
        x3 - x1 * x2 * x4,
        x2 - x2 * x4**2,
        -x1 + x1 * x2**2 + x2 * x3 * x4 - x1 * x2**2 * x4**2,
    )


def verify_square(fmap: AffineMap | None = None) -> bool:
    """F o F equals the hand-written second iterate, component by component."""
    fmap = make_F() if fmap is None else fmap
    sq = compose(list(fmap.components), list(fmap.components))
    return all(a == b for a, b in zip(sq, square_reference()))


def make_identity() -> AffineMap:
    return AffineMap(tuple(_gens4()), name="identity")


def make_family(params: FamilyParams) -> AffineMap:
    x1, x2, x3, x4 = _gens4()
    P = params.P()
    return AffineMap((x2, -x4, x1 - x2 * P, -x3 + x4 * P), name="G")


def F_params() -> FamilyParams:
    """Family parameters reproducing F (P = x1*x2)."""
    _, x2, _, _ = _gens4()
    zero = SparsePoly.zero(4)
    return FamilyParams(x2, zero, zero)


# ---------------------------------------------------------------- lifts


@dataclass(frozen=True)
class MapLift:
    """Self-map of projective 4-space: five homogeneous forms of one degree in x1..x4, z."""

    components: tuple[SparsePoly, ...]
    name: str = "lift"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != 5:
            raise ValueError("a lift has five components")
        degs = {c.degree() for c in self.components if not c.is_zero()}
        if len(degs) != 1:
            raise ValueError(f"components have differing degrees {sorted(degs)}")
        if not all(c.is_homogeneous() for c in self.components):
            raise ValueError("lift components must be homogeneous")

    @property
    def degree(self) -> int:
        return next(c.degree() for c in self.components if not c.is_zero())

    def affine(self) -> AffineMap:
        deh = [c.dehomogenize() for c in self.components]
        return AffineMap(tuple(deh[:4]), deh[4], name=self.name)

    def compose(self, inner: "MapLift") -> "MapLift":
        """self after inner, as formal composition (base factors kept)."""
        return MapLift(tuple(compose(list(self.components), list(inner.components))), f"{self.name}*{inner.name}")

    def eval_mod_p(self, values: Sequence[np.ndarray], p: int) -> list[np.ndarray]:
        cache: dict = {}
        return [c.eval_mod_p(values, p, cache) for c in self.components]

    def restricted_gcd_degree(self, p: int, rng: np.random.Generator) -> int:
        """Degree of the common factor of the components along a random line mod p.

        Zero certifies (with high probability) that the components share no
        polynomial factor: a shared factor survives restriction to any line,
        a base locus of codimension two misses a generic line.
        """
        d = self.degree
        xs = np.arange(1, d + 2, dtype=np.int64)
        anchor = rng.integers(1, p, size=5)
        direction = rng.integers(1, p, size=5)
        vals = [(int(a) + int(b) * xs) % p for a, b in zip(anchor, direction)]
        polys = [modular.interpolate(xs, v, p, d) for v in self.eval_mod_p(vals, p)]
        g = polys[0]
        for other in polys[1:]:
            g = modular.gcd(g, other, p)
        return modular.degree(g)

    def to_json(self) -> dict:
        return {"name": self.name, "variables": list(NAMES5), "components": [c.to_json() for c in self.components]}


def lift(fmap: AffineMap, check_factor: bool = True, seed: int = 0) -> MapLift:
    """Homogenise numerators and denominator to their common degree."""
    d = fmap.degree()
    comps = [c.homogenize(d) for c in (*fmap.components, fmap.denominator)]
    out = MapLift(tuple(comps), name=fmap.name)
    if check_factor:
        p = modular.pick_prime(1 << 4)
        k = out.restricted_gcd_degree(p, np.random.default_rng(seed))
        if k > 0:
            raise CommonFactorError(f"lift components of {fmap.name} share a factor of degree {k}")
    return out


# ---------------------------------------------------------------- checks


def verify_fibration(fmap: AffineMap) -> bool:
    """q o map == q, with the denominator cleared: q(P) == q * D^2."""
    q = quadric()
    lhs = q.compose(list(fmap.components))
    return lhs == q * fmap.denominator**2


def _is_scaled_identity(lifted: MapLift) -> SparsePoly | None:
    """Return h if lifted == h * (x1, x2, x3, x4, z), else None."""
    try:
        h = lifted.components[4].divide_monomial((0, 0, 0, 0, 1))
    except ArithmeticError:
        return None
    gens = SparsePoly.gens(5)
    for comp, g in zip(lifted.components, gens):
        if comp != h * g:
            return None
    return h


def verify_inverse(f: AffineMap | None = None, g: AffineMap | None = None) -> bool:
    """Both formal compositions of the lifts equal a common factor times the identity."""
    f = make_F() if f is None else f
    g = make_F_inverse() if g is None else g
    lf, lg = lift(f, check_factor=False), lift(g, check_factor=False)
    return _is_scaled_identity(lf.compose(lg)) is not None and _is_scaled_identity(lg.compose(lf)) is not None


def inverse_factor(f: AffineMap | None = None, g: AffineMap | None = None) -> SparsePoly | None:
    f = make_F() if f is None else f
    g = make_F_inverse() if g is None else g
    return _is_scaled_identity(lift(f, check_factor=False).compose(lift(g, check_factor=False)))


def symbolic_iterates(fmap: AffineMap, n: int) -> list[tuple[SparsePoly, ...]]:
    """[F^1, ..., F^n] as exact polynomial maps."""
    if not fmap.is_polynomial:
        raise ValueError("symbolic iteration needs a polynomial map")
    base = list(fmap.components)
    out = [tuple(base)]
    for _ in range(n - 1):
        out.append(tuple(compose(base, list(out[-1]))))
    return out


@dataclass
class LeadingTermRow:
    n: int
    component_degrees: tuple
    degree: int
    leading_monomial: tuple
    leading_in_component4: bool
    unique_top_monomial: bool
    top_only_in_component4: bool
    lead_is_product: bool | None
    recurrence: bool | None

    @property
    def ok(self) -> bool:
        return (
            self.leading_in_component4
            and self.unique_top_monomial
            and self.lead_is_product is not False
            and self.recurrence is not False
        )


def verify_leading_terms(n_max: int = SYMBOLIC_BUDGET, budget: int = SYMBOLIC_BUDGET, fmap: AffineMap | None = None) -> list[LeadingTermRow]:
    """Check the leading-monomial structure of F^n for n <= n_max.

    Per n: the grlex-largest monomial over all four components sits in
    component 4; component 4 has exactly one monomial of top degree; that
    monomial is the product of the component-4 leads of the three previous
    iterates; and deg F^n = deg F^{n-1} + deg F^{n-2} + deg F^{n-3}.
    """
    if n_max > budget:
        raise BudgetExceeded(f"n_max={n_max} beyond symbolic budget {budget}")
    fmap = make_F() if fmap is None else fmap
    iterates = symbolic_iterates(fmap, n_max)
    rows: list[LeadingTermRow] = []
    leads4: list[tuple] = [(0, 0, 0, 1)]  # F^0 = identity
    for n, comps in enumerate(iterates, start=1):
        degs = tuple(c.degree() for c in comps)
        top = max(degs)
        lead_per = [c.leading_term()[0] for c in comps]
        best = max(range(4), key=lambda i: comps[i].keys[-1])
        lead4 = lead_per[3]
        leads4.append(lead4)
        product = None
        if n >= 3:
            product = tuple(sum(e) for e in zip(leads4[n - 1], leads4[n - 2], leads4[n - 3])) == lead4
        rec = None
        if n >= 4:
            rec = top == rows[-1].degree + rows[-2].degree + rows[-3].degree
        rows.append(
            LeadingTermRow(
                n=n,
                component_degrees=degs,
                degree=top,
                leading_monomial=lead4,
                leading_in_component4=best == 3 and degs[3] == top,
                unique_top_monomial=len(comps[3].top_degree_monomials()) == 1,
                top_only_in_component4=sum(d == top for d in degs) == 1,
                lead_is_product=product,
                recurrence=rec,
            )
        )
    return rows


# ---------------------------------------------------------------- curves


@dataclass(frozen=True)
class CurveIdeal:
    name: str
    components: tuple[tuple[SparsePoly, ...], ...]

    def residual(self, point) -> float:
        """Smallest over components of the largest generator modulus at the point."""
        cols = [np.asarray(v, dtype=complex) for v in point]
        best = np.inf
        for gens in self.components:
            best = min(best, max(float(abs(g.eval_numeric(cols))) for g in gens))
        return best

    def contains(self, point, tol: float = 1e-6) -> bool:
        return self.residual(point) < tol


def curve_ideals(c) -> list[CurveIdeal]:
    """Ideals of the curves C, D1, D2 inside the fiber q = c."""
    c = Fraction(c)
    x1, x2, x3, x4 = _gens4()
    fiber = quadric() - c
    comp_c = (x2 - x1**2 * x2 - x3, x1 + x4, fiber)
    comp_d1b = (-x2 + x1**2 * x2 - x3, x1 - x4, fiber)
    return [
        CurveIdeal("C", (comp_c,)),
        CurveIdeal("D1", (comp_c, comp_d1b)),
        CurveIdeal("D2", ((x2, x3, fiber), (x1, x4, fiber))),
    ]
