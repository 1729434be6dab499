"""Exact sparse multivariate polynomials.

A :class:`SparsePoly` stores its terms as two parallel numpy arrays: packed
monomial keys (``int64``) and coefficients.  Exponents are bit-packed with the
total degree in the most significant field, so ascending integer order of the
keys *is* graded lexicographic order with ``x1 < x2 < ... < x_n``; products of
monomials are sums of keys.

Two coefficient domains are supported: :data:`QQ` (Python ``int`` /
``Fraction`` in an object array, exact and unbounded) and :func:`GF` ``(p)``
(``int64`` residues, ``p < 2**31``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

NEG_INF = float("-inf")

_KEY_BITS = 60
_CHUNK = 4_000_000


@dataclass(frozen=True)
class Domain:
    p: int | None = None

    @property
    def is_field_p(self) -> bool:
        return self.p is not None

    def __str__(self):
        return "QQ" if self.p is None else f"GF({self.p})"


QQ = Domain()


def GF(p: int) -> Domain:
    if p >= 2**31:
        raise ValueError("prime must be below 2**31")
    return Domain(p)


class DomainMismatch(TypeError):
    pass


def default_names(nvars: int) -> tuple[str, ...]:
    if nvars == 5:
        return ("x1", "x2", "x3", "x4", "z")
    return tuple(f"x{i + 1}" for i in range(nvars))


def _norm_rational(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class SparsePoly:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "domain", "keys", "coeffs", "_width")

    def __init__(self, nvars: int, domain: Domain, keys: np.ndarray, coeffs: np.ndarray, _canonical=False):
        self.nvars = nvars
        self.domain = domain
        self._width = _KEY_BITS // (nvars + 1)
        if not _canonical:
            keys, coeffs = _combine(np.asarray(keys, dtype=np.int64), coeffs, domain)
        keys.setflags(write=False)
        coeffs.setflags(write=False)
        self.keys = keys
        self.coeffs = coeffs

    # ---------------------------------------------------------- construction

    @classmethod
    def from_dict(cls, terms: Mapping[Sequence[int], object], nvars: int, domain: Domain = QQ) -> "SparsePoly":
        exps = np.array([tuple(e) for e in terms.keys()], dtype=np.int64).reshape(-1, nvars)
        coeffs = _coerce([terms[k] for k in terms.keys()], domain)
        return cls(nvars, domain, _pack(exps, nvars), coeffs)

    @classmethod
    def from_terms(cls, exps: np.ndarray, coeffs: Iterable, nvars: int, domain: Domain = QQ) -> "SparsePoly":
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, nvars)
        return cls(nvars, domain, _pack(exps, nvars), _coerce(list(coeffs), domain))

    @classmethod
    def zero(cls, nvars: int, domain: Domain = QQ) -> "SparsePoly":
        return cls.from_terms(np.zeros((0, nvars), dtype=np.int64), [], nvars, domain)

    @classmethod
    def const(cls, c, nvars: int, domain: Domain = QQ) -> "SparsePoly":
        return cls.from_terms(np.zeros((1, nvars), dtype=np.int64), [c], nvars, domain)

    @classmethod
    def var(cls, i: int, nvars: int, domain: Domain = QQ) -> "SparsePoly":
        e = np.zeros((1, nvars), dtype=np.int64)
        e[0, i] = 1
        return cls.from_terms(e, [1], nvars, domain)

    @classmethod
    def gens(cls, nvars: int, domain: Domain = QQ) -> list["SparsePoly"]:
        return [cls.var(i, nvars, domain) for i in range(nvars)]

    # ---------------------------------------------------------- inspection

    def __len__(self):
        return len(self.keys)

    def is_zero(self) -> bool:
        return len(self.keys) == 0

    @property
    def max_exponent(self) -> int:
        return (1 << self._width) - 1

    def exponents(self) -> np.ndarray:
        """Exponent matrix, one row per term, ascending grlex."""
        return _unpack(self.keys, self.nvars)

    def degree(self):
        if self.is_zero():
            return NEG_INF
        return int(self.keys[-1] >> (self._width * self.nvars))

    def total_degrees(self) -> np.ndarray:
        return self.keys >> (self._width * self.nvars)

    def degree_in(self, i: int):
        if self.is_zero():
            return NEG_INF
        return int(self.exponents()[:, i].max())

    def terms(self):
        """(exponent tuple, coefficient) pairs, descending grlex."""
        exps = self.exponents()
        for k in range(len(self.keys) - 1, -1, -1):
            c = self.coeffs[k]
            yield tuple(int(e) for e in exps[k]), (int(c) if self.domain.is_field_p else c)

    def as_dict(self) -> dict[tuple[int, ...], object]:
        return dict(self.terms())

    def leading_term(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        return next(self.terms())

    def top_degree_monomials(self) -> list[tuple[int, ...]]:
        if self.is_zero():
            return []
        top = self.total_degrees() == self.degree()
        return [tuple(int(e) for e in row) for row in self.exponents()[top][::-1]]

    def is_homogeneous(self) -> bool:
        if self.is_zero():
            return True
        td = self.total_degrees()
        return bool(np.all(td == td[-1]))

    def coefficient(self, exps: Sequence[int]):
        key = int(_pack(np.array([exps], dtype=np.int64), self.nvars)[0])
        i = np.searchsorted(self.keys, key)
        if i < len(self.keys) and self.keys[i] == key:
            return self.coeffs[i]
        return 0

    # ---------------------------------------------------------- arithmetic

    def _check(self, other: "SparsePoly"):
        if self.nvars != other.nvars:
            raise DomainMismatch(f"variable count {self.nvars} vs {other.nvars}")
        if self.domain != other.domain:
            raise DomainMismatch(f"coefficient domain {self.domain} vs {other.domain}")

    def _lift_scalar(self, c) -> "SparsePoly":
        return SparsePoly.const(c, self.nvars, self.domain)

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = self._lift_scalar(other)
        self._check(other)
        return SparsePoly(
            self.nvars,
            self.domain,
            np.concatenate([self.keys, other.keys]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    __radd__ = __add__

    def __neg__(self):
        if self.domain.is_field_p:
            c = (-self.coeffs) % self.domain.p
        else:
            c = -self.coeffs
        return SparsePoly(self.nvars, self.domain, self.keys.copy(), c, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = self._lift_scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self._scale(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return SparsePoly.zero(self.nvars, self.domain)
        if self.degree() + other.degree() > self.max_exponent:
            raise OverflowError(f"degree {self.degree() + other.degree()} exceeds packed range")
        return _mul(self, other)

    __rmul__ = __mul__

    def _scale(self, c) -> "SparsePoly":
        if self.domain.is_field_p:
            cc = _coerce([c], self.domain)[0]
            return SparsePoly(self.nvars, self.domain, self.keys, self.coeffs * cc % self.domain.p)
        c = _norm_rational(Fraction(c)) if isinstance(c, Rational) else c
        return SparsePoly(self.nvars, self.domain, self.keys, _coerce(list(self.coeffs * c), self.domain))

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = self._lift_scalar(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._lift_scalar(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.domain == other.domain
            and np.array_equal(self.keys, other.keys)
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.nvars, self.domain, self.keys.tobytes(), tuple(self.coeffs.tolist())))

    # ---------------------------------------------------------- transforms

    def diff(self, i: int) -> "SparsePoly":
        exps = self.exponents().copy()
        mult = exps[:, i].copy()
        keep = mult > 0
        exps = exps[keep]
        exps[:, i] -= 1
        coeffs = [c * int(m) for c, m in zip(self.coeffs[keep], mult[keep])]
        return SparsePoly.from_terms(exps, coeffs, self.nvars, self.domain)

    def homogenize(self, degree: int | None = None) -> "SparsePoly":
        """Append a homogenizing variable (last position) up to ``degree``."""
        d = self.degree() if degree is None else degree
        if self.is_zero():
            return SparsePoly.zero(self.nvars + 1, self.domain)
        if d < self.degree():
            raise ValueError("homogenizing degree below polynomial degree")
        exps = self.exponents()
        extra = d - exps.sum(axis=1)
        return SparsePoly.from_terms(np.hstack([exps, extra[:, None]]), self.coeffs, self.nvars + 1, self.domain)

    def dehomogenize(self) -> "SparsePoly":
        """Set the last variable to 1."""
        exps = self.exponents()[:, :-1]
        return SparsePoly.from_terms(exps, self.coeffs, self.nvars - 1, self.domain)

    def divide_monomial(self, exps: Sequence[int]) -> "SparsePoly":
        """Exact division by a monomial; raises if some term is not divisible."""
        e = np.asarray(exps, dtype=np.int64)
        out = self.exponents() - e
        if np.any(out < 0):
            raise ArithmeticError("monomial does not divide polynomial")
        return SparsePoly.from_terms(out, self.coeffs, self.nvars, self.domain)

    def reduce_mod(self, p: int) -> "SparsePoly":
        if self.domain.is_field_p:
            if self.domain.p != p:
                raise DomainMismatch("already reduced modulo a different prime")
            return self
        return SparsePoly(self.nvars, GF(p), self.keys.copy(), _coerce(list(self.coeffs), GF(p)))

    def compose(self, args: Sequence["SparsePoly"]) -> "SparsePoly":
        """Substitute ``args[i]`` for variable i."""
        return compose([self], args)[0]

    # ---------------------------------------------------------- evaluation

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Exact (or complex) evaluation at a single point."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        total = 0
        p = self.domain.p
        for exps, c in self.terms():
            v = c
            for x, e in zip(point, exps):
                if e:
                    v = v * (pow(int(x), e, p) if p else x**e)
                    if p:
                        v %= p
            total = total + v
        return total % p if p else _norm_rational(total) if isinstance(total, Fraction) else total

    def eval_mod_p(self, values: Sequence[np.ndarray], p: int, _cache=None) -> np.ndarray:
        """Vectorised evaluation mod p; ``values[i]`` is an int64 array for variable i."""
        poly = self.reduce_mod(p)
        cache = {} if _cache is None else _cache
        n = len(np.asarray(values[0]))
        acc = np.zeros(n, dtype=np.int64)
        for exps, c in zip(poly.exponents(), poly.coeffs):
            term = np.full(n, int(c), dtype=np.int64)
            for i, e in enumerate(exps):
                if e:
                    term = term * _power_mod(values, i, int(e), p, cache) % p
            acc = (acc + term) % p
        return acc

    def eval_numeric(self, values: Sequence[np.ndarray]) -> np.ndarray:
        """Vectorised complex evaluation."""
        values = [np.asarray(v, dtype=complex) for v in values]
        acc = np.zeros(np.broadcast(*values).shape, dtype=complex)
        for exps, c in zip(self.exponents(), self.coeffs):
            term = complex(c)
            for i, e in enumerate(exps):
                if e:
                    term = term * values[i] ** int(e)
            acc = acc + term
        return acc

    # ---------------------------------------------------------- display / io

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = names or default_names(self.nvars)
        if self.is_zero():
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, exps) if e)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif not self.domain.is_field_p and c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"SparsePoly[{self.domain}]({self.to_str()})"

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "domain": str(self.domain),
            "terms": [[list(e), str(c)] for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SparsePoly":
        dom = data["domain"]
        domain = QQ if dom == "QQ" else GF(int(dom[3:-1]))
        terms = {tuple(e): Fraction(c) for e, c in data["terms"]}
        return cls.from_dict(terms, int(data["nvars"]), domain)


# ---------------------------------------------------------------- internals


def _pack(exps: np.ndarray, nvars: int) -> np.ndarray:
    width = _KEY_BITS // (nvars + 1)
    if exps.size == 0:
        return np.zeros(0, dtype=np.int64)
    if np.any(exps < 0):
        raise ValueError("negative exponent")
    deg = exps.sum(axis=1)
    if deg.max() >= (1 << width):
        raise OverflowError(f"degree {int(deg.max())} exceeds packed range for {nvars} variables")
    shifts = width * np.arange(nvars, dtype=np.int64)
    return (exps << shifts).sum(axis=1) + (deg << (width * nvars))


def _unpack(keys: np.ndarray, nvars: int) -> np.ndarray:
    width = _KEY_BITS // (nvars + 1)
    shifts = width * np.arange(nvars, dtype=np.int64)
    return (keys[:, None] >> shifts) & ((1 << width) - 1)


def _coerce(values: list, domain: Domain) -> np.ndarray:
    if domain.is_field_p:
        p = domain.p
        out = []
        for v in values:
            if isinstance(v, Fraction):
                if v.denominator % p == 0:
                    raise ZeroDivisionError(f"denominator divisible by {p}")
                out.append(v.numerator * pow(v.denominator, p - 2, p) % p)
            else:
                out.append(int(v) % p)
        return np.array(out, dtype=np.int64)
    arr = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        if isinstance(v, (int, np.integer)):
            arr[i] = int(v)
        elif isinstance(v, Rational):
            arr[i] = _norm_rational(Fraction(v))
        elif isinstance(v, str):
            arr[i] = _norm_rational(Fraction(v))
        else:
            raise TypeError(f"non-rational coefficient {v!r} in QQ")
    return arr


def _combine(keys: np.ndarray, coeffs: np.ndarray, domain: Domain):
    if len(keys) == 0:
        return keys, coeffs[:0]
    order = np.argsort(keys, kind="stable")
    keys, coeffs = keys[order], coeffs[order]
    uniq, start = np.unique(keys, return_index=True)
    if len(uniq) != len(keys):
        coeffs = np.add.reduceat(coeffs, start)
    if domain.is_field_p:
        coeffs = coeffs % domain.p
    else:
        coeffs = np.array([_norm_rational(c) for c in coeffs] + [None], dtype=object)[:-1]
    nz = np.array([c != 0 for c in coeffs], dtype=bool) if coeffs.dtype == object else coeffs != 0
    return uniq[nz], coeffs[nz]


def _int64_safe(a: np.ndarray, b: np.ndarray, terms: int) -> bool:
    if a.dtype != object:
        return True
    if not all(isinstance(c, int) for c in a) or not all(isinstance(c, int) for c in b):
        return False
    bound = max(abs(c) for c in a) * max(abs(c) for c in b) * terms
    return bound < 2**62


def _mul(x: SparsePoly, y: SparsePoly) -> SparsePoly:
    if len(x) > len(y):
        x, y = y, x
    ka, kb = x.keys, y.keys
    p = x.domain.p
    if p is not None:
        va, vb = x.coeffs, y.coeffs
    elif _int64_safe(x.coeffs, y.coeffs, len(ka)):
        va, vb = x.coeffs.astype(np.int64), y.coeffs.astype(np.int64)
    else:
        va, vb = x.coeffs, y.coeffs
    step = max(1, _CHUNK // len(kb))
    keys, vals = [], []
    for i in range(0, len(ka), step):
        k = (ka[i : i + step, None] + kb[None, :]).ravel()
        v = (va[i : i + step, None] * vb[None, :]).ravel()
        if p is not None:
            v %= p
        order = np.argsort(k, kind="stable")
        k, v = k[order], v[order]
        u, start = np.unique(k, return_index=True)
        keys.append(u)
        vals.append(np.add.reduceat(v, start))
    k = np.concatenate(keys)
    v = np.concatenate(vals)
    if v.dtype != object and p is None:
        v = v.astype(object)
    return SparsePoly(x.nvars, x.domain, k, v)


def _power_mod(values, i: int, e: int, p: int, cache: dict) -> np.ndarray:
    key = (i, e)
    if key not in cache:
        if e == 1:
            cache[key] = np.asarray(values[i], dtype=np.int64) % p
        else:
            half = _power_mod(values, i, e // 2, p, cache)
            sq = half * half % p
            cache[key] = sq if e % 2 == 0 else sq * _power_mod(values, i, 1, p, cache) % p
    return cache[key]


def compose(components: Sequence[SparsePoly], args: Sequence[SparsePoly]) -> list[SparsePoly]:
    """Substitute ``args`` into each component (exact, shared power cache)."""
    if not components:
        return []
    nv = components[0].nvars
    for comp in components:
        if comp.nvars != nv:
            raise DomainMismatch("components disagree on variable count")
    if len(args) != nv:
        raise ValueError(f"arity mismatch: {len(args)} arguments for {nv} variables")
    target = args[0]
    for a in args[1:]:
        target._check(a)
    cache: dict[tuple[int, int], SparsePoly] = {}

    def power(i: int, e: int) -> SparsePoly:
        if (i, e) not in cache:
            if e == 1:
                cache[(i, e)] = args[i]
            else:
                h = power(i, e // 2)
                sq = h * h
                cache[(i, e)] = sq * args[i] if e % 2 else sq
        return cache[(i, e)]

    out = []
    for comp in components:
        if comp.domain != target.domain:
            raise DomainMismatch(f"coefficient domain {comp.domain} vs {target.domain}")
        acc = SparsePoly.zero(target.nvars, target.domain)
        for exps, c in comp.terms():
            factors = sorted((power(i, e) for i, e in enumerate(exps) if e), key=len)
            if not factors:
                acc = acc + c
                continue
            term = factors[0]
            for f in factors[1:]:
                term = term * f
            acc = acc + term * c
        out.append(acc)
    return out
