"""Dense univariate polynomials over word-size prime fields.

Coefficient vectors are ``int64`` numpy arrays, lowest degree first, with
entries reduced into ``[0, p)``.  The zero polynomial is the empty array.
Every prime used here is below ``2**31`` so a product of two residues fits in
a signed 64-bit word.

The module-level functions work on raw arrays and are what the degree engine
calls in its inner loops; :class:`DensePoly1` is a thin immutable wrapper for
callers that want operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .sparse import NEG_INF

# Primes k*2^m + 1 below 2^31; the second element is the 2-adic order m.
NTT_PRIMES: tuple[tuple[int, int], ...] = (
    (2013265921, 27),
    (469762049, 26),
    (1811939329, 26),
    (2113929217, 25),
    (167772161, 25),
    (754974721, 24),
)

# Below this length a product is done by split direct convolution.
_DIRECT_MUL_CUTOFF = 48
_DIRECT_MUL_AREA = 1 << 18
# hgcd recursion switches to plain Euclid below this length.
_HGCD_BASE = 192
# quotients longer than this use Newton inversion instead of long division.
_FAST_DIV_CUTOFF = 64

DEFAULT_HALF_GCD_THRESHOLD = 100_000


class ModularError(ValueError):
    """Raised on malformed modular-arithmetic input."""


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def two_adic_order(p: int) -> int:
    m, q = 0, p - 1
    while q % 2 == 0:
        q //= 2
        m += 1
    return m


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group of F_p."""
    if not _is_probable_prime(p):
        raise ModularError(f"{p} is not prime")
    phi = p - 1
    factors = []
    q, f = phi, 2
    while f * f <= q:
        if q % f == 0:
            factors.append(f)
            while q % f == 0:
                q //= f
        f += 1
    if q > 1:
        factors.append(q)
    for g in range(2, p):
        if all(pow(g, phi // f, p) != 1 for f in factors):
            return g
    raise ModularError(f"no primitive root mod {p}")  # pragma: no cover


def root_of_unity(n: int, p: int) -> int:
    """A primitive n-th root of unity mod p, n a power of two."""
    if n & (n - 1):
        raise ModularError("transform length must be a power of two")
    if (p - 1) % n:
        raise ModularError(f"F_{p} has no primitive {n}-th root of unity")
    return pow(primitive_root(p), (p - 1) // n, p)


def pick_prime(min_transform: int, skip: int = 0) -> int:
    """The ``skip``-th listed prime whose 2-adic order admits ``min_transform``."""
    need = max(1, (min_transform - 1).bit_length())
    good = [p for p, m in NTT_PRIMES if m >= need]
    if skip >= len(good):
        raise ModularError(f"no prime left with 2^{need} | p-1 (skip={skip})")
    return good[skip]


def next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


# --------------------------------------------------------------------------
# elementwise helpers


def trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return a[:0]
    return a[: nz[-1] + 1]


def degree(a: np.ndarray) -> int | float:
    return len(a) - 1 if len(a) else NEG_INF


def powmod_vec(x: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def inv_vec(x: np.ndarray, p: int) -> np.ndarray:
    if np.any(x % p == 0):
        raise ZeroDivisionError("inverse of zero mod p")
    return powmod_vec(x, p - 2, p)


def powers(base: int, count: int, p: int) -> np.ndarray:
    """[1, base, base^2, ..., base^(count-1)] mod p, by doubling."""
    out = np.empty(count, dtype=np.int64)
    if count == 0:
        return out
    out[0] = 1
    filled, step = 1, base % p
    while filled < count:
        take = min(filled, count - filled)
        out[filled : filled + take] = out[:take] * step % p
        filled += take
        step = step * step % p
    return out


def add(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] += b
    out[: len(b)] %= p
    return trim(out)


def sub(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.int64)
    out[: len(a)] = a
    out[: len(b)] -= b
    return trim(out % p)


def scale(a: np.ndarray, c: int, p: int) -> np.ndarray:
    return trim(a * (c % p) % p)


# --------------------------------------------------------------------------
# number-theoretic transform


@lru_cache(maxsize=64)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=64)
def _twiddles(n: int, p: int, inverse: bool) -> np.ndarray:
    w = root_of_unity(n, p)
    if inverse:
        w = pow(w, p - 2, p)
    return powers(w, max(1, n // 2), p)


def ntt(a: np.ndarray, p: int, inverse: bool = False) -> np.ndarray:
    """Radix-2 transform along the last axis (length a power of two).

    Forward: ``A[k] = sum_j a[j] w^(jk)`` with ``w`` the root returned by
    :func:`root_of_unity`.  The inverse includes the ``1/n`` factor.
    """
    n = a.shape[-1]
    if n == 1:
        return a.copy()
    lead = a.shape[:-1]
    tw = _twiddles(n, p, inverse)
    x = a[..., _bitrev(n)]
    h = 1
    while h < n:
        w = tw[:: n // (2 * h)][:h]
        x = x.reshape(*lead, n // (2 * h), 2, h)
        u = x[..., 0, :]
        v = x[..., 1, :] * w % p
        out = np.empty_like(x)
        np.add(u, v, out=out[..., 0, :])
        np.subtract(u, v, out=out[..., 1, :])
        out %= p
        x = out
        h *= 2
    x = x.reshape(*lead, n)
    if inverse:
        x = x * pow(n, p - 2, p) % p
    return x


# --------------------------------------------------------------------------
# multiplication


def _mul_direct(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # 16-bit split keeps every convolution partial sum inside int64
    a_lo, a_hi = a & 0xFFFF, a >> 16
    b_lo, b_hi = b & 0xFFFF, b >> 16
    ll = np.convolve(a_lo, b_lo)
    hh = np.convolve(a_hi, b_hi)
    mid = (np.convolve(a_lo + a_hi, b_lo + b_hi) - ll - hh) % p
    ll %= p
    hh %= p
    return (hh * (pow(2, 32, p)) % p + mid * 65536 % p + ll) % p


def _mul_ntt(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = len(a) + len(b) - 1
    size = next_pow2(n)
    fa = np.zeros(size, dtype=np.int64)
    fa[: len(a)] = a
    fb = np.zeros(size, dtype=np.int64)
    fb[: len(b)] = b
    fa = ntt(fa, p)
    fb = ntt(fb, p)
    return ntt(fa * fb % p, p, inverse=True)[:n]


def _mul_blocked(short: np.ndarray, long: np.ndarray, p: int) -> np.ndarray:
    # overlap-add with one batched transform over blocks of the long factor
    s = len(short)
    block = next_pow2(2 * s) - s + 1
    nblocks = -(-len(long) // block)
    size = next_pow2(block + s - 1)
    rows = np.zeros((nblocks, size), dtype=np.int64)
    padded = np.zeros(nblocks * block, dtype=np.int64)
    padded[: len(long)] = long
    rows[:, :block] = padded.reshape(nblocks, block)
    fs = np.zeros(size, dtype=np.int64)
    fs[:s] = short
    prod = ntt(ntt(rows, p) * ntt(fs, p) % p, p, inverse=True)[:, : block + s - 1]
    out = np.zeros(nblocks * block + s - 1, dtype=np.int64)
    for i in range(nblocks):
        seg = out[i * block : i * block + block + s - 1]
        seg += prod[i]
        seg %= p
    return out[: len(long) + s - 1]


def mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return a[:0]
    if len(a) > len(b):
        a, b = b, a
    if len(a) <= _DIRECT_MUL_CUTOFF or len(a) * len(b) <= _DIRECT_MUL_AREA:
        out = _mul_direct(a, b, p)
    elif 8 * len(a) <= len(b):
        out = _mul_blocked(a, b, p)
    else:
        out = _mul_ntt(a, b, p)
    return trim(out)


# --------------------------------------------------------------------------
# division


def inv_series(f: np.ndarray, n: int, p: int) -> np.ndarray:
    """g with f*g = 1 mod x^n, by Newton iteration."""
    if len(f) == 0 or f[0] == 0:
        raise ZeroDivisionError("series not invertible")
    g = np.array([pow(int(f[0]), p - 2, p)], dtype=np.int64)
    k = 1
    while k < n:
        k = min(2 * k, n)
        fg = mul(f[:k], g, p)[:k]
        e = np.zeros(k, dtype=np.int64)
        e[: len(fg)] = fg
        e = (-e) % p
        e[0] = (e[0] + 2) % p
        g = mul(g, e, p)[:k]
    out = np.zeros(n, dtype=np.int64)
    out[: len(g)] = g[:n]
    return out


def _divmod_long(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    r = a.copy()
    db = len(b) - 1
    inv_lc = pow(int(b[-1]), p - 2, p)
    q = np.zeros(len(a) - db, dtype=np.int64)
    for i in range(len(a) - 1, db - 1, -1):
        c = int(r[i]) * inv_lc % p
        if c:
            q[i - db] = c
            seg = r[i - db : i + 1]
            seg -= c * b
            seg %= p
    return trim(q), trim(r[:db])


def divmod_poly(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    if len(b) == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return a[:0], a
    qlen = len(a) - len(b) + 1
    if qlen <= _FAST_DIV_CUTOFF or len(b) <= _FAST_DIV_CUTOFF:
        return _divmod_long(a, b, p)
    ra = a[::-1][:qlen]
    rb = b[::-1]
    q = mul(ra, inv_series(rb, qlen, p), p)[:qlen]
    qq = np.zeros(qlen, dtype=np.int64)
    qq[: len(q)] = q
    q = trim(qq[::-1].copy())
    db = len(b) - 1
    bq = mul(b, q, p)[:db]
    r = np.zeros(db, dtype=np.int64)
    r[: len(bq)] = bq
    r = (a[:db] - r) % p
    return q, trim(r)


def monic(a: np.ndarray, p: int) -> np.ndarray:
    if len(a) == 0:
        return a
    return a * pow(int(a[-1]), p - 2, p) % p


# --------------------------------------------------------------------------
# gcd


def gcd_classical(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a, b = trim(a % p), trim(b % p)
    while len(b):
        _, r = divmod_poly(a, b, p)
        a, b = b, r
    return monic(a, p)


_Mat = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def _identity() -> _Mat:
    one = np.ones(1, dtype=np.int64)
    zero = np.zeros(0, dtype=np.int64)
    return (one, zero, zero, one)


def _apply(m: _Mat, a0: np.ndarray, a1: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    b0 = add(mul(m[0], a0, p), mul(m[1], a1, p), p)
    b1 = add(mul(m[2], a0, p), mul(m[3], a1, p), p)
    return b0, b1


def _matmul(x: _Mat, y: _Mat, p: int) -> _Mat:
    return (
        add(mul(x[0], y[0], p), mul(x[1], y[2], p), p),
        add(mul(x[0], y[1], p), mul(x[1], y[3], p), p),
        add(mul(x[2], y[0], p), mul(x[3], y[2], p), p),
        add(mul(x[2], y[1], p), mul(x[3], y[3], p), p),
    )


def _euclid_step(m: _Mat, a0: np.ndarray, a1: np.ndarray, p: int):
    q, r = divmod_poly(a0, a1, p)
    m = (m[2], m[3], sub(m[0], mul(q, m[2], p), p), sub(m[1], mul(q, m[3], p), p))
    return m, a1, r


def _hgcd(a0: np.ndarray, a1: np.ndarray, p: int) -> _Mat:
    """Matrix M of Euclid quotients with M(a0, a1) = (r_j, r_{j+1}),
    len(r_{j+1}) <= ceil(len(a0)/2) < len(r_j)."""
    n = len(a0)
    k = (n + 1) // 2
    if len(a1) <= k:
        return _identity()
    if n <= _HGCD_BASE:
        m = _identity()
        while len(a1) > k:
            m, a0, a1 = _euclid_step(m, a0, a1, p)
        return m
    m1 = _hgcd(a0[k:], a1[k:], p)
    a0, a1 = _apply(m1, a0, a1, p)
    if len(a1) <= k:
        return m1
    m1, a0, a1 = _euclid_step(m1, a0, a1, p)
    if len(a1) <= k:
        return m1
    j = max(0, 2 * k - (len(a0) - 1))
    m2 = _hgcd(a0[j:], a1[j:], p)
    return _matmul(m2, m1, p)


def gcd_half(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a, b = trim(a % p), trim(b % p)
    if len(a) < len(b):
        a, b = b, a
    while len(b):
        if len(a) <= _HGCD_BASE:
            return gcd_classical(a, b, p)
        m = _hgcd(a, b, p)
        a, b = _apply(m, a, b, p)
        if not len(b):
            break
        _, r = divmod_poly(a, b, p)
        a, b = b, r
    return monic(a, p)


def gcd(a: np.ndarray, b: np.ndarray, p: int, threshold: int = DEFAULT_HALF_GCD_THRESHOLD) -> np.ndarray:
    """Monic gcd; half-gcd once either input reaches ``threshold`` in degree."""
    if max(len(a), len(b)) - 1 >= threshold:
        return gcd_half(a, b, p)
    return gcd_classical(a, b, p)


# --------------------------------------------------------------------------
# evaluation / interpolation


def evaluate(a: np.ndarray, xs: np.ndarray, p: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64) % p
    acc = np.zeros_like(xs)
    for c in a[::-1]:
        acc = (acc * xs + int(c)) % p
    return acc


def evaluate_on_coset(a: np.ndarray, n: int, p: int, shift: int = 1) -> np.ndarray:
    """Values at ``shift * w^j`` for j < n, w a primitive n-th root (n a power of two)."""
    if len(a) > n:
        raise ModularError("transform shorter than polynomial")
    buf = np.zeros(n, dtype=np.int64)
    buf[: len(a)] = a
    if shift % p != 1:
        buf = buf * powers(shift, n, p) % p
    return ntt(buf, p)


def _coset_shift(xs: np.ndarray, p: int) -> int | None:
    n = len(xs)
    if n < 2 or n & (n - 1) or (p - 1) % n or xs[0] % p == 0:
        return None
    shift = int(xs[0]) % p
    w = root_of_unity(n, p)
    if np.array_equal(xs % p, shift * powers(w, n, p) % p):
        return shift
    return None


def interpolate(xs, ys, p: int, degree_bound: int) -> np.ndarray:
    """Coefficients of the unique polynomial of degree <= degree_bound through the samples."""
    xs = np.asarray(xs, dtype=np.int64) % p
    ys = np.asarray(ys, dtype=np.int64) % p
    if len(xs) != len(ys):
        raise ModularError("abscissae and values differ in length")
    if len(xs) < degree_bound + 1:
        raise ModularError(f"need {degree_bound + 1} samples, got {len(xs)}")
    if len(np.unique(xs)) != len(xs):
        raise ModularError("duplicate abscissae")
    shift = _coset_shift(xs, p)
    if shift is not None:
        coeffs = ntt(ys, p, inverse=True)
        if shift != 1:
            coeffs = coeffs * powers(pow(shift, p - 2, p), len(xs), p) % p
    else:
        xs, ys = xs[: degree_bound + 1], ys[: degree_bound + 1]
        coeffs = _interpolate_barycentric(xs, ys, p)
    coeffs = trim(coeffs)
    if len(coeffs) > degree_bound + 1:
        raise ModularError("samples are not from a polynomial within the degree bound")
    return coeffs


def _interpolate_barycentric(xs: np.ndarray, ys: np.ndarray, p: int) -> np.ndarray:
    n = len(xs)
    w = np.ones(n, dtype=np.int64)
    for k in range(n):
        diff = (xs - xs[k]) % p
        diff[k] = 1
        w = w * diff % p
    master = _master_poly(xs, p)
    cw = ys * inv_vec(w, p) % p
    # synthetic division master / (t - x_j), vectorised over j, top coefficient down
    coeffs = np.zeros(n, dtype=np.int64)
    q = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        q = (q * xs + int(master[i + 1])) % p
        coeffs[i] = int(np.sum(cw * q % p) % p)
    return coeffs


def _master_poly(xs: np.ndarray, p: int) -> np.ndarray:
    polys = [np.array([(-int(x)) % p, 1], dtype=np.int64) for x in xs]
    while len(polys) > 1:
        nxt = [mul(polys[i], polys[i + 1], p) for i in range(0, len(polys) - 1, 2)]
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensePoly1:
    """Immutable univariate polynomial over F_p, lowest degree first."""

    coeffs: np.ndarray
    p: int

    def __post_init__(self):
        c = trim(np.asarray(self.coeffs, dtype=np.int64) % self.p)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_list(cls, values, p: int) -> "DensePoly1":
        return cls(np.array([int(v) % p for v in values], dtype=np.int64), p)

    def degree(self):
        return degree(self.coeffs)

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def _check(self, other: "DensePoly1"):
        if not isinstance(other, DensePoly1):
            return NotImplemented
        if other.p != self.p:
            raise ModularError(f"modulus mismatch: {self.p} vs {other.p}")
        return None

    def __add__(self, other):
        self._check(other)
        return DensePoly1(add(self.coeffs, other.coeffs, self.p), self.p)

    def __sub__(self, other):
        self._check(other)
        return DensePoly1(sub(self.coeffs, other.coeffs, self.p), self.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return DensePoly1(scale(self.coeffs, other, self.p), self.p)
        self._check(other)
        return DensePoly1(mul(self.coeffs, other.coeffs, self.p), self.p)

    __rmul__ = __mul__

    def __divmod__(self, other):
        self._check(other)
        q, r = divmod_poly(self.coeffs, other.coeffs, self.p)
        return DensePoly1(q, self.p), DensePoly1(r, self.p)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if not isinstance(other, DensePoly1):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.p, self.coeffs.tobytes()))

    def __call__(self, x):
        if np.ndim(x) == 0:
            return int(evaluate(self.coeffs, np.array([x]), self.p)[0])
        return evaluate(self.coeffs, np.asarray(x), self.p)

    def monic(self) -> "DensePoly1":
        return DensePoly1(monic(self.coeffs, self.p), self.p)

    def __repr__(self):
        if len(self.coeffs) > 8:
            return f"DensePoly1(deg={self.degree()}, p={self.p})"
        return f"DensePoly1({self.coeffs.tolist()}, p={self.p})"


def gcd1(a: DensePoly1, b: DensePoly1, threshold: int = DEFAULT_HALF_GCD_THRESHOLD) -> DensePoly1:
    if a.p != b.p:
        raise ModularError(f"modulus mismatch: {a.p} vs {b.p}")
    return DensePoly1(gcd(a.coeffs, b.coeffs, a.p, threshold), a.p)


def interpolate1(samples, p: int, degree_bound: int) -> DensePoly1:
    """Interpolate a list of ``(t, value)`` pairs."""
    if len(samples) == 0:
        raise ModularError("no samples")
    xs, ys = zip(*samples)
    return DensePoly1(
        interpolate(np.array([int(x) for x in xs]), np.array([int(y) for y in ys]), p, degree_bound), p
    )

