"""Exact polynomial arithmetic: sparse multivariate over QQ / GF(p), dense univariate mod p."""

from .sparse import GF, NEG_INF, QQ, Domain, DomainMismatch, SparsePoly, compose
from .modular import DensePoly1, ModularError, gcd1, interpolate1, pick_prime

__all__ = [
    "GF",
    "NEG_INF",
    "QQ",
    "Domain",
    "DomainMismatch",
    "SparsePoly",
    "compose",
    "DensePoly1",
    "ModularError",
    "gcd1",
    "interpolate1",
    "pick_prime",
]
