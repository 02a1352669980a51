"""Exact arithmetic mod an odd prime and the character functions built on it.

Everything downstream consumes three ingredients from this module: residue
arithmetic in F_p, the additive character psi(a) = exp(2*pi*i*a/p), and the
multiplicative characters (the Legendre symbol and the characters of a cyclic
group with a fixed generator).  Complex values are double precision; the
root-of-unity tables are computed once per modulus and cached so repeated
character sums are bit-stable across calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "FieldElement",
    "CyclicCharacter",
    "additive_char",
    "legendre",
    "legendre_symbol",
    "legendre_table",
    "unit_roots",
    "inverse_mod",
    "half_mod",
    "is_odd_prime",
    "primitive_root",
    "discrete_log_table",
    "sqrt_mod",
    "primes_in",
]


@lru_cache(maxsize=None)
def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _require_odd_prime(p: int) -> int:
    if not is_odd_prime(p):
        raise ValueError(f"modulus must be an odd prime, got {p}")
    return p


def inverse_mod(a: int, p: int) -> int:
    if a % p == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def half_mod(a: int, p: int) -> int:
    """a / 2 mod p.  (p + 1) // 2 is the inverse of 2 for odd p."""
    return (a * ((p + 1) // 2)) % p


@dataclass(frozen=True)
class FieldElement:
    """Residue in [0, p) for an odd prime modulus p."""

    value: int
    modulus: int

    def __post_init__(self):
        _require_odd_prime(self.modulus)
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other: "FieldElement") -> "FieldElement":
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.modulus != self.modulus:
            raise ValueError(
                f"mismatched moduli: {self.modulus} vs {other.modulus}"
            )
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value + other.value, self.modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value - other.value, self.modulus)

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value * other.value, self.modulus)

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def inverse(self) -> "FieldElement":
        return FieldElement(inverse_mod(self.value, self.modulus), self.modulus)

    def half(self) -> "FieldElement":
        return FieldElement(half_mod(self.value, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value


@lru_cache(maxsize=None)
def unit_roots(n: int) -> np.ndarray:
    """exp(2*pi*i*k/n) for k in [0, n), computed once per n and reused.

    The returned array is shared; callers must treat it as read-only.
    """
    table = np.exp(2j * np.pi * np.arange(n) / n)
    table.setflags(write=False)
    return table


def additive_char(a: FieldElement) -> complex:
    """psi(a) = exp(2*pi*i*a/p); a homomorphism from (F_p, +) to the circle."""
    return complex(unit_roots(a.modulus)[a.value])


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol of a mod p: +1 on nonzero squares, -1 otherwise, 0 at 0."""
    _require_odd_prime(p)
    a %= p
    if a == 0:
        return 0
    e = pow(a, (p - 1) // 2, p)
    return 1 if e == 1 else -1


def legendre(a: FieldElement) -> int:
    return legendre_symbol(a.value, a.modulus)


@lru_cache(maxsize=None)
def legendre_table(p: int) -> np.ndarray:
    """legendre_symbol(x, p) for x in [0, p), as a read-only int array."""
    table = np.array([legendre_symbol(x, p) for x in range(p)], dtype=np.int64)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class CyclicCharacter:
    """Character of a cyclic group of order N with a fixed generator g.

    The character of index k sends g^j to exp(2*pi*i*k*j/N); which concrete
    group element is "g" is the caller's convention (the Hecke torus stores a
    discrete-log table for exactly this purpose).
    """

    order: int
    index: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "index", self.index % self.order)

    def value(self, element_log: int) -> complex:
        if not 0 <= element_log < self.order:
            raise ValueError(f"element log {element_log} outside [0, {self.order})")
        return complex(unit_roots(self.order)[(self.index * element_log) % self.order])

    def values(self, logs: np.ndarray) -> np.ndarray:
        return unit_roots(self.order)[(self.index * np.asarray(logs)) % self.order]

    def __mul__(self, other: "CyclicCharacter") -> "CyclicCharacter":
        if other.order != self.order:
            raise ValueError("characters of different group orders")
        return CyclicCharacter(self.order, self.index + other.index)


def _order_mod(a: int, p: int) -> int:
    k, x = 1, a % p
    while x != 1:
        x = (x * a) % p
        k += 1
    return k


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group F_p*."""
    _require_odd_prime(p)
    for g in range(2, p):
        if _order_mod(g, p) == p - 1:
            return g
    raise RuntimeError(f"no primitive root found mod {p}")  # unreachable for prime p


@lru_cache(maxsize=None)
def discrete_log_table(p: int) -> np.ndarray:
    """Index table ind[x] with x = primitive_root(p)**ind[x] mod p; ind[0] = -1."""
    g = primitive_root(p)
    table = np.full(p, -1, dtype=np.int64)
    x = 1
    for j in range(p - 1):
        table[x] = j
        x = (x * g) % p
    table.setflags(write=False)
    return table


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a mod p, or None if a is a non-residue."""
    a %= p
    for x in range((p + 1) // 2 + 1):
        if (x * x) % p == a:
            return x
    return None


def primes_in(lo: int, hi: int) -> list[int]:
    """Odd primes p with lo <= p <= hi."""
    return [p for p in range(max(lo, 3), hi + 1) if is_odd_prime(p)]
