"""The symplectic plane over F_p, its Heisenberg extension, SL2(F_p), and
the commutant torus of a hyperbolic integer matrix.

Conventions: omega(u, v) = u1*v2 - u2*v1 on F_p^2, the Heisenberg product is
(v, z)(v', z') = (v + v', z + z' + omega(v, v')/2), and SL2(F_p) acts on the
Heisenberg group by (v, z) -> (g v, z).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import half_mod, inverse_mod, is_odd_prime, legendre_symbol

__all__ = [
    "SymplecticVector",
    "HeisenbergElement",
    "SympMatrix",
    "EnhancedLagrangian",
    "CatMap",
    "HeckeTorus",
    "heis_mul",
    "matrix_act",
    "classify_prime",
    "build_hecke_torus",
    "enumerate_lagrangians",
]


@dataclass(frozen=True)
class SymplecticVector:
    """Point of F_p^2 carrying the symplectic pairing."""

    v1: int
    v2: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "v1", self.v1 % self.p)
        object.__setattr__(self, "v2", self.v2 % self.p)

    def _check(self, other: "SymplecticVector"):
        if other.p != self.p:
            raise ValueError(f"mismatched moduli: {self.p} vs {other.p}")

    def __add__(self, other):
        self._check(other)
        return SymplecticVector(self.v1 + other.v1, self.v2 + other.v2, self.p)

    def __neg__(self):
        return SymplecticVector(-self.v1, -self.v2, self.p)

    def scale(self, a: int) -> "SymplecticVector":
        return SymplecticVector(a * self.v1, a * self.v2, self.p)

    def omega(self, other: "SymplecticVector") -> int:
        self._check(other)
        return (self.v1 * other.v2 - self.v2 * other.v1) % self.p

    def is_zero(self) -> bool:
        return self.v1 == 0 and self.v2 == 0

    def coords(self) -> tuple[int, int]:
        return (self.v1, self.v2)


@dataclass(frozen=True)
class HeisenbergElement:
    """Group element (v, z) with the half-omega twisted product."""

    v: SymplecticVector
    z: int

    def __post_init__(self):
        object.__setattr__(self, "z", self.z % self.p)

    @property
    def p(self) -> int:
        return self.v.p

    @classmethod
    def identity(cls, p: int) -> "HeisenbergElement":
        return cls(SymplecticVector(0, 0, p), 0)

    @classmethod
    def of(cls, v1: int, v2: int, z: int, p: int) -> "HeisenbergElement":
        return cls(SymplecticVector(v1, v2, p), z)

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        p = self.p
        if other.p != p:
            raise ValueError(f"mismatched moduli: {p} vs {other.p}")
        tw = half_mod(self.v.omega(other.v), p)
        return HeisenbergElement(self.v + other.v, self.z + other.z + tw)

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.v, -self.z)

    def is_central(self) -> bool:
        return self.v.is_zero()


def heis_mul(h1: HeisenbergElement, h2: HeisenbergElement) -> HeisenbergElement:
    return h1 * h2


@dataclass(frozen=True)
class SympMatrix:
    """Element of SL2(F_p); determinant 1 is enforced at construction."""

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % self.p)
        det = (self.a * self.d - self.b * self.c) % self.p
        if det != 1:
            raise ValueError(f"determinant {det} != 1 mod {self.p}")

    @classmethod
    def identity(cls, p: int) -> "SympMatrix":
        return cls(1, 0, 0, 1, p)

    def __mul__(self, other: "SympMatrix") -> "SympMatrix":
        if other.p != self.p:
            raise ValueError(f"mismatched moduli: {self.p} vs {other.p}")
        return SympMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.p,
        )

    def inverse(self) -> "SympMatrix":
        return SympMatrix(self.d, -self.b, -self.c, self.a, self.p)

    def __pow__(self, n: int) -> "SympMatrix":
        if n < 0:
            return self.inverse() ** (-n)
        out = SympMatrix.identity(self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def apply(self, v: SymplecticVector) -> SymplecticVector:
        if v.p != self.p:
            raise ValueError(f"mismatched moduli: {self.p} vs {v.p}")
        return SymplecticVector(self.a * v.v1 + self.b * v.v2,
                                self.c * v.v1 + self.d * v.v2, self.p)

    def trace(self) -> int:
        return (self.a + self.d) % self.p

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


def matrix_act(g: SympMatrix, h: HeisenbergElement) -> HeisenbergElement:
    """The automorphism (v, z) -> (g v, z); trivial on the center."""
    return HeisenbergElement(g.apply(h.v), h.z)


@dataclass(frozen=True)
class EnhancedLagrangian:
    """A line through the origin together with a chosen nonzero vector on it.

    In two dimensions every line is Lagrangian, so the data is just the
    vector; two enhanced Lagrangians are equal iff their vectors are equal and
    share a line iff the vectors are proportional.
    """

    sigma: SymplecticVector

    def __post_init__(self):
        if self.sigma.is_zero():
            raise ValueError("enhancement vector must be nonzero")

    @property
    def p(self) -> int:
        return self.sigma.p

    @classmethod
    def of(cls, v1: int, v2: int, p: int) -> "EnhancedLagrangian":
        return cls(SymplecticVector(v1, v2, p))

    def line_key(self) -> tuple[int, int]:
        """Canonical representative of the underlying line: (1, slope) or (0, 1)."""
        s1, s2 = self.sigma.coords()
        if s1 != 0:
            return (1, (s2 * inverse_mod(s1, self.p)) % self.p)
        return (0, 1)

    def shares_line(self, other: "EnhancedLagrangian") -> bool:
        return self.sigma.omega(other.sigma) == 0

    def scaled(self, a: int) -> "EnhancedLagrangian":
        if a % self.p == 0:
            raise ValueError("scale factor must be nonzero")
        return EnhancedLagrangian(self.sigma.scale(a))

    def scale_from(self, other: "EnhancedLagrangian") -> int:
        """The a with self.sigma = a * other.sigma; requires a shared line."""
        if not self.shares_line(other):
            raise ValueError("enhanced Lagrangians on different lines")
        s1, s2 = self.sigma.coords()
        o1, o2 = other.sigma.coords()
        if o1 != 0:
            return (s1 * inverse_mod(o1, self.p)) % self.p
        return (s2 * inverse_mod(o2, self.p)) % self.p


def enumerate_lagrangians(p: int) -> list[EnhancedLagrangian]:
    """One enhanced Lagrangian per line: sigma = (1, m) for each slope m, then (0, 1)."""
    out = [EnhancedLagrangian.of(1, m, p) for m in range(p)]
    out.append(EnhancedLagrangian.of(0, 1, p))
    return out


@dataclass(frozen=True)
class CatMap:
    """Hyperbolic element of SL2(Z): integer entries, det 1, |trace| > 2."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("cat map must have determinant 1 over Z")

    @classmethod
    def parse(cls, text: str) -> "CatMap":
        """Parse the input format "a,b;c,d"; the result must be hyperbolic."""
        try:
            rows = text.split(";")
            (a, b), (c, d) = (tuple(int(t) for t in row.split(",")) for row in rows)
        except (ValueError, TypeError) as exc:
            raise ValueError(f"cannot parse matrix {text!r}; expected 'a,b;c,d'") from exc
        out = cls(a, b, c, d)
        if not out.is_hyperbolic():
            raise ValueError(f"matrix {text!r} has |trace| <= 2; not hyperbolic")
        return out

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def discriminant(self) -> int:
        return self.trace ** 2 - 4

    def is_hyperbolic(self) -> bool:
        return abs(self.trace) > 2

    def reduce(self, p: int) -> SympMatrix:
        return SympMatrix(self.a, self.b, self.c, self.d, p)


def classify_prime(A: CatMap, p: int) -> str:
    """Splitting type of trace(A)^2 - 4 mod p: "split", "inert" or "ramified"."""
    if not A.is_hyperbolic():
        raise ValueError(f"cat map with trace {A.trace} is not hyperbolic")
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    sym = legendre_symbol(A.discriminant, p)
    if sym == 0:
        return "ramified"
    return "split" if sym == 1 else "inert"


@dataclass
class HeckeTorus:
    """The commutant of the reduced cat map in SL2(F_p).

    For a non-ramified prime the commutant is {x*I + y*A : det = 1}, cyclic of
    order p - 1 (split) or p + 1 (inert).  Built once and then read-only.
    """

    matrix: SympMatrix
    kind: str
    order: int
    elements: list[SympMatrix]
    generator: SympMatrix
    log_table: dict[tuple[int, int, int, int], int] = field(repr=False)

    @property
    def p(self) -> int:
        return self.matrix.p

    def element_log(self, g: SympMatrix) -> int:
        return self.log_table[g.entries()]

    def power(self, j: int) -> SympMatrix:
        return self.generator ** (j % self.order)


def _torus_elements(A: SympMatrix) -> list[SympMatrix]:
    p = A.p
    t = A.trace()
    x, y = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    det = (x * x + t * x * y + y * y) % p
    pairs = np.argwhere(det == 1)
    return [
        SympMatrix(x0 + y0 * A.a, y0 * A.b, y0 * A.c, x0 + y0 * A.d, p)
        for x0, y0 in pairs.tolist()
    ]


def _element_order(g: SympMatrix, bound: int) -> int:
    acc = g
    for k in range(1, bound + 1):
        if acc == SympMatrix.identity(g.p):
            return k
        acc = acc * g
    raise RuntimeError("order exceeds group size")  # impossible for a group element


def build_hecke_torus(A: CatMap, p: int) -> HeckeTorus:
    """Enumerate the commutant torus of A mod p, find a generator, fill logs.

    Ramified primes are rejected: there the commutant of the reduction is not
    a torus and the whole eigenfunction setup does not apply.
    """
    kind = classify_prime(A, p)
    if kind == "ramified":
        raise ValueError(f"p = {p} is ramified for this cat map; no Hecke torus")
    Ap = A.reduce(p)
    elements = _torus_elements(Ap)
    expected = p - 1 if kind == "split" else p + 1
    if len(elements) != expected:
        raise RuntimeError(
            f"commutant size {len(elements)} != {expected} for {kind} p = {p}"
        )
    order = expected
    generator = None
    for g in elements:
        if _element_order(g, order) == order:
            generator = g
            break
    if generator is None:
        raise RuntimeError(f"no generator of order {order} found at p = {p}")
    log_table: dict[tuple[int, int, int, int], int] = {}
    acc = SympMatrix.identity(p)
    for j in range(order):
        log_table[acc.entries()] = j
        acc = acc * generator
    if len(log_table) != order or set(log_table) != {g.entries() for g in elements}:
        raise RuntimeError(f"generator powers do not exhaust the torus at p = {p}")
    return HeckeTorus(Ap, kind, order, elements, generator, log_table)
