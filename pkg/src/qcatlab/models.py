"""p-dimensional models of the Heisenberg representation, the canonical
intertwining operators between them, and the resulting linear action of
SL2(F_p) satisfying the Egorov compatibility with the Heisenberg action.

Coordinates.  A realization is an enhanced Lagrangian (line L with a marked
vector sigma) together with a transversal vector tau normalized so that
omega(tau, sigma) = 1; the model is then literally an array of p amplitudes,
f(x) = value of the equivariant function at the group point (x*tau, 0).
Every function on the group that transforms by the central character under
left translation by L x Z is determined by these p values:

    f((v, z)) = psi(z + x*l/2) * f(x)   where   v = x*tau + l*sigma.

In this gauge the model attached to sigma = (0, 1), tau = (1, 0) carries the
textbook action [pi(a, b, z) f](x) = psi(z + b*x + a*b/2) * f(x + a).

Intertwiners.  For transverse lines the span of intertwining operators is
the averaging over the target line; the canonical normalization multiplies
that raw sum by scale(p) * chi_q(omega(sigma_target, sigma_source)), where
chi_q is the Legendre character and scale(p) is a single unit-phase/sqrt(p)
constant per prime.  scale(p) is not hardcoded: it is solved for from the
requirement that composing two intertwiners along a transverse triple gives
the third, and the construction fails loudly if the resulting family does
not satisfy all of normalization, invariance, convolution and the sign rule.
For realizations on a shared line the canonical operator is chi_q of the
enhancement ratio times the coordinate-change matrix of the identity map.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import inverse_mod, legendre_symbol, unit_roots
from .groups import (
    EnhancedLagrangian,
    HeisenbergElement,
    SympMatrix,
    SymplecticVector,
    enumerate_lagrangians,
)

__all__ = [
    "Realization",
    "ModelVector",
    "HeisOperator",
    "Intertwiner",
    "WeilOperator",
    "IntertwinerConstructionError",
    "heisenberg_op",
    "raw_averaging",
    "canonical_intertwiner",
    "averaging_scale",
    "geometric_action",
    "weil_op",
    "change_realization",
    "regauge",
    "projective_egorov_solver",
    "commutant_dimension",
    "write_operator",
]


class IntertwinerConstructionError(RuntimeError):
    """The normalization constraints could not be satisfied; implementation bug."""


@dataclass(frozen=True)
class Realization:
    """An enhanced Lagrangian plus the transversal gauge fixing coordinates.

    tau is a vector off the line with omega(tau, sigma) = 1.  canonical() uses
    the representative of the first enumerated line transverse to sigma, which
    makes the gauge a deterministic function of sigma alone; custom gauges
    (e.g. a torus-adapted transversal) may be passed explicitly.
    """

    lagrangian: EnhancedLagrangian
    tau: tuple[int, int]

    def __post_init__(self):
        p = self.p
        t = SymplecticVector(self.tau[0], self.tau[1], p)
        object.__setattr__(self, "tau", t.coords())
        if t.omega(self.lagrangian.sigma) != 1:
            raise ValueError("transversal must satisfy omega(tau, sigma) = 1")

    @property
    def p(self) -> int:
        return self.lagrangian.p

    @property
    def sigma(self) -> tuple[int, int]:
        return self.lagrangian.sigma.coords()

    @classmethod
    def canonical(cls, lag: EnhancedLagrangian) -> "Realization":
        p = lag.p
        for cand in enumerate_lagrangians(p):
            w = cand.sigma.omega(lag.sigma)
            if w != 0:
                tau = cand.sigma.scale(inverse_mod(w, p))
                return cls(lag, tau.coords())
        raise RuntimeError("no transverse line found")  # impossible for p >= 3

    @classmethod
    def of(cls, s1: int, s2: int, p: int) -> "Realization":
        return cls.canonical(EnhancedLagrangian.of(s1, s2, p))

    @classmethod
    def standard(cls, p: int) -> "Realization":
        """The position model: sigma = (0, 1), tau = (1, 0)."""
        return cls.of(0, 1, p)

    def tag(self) -> str:
        return "%d:%d" % self.sigma


@dataclass
class ModelVector:
    """p complex amplitudes expressed in the coordinates of one realization."""

    realization: Realization
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.realization.p,):
            raise ValueError("amplitude array must have length p")

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass
class HeisOperator:
    realization: Realization
    element: HeisenbergElement
    matrix: np.ndarray


@dataclass
class Intertwiner:
    source: Realization
    target: Realization
    matrix: np.ndarray


@dataclass
class WeilOperator:
    g: SympMatrix
    realization: Realization
    matrix: np.ndarray


def _inv2(p: int) -> int:
    return (p + 1) // 2


def _decompose(r: Realization, v1, v2, z):
    """Coordinates (x, z0) with f((v, z)) = psi(z0) * f(x); vectorized."""
    p = r.p
    s1, s2 = r.sigma
    t1, t2 = r.tau
    x = (s2 * v1 - s1 * v2) % p
    l = (t1 * v2 - t2 * v1) % p
    z0 = (z + _inv2(p) * x * l) % p
    return x, z0


def heisenberg_op(r: Realization, h: HeisenbergElement) -> HeisOperator:
    """Matrix of the right-translation action of h on the model of r."""
    p = r.p
    if h.p != p:
        raise ValueError(f"mismatched moduli: {p} vs {h.p}")
    a, b = h.v.coords()
    t1, t2 = r.tau
    x = np.arange(p)
    v1 = (x * t1 + a) % p
    v2 = (x * t2 + b) % p
    z = (h.z + _inv2(p) * x * (t1 * b - t2 * a)) % p
    xp, z0 = _decompose(r, v1, v2, z)
    m = np.zeros((p, p), dtype=np.complex128)
    m[x, xp] = unit_roots(p)[z0]
    return HeisOperator(r, h, m)


def raw_averaging(target: Realization, source: Realization) -> np.ndarray:
    """Unnormalized sum over the target line, as a matrix source -> target.

    Requires transverse lines; for a shared line the sum degenerates to a
    multiple of the coordinate change and is rejected here.
    """
    p = target.p
    if source.p != p:
        raise ValueError(f"mismatched moduli: {p} vs {source.p}")
    sm1, sm2 = target.sigma
    if not target.lagrangian.sigma.omega(source.lagrangian.sigma):
        raise ValueError("raw averaging needs transverse lines")
    tm1, tm2 = target.tau
    y, m = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    v1 = (m * sm1 + y * tm1) % p
    v2 = (m * sm2 + y * tm2) % p
    z = (_inv2(p) * m * y * (p - 1)) % p  # omega(sigma, tau) = -1
    x, z0 = _decompose(source, v1, v2, z)
    out = np.zeros((p, p), dtype=np.complex128)
    out[y.ravel(), x.ravel()] = unit_roots(p)[z0.ravel()]
    return out


def _coordinate_change(target: Realization, source: Realization) -> np.ndarray:
    """Matrix of the identity operator between two gauges of the same line."""
    p = target.p
    s1, s2 = source.sigma
    t1, t2 = source.tau
    u1, u2 = target.tau
    e1 = (s2 * u1 - s1 * u2) % p
    e2 = (t1 * u2 - t2 * u1) % p
    y = np.arange(p)
    out = np.zeros((p, p), dtype=np.complex128)
    out[y, (y * e1) % p] = unit_roots(p)[(_inv2(p) * e1 * e2 * y * y) % p]
    return out


def _intertwiner_matrix(target: Realization, source: Realization, scale: complex) -> np.ndarray:
    p = target.p
    w = target.lagrangian.sigma.omega(source.lagrangian.sigma)
    if w == 0:
        a = target.lagrangian.scale_from(source.lagrangian)
        if target == source:
            return np.eye(p, dtype=np.complex128)
        return legendre_symbol(a, p) * _coordinate_change(target, source)
    return scale * legendre_symbol(w, p) * raw_averaging(target, source)


def _scalar_ratio(product: np.ndarray, reference: np.ndarray, tol: float) -> complex:
    """The c with product = c * reference, or raise if no such scalar exists."""
    i, j = np.unravel_index(np.argmax(np.abs(reference)), reference.shape)
    c = product[i, j] / reference[i, j]
    if np.linalg.norm(product - c * reference) > tol * np.linalg.norm(product):
        raise IntertwinerConstructionError("composite is not proportional to reference")
    return complex(c)


def _anchor_triples(p: int) -> list[tuple[Realization, Realization, Realization]]:
    first = (Realization.of(1, 0, p), Realization.of(0, 1, p), Realization.of(1, 1, p))
    second = (Realization.of(0, 1, p), Realization.of(1, 2 % p, p), Realization.of(1, 0, p))
    return [first, second]


@lru_cache(maxsize=None)
def averaging_scale(p: int) -> complex:
    """The per-prime scalar multiplying the raw averaging sum.

    Solved from one convolution constraint on a pairwise transverse triple and
    cross-checked on a second triple, for unitarity, and on a returning pair.
    Empirically it equals the normalized Gauss sum (1/p) sum_t psi(-t^2/2);
    tests pin that closed form per prime, but only the constraint system is
    relied on here.
    """
    tol = 1e-9
    scale = None
    for rn, rm, rl in _anchor_triples(p):
        a_nm = raw_averaging(rn, rm)
        a_ml = raw_averaging(rm, rl)
        a_nl = raw_averaging(rn, rl)
        c = _scalar_ratio(a_nm @ a_ml, a_nl, tol)
        w_nm = rn.lagrangian.sigma.omega(rm.lagrangian.sigma)
        w_ml = rm.lagrangian.sigma.omega(rl.lagrangian.sigma)
        w_nl = rn.lagrangian.sigma.omega(rl.lagrangian.sigma)
        cand = legendre_symbol(w_nl * w_nm * w_ml, p) / c
        if scale is None:
            scale = cand
        elif abs(scale - cand) > tol:
            raise IntertwinerConstructionError(
                f"convolution anchors disagree at p = {p}: {scale} vs {cand}"
            )
    if abs(abs(scale) - p ** -0.5) > tol:
        raise IntertwinerConstructionError(
            f"|scale| = {abs(scale)} != p^-1/2 at p = {p}; averaging not unitary"
        )
    _validate_family(p, scale)
    return scale


def _validate_family(p: int, scale: complex) -> None:
    """Assert the four characterizing properties on a fixed instance set."""
    tol = 1e-9 * p
    rl = Realization.of(1, 0, p)
    rm = Realization.of(0, 1, p)
    # normalization
    if np.linalg.norm(_intertwiner_matrix(rl, rl, scale) - np.eye(p)) > tol:
        raise IntertwinerConstructionError("normalization fails")
    # returning pair composes to the identity (convolution + normalization)
    f_lm = _intertwiner_matrix(rl, rm, scale)
    f_ml = _intertwiner_matrix(rm, rl, scale)
    if np.linalg.norm(f_lm @ f_ml - np.eye(p)) > tol:
        raise IntertwinerConstructionError("returning pair is not the identity")
    # sign rule in source and target slots; operators compared in one gauge
    for a in (2 % p, p - 1):
        if a == 1:
            continue
        chi = legendre_symbol(a, p)
        target_scaled = Realization.of(0, a, p)
        f_scaled = _intertwiner_matrix(target_scaled, rl, scale)
        back = _coordinate_change(rm, target_scaled)
        if np.linalg.norm(back @ f_scaled - chi * f_ml) > tol:
            raise IntertwinerConstructionError("sign rule fails in target slot")
        source_scaled = Realization.of(a, 0, p)
        f_scaled = _intertwiner_matrix(rm, source_scaled, scale)
        fwd = _coordinate_change(source_scaled, rl)
        if np.linalg.norm(f_scaled @ fwd - chi * f_ml) > tol:
            raise IntertwinerConstructionError("sign rule fails in source slot")
    # invariance under one shear and one rotation-like element
    for g in (SympMatrix(1, 1, 0, 1, p), SympMatrix(0, 1, -1, 0, p)):
        lhs = _conjugated_intertwiner(g, rm, rl, scale)
        gm = Realization.canonical(EnhancedLagrangian(g.apply(rm.lagrangian.sigma)))
        gl = Realization.canonical(EnhancedLagrangian(g.apply(rl.lagrangian.sigma)))
        if np.linalg.norm(lhs - _intertwiner_matrix(gm, gl, scale)) > tol:
            raise IntertwinerConstructionError("invariance fails")


def _geometric_phase(r: Realization, g: SympMatrix, target: Realization) -> np.ndarray:
    """Diagonal of the map f -> f(g^{-1} .) from the model of r to that of g.r."""
    p = r.p
    u = g.inverse().apply(SymplecticVector(*target.tau, p))
    s1, s2 = r.sigma
    t1, t2 = r.tau
    if (s2 * u.v1 - s1 * u.v2) % p != 1:
        raise RuntimeError("pulled-back transversal is not normalized")
    mu = (t1 * u.v2 - t2 * u.v1) % p
    y = np.arange(p)
    return unit_roots(p)[(_inv2(p) * mu * y * y) % p]


def geometric_action(r: Realization, g: SympMatrix) -> tuple[Realization, np.ndarray]:
    """The isomorphism model(r) -> model(g.r) induced by v -> v(g^{-1} .).

    In normalized gauges it is diagonal; the returned array holds the p unit
    phases, so the full matrix is np.diag(phases).
    """
    target = Realization.canonical(EnhancedLagrangian(g.apply(r.lagrangian.sigma)))
    return target, _geometric_phase(r, g, target)


def canonical_intertwiner(target: Realization, source: Realization) -> Intertwiner:
    """The canonical operator model(source) -> model(target).

    Identical realizations give the exact identity; a shared line gives the
    Legendre sign of the enhancement ratio times the coordinate change; for
    transverse lines the normalized averaging operator is returned.
    """
    if target.p != source.p:
        raise ValueError(f"mismatched moduli: {target.p} vs {source.p}")
    w = target.lagrangian.sigma.omega(source.lagrangian.sigma)
    scale = averaging_scale(target.p) if w != 0 else 0.0
    return Intertwiner(source, target, _intertwiner_matrix(target, source, scale))


def change_realization(vec: ModelVector, target: Realization) -> ModelVector:
    op = canonical_intertwiner(target, vec.realization)
    return ModelVector(target, op.matrix @ vec.amplitudes)


def regauge(op: Intertwiner, target: Realization, source: Realization) -> Intertwiner:
    """The same operator written between other gauges of the same two lines.

    Lets operator identities that mix enhancements (the sign rule, most
    prominently) be checked as literal matrix equalities.
    """
    if not target.lagrangian.shares_line(op.target.lagrangian):
        raise ValueError("target realization lies on a different line")
    if not source.lagrangian.shares_line(op.source.lagrangian):
        raise ValueError("source realization lies on a different line")
    m = op.matrix
    if target != op.target:
        m = _coordinate_change(target, op.target) @ m
    if source != op.source:
        m = m @ _coordinate_change(op.source, source)
    return Intertwiner(source, target, m)


def weil_op(r: Realization, g: SympMatrix) -> WeilOperator:
    """The linearized action of g on the model of r.

    Composes the geometric relabeling into the model of g.r with the canonical
    intertwiner back; by the convolution and invariance properties the map
    g -> matrix is an honest homomorphism, with no projective ambiguity.
    """
    if g.p != r.p:
        raise ValueError(f"mismatched moduli: {r.p} vs {g.p}")
    target, phases = geometric_action(r, g)
    f = canonical_intertwiner(r, target)
    return WeilOperator(g, r, f.matrix * phases[np.newaxis, :])


def _conjugated_intertwiner(g: SympMatrix, rm: Realization, rl: Realization,
                            scale: complex) -> np.ndarray:
    """geo(g) o F_{m,l} o geo(g)^{-1}, landing between the g-translated models."""
    _, phase_m = geometric_action(rm, g)
    _, phase_l = geometric_action(rl, g)
    f = _intertwiner_matrix(rm, rl, scale)
    return (phase_m[:, np.newaxis] * f) * np.conj(phase_l)[np.newaxis, :]


def _heis_generators(p: int) -> list[HeisenbergElement]:
    return [HeisenbergElement.of(1, 0, 0, p), HeisenbergElement.of(0, 1, 0, p)]


def projective_egorov_solver(r: Realization, g: SympMatrix) -> np.ndarray:
    """Solve X pi(h) = pi(g h) X for the generators h, up to scalar.

    The solution space is one-dimensional because both sides are irreducible
    with the same central character; a unit Frobenius norm representative is
    returned.  Used as an independent reconstruction of the g-action.
    """
    p = r.p
    eye = np.eye(p)
    blocks = []
    for h in _heis_generators(p):
        ph = heisenberg_op(r, h).matrix
        pgh = heisenberg_op(r, HeisenbergElement(g.apply(h.v), h.z)).matrix
        blocks.append(np.kron(eye, ph.T) - np.kron(pgh, eye))
    system = np.vstack(blocks)
    _, s, vh = np.linalg.svd(system)
    null_dim = int(np.sum(s < 1e-8 * s[0]))
    if null_dim != 1:
        raise RuntimeError(f"solution space has dimension {null_dim}, expected 1")
    x = np.conj(vh[-1]).reshape(p, p)  # right-singular vectors are conj(vh) rows
    return x / np.linalg.norm(x)


def commutant_dimension(r: Realization, tol: float = 1e-8) -> int:
    """Dimension of the algebra commuting with the whole Heisenberg action.

    The first generator acts with p distinct eigenvalues, so any commuting X
    is diagonal in its eigenbasis; the entries of the second generator in that
    basis then tie diagonal values together, and the commutant dimension is
    the number of connected components of the resulting graph.
    """
    from scipy.linalg import schur
    from scipy.sparse.csgraph import connected_components

    h1, h2 = _heis_generators(r.p)
    u1 = heisenberg_op(r, h1).matrix
    u2 = heisenberg_op(r, h2).matrix
    _, z = schur(u1, output="complex")
    u2t = z.conj().T @ u2 @ z
    graph = np.abs(u2t) > tol
    n_components, _ = connected_components(graph, directed=False)
    return int(n_components)


def write_operator(fh, matrix: np.ndarray) -> None:
    """Debug dump: one row per line, entries as "re,im" pairs separated by spaces."""
    for row in np.atleast_2d(matrix):
        fh.write(" ".join(f"{z.real + 0.0:.17g},{z.imag + 0.0:.17g}" for z in row) + "\n")
