"""Character decomposition of the torus action on a model and eigenfunction
extraction, including the closed form available at split primes.

For each character index k of the cyclic torus the averaging projector

    P_k = (1/N) * sum_j conj(chi_k(g^j)) rho(g^j)

is computed (all k at once via an FFT along the exponent axis, which is the
same sum), its rank read off the eigenvalues with the maximally robust 0.5
cut, and an orthonormal basis of the character space extracted.  At a split
prime the torus fixes the two eigenlines of the cat map; in a realization
adapted to them the torus acts by coordinate scalings and the multiplicity
one eigenfunctions are Legendre-times-multiplicative-character vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import (
    CyclicCharacter,
    discrete_log_table,
    legendre_table,
    sqrt_mod,
    unit_roots,
)
from .groups import EnhancedLagrangian, HeckeTorus, SympMatrix, SymplecticVector
from .models import Realization, canonical_intertwiner, weil_op

__all__ = [
    "CharacterSpace",
    "HeckeSpectrum",
    "HeckeEigenfunction",
    "weil_torus_operators",
    "hecke_spectrum",
    "eigenfunction",
    "transport",
    "split_adapted_realization",
    "split_closed_form",
    "matched_character_index",
    "eigenfunction_csv_rows",
]

# projector eigenvalues are 0 or 1 in exact arithmetic; anything inside this
# window means the rank is numerically ambiguous and the record is flagged
RANK_WINDOW = (0.3, 0.7)


@dataclass
class CharacterSpace:
    """One character's slice of the model: multiplicity and orthonormal basis."""

    index: int
    multiplicity: int
    basis: np.ndarray  # (p, multiplicity), orthonormal columns
    flagged: bool
    residual: float


@dataclass
class HeckeSpectrum:
    torus: HeckeTorus
    realization: Realization
    spaces: list[CharacterSpace]

    @property
    def p(self) -> int:
        return self.realization.p

    def space(self, k: int) -> CharacterSpace:
        return self.spaces[k % self.torus.order]

    def multiplicities(self) -> list[int]:
        return [s.multiplicity for s in self.spaces]


@dataclass
class HeckeEigenfunction:
    """Joint eigenvector(s) of the torus action for one character.

    vectors has one column per basis vector of the character space, each
    rescaled to squared norm p with its first nonzero amplitude real positive.
    degenerate is True when the multiplicity exceeds one; amplitudes then
    refuses to pick a column.
    """

    character_index: int
    realization: Realization
    vectors: np.ndarray  # (p, multiplicity)
    degenerate: bool

    @property
    def p(self) -> int:
        return self.realization.p

    @property
    def multiplicity(self) -> int:
        return self.vectors.shape[1]

    @property
    def amplitudes(self) -> np.ndarray:
        if self.degenerate:
            raise ValueError(
                f"character {self.character_index} has multiplicity "
                f"{self.multiplicity}; pick a column of .vectors"
            )
        return self.vectors[:, 0]


def weil_torus_operators(torus: HeckeTorus, r: Realization) -> np.ndarray:
    """Stack of the torus operators on the model of r, ordered by exponent."""
    p = r.p
    out = np.empty((torus.order, p, p), dtype=np.complex128)
    g = SympMatrix.identity(p)
    for j in range(torus.order):
        out[j] = weil_op(r, g).matrix
        g = g * torus.generator
    return out


def _normalize_columns(basis: np.ndarray, p: int) -> np.ndarray:
    out = np.empty_like(basis)
    for i in range(basis.shape[1]):
        v = basis[:, i]
        v = v * (np.sqrt(p) / np.linalg.norm(v))
        nz = np.flatnonzero(np.abs(v) > 1e-6)
        if nz.size:
            lead = v[nz[0]]
            v = v * (np.abs(lead) / lead)
        out[:, i] = v
    return out


def hecke_spectrum(torus: HeckeTorus, r: Realization) -> HeckeSpectrum:
    """Decompose the model of r into torus character spaces.

    Multiplicities are eigenvalue counts of the averaging projectors above
    0.5; they must sum to p.  A character whose projector has an eigenvalue
    inside RANK_WINDOW, or whose basis fails the eigenvector equation on the
    generator, is flagged rather than silently kept.
    """
    p = r.p
    n = torus.order
    ops = weil_torus_operators(torus, r)
    projectors = np.fft.fft(ops, axis=0) / n  # [k] = (1/N) sum_j ops[j] e^{-2pi i jk/N}
    rho_gen = ops[1] if n > 1 else np.eye(p, dtype=np.complex128)
    gen_eigs = unit_roots(n)
    spaces = []
    for k in range(n):
        w, u = np.linalg.eigh(projectors[k])
        mask = w > 0.5
        mult = int(mask.sum())
        flagged = bool(np.any((w > RANK_WINDOW[0]) & (w < RANK_WINDOW[1])))
        basis = u[:, mask]
        residual = 0.0
        if mult:
            residual = float(
                np.linalg.norm(rho_gen @ basis - gen_eigs[k] * basis)
            )
            flagged = flagged or residual > 1e-7 * p
        spaces.append(CharacterSpace(k, mult, basis, flagged, residual))
    total = sum(s.multiplicity for s in spaces)
    if total != p:
        raise RuntimeError(
            f"character multiplicities sum to {total} != {p} at p = {p}"
        )
    return HeckeSpectrum(torus, r, spaces)


def eigenfunction(spectrum: HeckeSpectrum, k: int) -> HeckeEigenfunction:
    """The normalized eigenfunction(s) for character k.

    Raises for an empty character space; for multiplicity above one the full
    orthonormal basis is returned with the degeneracy flag set.
    """
    space = spectrum.space(k)
    if space.multiplicity == 0:
        raise ValueError(f"character {k} does not occur in the model")
    vectors = _normalize_columns(space.basis, spectrum.p)
    return HeckeEigenfunction(
        space.index, spectrum.realization, vectors, space.multiplicity > 1
    )


def transport(fn: HeckeEigenfunction, target: Realization) -> HeckeEigenfunction:
    """Carry an eigenfunction to another realization.

    The canonical intertwiner commutes with the torus action, so the image is
    again an eigenfunction for the same character; it is unitary, so only the
    leading-phase convention needs re-applying.
    """
    op = canonical_intertwiner(target, fn.realization)
    vectors = _normalize_columns(op.matrix @ fn.vectors, fn.p)
    return HeckeEigenfunction(fn.character_index, target, vectors, fn.degenerate)


def _eigenline_vectors(torus: HeckeTorus) -> tuple[SymplecticVector, SymplecticVector]:
    A = torus.matrix
    p = A.p
    disc = (A.trace() ** 2 - 4) % p
    root = sqrt_mod(disc, p)
    if root is None:
        raise RuntimeError("no eigenvalues in F_p for a split torus")
    inv2 = (p + 1) // 2
    lines = []
    for lam in ((A.trace() + root) * inv2 % p, (A.trace() - root) * inv2 % p):
        if A.b % p != 0:
            v = SymplecticVector(A.b, lam - A.a, p)
        elif A.c % p != 0:
            v = SymplecticVector(lam - A.d, A.c, p)
        else:
            v = SymplecticVector(1, 0, p) if lam == A.a else SymplecticVector(0, 1, p)
        lines.append(v)
    return lines[0], lines[1]


def split_adapted_realization(torus: HeckeTorus) -> Realization:
    """A realization whose line and transversal are both torus-fixed.

    Exists exactly at split primes: sigma spans one eigenline of the cat map
    and tau the other, scaled so omega(tau, sigma) = 1.
    """
    if torus.kind != "split":
        raise ValueError(f"torus is {torus.kind}; no torus-fixed line exists")
    sigma, other = _eigenline_vectors(torus)
    p = torus.p
    w = other.omega(sigma)
    tau = other.scale(pow(w, -1, p))
    return Realization(EnhancedLagrangian(sigma), tau.coords())


def _line_eigenvalue(g: SympMatrix, sigma: SymplecticVector) -> int:
    gv = g.apply(sigma)
    if sigma.v1 != 0:
        a = (gv.v1 * pow(sigma.v1, -1, g.p)) % g.p
    else:
        a = (gv.v2 * pow(sigma.v2, -1, g.p)) % g.p
    if gv.coords() != sigma.scale(a).coords():
        raise ValueError("line is not fixed by the torus element")
    return a


def matched_character_index(torus: HeckeTorus, r: Realization, chi: CyclicCharacter) -> int:
    """Torus character index of the closed-form eigenfunction for chi.

    Both characters are evaluated on the torus generator: the closed form has
    eigenvalue chi(a0) where a0 is the generator's eigenvalue on the line of
    r, and the spectrum's character k has eigenvalue exp(2 pi i k / N).
    """
    p = torus.p
    if chi.order != p - 1:
        raise ValueError("chi must be a character of the multiplicative group")
    a0 = _line_eigenvalue(torus.generator, r.lagrangian.sigma)
    ind = discrete_log_table(p)
    return int((chi.index * ind[a0]) % torus.order)


def split_closed_form(torus: HeckeTorus, chi: CyclicCharacter, r: Realization) -> HeckeEigenfunction:
    """The explicit eigenfunction x -> chi_q(x) chi(x) in a torus-adapted model.

    chi is a character of F_p* parametrized by the smallest primitive root.
    The vector vanishes at x = 0, has constant modulus elsewhere, and is
    rescaled to squared norm p; its torus character is the one reported by
    matched_character_index.
    """
    if torus.kind != "split":
        raise ValueError(f"torus is {torus.kind}; closed form needs a split torus")
    p = torus.p
    _line_eigenvalue(torus.generator, r.lagrangian.sigma)
    _line_eigenvalue(torus.generator, SymplecticVector(*r.tau, p))
    if chi.order != p - 1:
        raise ValueError("chi must be a character of the multiplicative group")
    ind = discrete_log_table(p)
    amps = np.zeros(p, dtype=np.complex128)
    amps[1:] = legendre_table(p)[1:] * unit_roots(p - 1)[(chi.index * ind[1:]) % (p - 1)]
    amps *= np.sqrt(p / (p - 1.0))
    k = matched_character_index(torus, r, chi)
    return HeckeEigenfunction(k, r, amps[:, np.newaxis], False)


def eigenfunction_csv_rows(kind: str, fn: HeckeEigenfunction) -> list[tuple]:
    """Rows (p, kind, character_index, multiplicity, x, re, im) for one character."""
    rows = []
    for col in range(fn.multiplicity):
        v = fn.vectors[:, col]
        for x in range(fn.p):
            rows.append(
                (fn.p, kind, fn.character_index, fn.multiplicity, x,
                 float(v[x].real), float(v[x].imag))
            )
    return rows
