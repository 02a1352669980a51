"""Quick end-to-end checks runnable from the CLI; prints one line per check."""

from __future__ import annotations

import numpy as np

from .groups import CatMap, HeisenbergElement, SympMatrix, build_hecke_torus, classify_prime
from .hecke import eigenfunction, hecke_spectrum
from .models import (
    Realization,
    canonical_intertwiner,
    commutant_dimension,
    heisenberg_op,
    weil_op,
)


def _random_sl2(rng, p: int) -> SympMatrix:
    while True:
        a, b, c = (int(rng.integers(p)) for _ in range(3))
        if a:
            return SympMatrix(a, b, c, (1 + b * c) * pow(a, -1, p), p)
        if b:
            return SympMatrix(0, b, -pow(b, -1, p), c, p)


def run(prime: int = 7, seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    p = prime
    ok = True

    def check(name: str, passed: bool, detail: str = ""):
        nonlocal ok
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}{'  ' + detail if detail else ''}")

    r = Realization.standard(p)
    h1 = HeisenbergElement.of(1, 0, 0, p)
    h2 = HeisenbergElement.of(0, 1, 0, p)
    m1, m2 = heisenberg_op(r, h1).matrix, heisenberg_op(r, h2).matrix
    m12 = heisenberg_op(r, h1 * h2).matrix
    check("heisenberg homomorphism", np.allclose(m1 @ m2, m12, atol=1e-12))

    central = heisenberg_op(r, HeisenbergElement.of(0, 0, 1, p)).matrix
    check("central character", np.allclose(central, np.exp(2j * np.pi / p) * np.eye(p)))

    check("commutant is scalars", commutant_dimension(r) == 1)

    f = canonical_intertwiner(Realization.of(1, 0, p), r)
    check("intertwiner unitary",
          np.allclose(f.matrix @ f.matrix.conj().T, np.eye(p), atol=1e-9))

    g1, g2 = _random_sl2(rng, p), _random_sl2(rng, p)
    w1, w2 = weil_op(r, g1).matrix, weil_op(r, g2).matrix
    w12 = weil_op(r, g1 * g2).matrix
    check("linearized multiplicativity", np.allclose(w1 @ w2, w12, atol=1e-9))

    egorov_ok = True
    for h in (h1, h2):
        lhs = w1 @ heisenberg_op(r, h).matrix @ w1.conj().T
        rhs = heisenberg_op(r, HeisenbergElement(g1.apply(h.v), h.z)).matrix
        egorov_ok &= bool(np.allclose(lhs, rhs, atol=1e-9))
    check("egorov identity", egorov_ok)

    A = CatMap(2, 1, 1, 1)
    kind = classify_prime(A, p)
    if kind == "ramified":
        print(f"SKIP  spectrum (p={p} ramified for the default cat map)")
    else:
        torus = build_hecke_torus(A, p)
        spectrum = hecke_spectrum(torus, r)
        check("multiplicities sum to p", sum(spectrum.multiplicities()) == p,
              f"kind={kind} mults={spectrum.multiplicities()}")
        sups = []
        for space in spectrum.spaces:
            if space.multiplicity == 1:
                fn = eigenfunction(spectrum, space.index)
                sups.append(float(np.max(np.abs(fn.amplitudes))))
        check("supremum bound", all(s <= 2.0 + 1e-9 for s in sups),
              f"max sup = {max(sups):.6f}")
    return ok
