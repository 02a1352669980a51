import numpy as np
import pytest

from qcatlab.arith import (
    CyclicCharacter,
    FieldElement,
    additive_char,
    discrete_log_table,
    inverse_mod,
    legendre,
    legendre_symbol,
    legendre_table,
    primes_in,
    primitive_root,
    sqrt_mod,
    unit_roots,
)

SMALL_PRIMES = primes_in(3, 31)


def test_inverse_of_one_is_one():
    assert FieldElement(1, 7).inverse() == FieldElement(1, 7)


def test_half_matches_brute_force():
    # the unique x with 2x = 1 mod 7
    (x,) = [x for x in range(7) if (2 * x) % 7 == 1]
    assert x == 4
    assert FieldElement(1, 7).half() == FieldElement(4, 7)
    for p in SMALL_PRIMES:
        for a in range(p):
            h = FieldElement(a, p).half().value
            assert (2 * h) % p == a


def test_inverse_of_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        FieldElement(0, 7).inverse()
    with pytest.raises(ZeroDivisionError):
        inverse_mod(0, 11)


def test_mismatched_moduli_rejected():
    with pytest.raises(ValueError):
        FieldElement(1, 7) + FieldElement(1, 11)
    with pytest.raises(TypeError):
        FieldElement(1, 7) + 3


def test_modulus_must_be_odd_prime():
    for bad in (1, 2, 4, 9, 15, 100):
        with pytest.raises(ValueError):
            FieldElement(0, bad)


def test_field_ops_match_integer_arithmetic():
    p = 13
    for a in range(p):
        for b in range(p):
            fa, fb = FieldElement(a, p), FieldElement(b, p)
            assert (fa + fb).value == (a + b) % p
            assert (fa - fb).value == (a - b) % p
            assert (fa * fb).value == (a * b) % p
            if b:
                assert (fb * fb.inverse()).value == 1


def test_additive_char_at_identity():
    assert additive_char(FieldElement(0, 7)) == 1


def test_additive_char_inverse_argument():
    for p in (7, 13):
        for a in range(p):
            prod = additive_char(FieldElement(a, p)) * additive_char(FieldElement(-a, p))
            assert abs(prod - 1) < 1e-12


def test_additive_char_sums_to_zero():
    total = sum(additive_char(FieldElement(a, 7)) for a in range(7))
    assert abs(total) < 1e-12


def test_additive_char_homomorphism_exhaustive_small():
    for p in SMALL_PRIMES:
        psi = unit_roots(p)
        for a in range(p):
            for b in range(p):
                assert abs(psi[a] * psi[b] - psi[(a + b) % p]) < 1e-12


def test_additive_char_homomorphism_sampled_large(rng):
    p = 101
    psi = unit_roots(p)
    for _ in range(200):
        a, b = rng.integers(p), rng.integers(p)
        assert abs(psi[a] * psi[b] - psi[(a + b) % p]) < 1e-12


def test_legendre_examples():
    assert legendre(FieldElement(1, 7)) == 1
    # squares mod 7 are {1, 2, 4}
    squares = {(x * x) % 7 for x in range(1, 7)}
    assert squares == {1, 2, 4}
    assert legendre(FieldElement(2, 7)) == 1
    assert legendre(FieldElement(5, 7)) == -1
    assert legendre(FieldElement(0, 7)) == 0


def test_legendre_matches_square_enumeration_everywhere():
    for p in primes_in(3, 199):
        squares = {(x * x) % p for x in range(1, p)}
        table = legendre_table(p)
        for a in range(p):
            expected = 0 if a == 0 else (1 if a in squares else -1)
            assert legendre_symbol(a, p) == expected
            assert table[a] == expected


def test_legendre_multiplicative():
    p = 31
    for a in range(1, p):
        for b in range(1, p):
            assert legendre_symbol(a * b, p) == legendre_symbol(a, p) * legendre_symbol(b, p)


def test_cyclic_character_trivial_and_order_two():
    chi0 = CyclicCharacter(12, 0)
    assert all(chi0.value(j) == 1 for j in range(12))
    chi_half = CyclicCharacter(12, 6)
    assert abs(chi_half.value(1) + 1) < 1e-12


def test_cyclic_character_sum_vanishes():
    for n in (5, 8, 13):
        for k in range(1, n):
            total = sum(CyclicCharacter(n, k).value(j) for j in range(n))
            assert abs(total) < 1e-9


def test_cyclic_character_product_rule():
    n = 20
    chi = CyclicCharacter(n, 3) * CyclicCharacter(n, 5)
    assert chi.index == 8
    for j in range(n):
        assert abs(chi.value(j) - CyclicCharacter(n, 3).value(j) * CyclicCharacter(n, 5).value(j)) < 1e-12


def test_cyclic_character_log_range_enforced():
    with pytest.raises(ValueError):
        CyclicCharacter(5, 1).value(5)
    with pytest.raises(ValueError):
        CyclicCharacter(5, 1).value(-1)


def test_character_orthogonality_exhaustive():
    # (1/N) sum_j chi_k(g^j) conj(chi_m(g^j)) = [k == m], for every N <= 200
    for n in range(1, 201):
        roots = unit_roots(n)
        table = roots[np.outer(np.arange(n), np.arange(n)) % n]
        gram = table @ table.conj().T / n
        assert np.allclose(gram, np.eye(n), atol=1e-9)


def test_primitive_root_and_discrete_log():
    for p in (7, 11, 101):
        g = primitive_root(p)
        ind = discrete_log_table(p)
        assert ind[0] == -1
        for x in range(1, p):
            assert pow(g, int(ind[x]), p) == x


def test_sqrt_mod_matches_enumeration():
    for p in (7, 11, 13):
        for a in range(p):
            r = sqrt_mod(a, p)
            has_root = any((x * x) % p == a for x in range(p))
            if has_root:
                assert r is not None and (r * r) % p == a
            else:
                assert r is None


def test_unit_roots_cached_and_read_only():
    t1 = unit_roots(7)
    assert t1 is unit_roots(7)
    with pytest.raises(ValueError):
        t1[0] = 0.0
