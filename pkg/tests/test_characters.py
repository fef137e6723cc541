import math

import pytest
from hypothesis import given, strategies as st

from siegel_gap.characters import (character, chi, chi0, enumerate_fundamental_discriminants,
                                   is_fundamental_discriminant, kronecker)


def test_kronecker_examples():
    assert kronecker(5, 1) == 1
    assert kronecker(5, 2) == -1
    assert kronecker(-4, 3) == -1


def test_enumeration_examples():
    assert enumerate_fundamental_discriminants(-10, 10) == [-8, -7, -4, -3, 5, 8]
    assert enumerate_fundamental_discriminants(2, 4) == []
    assert enumerate_fundamental_discriminants(5, 5) == [5]
    assert not is_fundamental_discriminant(1)


def test_chi_examples():
    assert chi(character(5), 1) == 1
    assert chi(character(5), 10) == 0
    assert chi(character(-3), 2) == -1
    assert chi0(6, 5) == 1 and chi0(6, 4) == 0
    assert all(chi0(1, n) == 1 for n in range(-5, 20))


def test_modulus_and_parity():
    assert character(-4).q == 4 and character(-4).parity == -1
    assert character(5).q == 5 and character(5).parity == 1


def test_rejects_non_fundamental():
    with pytest.raises(ValueError):
        character(12 * 4)


@pytest.mark.parametrize("d", enumerate_fundamental_discriminants(-60, 60))
def test_multiplicative_and_periodic(d):
    c = character(d)
    for m in range(1, 120):
        for n in range(1, 120):
            assert c(m * n) == c(m) * c(n)
    for n in range(0, 2000):
        assert c(n + c.q) == c(n)


def test_period_sums_vanish():
    for d in enumerate_fundamental_discriminants(-1000, 1000):
        c = character(d)
        assert sum(c(n) for n in range(1, c.q + 1)) == 0


@pytest.mark.parametrize("p", [5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97])
def test_legendre_for_primes_1_mod_4(p):
    squares = {(x * x) % p for x in range(1, p)}
    c = character(p)
    for n in range(1, 3 * p):
        expected = 0 if n % p == 0 else (1 if n % p in squares else -1)
        assert c(n) == expected


@given(st.integers(-400, 400), st.integers(1, 10**6))
def test_kronecker_values_in_range(d, n):
    if is_fundamental_discriminant(d):
        v = kronecker(d, n)
        assert v in (-1, 0, 1)
        assert (v == 0) == (math.gcd(d, n) != 1)
