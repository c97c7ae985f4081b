from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patoms.arith import (
    INF,
    Fp,
    FpPolynomial,
    LocalInt,
    StructuredBlock,
    check_odd_prime,
    companion_matrix,
    fp_inverse,
    irreducible_polys,
    is_irreducible,
    pi_star,
    structured_block_matrix,
    valuation,
)
from patoms.errors import DivisionByZero, InvalidPolynomial, ValidationError
from oracles import charpoly_det

primes = st.sampled_from([3, 5, 7])


def test_check_odd_prime():
    assert check_odd_prime(3) == 3
    for bad in (2, 4, 9, 1, 0, -3):
        with pytest.raises(ValidationError):
            check_odd_prime(bad)


@given(primes, st.integers(), st.integers())
def test_fp_field_axioms(p, a, b):
    x, y = Fp(a % p, p), Fp(b % p, p)
    assert (x + y).value == (a + b) % p
    assert (x * y).value == (a * b) % p
    if y.value:
        assert (fp_inverse(y) * y).value == 1


def test_fp_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        fp_inverse(Fp(0, 3))


def test_fp_signed():
    assert Fp(2, 3).signed() == -1
    assert Fp(1, 3).signed() == 1


@given(primes, st.integers(-50, 50).filter(bool), st.integers(1, 50))
def test_local_int_valuation(p, num, den):
    if den % p == 0:
        return
    x = LocalInt.of(Fraction(num, den), p)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    assert valuation(x) == v
    assert x.is_unit() == (v == 0)


def test_local_int_rejects_p_in_denominator():
    with pytest.raises(ValidationError):
        LocalInt(1, 3, 3)


def test_valuation_of_zero_is_infinite():
    assert valuation(LocalInt(0, 1, 5)) == INF


def test_local_int_division_by_nonunit():
    with pytest.raises(DivisionByZero):
        LocalInt(1, 1, 3) / LocalInt(3, 1, 3)


def test_polynomial_parse_and_format():
    pi = FpPolynomial.parse("t^2+1", 3)
    assert pi.coeffs == (1, 0, 1)
    assert str(pi) == "t^2+1"
    assert FpPolynomial.parse([2, 1], 3).coeffs == (2, 1)
    assert str(FpPolynomial.parse([2, 1], 3)) == "t-1"
    with pytest.raises(InvalidPolynomial):
        FpPolynomial.parse("2t+1", 3)  # not unital


def test_irreducible_counts():
    # number of monic irreducibles of degree d over F_q (Gauss), minus t for d = 1
    def gauss(q, d):
        from sympy import divisors, mobius

        return sum(mobius(d // e) * q ** e for e in divisors(d)) // d

    for p in (3, 5):
        for d in (1, 2, 3):
            expected = gauss(p, d) - (1 if d == 1 else 0)
            assert len(list(irreducible_polys(p, d))) == expected


def test_pi_star_examples():
    # t - 1 is self-dual, t + 1 likewise; t^2 + t + 2 over F_3 -> (2t^2 + t + 1)/2 = t^2 + 2t + 2
    assert pi_star(FpPolynomial((2, 1), 3)).coeffs == (2, 1)
    assert pi_star(FpPolynomial((2, 1, 1), 3)).coeffs == (2, 2, 1)
    with pytest.raises(InvalidPolynomial):
        pi_star(FpPolynomial((0, 1), 3))


@settings(max_examples=60, deadline=None)
@given(primes, st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_companion_charpoly(p, tail):
    coeffs = [c % p for c in tail] + [1]
    C = companion_matrix(coeffs, p)
    assert charpoly_det(C, p) == coeffs


def test_band_blocks():
    jb = structured_block_matrix(StructuredBlock.for_band(FpPolynomial((1, 1), 3), 2))
    assert jb.tolist() == [[2, 1], [0, 2]]
    fb = structured_block_matrix(StructuredBlock.for_band(FpPolynomial((1, 0, 1), 3), 1))
    assert fb.tolist() == [[0, 2], [1, 0]]
    cb = structured_block_matrix(StructuredBlock.for_band(FpPolynomial((1, 0, 1), 3), 2))
    assert cb.shape == (4, 4)
    assert charpoly_det(cb, 3) == [1, 0, 2, 0, 1]  # (t^2+1)^2
