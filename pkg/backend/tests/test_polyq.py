"""
Unit tests for the exact polynomial arithmetic
"""
from fractions import Fraction

import pytest

from utils.polyq import (
    Polynomial,
    binomial_power,
    divisible_by_p_power,
    format_rational,
    poly_coeff,
    poly_eval,
    poly_mul,
    poly_pow,
    to_rational,
)

P = Polynomial.p()


def random_poly(rng, max_degree=8):
    degree = int(rng.integers(0, max_degree + 1))
    return Polynomial(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for _ in range(degree + 1))


class TestPolynomialBasics:
    """Construction, normalization and the small operations"""

    def test_trailing_zeros_dropped(self):
        """Unreduced input normalizes to the same structure"""
        assert Polynomial((1, 2, 0, 0)).coeffs == (Fraction(1), Fraction(2))
        assert Polynomial((0, 0)).is_zero()
        assert Polynomial.zero().degree == -1

    def test_normalization_idempotent(self):
        """Re-normalizing a normalized polynomial changes nothing"""
        a = Polynomial((Fraction(2, 4), 0, Fraction(-6, 3), 0))
        assert Polynomial(a.coeffs) == a
        assert a.coeffs == (Fraction(1, 2), 0, Fraction(-2))

    def test_poly_mul_examples(self):
        """(p-1)^2, (2p-1)^3 and the zero product"""
        x = P - 1
        assert poly_mul(x, x) == Polynomial((1, -2, 1))
        y = 2 * P - 1
        assert poly_mul(poly_mul(y, y), y) == Polynomial((-1, 6, -12, 8))
        assert poly_mul(Polynomial.zero(), P ** 4 - P ** 3).is_zero()

    def test_poly_pow_examples(self):
        """Zero exponent and small binomials"""
        x = P - 1
        assert poly_pow(x, 0) == Polynomial.one()
        assert poly_pow(x, 3) == Polynomial((-1, 3, -3, 1))
        assert poly_pow(x, 4) == Polynomial((1, -4, 6, -4, 1))
        assert binomial_power(-1, 4) == poly_pow(x, 4)

    def test_poly_pow_negative_exponent(self):
        with pytest.raises(ValueError):
            poly_pow(P, -1)

    def test_poly_coeff(self):
        """Coefficients below, at and past the degree"""
        assert poly_coeff(P ** 4 - P ** 3, 3) == -1
        assert poly_coeff(P - 1, 1) == 1
        assert poly_coeff(P ** 3, 5) == 0

    def test_divisible_by_p_power(self):
        """Quotients shift the coefficients down"""
        assert divisible_by_p_power(P ** 3, 3) == (True, Polynomial.one())
        assert divisible_by_p_power(P ** 4 - P ** 3, 3) == (True, P - 1)
        assert divisible_by_p_power(P ** 2, 3) == (False, None)
        ok, quotient = divisible_by_p_power(Polynomial.zero(), 7)
        assert ok and quotient.is_zero()

    def test_poly_eval(self):
        """Exact substitution"""
        assert poly_eval(P ** 4 - P ** 3, Fraction(1, 2)) == Fraction(-1, 16)
        a = Polynomial((Fraction(3, 7), 5, -1))
        assert a(0) == Fraction(3, 7)
        assert binomial_power(-1, 6)(1) == 0

    def test_str(self):
        assert str(P ** 4 - P ** 3) == "p^4 - p^3"
        assert str(Polynomial.zero()) == "0"
        assert str(Polynomial((Fraction(1, 4), Fraction(-1, 2)))) == "-1/2*p + 1/4"


class TestRationalFormat:
    """The num/den wire format"""

    def test_integers_keep_denominator(self):
        assert format_rational(3) == "3/1"
        assert format_rational(Fraction(-2, 4)) == "-1/2"
        assert format_rational(0) == "0/1"

    def test_read_back(self):
        assert to_rational("-1/16") == Fraction(-1, 16)
        assert to_rational("7") == Fraction(7)
        assert to_rational(Fraction(2, 3)) == Fraction(2, 3)

    def test_coefficient_strings(self):
        a = P ** 4 - P ** 3
        assert a.to_strings() == ["0/1", "0/1", "0/1", "-1/1", "1/1"]
        assert Polynomial.from_strings(a.to_strings()) == a


class TestRingLaws:
    """Random triples with degree <= 8 and small rationals"""

    def test_ring_laws(self, rng):
        """Commutativity, associativity, distributivity"""
        for _ in range(1000):
            a, b, c = random_poly(rng), random_poly(rng), random_poly(rng)
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_eval_is_homomorphism(self, rng):
        for _ in range(300):
            a, b = random_poly(rng), random_poly(rng)
            x = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5)))
            assert (a * b)(x) == a(x) * b(x)
            assert (a + b)(x) == a(x) + b(x)

    def test_divisibility_quotient_reconstructs(self, rng):
        """p^k * quotient gives the original back"""
        for _ in range(300):
            a = random_poly(rng) * P ** int(rng.integers(0, 4))
            for k in range(1, 4):
                ok, quotient = divisible_by_p_power(a, k)
                if ok:
                    assert P ** k * quotient == a
