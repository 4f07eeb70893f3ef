"""
Exact univariate polynomials over the rationals in the formal variable p
Dense ascending coefficients, always normalized (no trailing zeros, zero is ())
Rationals are fractions.Fraction so they are always reduced with a positive
denominator, which keeps equality structural
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction]


def to_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Accepts ints, Fractions and "num/den" / "num" strings"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    raise TypeError(f"cannot read {type(value).__name__} as a rational")


def format_rational(value: Scalar) -> str:
    """Serialize as "num/den" - integers keep the /1 so the format never varies"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class Polynomial:
    """Immutable dense polynomial; coeffs[j] is the coefficient of p^j"""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        values = [Fraction(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        self._coeffs: Tuple[Fraction, ...] = tuple(values)
        self._hash: Optional[int] = None

    # constructors

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1,))

    @classmethod
    def constant(cls, value: Scalar) -> "Polynomial":
        return cls((value,))

    @classmethod
    def monomial(cls, degree: int, coefficient: Scalar = 1) -> "Polynomial":
        if degree < 0:
            raise ValueError("monomial degree must be non-negative")
        return cls([0] * degree + [coefficient])

    @classmethod
    def p(cls) -> "Polynomial":
        return cls.monomial(1)

    @classmethod
    def from_strings(cls, coeffs: Sequence[str]) -> "Polynomial":
        return cls(to_rational(c) for c in coeffs)

    # basic accessors

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial"""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def coeff(self, j: int) -> Fraction:
        if 0 <= j < len(self._coeffs):
            return self._coeffs[j]
        return Fraction(0)

    def lowest_nonzero(self) -> Optional[int]:
        for j, c in enumerate(self._coeffs):
            if c != 0:
                return j
        return None

    def to_strings(self) -> List[str]:
        return [format_rational(c) for c in self._coeffs]

    # arithmetic

    def __add__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        other = _coerce(other)
        size = max(len(self._coeffs), len(other._coeffs))
        return Polynomial(self.coeff(j) + other.coeff(j) for j in range(size))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self._coeffs)

    def __sub__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other: Scalar) -> "Polynomial":
        return _coerce(other) - self

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            scalar = Fraction(other)
            return Polynomial(c * scalar for c in self._coeffs)
        if not self._coeffs or not other._coeffs:
            return Polynomial.zero()
        out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other._coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        return poly_pow(self, k)

    def scale(self, factor: Scalar) -> "Polynomial":
        return self * Fraction(factor)

    def shift_down(self, k: int) -> "Polynomial":
        """Drop the k lowest coefficients (division by p^k when they vanish)"""
        return Polynomial(self._coeffs[k:])

    def __call__(self, x: Scalar) -> Fraction:
        return poly_eval(self, x)

    # identity

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == Polynomial.constant(other)._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._coeffs)
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        terms = []
        for j in range(len(self._coeffs) - 1, -1, -1):
            c = self._coeffs[j]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if j == 0:
                body = str(mag)
            else:
                power = "p" if j == 1 else f"p^{j}"
                body = power if mag == 1 else f"{mag}*{power}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def _coerce(value: Union[Polynomial, Scalar]) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    return Polynomial.constant(value)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def poly_pow(a: Polynomial, k: int) -> Polynomial:
    """Repeated squaring; a^0 = 1 (also for the zero polynomial)"""
    if k < 0:
        raise ValueError("exponent must be non-negative")
    result = Polynomial.one()
    base = a
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def poly_coeff(a: Polynomial, j: int) -> Fraction:
    return a.coeff(j)


def divisible_by_p_power(a: Polynomial, k: int) -> Tuple[bool, Optional[Polynomial]]:
    """(True, a / p^k) when coefficients 0..k-1 vanish, else (False, None)"""
    if k < 1:
        raise ValueError("power must be positive")
    if any(a.coeff(j) != 0 for j in range(k)):
        return False, None
    return True, a.shift_down(k)


def poly_eval(a: Polynomial, x: Scalar) -> Fraction:
    """Horner, exact"""
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(a.coeffs):
        acc = acc * x + c
    return acc


def binomial_power(root: Scalar, exponent: int) -> Polynomial:
    """(p + root)^exponent, e.g. (p-1)^e with root=-1"""
    return poly_pow(Polynomial((root, 1)), exponent)
