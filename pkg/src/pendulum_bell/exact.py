"""Exact arithmetic in the quadratic field Q[sqrt(2)]."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from math import isqrt
from numbers import Rational
from typing import Any, Union

# sqrt(2) to 2**-256, used only for float rendering.
_SQRT2_BITS = 256
_SQRT2_APPROX = Fraction(isqrt(2 << (2 * _SQRT2_BITS)), 1 << _SQRT2_BITS)
_ZERO_Q = Fraction(0)

RationalLike = Union[int, Fraction, str]


def _to_fraction(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Rational, str)):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@total_ordering
class ExactNumber:
    """The number ``a + b*sqrt(2)`` with rational ``a`` and ``b``.

    Equality and ordering are exact. Floats are rejected on construction so that
    nothing inexact leaks in by accident; use ``Fraction(x)`` explicitly if a
    binary float really is meant.
    """

    __slots__ = ("_a", "_b")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0) -> None:
        self._a = _to_fraction(a)
        self._b = _to_fraction(b)

    @classmethod
    def _make(cls, a: Fraction, b: Fraction) -> ExactNumber:
        # trusted constructor for already-normalised Fractions
        obj = object.__new__(cls)
        obj._a = a
        obj._b = b
        return obj

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @classmethod
    def sqrt2(cls) -> ExactNumber:
        return cls(0, 1)

    @classmethod
    def coerce(cls, x: Any) -> ExactNumber:
        if isinstance(x, ExactNumber):
            return x
        return cls._make(_to_fraction(x), _ZERO_Q)

    @property
    def is_rational(self) -> bool:
        return self._b == 0

    def sign(self) -> int:
        """Exact sign (-1, 0, +1)."""
        a, b = self._a, self._b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a**2 with 2*b**2
        lhs, rhs = a * a, 2 * b * b
        if lhs == rhs:  # impossible for b != 0, kept for clarity
            return 0
        return sa if lhs > rhs else sb

    # arithmetic -------------------------------------------------------

    def __add__(self, other: Any) -> ExactNumber:
        try:
            o = ExactNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactNumber._make(self._a + o._a, self._b + o._b)

    __radd__ = __add__

    def __sub__(self, other: Any) -> ExactNumber:
        try:
            o = ExactNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactNumber._make(self._a - o._a, self._b - o._b)

    def __rsub__(self, other: Any) -> ExactNumber:
        try:
            o = ExactNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> ExactNumber:
        try:
            o = ExactNumber.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self._a, self._b, o._a, o._b
        if b == 0 and d == 0:
            return ExactNumber._make(a * c, _ZERO_Q)
        return ExactNumber._make(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> ExactNumber:
        try:
            o = ExactNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other: Any) -> ExactNumber:
        try:
            o = ExactNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.reciprocal()

    def reciprocal(self) -> ExactNumber:
        norm = self._a * self._a - 2 * self._b * self._b
        if norm == 0:
            raise ZeroDivisionError("ExactNumber division by zero")
        return ExactNumber(self._a / norm, -self._b / norm)

    def __neg__(self) -> ExactNumber:
        return ExactNumber._make(-self._a, -self._b)

    def __pos__(self) -> ExactNumber:
        return self

    def __abs__(self) -> ExactNumber:
        return -self if self.sign() < 0 else self

    # comparison -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ExactNumber):
            return self._a == other._a and self._b == other._b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._b == 0 and self._a == other
        return NotImplemented

    def __lt__(self, other: Any) -> bool:
        try:
            o = ExactNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    # conversion -------------------------------------------------------

    def to_fraction_approx(self) -> Fraction:
        return self._a + self._b * _SQRT2_APPROX

    def __float__(self) -> float:
        if self._b == 0:
            return float(self._a)
        return float(self.to_fraction_approx())

    def to_json(self) -> dict[str, int | str]:
        """``{"a": ..., "b": ...}`` with integers kept as JSON ints and other
        rationals written as ``"p/q"`` strings."""
        return {"a": _fraction_to_json(self._a), "b": _fraction_to_json(self._b)}

    @classmethod
    def from_json(cls, obj: Any) -> ExactNumber:
        if isinstance(obj, dict):
            extra = set(obj) - {"a", "b"}
            if extra:
                raise ValueError(f"unexpected keys in exact number: {sorted(extra)}")
            return cls(_json_to_fraction(obj.get("a", 0)), _json_to_fraction(obj.get("b", 0)))
        return cls(_json_to_fraction(obj))

    def __repr__(self) -> str:
        return f"ExactNumber({str(self._a)!r}, {str(self._b)!r})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        if self._a == 0:
            return f"{self._b}*sqrt2"
        sign = "+" if self._b > 0 else "-"
        return f"{self._a} {sign} {abs(self._b)}*sqrt2"


def _fraction_to_json(x: Fraction) -> int | str:
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _json_to_fraction(x: Any) -> Fraction:
    from decimal import Decimal

    if isinstance(x, bool):
        raise ValueError("boolean is not a number")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, float):
        # JSON decoded without Decimal support: take the shortest decimal repr
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise ValueError(f"not a rational number: {x!r}") from exc
    raise ValueError(f"not a rational number: {x!r}")


ZERO = ExactNumber(0)
ONE = ExactNumber(1)
SQRT2 = ExactNumber(0, 1)


def esum(items) -> ExactNumber:
    """Sum of exact numbers (``sum`` with an ExactNumber start)."""
    total_a = _ZERO_Q
    total_b = _ZERO_Q
    for x in items:
        x = ExactNumber.coerce(x)
        if x._a:
            total_a += x._a
        if x._b:
            total_b += x._b
    return ExactNumber._make(total_a, total_b)
