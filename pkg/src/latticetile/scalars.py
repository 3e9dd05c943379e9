"""Exact arithmetic in Q and in a single real quadratic field Q(sqrt(D)).

Every exact quantity in this package is a :class:`QuadScalar`, a number
``a + b*sqrt(D)`` with rational ``a``, ``b`` and a fixed square-free
radicand ``D``.  ``D = 0`` selects pure-rational mode (``b`` must stay 0).
Because sqrt(D) is irrational for D >= 2, the representation is unique and
equality of values is equality of components.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Union

RationalLike = Union[int, Fraction]
ScalarLike = Union["QuadScalar", int, Fraction]


class ScalarError(ValueError):
    """Invalid scalar construction or operation (bad radicand, mixed fields)."""


def is_square_free(value: int) -> bool:
    if value < 0:
        return False
    if value in (0, 1):
        return True
    k = 2
    while k * k <= value:
        if value % (k * k) == 0:
            return False
        k += 1
    return True


def validate_radicand(d: int) -> int:
    if not isinstance(d, int):
        raise ScalarError(f"radicand must be an integer, got {d!r}")
    if d == 1:
        raise ScalarError("radicand 1 is forbidden (sqrt(1) is rational)")
    if d < 0:
        raise ScalarError(f"radicand must be non-negative, got {d}")
    if not is_square_free(d):
        raise ScalarError(f"radicand must be square-free, got {d}")
    return d


def _sqrt_floor_fraction(d: int, precision: int) -> Fraction:
    # floor(sqrt(d) * 2^p) / 2^p, so the result is in [sqrt(d) - 2^-p, sqrt(d)].
    s = isqrt(d << (2 * precision))
    return Fraction(s, 1 << precision)


class QuadScalar:
    """An element a + b*sqrt(d) of Q(sqrt(d)), immutable and hashable."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0, d: int = 0) -> None:
        self._a = Fraction(a)
        self._b = Fraction(b)
        self._d = validate_radicand(d)
        if self._d == 0 and self._b != 0:
            raise ScalarError("pure-rational mode (D=0) forbids a sqrt component")

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def d(self) -> int:
        return self._d

    @property
    def is_rational(self) -> bool:
        return self._b == 0

    @property
    def is_integer(self) -> bool:
        return self._b == 0 and self._a.denominator == 1

    def __repr__(self) -> str:
        return f"QuadScalar({self._a!r}, {self._b!r}, {self._d})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        return f"{self._a}{'+' if self._b >= 0 else ''}{self._b}*sqrt({self._d})"

    def _pair(self, other: ScalarLike):
        """Align both operands into one field; rational values are field-agnostic."""
        if isinstance(other, (int, Fraction)):
            return self, QuadScalar(other, 0, self._d)
        if isinstance(other, QuadScalar):
            if self._d == other._d:
                return self, other
            if self._b != 0 and other._b != 0:
                raise ScalarError(f"mixed radicands {self._d} and {other._d}")
            if self._b == 0 and other._b != 0:
                return QuadScalar(self._a, 0, other._d), other
            return self, QuadScalar(other._a, 0, self._d)
        return None

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and self._a == other
        if isinstance(other, QuadScalar):
            if self._b == 0 and other._b == 0:
                return self._a == other._a
            return self._d == other._d and self._a == other._a and self._b == other._b
        return NotImplemented

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._d))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __neg__(self) -> "QuadScalar":
        return QuadScalar(-self._a, -self._b, self._d)

    def __add__(self, other: ScalarLike) -> "QuadScalar":
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return QuadScalar(x._a + y._a, x._b + y._b, x._d)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "QuadScalar":
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return QuadScalar(x._a - y._a, x._b - y._b, x._d)

    def __rsub__(self, other: ScalarLike) -> "QuadScalar":
        return (-self) + other

    def __mul__(self, other: ScalarLike) -> "QuadScalar":
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return QuadScalar(
            x._a * y._a + x._d * x._b * y._b,
            x._a * y._b + x._b * y._a,
            x._d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self._a, -self._b, self._d)

    def field_norm(self) -> Fraction:
        """a^2 - d*b^2, the product of the value with its conjugate."""
        return self._a * self._a - self._d * self._b * self._b

    def __truediv__(self, other: ScalarLike) -> "QuadScalar":
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        if not y:
            raise ZeroDivisionError("division by zero scalar")
        # Rationalize with the conjugate a - b*sqrt(d).
        n = y.field_norm()
        return QuadScalar(
            (x._a * y._a - x._d * x._b * y._b) / n,
            (x._b * y._a - x._a * y._b) / n,
            x._d,
        )

    def __rtruediv__(self, other: ScalarLike) -> "QuadScalar":
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return y / x

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(d)."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        # Opposite signs: compare a^2 against d*b^2; the larger magnitude wins.
        cmp = self._a * self._a - self._d * self._b * self._b
        if cmp == 0:
            return 0
        return sa if cmp > 0 else sb

    def __lt__(self, other: ScalarLike) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: ScalarLike) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: ScalarLike) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: ScalarLike) -> bool:
        return (self - other).sign() >= 0

    def __abs__(self) -> "QuadScalar":
        return -self if self.sign() < 0 else self

    def approximate(self, precision: int = 53) -> Fraction:
        """A dyadic rational within 2^(-precision+2) * (1 + |value|) of the value.

        The bound follows from |b| * 2^-p <= 2^-p+2 * (1+|x|) once p is padded
        internally; padding doubles until the guarantee holds.
        """
        if precision < 53:
            raise ScalarError("precision must be at least 53 bits")
        if self._b == 0:
            return self._a
        pad = precision + 8
        while True:
            root = _sqrt_floor_fraction(self._d, pad)
            lo = self._a + self._b * (root if self._b > 0 else root + Fraction(1, 1 << pad))
            width = abs(self._b) / (1 << pad)
            mid = lo + width / 2
            if width <= Fraction(1, 1 << (precision - 1)) * (1 + abs(mid)):
                return mid
            pad *= 2

    def to_float(self, precision: int = 53) -> float:
        """Floating approximation; never used inside exact predicates.

        The dyadic approximant meets the 2^(-precision+2)*(1+|x|) bound; the
        returned IEEE double additionally rounds to 53-bit precision.
        """
        return float(self.approximate(max(precision, 53)))

    def __float__(self) -> float:
        return self.to_float(60)

    def floor(self) -> int:
        """Exact floor of the value."""
        if self._b == 0:
            return self._a.numerator // self._a.denominator
        n = int(self.approximate(64))
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def to_json(self) -> Union[str, dict]:
        if self._b == 0:
            return str(self._a)
        return {"a": str(self._a), "b": str(self._b)}


def rational(value: RationalLike, d: int = 0) -> QuadScalar:
    return QuadScalar(Fraction(value), 0, d)


def sqrt_d(d: int, coefficient: RationalLike = 1) -> QuadScalar:
    """The scalar coefficient * sqrt(d)."""
    return QuadScalar(0, Fraction(coefficient), d)


def parse_scalar(text: Union[str, int, dict], d: int) -> QuadScalar:
    """Parse the document form of a scalar: "p/q" or {"a": "p/q", "b": "r/s"}."""
    if isinstance(text, bool):
        raise ScalarError(f"not a scalar literal: {text!r}")
    if isinstance(text, int):
        return QuadScalar(text, 0, d)
    if isinstance(text, str):
        try:
            return QuadScalar(Fraction(text), 0, d)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarError(f"malformed rational literal {text!r}") from exc
    if isinstance(text, dict):
        extra = set(text) - {"a", "b"}
        if extra:
            raise ScalarError(f"unknown scalar fields {sorted(extra)}")
        try:
            a = Fraction(text.get("a", "0"))
            b = Fraction(text.get("b", "0"))
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise ScalarError(f"malformed scalar literal {text!r}") from exc
        if b != 0 and d == 0:
            raise ScalarError("quadratic literal given but document declares D=0")
        return QuadScalar(a, b, d)
    raise ScalarError(f"not a scalar literal: {text!r}")
