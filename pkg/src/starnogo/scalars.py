"""Exact arithmetic over the Gaussian rationals Q(i)."""

from __future__ import annotations

import re
from fractions import Fraction

_RATLIKE = (int, Fraction)


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Scalar:
    """A Gaussian rational ``re + im*i`` with exact rational components.

    Values are canonical by construction (``Fraction`` keeps lowest terms and
    a positive denominator), immutable by convention, and hashable, so they
    serve as sparse-map coefficients with structural equality.  No operation
    ever rounds.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, _RATLIKE):
            return cls(value)
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Scalar):
            return Scalar(self.re + other.re, self.im + other.im)
        if isinstance(other, _RATLIKE):
            return Scalar(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Scalar):
            return Scalar(self.re - other.re, self.im - other.im)
        if isinstance(other, _RATLIKE):
            return Scalar(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _RATLIKE):
            return Scalar(other - self.re, -self.im)
        return NotImplemented

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return Scalar(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, _RATLIKE):
            return Scalar(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        n = self.re * self.re + self.im * self.im
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self * other.inverse()
        if isinstance(other, _RATLIKE):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(i)")
            return Scalar(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _RATLIKE):
            return Scalar(other) * self.inverse()
        return NotImplemented

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int) or n < 0:
            raise ValueError("Scalar exponent must be a nonnegative integer")
        out = Scalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    # predicates ----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RATLIKE):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    # formatting ------------------------------------------------------------

    def __str__(self) -> str:
        if not self:
            return "0"
        if self.im == 0:
            return _frac_str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{_frac_str(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        im_str = "i" if mag == 1 else f"{_frac_str(mag)}*i"
        return f"{_frac_str(self.re)}{sign}{im_str}"

    __repr__ = __str__

    def exact(self) -> str:
        """Unambiguous wire format ``a/b+c/d*i`` with explicit denominators."""
        sign = "+" if self.im >= 0 else "-"
        mag = abs(self.im)
        return (
            f"{self.re.numerator}/{self.re.denominator}"
            f"{sign}{mag.numerator}/{mag.denominator}*i"
        )

    _EXACT_RE = re.compile(r"^(-?\d+)/(\d+)([+-])(\d+)/(\d+)\*i$")

    @classmethod
    def from_exact(cls, text: str) -> "Scalar":
        m = cls._EXACT_RE.match(text)
        if m is None:
            raise ValueError(f"not an exact scalar string: {text!r}")
        re_part = Fraction(int(m.group(1)), int(m.group(2)))
        im_part = Fraction(int(m.group(4)), int(m.group(5)))
        if m.group(3) == "-":
            im_part = -im_part
        return cls(re_part, im_part)


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
MINUS_I = Scalar(0, -1)
