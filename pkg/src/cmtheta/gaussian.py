"""Exact Gaussian-rational arithmetic.

Numbers of the form a + b*i with a, b rational, used wherever the boundary
algebra must be exact rather than floating.
"""

from __future__ import annotations

from fractions import Fraction


class GaussianRational:
    """Immutable complex number with Fraction real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *_):
        raise AttributeError("GaussianRational is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, str):
            return parse_gaussian(value)
        if isinstance(value, complex):
            # only exact complex values (integer-valued parts) are accepted
            if value.real != int(value.real) or value.imag != int(value.imag):
                raise ValueError(f"cannot coerce inexact complex {value!r}")
            return cls(int(value.real), int(value.imag))
        raise TypeError(f"cannot coerce {type(value).__name__} to GaussianRational")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        c = self * o.conjugate()
        return GaussianRational(c.re / n, c.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """re**2 + im**2, exact."""
        return self.re * self.re + self.im * self.im

    # -- predicates ----------------------------------------------------

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def is_real(self) -> bool:
        return self.im == 0

    def is_imaginary(self) -> bool:
        return self.re == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    # -- conversion ----------------------------------------------------

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_gaussian(self)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse strings like "3", "-2/3", "i", "1/2+3/4i", "1/2 - 3 i"."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty Gaussian-rational string")
    if not s.endswith("i"):
        return GaussianRational(Fraction(s))
    body = s[:-1]
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut <= 0:
        re_part, im_part = "0", body
    else:
        re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = Fraction(im_part)
    return GaussianRational(Fraction(re_part), im)


def format_gaussian(value: GaussianRational) -> str:
    if value.im == 0:
        return str(value.re)
    if value.im == 1:
        im_str = "i"
    elif value.im == -1:
        im_str = "-i"
    else:
        im_str = f"{value.im}i"
    if value.re == 0:
        return im_str
    sign = "+" if value.im > 0 else ""
    return f"{value.re}{sign}{im_str}"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
