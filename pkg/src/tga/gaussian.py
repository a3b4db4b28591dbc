"""Exact complex numbers with rational parts, used for tolerance-free checks."""

from __future__ import annotations

import cmath
import math
import random
import re
from fractions import Fraction


_ZERO = Fraction(0)


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, complex) or isinstance(x, float):
            raise TypeError("floating values cannot enter exact arithmetic")
        return NotImplemented

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not (self.im or o.im):
            return GaussianRational(self.re * o.re, _ZERO)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = o.norm2()
        if not d:
            raise ZeroDivisionError("division by zero")
        return self * o.conjugate() * GaussianRational(1 / d)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __eq__(self, other):
        o = GaussianRational.coerce(other) if not isinstance(other, GaussianRational) else other
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        mag = "" if abs(self.im) == 1 else str(abs(self.im))
        if not self.re:
            return f"{'-' if self.im < 0 else ''}{mag}i"
        return f"{self.re}{'+' if self.im > 0 else '-'}{mag}i"


I = GaussianRational(0, 1)


def unit_from_parameter(t: Fraction) -> GaussianRational:
    """Rational point ``((1 - t^2) + 2 t i) / (1 + t^2)`` on the unit circle."""
    t = Fraction(t)
    d = 1 + t * t
    return GaussianRational((1 - t * t) / d, 2 * t / d)


def random_unit(rng: random.Random, exact: bool):
    if exact:
        z = unit_from_parameter(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
        return z * rng.choice([1, -1, I, -I])
    return cmath.exp(2j * math.pi * rng.random())


def sphere_point(u) -> list[Fraction]:
    """Rational point on the unit sphere in ``len(u) + 1`` dimensions (inverse stereographic projection)."""
    u = [Fraction(x) for x in u]
    s = sum(x * x for x in u)
    return [(s - 1) / (s + 1)] + [2 * x / (s + 1) for x in u]


_EXP = re.compile(r"^exp\(\s*2\s*pi\s*i\s*\*\s*(-?\d+)\s*/\s*(\d+)\s*\)$")
_GAUSS = re.compile(r"^([+-]?[\d/]+)?\s*(?:([+-])\s*([\d/]*)\s*\*?\s*i)?$")


def parse_unit(text: str, exact: bool = False):
    """Parse ``"1"``, ``"-1"``, ``"i"``, ``"-i"``, ``"exp(2pi i * p/q)"`` or ``"a+bi"`` with rational ``a, b``.

    ``exp`` forms with ``q`` in ``{1, 2, 4}`` are exact; other denominators
    yield a float unless ``exact`` is requested, which then raises.
    """
    s = text.strip().replace(" ", "")
    m = _EXP.match(text.strip())
    if m:
        p, q = int(m.group(1)), int(m.group(2))
        if q == 0:
            raise ValueError("zero denominator")
        frac = Fraction(p, q) % 1
        quarter = {Fraction(0): 1, Fraction(1, 4): I, Fraction(1, 2): -1, Fraction(3, 4): -I}
        if frac in quarter:
            return GaussianRational.coerce(quarter[frac]) if exact else complex(quarter[frac])
        if exact:
            raise ValueError(f"exp(2 pi i * {frac}) is not a Gaussian rational")
        return cmath.exp(2j * math.pi * float(frac))
    if s in ("i", "+i"):
        z = I
    elif s == "-i":
        z = -I
    else:
        m = _GAUSS.match(s)
        if not m or not s:
            raise ValueError(f"cannot parse unit complex {text!r}")
        re_part = Fraction(m.group(1)) if m.group(1) else Fraction(0)
        im_part = Fraction(0)
        if m.group(2):
            mag = Fraction(m.group(3)) if m.group(3) else Fraction(1)
            im_part = mag if m.group(2) == "+" else -mag
        z = GaussianRational(re_part, im_part)
    if z.norm2() != 1:
        raise ValueError(f"{text!r} does not have modulus 1")
    return z if exact else complex(z)


def format_unit(z) -> str:
    if isinstance(z, GaussianRational):
        if z == I:
            return "i"
        if z == -I:
            return "-i"
        return str(z)
    turn = (cmath.phase(z) / (2 * math.pi)) % 1
    return f"exp(2pi i * {turn!r})"
