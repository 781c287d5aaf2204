"""Exact arithmetic in Q(sqrt 7) and rational-endpoint interval arithmetic.

Rationals are :class:`fractions.Fraction`.  :class:`SurdNumber` holds
``rat + surd_coeff * sqrt(7)`` exactly and decides signs without any
approximation.  :class:`RationalInterval` is a closed interval with rational
endpoints; every operation returns an enclosure of the exact image.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

Number = Union[int, Fraction, "SurdNumber"]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and decimal strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, SurdNumber) and x.surd_coeff == 0:
        return x.rat
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def render_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Q(sqrt 7)
# ---------------------------------------------------------------------------


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _surd_sign(p: Fraction, q: Fraction) -> int:
    sp, sq = _sign(p), _sign(q)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: compare p^2 against 7 q^2
    d = p * p - 7 * q * q
    return sp if d > 0 else sq


class SurdNumber:
    """The real number ``rat + surd_coeff * sqrt(7)``, immutable."""

    __slots__ = ("rat", "surd_coeff")

    def __init__(self, rat=0, surd_coeff=0):
        object.__setattr__(self, "rat", as_fraction(rat))
        object.__setattr__(self, "surd_coeff", as_fraction(surd_coeff))

    def __setattr__(self, name, value):
        raise AttributeError("SurdNumber is immutable")

    def __reduce__(self):
        return (SurdNumber, (self.rat, self.surd_coeff))

    @staticmethod
    def lift(x) -> "SurdNumber":
        if isinstance(x, SurdNumber):
            return x
        return SurdNumber(as_fraction(x), 0)

    @property
    def is_rational(self) -> bool:
        return self.surd_coeff == 0

    def conjugate(self) -> "SurdNumber":
        return SurdNumber(self.rat, -self.surd_coeff)

    def norm(self) -> Fraction:
        return self.rat * self.rat - 7 * self.surd_coeff * self.surd_coeff

    def sign(self) -> int:
        return _surd_sign(self.rat, self.surd_coeff)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, SurdNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return SurdNumber(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SurdNumber(self.rat + o.rat, self.surd_coeff + o.surd_coeff)

    __radd__ = __add__

    def __neg__(self):
        return SurdNumber(-self.rat, -self.surd_coeff)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SurdNumber(self.rat - o.rat, self.surd_coeff - o.surd_coeff)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SurdNumber(self.rat * other, self.surd_coeff * other)
        if not isinstance(other, SurdNumber):
            return NotImplemented
        p, q, r, s = self.rat, self.surd_coeff, other.rat, other.surd_coeff
        if s == 0:
            return SurdNumber(p * r, q * r)
        if q == 0:
            return SurdNumber(p * r, p * s)
        return SurdNumber(p * r + 7 * q * s, p * s + q * r)

    __rmul__ = __mul__

    def inverse(self) -> "SurdNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt7)")
        return SurdNumber(self.rat / n, -self.surd_coeff / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.surd_coeff == 0:
            if o.rat == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt7)")
            return SurdNumber(self.rat / o.rat, self.surd_coeff / o.rat)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = SurdNumber(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # comparisons ----------------------------------------------------------
    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        return _surd_sign(self.rat - o.rat, self.surd_coeff - o.surd_coeff)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.rat == o.rat and self.surd_coeff == o.surd_coeff

    def __hash__(self):
        if self.surd_coeff == 0:
            return hash(self.rat)
        return hash((self.rat, self.surd_coeff))

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __bool__(self):
        return self.rat != 0 or self.surd_coeff != 0

    # conversions ----------------------------------------------------------
    def __float__(self):
        if self.surd_coeff == 0:
            return float(self.rat)
        if self.sign() == 0:
            return 0.0
        bits = 64
        while True:
            iv = enclose_surd(self, Fraction(1, 2**bits))
            # relative accuracy well below double precision
            if iv.lo > 0 or iv.hi < 0:
                mag = min(abs(iv.lo), abs(iv.hi))
                if (iv.hi - iv.lo) <= mag / 2**60:
                    return float(iv.midpoint())
            bits *= 2

    def __str__(self):
        return render_surd(self)

    def __repr__(self):
        return f"SurdNumber({render_surd(self)!r})"


def surd_sign(x) -> int:
    """Exact sign (-1, 0, +1) of ``p + q*sqrt7``."""
    return SurdNumber.lift(x).sign()


def render_surd(x: SurdNumber) -> str:
    """Render as ``"p + q*sqrt7"`` with rationals written ``num/den``."""
    x = SurdNumber.lift(x)
    p, q = x.rat, x.surd_coeff
    if q < 0:
        return f"{render_rational(p)} - {render_rational(-q)}*sqrt7"
    return f"{render_rational(p)} + {render_rational(q)}*sqrt7"


_SURD_RE = re.compile(
    r"^\s*(?P<p>[+-]?\d+(?:\.\d+)?(?:/\d+)?)\s*"
    r"(?:(?P<op>[+-])\s*(?P<q>\d+(?:\.\d+)?(?:/\d+)?)\s*\*\s*sqrt7)?\s*$"
)


def parse_surd(text: str) -> SurdNumber:
    """Inverse of :func:`render_surd` (also accepts a bare rational)."""
    m = _SURD_RE.match(text)
    if not m:
        raise ValueError(f"not a surd literal: {text!r}")
    p = Fraction(m.group("p"))
    q = Fraction(m.group("q")) if m.group("q") else Fraction(0)
    if m.group("op") == "-":
        q = -q
    return SurdNumber(p, q)


SQRT7 = SurdNumber(0, 1)
BETA2 = SurdNumber(Fraction(3, 4), Fraction(-1, 4))  # (3 - sqrt7)/4
X0 = SurdNumber(Fraction(1, 6), Fraction(1, 6))  # (1 + sqrt7)/6


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


def round_down(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(math.floor(x * scale), scale)


def round_up(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(math.ceil(x * scale), scale)


@dataclass(frozen=True, slots=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> "RationalInterval":
        x = as_fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, SurdNumber):
            return x >= self.lo and x <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def round_out(self, bits: int) -> "RationalInterval":
        """Outward-round endpoints to denominator ``2**bits`` (still an enclosure)."""
        return RationalInterval(round_down(self.lo, bits), round_up(self.hi, bits))

    def split(self) -> tuple["RationalInterval", "RationalInterval"]:
        m = self.midpoint()
        return RationalInterval(self.lo, m), RationalInterval(m, self.hi)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = to_interval(other)
        if o is None:
            return NotImplemented
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = to_interval(other)
        if o is None:
            return NotImplemented
        return RationalInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        o = to_interval(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = to_interval(other)
        if o is None:
            return NotImplemented
        if o.lo == o.hi:
            c = o.lo
            return RationalInterval(self.lo * c, self.hi * c) if c >= 0 else RationalInterval(self.hi * c, self.lo * c)
        if self.lo >= 0 and o.lo >= 0:
            return RationalInterval(self.lo * o.lo, self.hi * o.hi)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = to_interval(other)
        if o is None:
            return NotImplemented
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * RationalInterval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        o = to_interval(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 0:
            return RationalInterval(1, 1)
        lo_n, hi_n = self.lo**n, self.hi**n
        if n % 2 == 1 or self.lo >= 0:
            return RationalInterval(lo_n, hi_n)
        if self.hi <= 0:
            return RationalInterval(hi_n, lo_n)
        return RationalInterval(Fraction(0), max(lo_n, hi_n))

    def square(self) -> "RationalInterval":
        return self**2

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(Fraction(0), max(-self.lo, self.hi))

    def min(self, other) -> "RationalInterval":
        o = to_interval(other)
        return RationalInterval(min(self.lo, o.lo), min(self.hi, o.hi))

    def max(self, other) -> "RationalInterval":
        o = to_interval(other)
        return RationalInterval(max(self.lo, o.lo), max(self.hi, o.hi))

    def hull(self, other) -> "RationalInterval":
        o = to_interval(other)
        return RationalInterval(min(self.lo, o.lo), max(self.hi, o.hi))

    def __str__(self):
        return f"[{render_rational(self.lo)}, {render_rational(self.hi)}]"


# default precision for enclosing surd constants inside interval expressions
CONST_BITS = 100


def to_interval(x, bits: int = CONST_BITS) -> RationalInterval | None:
    if isinstance(x, RationalInterval):
        return x
    if isinstance(x, SurdNumber):
        return enclose_surd(x, Fraction(1, 1 << bits))
    if isinstance(x, (int, Fraction)):
        return RationalInterval.point(x)
    return None


@lru_cache(maxsize=64)
def sqrt7_enclosure(bits: int) -> RationalInterval:
    """Dyadic enclosure of sqrt(7) of width at most ``2**-bits``.

    Interval Newton on ``x**2 - 7`` from ``[2, 3]``; a step that fails to
    halve the width is replaced by a bisection step.
    """
    lo, hi = Fraction(2), Fraction(3)
    target = Fraction(1, 1 << bits)
    work = bits + 8
    while hi - lo > target:
        width = hi - lo
        m = round_down((lo + hi) / 2, work)
        f = m * m - 7
        if f >= 0:
            n_lo, n_hi = m - f / (2 * lo), m - f / (2 * hi)
        else:
            n_lo, n_hi = m - f / (2 * hi), m - f / (2 * lo)
        new_lo = max(lo, round_down(n_lo, work))
        new_hi = min(hi, round_up(n_hi, work))
        if new_hi - new_lo > width / 2:
            mid = (lo + hi) / 2
            if mid * mid <= 7:
                new_lo, new_hi = mid, hi
            else:
                new_lo, new_hi = lo, mid
        lo, hi = new_lo, new_hi
    assert lo * lo <= 7 <= hi * hi
    return RationalInterval(lo, hi)


def enclose_surd(x, max_width) -> RationalInterval:
    """Rational interval containing ``x`` with width at most ``max_width``."""
    max_width = as_fraction(max_width)
    if max_width <= 0:
        raise ValueError("max_width must be positive")
    x = SurdNumber.lift(x)
    p, q = x.rat, x.surd_coeff
    if q == 0:
        return RationalInterval(p, p)
    need = abs(q) / max_width
    bits = max(1, math.ceil(math.log2(need.numerator) - math.log2(need.denominator)) + 1)
    while Fraction(1, 1 << bits) * abs(q) > max_width:
        bits += 1
    s = sqrt7_enclosure(bits)
    if q > 0:
        return RationalInterval(p + q * s.lo, p + q * s.hi)
    return RationalInterval(p + q * s.hi, p + q * s.lo)


@dataclass(frozen=True)
class SurdEnclosure:
    target: SurdNumber
    enclosure: RationalInterval
    precision: Fraction

    @classmethod
    def of(cls, target, precision) -> "SurdEnclosure":
        precision = as_fraction(precision)
        return cls(SurdNumber.lift(target), enclose_surd(target, precision), precision)

    def refine(self, factor: int = 2) -> "SurdEnclosure":
        return SurdEnclosure.of(self.target, self.precision / factor)
