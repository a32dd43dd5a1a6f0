"""Exact roots of polynomials of degree at most two with rational coefficients.

Rational roots come back as Fractions. Irrational roots are kept symbolically
as `QuadraticRoot` (the normalized integer polynomial plus a branch sign), so
they compare exactly against rationals and can be isolated to any width.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import List, Optional, Tuple

ISOLATION_WIDTH = Fraction(1, 10 ** 12)


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _primitive(a: Fraction, b: Fraction, c: Fraction) -> Tuple[int, int, int]:
    den = 1
    for v in (a, b, c):
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in (a, b, c)]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    if ints[0] < 0:
        ints = [-v for v in ints]
    return ints[0], ints[1], ints[2]


@dataclass(frozen=True)
class QuadraticRoot:
    """The root ``(-b + sign*sqrt(b^2 - 4ac)) / (2a)`` of a primitive integer quadratic, a > 0."""

    a: int
    b: int
    c: int
    sign: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def cmp(self, q: Fraction) -> int:
        """Sign of (root - q); never zero since the root is irrational."""
        m = self.b + 2 * self.a * q
        d = self.discriminant
        if self.sign > 0:
            return 1 if m < 0 or m * m < d else -1
        return -1 if m >= 0 or m * m < d else 1

    def __lt__(self, other):
        if isinstance(other, QuadraticRoot):
            if self == other:
                return False
            width = Fraction(1, 1000)
            while True:
                (a_lo, a_hi), (b_lo, b_hi) = self.isolate(width), other.isolate(width)
                if a_hi <= b_lo or b_hi <= a_lo:
                    return a_hi <= b_lo
                width /= 1000
        return self.cmp(Fraction(other)) < 0

    def __gt__(self, other):
        if isinstance(other, QuadraticRoot):
            return other < self
        return self.cmp(Fraction(other)) > 0

    def isolate(self, width: Fraction = ISOLATION_WIDTH) -> Tuple[Fraction, Fraction]:
        """An interval (lo, hi) with lo < root < hi and hi - lo < width."""
        # Seed the bracket from the integer square root of the discriminant.
        s = isqrt(self.discriminant)
        if self.sign > 0:
            lo = Fraction(-self.b + s, 2 * self.a)
            hi = Fraction(-self.b + s + 1, 2 * self.a)
        else:
            lo = Fraction(-self.b - s - 1, 2 * self.a)
            hi = Fraction(-self.b - s, 2 * self.a)
        while hi - lo >= width:
            mid = (lo + hi) / 2
            if self.cmp(mid) > 0:
                lo = mid
            else:
                hi = mid
        return lo, hi

    def approx(self) -> float:
        lo, hi = self.isolate()
        return float((lo + hi) / 2)

    def within(self, lo: Optional[Fraction], hi: Optional[Fraction],
               lo_closed: bool = True, hi_closed: bool = True) -> bool:
        # Endpoints are rational, so openness never matters for an irrational root.
        return (lo is None or self.cmp(lo) > 0) and (hi is None or self.cmp(hi) < 0)

    def __str__(self) -> str:
        op = "+" if self.sign > 0 else "-"
        return f"({-self.b} {op} sqrt({self.discriminant}))/{2 * self.a}"


@dataclass
class PolySolution:
    rational: List[Fraction]
    irrational: List[QuadraticRoot]
    identically_zero: bool = False


def solve_poly2(a, b, c) -> PolySolution:
    """Real roots of ``a x^2 + b x + c = 0`` (coefficients rational)."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0:
        if b == 0:
            return PolySolution([], [], identically_zero=(c == 0))
        return PolySolution([-c / b], [])
    disc = b * b - 4 * a * c
    if disc < 0:
        return PolySolution([], [])
    r = rational_sqrt(disc)
    if r is not None:
        roots = sorted({(-b - r) / (2 * a), (-b + r) / (2 * a)})
        return PolySolution(roots, [])
    pa, pb, pc = _primitive(a, b, c)
    return PolySolution([], [QuadraticRoot(pa, pb, pc, -1), QuadraticRoot(pa, pb, pc, 1)])
