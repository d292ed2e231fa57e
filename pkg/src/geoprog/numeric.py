"""Exact rational arithmetic and powers of the progression base.

All quantities in this package are `fractions.Fraction` values; nothing is
ever rounded.  The base of the progression is wrapped in :class:`GeoBase`,
which caches its powers and answers exact membership queries for the set
``E = {rho**k : k >= 0}``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Union

Rational = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    """Parse `p` or `p/q` with the sign on the numerator only."""
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        num = num.strip()
        den = den.strip()
        if den.startswith(("+", "-")):
            raise ValueError(f"sign must be on the numerator: {text!r}")
        try:
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {text!r}") from exc
    try:
        return Fraction(int(s))
    except ValueError as exc:
        raise ValueError(f"bad rational literal {text!r}") from exc


def format_rational(q: Rational) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GeoBase:
    """The progression base rho, a rational > 1."""

    __slots__ = ("rho", "_powers")

    def __init__(self, rho: Rational):
        rho = Fraction(rho)
        if rho <= 1:
            raise ValueError(f"base must be > 1, got {format_rational(rho)}")
        self.rho = rho
        self._powers = [Fraction(1)]

    def __repr__(self) -> str:
        return f"GeoBase({format_rational(self.rho)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GeoBase) and self.rho == other.rho

    def __hash__(self) -> int:
        return hash(("GeoBase", self.rho))

    def power(self, k: int) -> Fraction:
        """rho**k, exactly."""
        if k < 0:
            raise ValueError("exponent must be >= 0")
        powers = self._powers
        while len(powers) <= k:
            powers.append(powers[-1] * self.rho)
        return powers[k]

    def min_exponent_exceeding(self, d: Rational, bound: Rational) -> int:
        """Minimal N >= 0 with rho**N * d > bound.  Requires d, bound > 0."""
        d = Fraction(d)
        bound = Fraction(bound)
        if d <= 0 or bound <= 0:
            raise ValueError("min_exponent_exceeding needs d > 0 and bound > 0")
        n = 0
        value = d
        while value <= bound:
            value *= self.rho
            n += 1
        return n

    def exponent_of(self, q: Rational) -> Optional[int]:
        """Return k with rho**k == q, or None when q is not in E.

        For rho = s/t in lowest terms, q = a/b is in E iff a == s**k and
        b == t**k for one and the same k.
        """
        q = Fraction(q)
        if q <= 0:
            return None
        if q == 1:
            return 0
        if q < 1:
            return None
        s = self.rho.numerator
        t = self.rho.denominator
        a = q.numerator
        b = q.denominator
        if t == 1:
            if b != 1:
                return None
            k = _integer_log(a, s)
            return k
        k = _integer_log(b, t)
        if k is None:
            return None
        return k if s**k == a else None


def _integer_log(value: int, base: int) -> Optional[int]:
    """k with base**k == value, or None.  Requires value >= 1, base >= 2."""
    k = 0
    acc = 1
    while acc < value:
        acc *= base
        k += 1
    return k if acc == value else None
