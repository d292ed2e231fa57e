"""Residues of the progression modulo a rational lattice.

For integer bases the residue sequence rho**k mod r is eventually periodic;
for a non-integer rational base rho = p/q the reduced denominators of the
residues grow without bound (they pick up a factor q per step), so no cycle
ever appears.  These are the computational shadows of the quasi-periodicity
dichotomy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Union

from .numeric import GeoBase, Rational


@dataclass
class ResidueTrace:
    base: GeoBase
    modulus: Fraction
    max_exponent: int
    residues: List[Fraction]
    distinct_count: int


@dataclass(frozen=True)
class Cycle:
    preperiod: int
    period: int


@dataclass(frozen=True)
class NoCycle:
    searched: int


CycleReport = Union[Cycle, NoCycle]


def residue(value: Fraction, modulus: Fraction) -> Fraction:
    """value minus the largest lattice point r*Z below it, exactly."""
    if modulus <= 0:
        raise ValueError("modulus must be > 0")
    return value - modulus * (value // modulus)


def residues(base: GeoBase, modulus: Rational, max_exponent: int) -> ResidueTrace:
    modulus = Fraction(modulus)
    if modulus <= 0:
        raise ValueError("modulus must be > 0")
    if max_exponent < 0:
        raise ValueError("max exponent must be >= 0")
    seq = [residue(base.power(k), modulus) for k in range(max_exponent + 1)]
    return ResidueTrace(base, modulus, max_exponent, seq, len(set(seq)))


def detect_cycle(trace: ResidueTrace) -> CycleReport:
    """Smallest period, then smallest preperiod, verified on the full trace.

    Exact equality on rationals; a reported cycle needs at least one
    non-vacuous repetition inside the trace.
    """
    seq = trace.residues
    top = trace.max_exponent
    for period in range(1, top + 1):
        start = 0
        for k in range(top - period, -1, -1):
            if seq[k + period] != seq[k]:
                start = k + 1
                break
        if start <= top - period:
            return Cycle(start, period)
    return NoCycle(top)


def denominator_growth(base: GeoBase, modulus: Rational, max_exponent: int) -> List[int]:
    """Reduced denominators of the residues; rejects integer bases."""
    if base.rho.denominator == 1:
        raise ValueError("denominator growth is defined for non-integer bases only")
    trace = residues(base, modulus, max_exponent)
    return [r.denominator for r in trace.residues]
