"""Deliberately naive brute-force references.

Everything here enumerates exponent tuples up to an explicit depth with no
pruning, so its correctness is self-evident; the fast engines are tested
against these functions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Tuple

from .logic import (
    And,
    Atom,
    EAtom,
    Formula,
    FragmentError,
    LinearForm,
    Not,
    Or,
    Quant,
    decide_sentence,
    fold_constant,
    is_e_free,
    is_quantifier_free,
    substitute,
)
from .numeric import GeoBase, Rational
from .progression import EConstraintSystem


def brute_window(
    base: GeoBase, coeffs: Sequence[Rational], radius: Rational, depth: int
) -> Tuple[Fraction, ...]:
    """{sum a_j rho**k_j : 0 <= k_j <= depth} inside (-R, R), by full enumeration."""
    radius = Fraction(radius)
    if radius <= 0:
        raise ValueError("radius must be > 0")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    coeffs = [Fraction(c) for c in coeffs]
    powers = [base.power(k) for k in range(depth + 1)]
    values = set()

    def descend(i: int, acc: Fraction) -> None:
        if i == len(coeffs):
            if -radius < acc < radius:
                values.add(acc)
            return
        a = coeffs[i]
        if a == 0:
            descend(i + 1, acc)
            return
        for p in powers:
            descend(i + 1, acc + a * p)

    descend(0, Fraction(0))
    return tuple(sorted(values))


def brute_esat(
    base: GeoBase, system: EConstraintSystem, depth: int
) -> Optional[Tuple[int, ...]]:
    """Lexicographically least witness with components <= depth, or None."""
    for candidate in itertools.product(range(depth + 1), repeat=system.m):
        if system.evaluate(base, candidate):
            return candidate
    return None


def brute_member(
    f: Formula,
    point: Sequence[Rational],
    base: GeoBase,
    depth: int,
) -> bool:
    """Pointwise truth with E-quantifiers searched exhaustively to the depth.

    Existential E-blocks are exact once the depth dominates the relevant
    window bounds; universal E-blocks are checked over the same bounded
    range only.  Real quantifiers are delegated to linear QE.
    """
    from .logic import free_variables

    variables = tuple(sorted(free_variables(f)))
    if len(point) != len(variables):
        raise ValueError("point dimension mismatch")
    assignment = dict(zip(variables, (Fraction(p) for p in point)))
    return _truth(substitute(f, assignment), base, depth)


def _truth(g: Formula, base: GeoBase, depth: int) -> bool:
    if isinstance(g, Atom):
        return fold_constant(g)
    if isinstance(g, EAtom):
        if not g.term.is_constant():
            raise FragmentError("E-atom under a real quantifier is unsupported")
        return base.exponent_of(g.term.const) is not None
    if isinstance(g, Not):
        return not _truth(g.body, base, depth)
    if isinstance(g, And):
        return all(_truth(a, base, depth) for a in g.args)
    if isinstance(g, Or):
        return any(_truth(a, base, depth) for a in g.args)
    if isinstance(g, Quant):
        if g.in_e:
            values = (base.power(k) for k in range(depth + 1))
            probes = (
                _truth(substitute(g.body, {g.var: v}), base, depth) for v in values
            )
            return any(probes) if g.kind == "exists" else all(probes)
        if not is_e_free(g):
            raise FragmentError(
                "real quantifier scoping over an E-quantifier is unsupported"
            )
        return decide_sentence(g)
    raise TypeError(f"not a formula: {g!r}")
