"""Bounded elimination of the progression predicate.

Inside a box (-R, R)^n every atom of an E-block splits into a real part
over the free variables and an E-part whose value either lands in a finite
two-sided window (enumerable exactly) or saturates the atom to a constant
over the box.  Branching over the finitely many window values and the
saturated alternatives reduces each cell to realizability queries over
exponent tuples, which esystem_sat answers; realized branches contribute
E-free cells.  The result is an explicit semilinear description.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .logic import (
    And,
    Atom,
    Cell,
    FALSE,
    Formula,
    FragmentError,
    LinearForm,
    Not,
    Or,
    Quant,
    TRUE,
    UndecidedError,
    atom_key,
    canonical_atom,
    cell_to_system,
    collect_e_block,
    conj,
    decide_sentence,
    desugar,
    disj,
    evaluate,
    free_variables,
    is_e_free,
    qe_linear,
    to_dnf,
)
from .numeric import GeoBase, Rational, format_rational
from .progression import Verdict, enumerate_window, esystem_sat


@dataclass(frozen=True)
class Box:
    """The open box (-R, R)^n."""

    n: int
    R: Fraction

    def __post_init__(self):
        object.__setattr__(self, "R", Fraction(self.R))
        if self.n < 0:
            raise ValueError("dimension must be >= 0")
        if self.R <= 0:
            raise ValueError("box radius must be > 0")

    def contains(self, point: Sequence[Rational]) -> bool:
        if len(point) != self.n:
            raise ValueError("point dimension mismatch")
        return all(-self.R < Fraction(p) < self.R for p in point)


@dataclass
class SemilinearSet:
    """Finite union of cells (conjunctions of linear atoms) within a box."""

    variables: Tuple[str, ...]
    box: Box
    cells: Tuple[Cell, ...]

    def contains(self, point: Sequence[Rational]) -> bool:
        if not self.box.contains(point):
            return False
        assignment = dict(zip(self.variables, (Fraction(p) for p in point)))
        return any(all(a.truth(assignment) for a in cell) for cell in self.cells)

    def to_document(self) -> dict:
        return {
            "box": {"n": self.box.n, "R": format_rational(self.box.R)},
            "variables": list(self.variables),
            "cells": [
                [
                    {
                        "coeffs": {
                            v: format_rational(c) for v, c in sorted(a.form.coeffs.items())
                        },
                        "const": format_rational(a.form.const),
                        "rel": a.rel,
                    }
                    for a in cell
                ]
                for cell in self.cells
            ],
        }

    def describe(self) -> str:
        if not self.cells:
            return "(empty set)"
        lines = []
        for i, cell in enumerate(self.cells, start=1):
            if not cell:
                lines.append(f"cell {i}: (whole box)")
            else:
                parts = " and ".join(f"{a.form} {a.rel} 0" for a in cell)
                lines.append(f"cell {i}: {parts}")
        return "\n".join(lines)


@dataclass
class EliminationResult:
    set: SemilinearSet
    status: str  # "exact" | "under_approx"
    diagnostics: List[dict] = field(default_factory=list)

    def to_document(self) -> dict:
        doc = self.set.to_document()
        doc["status"] = self.status
        doc["diagnostics"] = self.diagnostics
        return doc


# ---------------------------------------------------------------------------
# Cell plumbing
# ---------------------------------------------------------------------------


def _box_atoms(variables: Sequence[str], box: Box) -> List[Atom]:
    atoms = []
    for v in variables:
        form = LinearForm.variable(v)
        atoms.append(canonical_atom(Atom(form - LinearForm.constant(box.R), "<")))
        atoms.append(canonical_atom(Atom(-form - LinearForm.constant(box.R), "<")))
    return atoms


def _cell_feasible(cell: Cell, variables: Sequence[str], box: Box) -> bool:
    atoms = list(cell) + _box_atoms(variables, box)
    sentence = conj(list(atoms))
    for v in variables:
        sentence = Quant("exists", v, False, sentence)
    return decide_sentence(sentence)


def _canonical_cells(
    cells: Sequence[Cell], variables: Sequence[str], box: Box
) -> Tuple[Cell, ...]:
    out = []
    seen = set()
    for cell in cells:
        if cell in seen:
            continue
        seen.add(cell)
        if _cell_feasible(cell, variables, box):
            out.append(cell)
    return tuple(sorted(out, key=lambda c: [atom_key(a) for a in c]))


def semilinear_boolean(
    op: str, a: SemilinearSet, b: Optional[SemilinearSet] = None
) -> SemilinearSet:
    """Exact union / intersection / complement relative to the box."""
    if op not in ("union", "intersection", "complement"):
        raise ValueError(f"unknown operation {op!r}")
    if op == "complement":
        if b is not None:
            raise ValueError("complement takes one operand")
        negated = Not(disj([conj(list(c)) for c in a.cells]))
        cells = to_dnf(negated).disjuncts
        return SemilinearSet(
            a.variables, a.box, _canonical_cells(cells, a.variables, a.box)
        )
    if b is None:
        raise ValueError(f"{op} takes two operands")
    if a.box != b.box or a.variables != b.variables:
        raise ValueError("operands must share box and variables")
    if op == "union":
        cells = tuple(a.cells) + tuple(b.cells)
    else:
        merged = []
        for ca, cb in itertools.product(a.cells, b.cells):
            formula = conj(list(ca) + list(cb))
            for cell in to_dnf(formula).disjuncts:
                merged.append(cell)
        cells = tuple(merged)
    return SemilinearSet(a.variables, a.box, _canonical_cells(cells, a.variables, a.box))


# ---------------------------------------------------------------------------
# Block elimination
# ---------------------------------------------------------------------------


def eliminate_bounded(
    f: Formula, box: Box, base: GeoBase, depth_budget: int = 64
) -> EliminationResult:
    """E-free semilinear description of the formula's set within the box.

    Supported fragment: boolean combinations of E-free formulas and blocks
    `exists y1..ym in E. theta` with theta E-free (E(t) atoms and
    forall-in-E blocks are rewritten first).
    """
    variables = tuple(sorted(free_variables(f)))
    if len(variables) != box.n:
        raise ValueError(
            f"formula has {len(variables)} free variables, box has dimension {box.n}"
        )
    g = desugar(f)
    diagnostics: List[dict] = []
    cells = _eliminate(g, variables, box, base, depth_budget, diagnostics)
    out = SemilinearSet(variables, box, _canonical_cells(cells, variables, box))
    status = "exact" if not diagnostics else "under_approx"
    return EliminationResult(out, status, diagnostics)


def _eliminate(
    g: Formula,
    variables: Tuple[str, ...],
    box: Box,
    base: GeoBase,
    depth_budget: int,
    diagnostics: List[dict],
) -> Tuple[Cell, ...]:
    if is_e_free(g):
        return to_dnf(qe_linear(g)).disjuncts
    if isinstance(g, Quant) and g.in_e and g.kind == "exists":
        return _eliminate_block(g, variables, box, base, depth_budget, diagnostics)
    if isinstance(g, Not):
        before = len(diagnostics)
        inner = _eliminate(g.body, variables, box, base, depth_budget, diagnostics)
        if len(diagnostics) != before:
            raise UndecidedError(
                "complement of an under-approximate set cannot be bounded"
            )
        inner_set = SemilinearSet(
            variables, box, _canonical_cells(inner, variables, box)
        )
        return semilinear_boolean("complement", inner_set).cells
    if isinstance(g, (And, Or)):
        op = "intersection" if isinstance(g, And) else "union"
        parts = [
            SemilinearSet(
                variables,
                box,
                _canonical_cells(
                    _eliminate(a, variables, box, base, depth_budget, diagnostics),
                    variables,
                    box,
                ),
            )
            for a in g.args
        ]
        acc = parts[0]
        for nxt in parts[1:]:
            acc = semilinear_boolean(op, acc, nxt)
        return acc.cells
    if isinstance(g, Quant):
        raise FragmentError(
            "real quantifier scoping over an E-quantifier is unsupported"
        )
    raise FragmentError(f"unsupported formula node {type(g).__name__}")


def _eliminate_block(
    g: Quant,
    variables: Tuple[str, ...],
    box: Box,
    base: GeoBase,
    depth_budget: int,
    diagnostics: List[dict],
) -> Tuple[Cell, ...]:
    names, matrix = collect_e_block(g)
    if not is_e_free(matrix):
        raise FragmentError("E-block matrix must be E-free")
    qf = qe_linear(matrix)
    out: List[Cell] = []
    for cell in to_dnf(qf).disjuncts:
        out.extend(
            _eliminate_cell(cell, names, variables, box, base, depth_budget, diagnostics)
        )
    return tuple(out)


def _eliminate_cell(
    cell: Cell,
    names: List[str],
    variables: Tuple[str, ...],
    box: Box,
    base: GeoBase,
    depth_budget: int,
    diagnostics: List[dict],
) -> List[Cell]:
    """Branch one DNF cell of the block matrix over its E-part statuses."""
    name_set = set(names)
    real_atoms: List[Atom] = []
    branch_lists: List[List[Tuple[Optional[Atom], Tuple[Fraction, ...], str, Fraction]]] = []
    for atom in cell:
        ecoeffs = tuple(atom.form.coeffs.get(v, Fraction(0)) for v in names)
        if all(c == 0 for c in ecoeffs):
            real_atoms.append(atom)
            continue
        real_form = LinearForm(
            {v: c for v, c in atom.form.coeffs.items() if v not in name_set},
            atom.form.const,
        )
        spread = box.R * sum(abs(c) for c in real_form.coeffs.values())
        lo = real_form.const - spread  # inf over the closed box
        hi = real_form.const + spread  # sup over the closed box
        # The atom reads real_form(x) + s REL 0 with s the E-part value,
        # so it can vary over the box only when s lies in [-hi, -lo].
        options: List[Tuple[Optional[Atom], Tuple[Fraction, ...], str, Fraction]] = []
        reach = max(abs(lo), abs(hi)) + 1
        window = enumerate_window(base, ecoeffs, reach)
        for s in window.values:
            if not (-hi <= s <= -lo):
                continue
            residual = canonical_atom(
                Atom(real_form + LinearForm.constant(s), atom.rel)
            )
            if residual == FALSE:
                continue
            options.append(
                (None if residual == TRUE else residual, ecoeffs, "=", s)
            )
        if atom.rel == "<":
            # s strictly below -hi makes the atom true everywhere in the box.
            options.append((None, ecoeffs, "<", -hi))
        if not options:
            return []
        branch_lists.append(options)
    from .progression import Constraint, EConstraintSystem

    out: List[Cell] = []
    for combo in itertools.product(*branch_lists):
        constraints = [Constraint(ec, rel, bound) for (_, ec, rel, bound) in combo]
        system = EConstraintSystem(len(names), constraints)
        result = esystem_sat(base, system, depth_budget)
        if result.verdict is Verdict.SAT:
            atoms = list(real_atoms) + [r for (r, _, _, _) in combo if r is not None]
            simplified = _simplify(atoms)
            if simplified is not None:
                out.append(simplified)
        elif result.verdict is Verdict.UNKNOWN:
            diagnostics.append(
                {
                    "cell": [f"{a.form} {a.rel} 0" for a in cell],
                    "system": [str(c) for c in constraints],
                    "certificate": result.certificate,
                }
            )
    return out


def _simplify(atoms: List[Atom]) -> Optional[Cell]:
    from .logic import _simplify_cell

    return _simplify_cell(atoms)


def decide_membership(
    f: Formula,
    point: Sequence[Rational],
    base: GeoBase,
    depth_budget: int = 64,
) -> bool:
    """Pointwise truth of the formula, independent of eliminate_bounded."""
    variables = tuple(sorted(free_variables(f)))
    if len(point) != len(variables):
        raise ValueError("point dimension mismatch")
    assignment = dict(zip(variables, (Fraction(p) for p in point)))
    return evaluate(f, assignment, base, depth_budget)
