"""Formula AST over {<, =, +, 0, 1, scalar multiples, E} and linear QE.

Atoms are kept in the canonical shape ``form REL 0`` with REL one of
``=`` and ``<``; the relations <=, >, >=, != are parser sugar.  Negation is
resolved through the order dichotomy (not(t < 0) becomes t = 0 or -t < 0),
so normal forms never contain negated atoms.

``qe_linear`` eliminates real quantifiers from E-free formulas with an
innermost loop: per DNF cell, substitute an equality when one mentions the
variable, otherwise cross-multiply strict bounds (Fourier-Motzkin); the
order is dense without endpoints, so an unconstrained variable vanishes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .numeric import GeoBase, Rational, format_rational
from .progression import Constraint, EConstraintSystem, Verdict, esystem_sat


class UndecidedError(Exception):
    """Raised when an E-quantifier block cannot be decided."""


class FragmentError(Exception):
    """Raised on formulas outside the supported quantifier fragment."""


# ---------------------------------------------------------------------------
# Linear forms
# ---------------------------------------------------------------------------


class LinearForm:
    """Rational-coefficient combination of named variables plus a constant."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs: Optional[Mapping[str, Rational]] = None, const: Rational = 0):
        clean: Dict[str, Fraction] = {}
        if coeffs:
            for var, c in coeffs.items():
                c = Fraction(c)
                if c != 0:
                    clean[var] = c
        self.coeffs = clean
        self.const = Fraction(const)

    @staticmethod
    def variable(name: str) -> "LinearForm":
        return LinearForm({name: 1})

    @staticmethod
    def constant(value: Rational) -> "LinearForm":
        return LinearForm({}, value)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        coeffs = dict(self.coeffs)
        for var, c in other.coeffs.items():
            coeffs[var] = coeffs.get(var, Fraction(0)) + c
        return LinearForm(coeffs, self.const + other.const)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def __neg__(self) -> "LinearForm":
        return self.scale(-1)

    def scale(self, factor: Rational) -> "LinearForm":
        factor = Fraction(factor)
        return LinearForm(
            {v: c * factor for v, c in self.coeffs.items()}, self.const * factor
        )

    def substitute(self, var: str, replacement: "LinearForm") -> "LinearForm":
        if var not in self.coeffs:
            return self
        c = self.coeffs[var]
        rest = LinearForm({v: k for v, k in self.coeffs.items() if v != var}, self.const)
        return rest + replacement.scale(c)

    def evaluate(self, assignment: Mapping[str, Rational]) -> Fraction:
        total = self.const
        for var, c in self.coeffs.items():
            total += c * Fraction(assignment[var])
        return total

    def restrict(self, variables: Iterable[str]) -> "LinearForm":
        keep = set(variables)
        return LinearForm({v: c for v, c in self.coeffs.items() if v in keep}, 0)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted(self.coeffs))

    def is_constant(self) -> bool:
        return not self.coeffs

    def key(self):
        return (tuple(sorted(self.coeffs.items())), self.const)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearForm) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"LinearForm({self})"

    def __str__(self) -> str:
        parts = []
        for var in sorted(self.coeffs):
            c = self.coeffs[var]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            item = var if mag == 1 else f"{format_rational(mag)}*{var}"
            parts.append((sign, item))
        if self.const != 0 or not parts:
            sign = "-" if self.const < 0 else "+"
            parts.append((sign, format_rational(abs(self.const))))
        first_sign, first = parts[0]
        text = first if first_sign == "+" else f"-{first}"
        for sign, item in parts[1:]:
            text += f" {sign} {item}"
        return text


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    """form REL 0, with REL in {"=", "<"}."""

    form: LinearForm
    rel: str

    def __post_init__(self):
        if self.rel not in ("=", "<"):
            raise ValueError(f"atom relation must be = or <, got {self.rel!r}")

    def truth(self, assignment: Mapping[str, Rational]) -> bool:
        value = self.form.evaluate(assignment)
        return value == 0 if self.rel == "=" else value < 0


@dataclass(frozen=True)
class EAtom(Formula):
    term: LinearForm


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Quant(Formula):
    kind: str  # "exists" | "forall"
    var: str
    in_e: bool
    body: Formula

    def __post_init__(self):
        if self.kind not in ("exists", "forall"):
            raise ValueError(f"bad quantifier {self.kind!r}")


TRUE = Atom(LinearForm.constant(0), "=")
FALSE = Atom(LinearForm.constant(1), "=")


def conj(args: Sequence[Formula]) -> Formula:
    args = tuple(a for a in args if a != TRUE)
    if any(a == FALSE for a in args):
        return FALSE
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else And(args)


def disj(args: Sequence[Formula]) -> Formula:
    args = tuple(a for a in args if a != FALSE)
    if any(a == TRUE for a in args):
        return TRUE
    if not args:
        return FALSE
    return args[0] if len(args) == 1 else Or(args)


def free_variables(f: Formula) -> set:
    if isinstance(f, Atom):
        return set(f.form.coeffs)
    if isinstance(f, EAtom):
        return set(f.term.coeffs)
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or)):
        out = set()
        for a in f.args:
            out |= free_variables(a)
        return out
    if isinstance(f, Quant):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def is_e_free(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, EAtom):
        return False
    if isinstance(f, Not):
        return is_e_free(f.body)
    if isinstance(f, (And, Or)):
        return all(is_e_free(a) for a in f.args)
    if isinstance(f, Quant):
        return not f.in_e and is_e_free(f.body)
    raise TypeError(f"not a formula: {f!r}")


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Atom, EAtom)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    return False


def substitute(f: Formula, assignment: Mapping[str, Rational]) -> Formula:
    """Replace free variables by rational constants."""
    if isinstance(f, Atom):
        form = f.form
        for var in list(form.coeffs):
            if var in assignment:
                form = form.substitute(var, LinearForm.constant(assignment[var]))
        return canonical_atom(Atom(form, f.rel))
    if isinstance(f, EAtom):
        term = f.term
        for var in list(term.coeffs):
            if var in assignment:
                term = term.substitute(var, LinearForm.constant(assignment[var]))
        return EAtom(term)
    if isinstance(f, Not):
        return Not(substitute(f.body, assignment))
    if isinstance(f, And):
        return And(tuple(substitute(a, assignment) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(substitute(a, assignment) for a in f.args))
    if isinstance(f, Quant):
        inner = {k: v for k, v in assignment.items() if k != f.var}
        return Quant(f.kind, f.var, f.in_e, substitute(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Canonical atoms, NNF, DNF
# ---------------------------------------------------------------------------


def canonical_atom(a: Atom) -> Atom:
    """Fold constants; sign-normalize equalities on the leading coefficient."""
    if a.form.is_constant():
        if a.rel == "=":
            return TRUE if a.form.const == 0 else FALSE
        return TRUE if a.form.const < 0 else FALSE
    if a.rel == "=":
        lead = min(a.form.coeffs)
        if a.form.coeffs[lead] < 0:
            return Atom(-a.form, "=")
    return a


def negate_atom(a: Atom) -> Formula:
    """Resolve negation through the order: trichotomy on the form's value."""
    a = canonical_atom(a)
    if a == TRUE:
        return FALSE
    if a == FALSE:
        return TRUE
    if a.rel == "<":
        return disj([canonical_atom(Atom(a.form, "=")), canonical_atom(Atom(-a.form, "<"))])
    return disj([canonical_atom(Atom(a.form, "<")), canonical_atom(Atom(-a.form, "<"))])


def _nnf(f: Formula, positive: bool) -> Formula:
    if isinstance(f, Atom):
        return canonical_atom(f) if positive else negate_atom(f)
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, And):
        parts = tuple(_nnf(a, positive) for a in f.args)
        return conj(parts) if positive else disj(parts)
    if isinstance(f, Or):
        parts = tuple(_nnf(a, positive) for a in f.args)
        return disj(parts) if positive else conj(parts)
    raise FragmentError("normal forms require a quantifier-free, E-free formula")


Cell = Tuple[Atom, ...]


@dataclass
class CellSystem:
    """Disjunctive normal form: a union of conjunctions of atoms."""

    disjuncts: Tuple[Cell, ...]

    def truth(self, assignment: Mapping[str, Rational]) -> bool:
        return any(all(a.truth(assignment) for a in cell) for cell in self.disjuncts)

    def to_formula(self) -> Formula:
        return disj([conj(list(cell)) for cell in self.disjuncts])


def atom_key(a: Atom):
    return (a.rel, tuple(sorted(a.form.coeffs.items())), a.form.const)


def _simplify_cell(atoms: Iterable[Atom]) -> Optional[Cell]:
    out = []
    seen = set()
    for a in atoms:
        a = canonical_atom(a)
        if a == TRUE:
            continue
        if a == FALSE:
            return None
        k = atom_key(a)
        if k not in seen:
            seen.add(k)
            out.append(a)
    return tuple(sorted(out, key=atom_key))


def to_dnf(f: Formula) -> CellSystem:
    """DNF of a quantifier-free, E-free formula."""
    if not is_e_free(f):
        raise FragmentError("to_dnf rejects E-bearing formulas")
    if not is_quantifier_free(f):
        raise FragmentError("to_dnf rejects quantified formulas")
    g = _nnf(f, True)
    cells: List[Cell] = []
    seen = set()
    for cell in _dnf_cells(g):
        simplified = _simplify_cell(cell)
        if simplified is None:
            continue
        if simplified not in seen:
            seen.add(simplified)
            cells.append(simplified)
    if any(len(c) == 0 for c in cells):
        cells = [()]
    return CellSystem(tuple(cells))


def _dnf_cells(f: Formula) -> List[List[Atom]]:
    if isinstance(f, Atom):
        return [[f]]
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(_dnf_cells(a))
        return out
    if isinstance(f, And):
        pools = [_dnf_cells(a) for a in f.args]
        return [sum(combo, []) for combo in itertools.product(*pools)]
    raise FragmentError("unexpected node in NNF")


# ---------------------------------------------------------------------------
# Quantifier elimination for the E-free linear theory
# ---------------------------------------------------------------------------


def qe_linear(f: Formula) -> Formula:
    """Equivalent quantifier-free formula; rejects E-bearing input."""
    if not is_e_free(f):
        raise FragmentError("qe_linear rejects E-bearing formulas")
    return _qe(f)


def _qe(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return canonical_atom(f)
    if isinstance(f, Not):
        return Not(_qe(f.body))
    if isinstance(f, And):
        return conj([_qe(a) for a in f.args])
    if isinstance(f, Or):
        return disj([_qe(a) for a in f.args])
    if isinstance(f, Quant):
        body = _qe(f.body)
        if f.kind == "forall":
            return _dnf_formula(Not(_exists(f.var, Not(body))))
        return _exists(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


def _dnf_formula(f: Formula) -> Formula:
    return to_dnf(f).to_formula()


def _exists(var: str, body: Formula) -> Formula:
    cells = to_dnf(body).disjuncts
    out: List[Formula] = []
    for cell in cells:
        reduced = _eliminate_from_cell(var, cell)
        if reduced is not None:
            out.append(conj(list(reduced)))
    return disj(out)


def _eliminate_from_cell(var: str, cell: Cell) -> Optional[Cell]:
    with_var = [a for a in cell if var in a.form.coeffs]
    rest = [a for a in cell if var not in a.form.coeffs]
    equality = next((a for a in with_var if a.rel == "="), None)
    if equality is not None:
        c = equality.form.coeffs[var]
        remainder = LinearForm(
            {v: k for v, k in equality.form.coeffs.items() if v != var},
            equality.form.const,
        )
        solution = remainder.scale(Fraction(-1) / c)
        new_atoms = list(rest)
        for a in with_var:
            if a is equality:
                continue
            new_atoms.append(Atom(a.form.substitute(var, solution), a.rel))
        return _simplify_cell(new_atoms)
    uppers: List[LinearForm] = []  # var < u
    lowers: List[LinearForm] = []  # l < var
    for a in with_var:
        c = a.form.coeffs[var]
        remainder = LinearForm(
            {v: k for v, k in a.form.coeffs.items() if v != var}, a.form.const
        )
        bound = remainder.scale(Fraction(-1) / c)
        if c > 0:
            uppers.append(bound)
        else:
            lowers.append(bound)
    new_atoms = list(rest)
    for low in lowers:
        for up in uppers:
            new_atoms.append(Atom(low - up, "<"))
    return _simplify_cell(new_atoms)


def fold_constant(f: Formula) -> bool:
    """Truth value of a closed quantifier-free, E-free formula."""
    if isinstance(f, Atom):
        if not f.form.is_constant():
            raise ValueError(f"formula is not closed: {f.form.variables}")
        return f.form.const == 0 if f.rel == "=" else f.form.const < 0
    if isinstance(f, Not):
        return not fold_constant(f.body)
    if isinstance(f, And):
        return all(fold_constant(a) for a in f.args)
    if isinstance(f, Or):
        return any(fold_constant(a) for a in f.args)
    raise ValueError("formula is not quantifier-free")


def decide_sentence(f: Formula) -> bool:
    """Truth of a closed E-free formula (quantifiers allowed)."""
    return fold_constant(qe_linear(f))


# ---------------------------------------------------------------------------
# Desugaring and evaluation over (R, <, +, scalars, E)
# ---------------------------------------------------------------------------


_FRESH = "_e"


def desugar(f: Formula) -> Formula:
    """Rewrite E(t) as `exists w in E. w = t` and forall-in-E via negation."""
    counter = itertools.count()

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, EAtom):
            w = f"{_FRESH}{next(counter)}"
            eq = Atom(LinearForm.variable(w) - g.term, "=")
            return Quant("exists", w, True, eq)
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, And):
            return And(tuple(walk(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(walk(a) for a in g.args))
        if isinstance(g, Quant):
            body = walk(g.body)
            if g.in_e and g.kind == "forall":
                return Not(Quant("exists", g.var, True, Not(body)))
            return Quant(g.kind, g.var, g.in_e, body)
        raise TypeError(f"not a formula: {g!r}")

    return walk(f)


def collect_e_block(f: Formula) -> Tuple[List[str], Formula]:
    """Split leading `exists ... in E` quantifiers from their matrix."""
    names: List[str] = []
    while isinstance(f, Quant) and f.in_e and f.kind == "exists":
        names.append(f.var)
        f = f.body
    return names, f


def cell_to_system(cell: Cell, variables: Sequence[str]) -> EConstraintSystem:
    """Conjunction of closed-in-x atoms over E-variables to a constraint system."""
    constraints = []
    for atom in cell:
        extra = set(atom.form.coeffs) - set(variables)
        if extra:
            raise ValueError(f"unexpected free variables {sorted(extra)}")
        coeffs = tuple(atom.form.coeffs.get(v, Fraction(0)) for v in variables)
        constraints.append(Constraint(coeffs, atom.rel, -atom.form.const))
    return EConstraintSystem(len(variables), constraints)


def evaluate(
    f: Formula,
    assignment: Mapping[str, Rational],
    base: GeoBase,
    depth_budget: int = 64,
) -> bool:
    """Truth of f at the assignment in the E-expanded ordered group.

    Real quantifiers must scope over E-free subformulas (eliminated by
    qe_linear); E-quantifier blocks are decided with esystem_sat and raise
    UndecidedError when the solver reports UNKNOWN.
    """
    g = substitute(desugar(f), assignment)
    return _truth(g, base, depth_budget)


def _truth(g: Formula, base: GeoBase, depth_budget: int) -> bool:
    if isinstance(g, Atom):
        return fold_constant(g)
    if isinstance(g, Not):
        return not _truth(g.body, base, depth_budget)
    if isinstance(g, (And, Or)):
        is_and = isinstance(g, And)
        pending: Optional[UndecidedError] = None
        for a in g.args:
            try:
                v = _truth(a, base, depth_budget)
            except UndecidedError as exc:
                pending = exc
                continue
            if v != is_and:
                return v  # short-circuit: false conjunct / true disjunct
        if pending is not None:
            raise pending
        return is_and
    if isinstance(g, Quant):
        if not g.in_e:
            if not is_e_free(g):
                raise FragmentError(
                    "real quantifier scoping over an E-quantifier is unsupported"
                )
            return decide_sentence(g)
        names, matrix = collect_e_block(g)
        if not is_e_free(matrix):
            raise FragmentError("E-block matrix must be E-free")
        qf = qe_linear(matrix)
        unknown = False
        for cell in to_dnf(qf).disjuncts:
            system = cell_to_system(cell, names)
            result = esystem_sat(base, system, depth_budget)
            if result.verdict is Verdict.SAT:
                return True
            if result.verdict is Verdict.UNKNOWN:
                unknown = True
        if unknown:
            raise UndecidedError("E-block satisfiability is undecided")
        return False
    if isinstance(g, EAtom):
        raise AssertionError("E-atoms are desugared before evaluation")
    raise TypeError(f"not a formula: {g!r}")
