"""Independent semantic evaluator and formula generators for the QE tests.

Real quantifiers are eliminated by virtual substitution: for a fixed value of
the other variables, each linear atom `a*x + c REL 0` changes truth only at
its critical value -c/a, so the body of `exists x` is constant on every region
cut out by the critical values.  Substituting the exact critical terms, the
terms shifted by a symbolic infinitesimal (t - eps), and the two infinities
hits every region, which makes the disjunction over those test points an exact
equivalent.  None of this touches the Fourier-Motzkin code it cross-checks.
"""

from __future__ import annotations

import random
from fractions import Fraction

from geoprog.logic import (
    FALSE,
    TRUE,
    And,
    Atom,
    Formula,
    LinearForm,
    Not,
    Or,
    Quant,
    canonical_atom,
)


def _atoms(f: Formula):
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from _atoms(f.body)
    elif isinstance(f, (And, Or)):
        for g in f.args:
            yield from _atoms(g)
    elif isinstance(f, Quant):
        yield from _atoms(f.body)


def eval_formula(f: Formula, env: dict) -> bool:
    """Truth of an E-free formula under a full rational assignment."""
    if isinstance(f, Quant):
        return eval_formula(vs_eliminate(f), env)
    if isinstance(f, Atom):
        return f.truth(env)
    if isinstance(f, Not):
        return not eval_formula(f.body, env)
    if isinstance(f, And):
        return all(eval_formula(g, env) for g in f.args)
    if isinstance(f, Or):
        return any(eval_formula(g, env) for g in f.args)
    raise TypeError(f"unexpected node {type(f).__name__}")


# ---------------------------------------------------------------------------
# Virtual substitution
# ---------------------------------------------------------------------------


def _subst_term(atom: Atom, var: str, term: LinearForm) -> Formula:
    """atom[var := term]."""
    if var not in atom.form.coeffs:
        return atom
    return canonical_atom(Atom(atom.form.substitute(var, term), atom.rel))


def _subst_term_minus_eps(atom: Atom, var: str, term: LinearForm) -> Formula:
    """atom[var := term - eps] for a symbolic infinitesimal eps > 0."""
    a = atom.form.coeffs.get(var)
    if a is None:
        return atom
    g = atom.form.substitute(var, term)  # the atom's value is g - a*eps
    if atom.rel == "=":
        return FALSE  # g - a*eps never vanishes when a != 0
    if a > 0:
        # g - a*eps < 0 iff g < 0 or g = 0
        return Or((canonical_atom(Atom(g, "<")), canonical_atom(Atom(g, "="))))
    # a < 0: g - a*eps < 0 iff g < 0
    return canonical_atom(Atom(g, "<"))


def _subst_infinity(atom: Atom, var: str, sign: int) -> Formula:
    """atom[var := sign * infinity]."""
    a = atom.form.coeffs.get(var)
    if a is None:
        return atom
    if atom.rel == "=":
        return FALSE
    return TRUE if sign * a < 0 else FALSE


def _map_atoms(f: Formula, fn) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return Not(_map_atoms(f.body, fn))
    if isinstance(f, And):
        return And(tuple(_map_atoms(g, fn) for g in f.args))
    if isinstance(f, Or):
        return Or(tuple(_map_atoms(g, fn) for g in f.args))
    raise TypeError("quantifier-free formula expected")


def _vs_exists(var: str, body: Formula) -> Formula:
    branches = [
        _map_atoms(body, lambda a: _subst_infinity(a, var, -1)),
        _map_atoms(body, lambda a: _subst_infinity(a, var, +1)),
    ]
    seen = set()
    for atom in _atoms(body):
        a = atom.form.coeffs.get(var)
        if not a:
            continue
        # solve a*var + rest = 0 for var
        rest = LinearForm(
            {n: c for n, c in atom.form.coeffs.items() if n != var},
            atom.form.const,
        )
        term = rest.scale(Fraction(-1) / a)
        if term.key() in seen:
            continue
        seen.add(term.key())
        branches.append(_map_atoms(body, lambda x, t=term: _subst_term(x, var, t)))
        branches.append(
            _map_atoms(body, lambda x, t=term: _subst_term_minus_eps(x, var, t))
        )
    return Or(tuple(branches))


def vs_eliminate(f: Formula) -> Formula:
    """Quantifier-free equivalent, by innermost-first virtual substitution."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(vs_eliminate(f.body))
    if isinstance(f, And):
        return And(tuple(vs_eliminate(g) for g in f.args))
    if isinstance(f, Or):
        return Or(tuple(vs_eliminate(g) for g in f.args))
    if isinstance(f, Quant):
        assert not f.in_e, "only real quantifiers are supported here"
        body = vs_eliminate(f.body)
        if f.kind == "exists":
            return _vs_exists(f.var, body)
        return Not(_vs_exists(f.var, Not(body)))
    raise TypeError(f"unexpected node {type(f).__name__}")


# ---------------------------------------------------------------------------
# Random formula generation
# ---------------------------------------------------------------------------


def random_atom(rng: random.Random, variables) -> Atom:
    coeffs = {}
    for v in rng.sample(variables, rng.randint(1, min(2, len(variables)))):
        c = rng.choice([x for x in range(-3, 4) if x != 0])
        coeffs[v] = Fraction(c, rng.choice([1, 1, 2]))
    const = Fraction(rng.randint(-4, 4), rng.choice([1, 1, 3]))
    return canonical_atom(Atom(LinearForm(coeffs, const), rng.choice(["=", "<", "<"])))


def random_qf(rng: random.Random, variables, depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.4:
        return random_atom(rng, variables)
    roll = rng.random()
    if roll < 0.2:
        return Not(random_qf(rng, variables, depth - 1))
    args = tuple(random_qf(rng, variables, depth - 1) for _ in range(2))
    return And(args) if roll < 0.6 else Or(args)


def random_quantified(rng: random.Random) -> Formula:
    """At most 3 quantifiers over at most 4 variables, E-free."""
    nvars = rng.randint(1, 4)
    variables = [f"x{i}" for i in range(nvars)]
    body = random_qf(rng, variables, rng.randint(1, 3))
    bound = rng.sample(variables, rng.randint(0, min(3, nvars)))
    f = body
    for v in bound:
        f = Quant(rng.choice(["exists", "forall"]), v, False, f)
    return f


def random_point(rng: random.Random, variables) -> dict:
    return {
        v: Fraction(rng.randint(-12, 12), rng.choice([1, 1, 2, 3]))
        for v in variables
    }
