"""End-to-end acceptance checks.

Each test covers one shipped guarantee and prints a single PASS line with the
statistics that back it up; a failure anywhere fails the test outright.  All
comparisons are exact rational arithmetic, no tolerances.
"""

import itertools
import random
from fractions import Fraction

import pytest

from geoprog import oracle
from geoprog.eliminator import Box, decide_membership, eliminate_bounded
from geoprog.logic import free_variables, is_quantifier_free, qe_linear
from geoprog.numeric import GeoBase
from geoprog.parser import parse_formula
from geoprog.progression import (
    Verdict,
    enumerate_window,
    esystem_sat,
    level_set,
    parse_system,
    separation_radius,
)
from geoprog.quasiperiodic import Cycle, detect_cycle, residues

from _semantics import eval_formula, random_point, random_quantified

BASES = [Fraction(2), Fraction(3, 2), Fraction(5, 2), Fraction(3)]


def _report(line: str) -> None:
    print(f"\n{line}")


# ---------------------------------------------------------------------------
# 1. window enumeration equals brute force at the structural depth bound
# ---------------------------------------------------------------------------


def test_acceptance_1_window_enumeration_oracle_equivalence():
    rng = random.Random(1001)
    target = 200
    work_cap = 150_000  # brute-force tuples per instance
    checked = resampled = 0
    max_depth = 0
    while checked < target:
        base = GeoBase(rng.choice(BASES))
        m = rng.randint(1, 4)
        coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(m)]
        radius = Fraction(rng.randint(1, 20))
        window = enumerate_window(base, coeffs, radius)
        active = sum(1 for c in coeffs if c != 0)
        if (window.depth_bound + 6) ** active > work_cap:
            resampled += 1
            assert resampled < 5000, "work cap rejects too many instances"
            continue
        exact = oracle.brute_window(base, coeffs, radius, window.depth_bound)
        assert window.values == exact, (base.rho, coeffs, radius)
        deeper = oracle.brute_window(base, coeffs, radius, window.depth_bound + 5)
        assert deeper == exact, (base.rho, coeffs, radius)
        max_depth = max(max_depth, window.depth_bound)
        checked += 1
    _report(
        f"ACCEPTANCE 1 PASS: {checked} window instances match brute force at "
        f"D* and D*+5 (max D*={max_depth}, {resampled} resampled over work cap)"
    )


# ---------------------------------------------------------------------------
# 2. scaling identity between levels of a pivot
# ---------------------------------------------------------------------------


def test_acceptance_2_level_scaling_identity():
    rng = random.Random(1002)
    instances = 50
    total_levels = 0
    for _ in range(instances):
        base = GeoBase(rng.choice(BASES))
        m = rng.randint(1, 3)
        coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(m)]
        pivot = rng.randrange(m)
        radius = Fraction(rng.randint(1, 20))
        window = enumerate_window(base, coeffs, radius)
        stop = next(p.stop for p in window.pivot_data if p.pivot == pivot)
        zero = level_set(base, coeffs, pivot, 0, radius)
        for k in range(stop + 1):
            scaled = tuple(
                sorted(
                    v
                    for v in (base.power(k) * x for x in zero)
                    if -radius < v < radius
                )
            )
            assert level_set(base, coeffs, pivot, k, radius) == scaled, (
                base.rho,
                coeffs,
                pivot,
                k,
            )
            total_levels += 1
    _report(
        f"ACCEPTANCE 2 PASS: scaling identity holds on {instances} instances "
        f"({total_levels} levels checked exactly)"
    )


# ---------------------------------------------------------------------------
# 3. separation radius keeps brute-force values away from zero
# ---------------------------------------------------------------------------


def test_acceptance_3_separation_radius():
    rng = random.Random(1003)
    instances = 100
    for i in range(instances):
        base = GeoBase(rng.choice(BASES))
        m = rng.randint(1, 3) if i % 10 else 4
        coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(m)]
        r = separation_radius(base, coeffs)
        assert r > 0
        depth = 20 if sum(1 for c in coeffs if c != 0) <= 3 else 12
        for v in oracle.brute_window(base, coeffs, r, depth):
            assert v == 0, (base.rho, coeffs, r, v)
    _report(
        f"ACCEPTANCE 3 PASS: {instances} separation radii confirmed against "
        f"brute force (no nonzero value inside (-r, r))"
    )


# ---------------------------------------------------------------------------
# 4 & 5. bounded elimination corpus: exact, pointwise correct, tame shape
# ---------------------------------------------------------------------------

CORPUS = [
    # (formula text, box radius)
    ("E(x)", 5),
    ("E(x)", 20),
    ("not E(x)", 5),
    ("E(2*x)", 5),
    ("E(x + 1)", 5),
    ("E(x - 3)", 9),
    ("E(x) or E(x - 1)", 6),
    ("E(x) and x < 3", 6),
    ("exists y in E. x = y - 1", 7),
    ("exists y in E. x = y + 2", 9),
    ("exists y in E. exists z in E. x = y - z", 3),
    ("exists y in E. exists z in E. x = y - z", 6),
    ("exists y in E. exists z in E. x = y + z", 9),
    ("exists y in E. exists z in E. 2*x = y - z", 4),
    ("exists y in E. x < y", 1),
    ("exists y in E. x < y", 8),
    ("exists y in E. y < x", 4),
    ("exists y in E. x = 1/3*y", 2),
    ("exists y in E. x = 1/3*y", 5),
    ("exists y in E. 3*x = 2*y", 4),
    ("forall y in E. x < y", 4),
    ("forall y in E. (x < y or y < x)", 5),
    ("not (exists y in E. x = y - 1)", 5),
    ("exists y in E. (x = y - 1 or x = y + 1)", 6),
    ("exists y in E. (x < y and y < 2*x)", 7),
    ("E(x) and E(y)", 3),
    ("E(x) or E(y)", 3),
    ("exists w in E. x + y = w", 3),
    ("E(x) and x = y", 4),
    ("exists w in E. (x = w and y < w)", 3),
    ("x < 1", 4),
    ("x = 1 or 2*x = 5", 4),
]


def _corpus_results():
    base = GeoBase(Fraction(2))
    out = []
    for text, radius in CORPUS:
        f = parse_formula(text)
        box = Box(len(free_variables(f)), Fraction(radius))
        out.append((text, f, box, eliminate_bounded(f, box, base)))
    return out


def test_acceptance_4_bounded_elimination_pointwise():
    rng = random.Random(1004)
    base = GeoBase(Fraction(2))
    results = _corpus_results()
    assert len(results) >= 30
    points_per_formula = 1000
    for text, f, box, result in results:
        assert result.status == "exact", text
        for _ in range(points_per_formula):
            point = [
                Fraction(
                    rng.randint(-int(box.R) * 6 + 1, int(box.R) * 6 - 1),
                    6,
                )
                for _ in range(box.n)
            ]
            want = decide_membership(f, point, base)
            assert result.set.contains(point) == want, (text, point)
    _report(
        f"ACCEPTANCE 4 PASS: {len(results)} formulas eliminated exactly; "
        f"{points_per_formula} random points each agree with direct evaluation"
    )


def test_acceptance_5_one_dimensional_outputs_are_tame():
    results = _corpus_results()
    shapes = []
    for text, f, box, result in results:
        if box.n != 1:
            continue
        var = result.set.variables[0]
        points = intervals = 0
        for cell in result.set.cells:
            rels = {a.rel for a in cell}
            if "=" in rels:
                # an equality pins the single variable to one point
                assert any(a.rel == "=" and var in a.form.coeffs for a in cell), text
                points += 1
            else:
                # strict linear constraints in one variable cut out an
                # open interval (possibly clipped by the open box)
                assert all(a.rel == "<" for a in cell), text
                intervals += 1
        shapes.append((text, points, intervals))
    assert shapes
    total_cells = sum(p + i for _, p, i in shapes)
    _report(
        f"ACCEPTANCE 5 PASS: {len(shapes)} one-dimensional outputs are finite "
        f"unions of points and open intervals ({total_cells} cells total)"
    )


# ---------------------------------------------------------------------------
# 6. linear quantifier elimination against an independent evaluator
# ---------------------------------------------------------------------------


def test_acceptance_6_linear_qe_oracle_equivalence():
    rng = random.Random(1006)
    formulas = 100
    points = 200
    for i in range(formulas):
        f = random_quantified(rng)
        g = qe_linear(f)
        assert is_quantifier_free(g), i
        names = sorted(free_variables(f) | free_variables(g))
        for _ in range(points):
            env = random_point(rng, names) if names else {}
            assert eval_formula(g, env) == eval_formula(f, env), (i, f, env)
    _report(
        f"ACCEPTANCE 6 PASS: {formulas} quantified formulas eliminated; "
        f"agreement with test-point evaluation at {points} points each"
    )


# ---------------------------------------------------------------------------
# 7. residue traces: integer bases cycle, rational bases spread out
# ---------------------------------------------------------------------------


def test_acceptance_7_quasiperiodicity():
    rng = random.Random(1007)
    cycles = 0
    for rho in (2, 3, 5, 10):
        base = GeoBase(Fraction(rho))
        for _ in range(10):
            modulus = Fraction(rng.randint(1, 40), rng.randint(1, 20))
            trace = residues(base, modulus, 200)
            report = detect_cycle(trace)
            assert isinstance(report, Cycle), (rho, modulus)
            p, q = report.preperiod, report.period
            for k in range(p, len(trace.residues) - q):
                assert trace.residues[k + q] == trace.residues[k], (rho, modulus)
            cycles += 1
    base = GeoBase(Fraction(3, 2))
    trace = residues(base, Fraction(1), 60)
    assert trace.distinct_count == 61
    for k, r in enumerate(trace.residues):
        assert r.denominator == 2**k, k
    _report(
        f"ACCEPTANCE 7 PASS: {cycles} integer-base traces cycle as detected; "
        f"base 3/2 mod 1 gives 61 distinct residues with denominators 2^k"
    )


# ---------------------------------------------------------------------------
# 8. constraint solver soundness and usefulness
# ---------------------------------------------------------------------------


def test_acceptance_8_esystem_sat_soundness():
    rng = random.Random(1008)
    systems = 300
    unknown = sat = unsat = 0
    for _ in range(systems):
        base = GeoBase(rng.choice(BASES))
        m = rng.randint(1, 3)
        rows = []
        for _ in range(rng.randint(1, 4)):
            cs = " ".join(str(rng.randint(-4, 4)) for _ in range(m))
            rel = rng.choice(["<", "<=", "=", ">=", ">"])
            bound = Fraction(rng.randint(-8, 8), rng.choice([1, 1, 2]))
            rows.append(f"{cs} {rel} {bound}")
        system = parse_system("\n".join(rows))
        result = esystem_sat(base, system)
        brute = oracle.brute_esat(base, system, 12)
        if result.verdict is Verdict.SAT:
            sat += 1
            assert system.evaluate(base, result.witness), rows
        elif result.verdict is Verdict.UNSAT:
            unsat += 1
            assert brute is None, (base.rho, rows, brute)
        else:
            unknown += 1
    rate = unknown / systems
    assert rate <= 0.10, f"unknown rate {rate:.1%} exceeds 10%"
    _report(
        f"ACCEPTANCE 8 PASS: {systems} systems ({sat} sat, {unsat} unsat, "
        f"{unknown} unknown = {rate:.1%}); all verdicts consistent with brute "
        f"force at depth 12"
    )
