import random
from fractions import Fraction

import pytest

from geoprog import oracle
from geoprog.numeric import GeoBase
from geoprog.progression import (
    Verdict,
    enumerate_window,
    esystem_sat,
    level_set,
    parse_system,
    separation_radius,
)

TWO = GeoBase(Fraction(2))


def test_window_single_power():
    w = enumerate_window(TWO, [Fraction(1)], Fraction(5))
    assert w.values == (Fraction(1), Fraction(2), Fraction(4))
    assert w.witnesses[Fraction(4)] == ((2,),)


def test_window_difference():
    w = enumerate_window(TWO, [Fraction(1), Fraction(-1)], Fraction(3))
    assert w.values == tuple(Fraction(v) for v in (-2, -1, 0, 1, 2))
    assert (0,) * 2 in w.witnesses[Fraction(0)]


def test_window_sum():
    w = enumerate_window(TWO, [Fraction(1), Fraction(1)], Fraction(5))
    assert w.values == (Fraction(2), Fraction(3), Fraction(4))


def test_window_zero_coeffs():
    w = enumerate_window(TWO, [Fraction(0), Fraction(0)], Fraction(7))
    assert w.values == (Fraction(0),)


def test_window_empty_coeffs():
    w = enumerate_window(TWO, [], Fraction(1))
    assert w.values == (Fraction(0),)
    assert w.witnesses[Fraction(0)] == ((),)


def test_window_rejects_bad_radius():
    with pytest.raises(ValueError):
        enumerate_window(TWO, [Fraction(1)], Fraction(0))


def test_window_witnesses_evaluate_back():
    rng = random.Random(3)
    for _ in range(60):
        base = GeoBase(rng.choice([Fraction(2), Fraction(3), Fraction(3, 2)]))
        m = rng.randint(1, 3)
        coeffs = [Fraction(rng.randint(-4, 4)) for _ in range(m)]
        radius = Fraction(rng.randint(1, 12))
        w = enumerate_window(base, coeffs, radius)
        for value in w.values:
            assert -radius < value < radius
            for wit in w.witnesses[value]:
                assert sum(c * base.power(k) for c, k in zip(coeffs, wit)) == value


def test_window_matches_brute_small():
    base = GeoBase(Fraction(3, 2))
    coeffs = [Fraction(2), Fraction(-1)]
    radius = Fraction(4)
    w = enumerate_window(base, coeffs, radius)
    assert w.values == oracle.brute_window(base, coeffs, radius, w.depth_bound)


def test_level_set_examples():
    coeffs = [Fraction(1), Fraction(-1)]
    assert level_set(TWO, coeffs, 0, 0, Fraction(3)) == (Fraction(-1), Fraction(0))
    assert level_set(TWO, coeffs, 0, 1, Fraction(3)) == (Fraction(-2), Fraction(0))


def test_level_set_scaling_identity_spot():
    base = GeoBase(Fraction(5, 2))
    coeffs = [Fraction(3), Fraction(-2), Fraction(1)]
    radius = Fraction(9)
    zero = level_set(base, coeffs, 1, 0, radius)
    for k in range(4):
        scaled = tuple(
            sorted(v for v in (base.power(k) * x for x in zero) if -radius < v < radius)
        )
        assert level_set(base, coeffs, 1, k, radius) == scaled


def test_levels_cover_window():
    # every window value with a given pivot at its minimum exponent shows up
    # in the union of that pivot's levels
    base = TWO
    coeffs = [Fraction(1), Fraction(1)]
    radius = Fraction(9)
    w = enumerate_window(base, coeffs, radius)
    covered = set()
    for pivot in range(2):
        for k in range(w.depth_bound + 1):
            covered.update(level_set(base, coeffs, pivot, k, radius))
    assert covered == set(w.values)


def test_separation_radius_values():
    assert separation_radius(TWO, [Fraction(1), Fraction(-1)]) == 1
    assert separation_radius(TWO, [Fraction(1)]) == 1
    assert separation_radius(TWO, [Fraction(0)]) == 1  # only 0 in the window
    assert separation_radius(TWO, [Fraction(2), Fraction(2)]) == 4


def test_separation_radius_is_positive_and_separating():
    rng = random.Random(17)
    for _ in range(40):
        base = GeoBase(rng.choice([Fraction(2), Fraction(3), Fraction(5), Fraction(3, 2), Fraction(5, 2)]))
        m = rng.randint(1, 3)
        coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(m)]
        r = separation_radius(base, coeffs)
        assert r > 0
        for v in oracle.brute_window(base, coeffs, r, 12):
            assert v == 0


def test_parse_system():
    system = parse_system("# comment\n1 -1 >= 5\n2 0 < 3\n")
    assert system.m == 2
    assert len(system.constraints) == 2
    assert system.constraints[0].rel == ">="
    assert system.evaluate(TWO, (3, 0)) is False


def test_parse_system_rejects_ragged_rows():
    with pytest.raises(ValueError):
        parse_system("1 1 >= 5\n1 < 3\n")


def test_esystem_sat_finds_witness():
    system = parse_system("1 -1 >= 5\n")
    result = esystem_sat(TWO, system)
    assert result.verdict is Verdict.SAT
    assert system.evaluate(TWO, result.witness)


def test_esystem_sat_unsat_by_window():
    # 2^k1 + 2^k2 = 7 has no solution (7 has three binary digits)
    system = parse_system("1 1 = 7\n")
    assert esystem_sat(TWO, system).verdict is Verdict.UNSAT


def test_esystem_sat_unsat_interval():
    # y + z is at least 2, so < 1 is impossible
    system = parse_system("1 1 < 1\n")
    assert esystem_sat(TWO, system).verdict is Verdict.UNSAT


def test_esystem_sat_agrees_with_brute():
    rng = random.Random(23)
    for _ in range(60):
        base = GeoBase(rng.choice([Fraction(2), Fraction(3), Fraction(3, 2)]))
        m = rng.randint(1, 2)
        rows = []
        for _ in range(rng.randint(1, 3)):
            cs = " ".join(str(rng.randint(-3, 3)) for _ in range(m))
            rel = rng.choice(["<", "<=", "=", ">=", ">"])
            rows.append(f"{cs} {rel} {rng.randint(-6, 6)}")
        system = parse_system("\n".join(rows))
        result = esystem_sat(base, system)
        brute = oracle.brute_esat(base, system, 10)
        if result.verdict is Verdict.SAT:
            assert system.evaluate(base, result.witness)
        elif result.verdict is Verdict.UNSAT:
            assert brute is None
        # UNKNOWN makes no claim
