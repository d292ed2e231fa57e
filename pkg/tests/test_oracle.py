from fractions import Fraction

from geoprog import oracle
from geoprog.numeric import GeoBase
from geoprog.parser import parse_formula
from geoprog.progression import parse_system

TWO = GeoBase(Fraction(2))


def test_brute_window_by_hand():
    # 2^k in (-5, 5) with depth 3: values 1, 2, 4 (8 excluded)
    assert oracle.brute_window(TWO, [Fraction(1)], Fraction(5), 3) == (
        Fraction(1),
        Fraction(2),
        Fraction(4),
    )


def test_brute_window_two_terms():
    got = oracle.brute_window(TWO, [Fraction(1), Fraction(-1)], Fraction(3), 2)
    # differences of {1, 2, 4} inside (-3, 3)
    assert got == tuple(Fraction(v) for v in (-2, -1, 0, 1, 2))


def test_brute_esat_least_witness():
    system = parse_system("1 -1 >= 5\n")
    assert oracle.brute_esat(TWO, system, 8) == (3, 0)


def test_brute_esat_none_when_unsatisfiable_in_depth():
    system = parse_system("1 1 = 7\n")
    assert oracle.brute_esat(TWO, system, 10) is None


def test_brute_member_closed_predicate():
    f = parse_formula("E(x)")
    assert oracle.brute_member(f, [Fraction(4)], TWO, 10) is True
    assert oracle.brute_member(f, [Fraction(3)], TWO, 10) is False


def test_brute_member_bounded_quantifier():
    f = parse_formula("exists y in E. x = y - 1")
    assert oracle.brute_member(f, [Fraction(3)], TWO, 6) is True
    assert oracle.brute_member(f, [Fraction(4)], TWO, 6) is False


def test_brute_member_real_quantifier():
    f = parse_formula("exists y. (x < y and y < x + 1)")
    assert oracle.brute_member(f, [Fraction(10)], TWO, 4) is True
