"""Exact engine for ordered linear arithmetic extended by a geometric progression."""

from .numeric import GeoBase, format_rational, parse_rational
from .progression import (
    Constraint,
    EConstraintSystem,
    SatResult,
    Verdict,
    WindowEnumeration,
    enumerate_window,
    esystem_sat,
    level_set,
    parse_system,
    separation_radius,
)
from .logic import (
    Atom,
    CellSystem,
    EAtom,
    Formula,
    FragmentError,
    LinearForm,
    UndecidedError,
    evaluate,
    qe_linear,
    to_dnf,
)
from .parser import ParseError, format_formula, parse_formula
from .eliminator import (
    Box,
    EliminationResult,
    SemilinearSet,
    decide_membership,
    eliminate_bounded,
    semilinear_boolean,
)
from .quasiperiodic import (
    Cycle,
    NoCycle,
    ResidueTrace,
    denominator_growth,
    detect_cycle,
    residues,
)
from . import oracle

__all__ = [
    "GeoBase",
    "format_rational",
    "parse_rational",
    "Constraint",
    "EConstraintSystem",
    "SatResult",
    "Verdict",
    "WindowEnumeration",
    "enumerate_window",
    "esystem_sat",
    "level_set",
    "parse_system",
    "separation_radius",
    "Atom",
    "CellSystem",
    "EAtom",
    "Formula",
    "FragmentError",
    "LinearForm",
    "UndecidedError",
    "evaluate",
    "qe_linear",
    "to_dnf",
    "ParseError",
    "format_formula",
    "parse_formula",
    "Box",
    "EliminationResult",
    "SemilinearSet",
    "decide_membership",
    "eliminate_bounded",
    "semilinear_boolean",
    "Cycle",
    "NoCycle",
    "ResidueTrace",
    "denominator_growth",
    "detect_cycle",
    "residues",
    "oracle",
]
