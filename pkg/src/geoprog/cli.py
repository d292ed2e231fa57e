"""Command-line front end.

Exit codes: 0 success, 1 mathematical UNKNOWN, 2 usage or parse error.
Defaults may come from a config file (`key = value` lines) or the
GEOPROG_RHO environment variable; flags always win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import oracle
from .eliminator import Box, decide_membership, eliminate_bounded
from .logic import FragmentError, UndecidedError, free_variables
from .numeric import GeoBase, format_rational, parse_rational
from .parser import ParseError, parse_formula
from .progression import (
    Verdict,
    enumerate_window,
    esystem_sat,
    parse_system,
    separation_radius,
)
from .quasiperiodic import Cycle, denominator_growth, detect_cycle, residues

EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_USAGE = 2

_CONFIG_KEYS = ("rho", "depth-budget", "format")


class UsageError(Exception):
    pass


def _read_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected `key = value`")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value.strip()
    return values


def _parse_coeffs(text: str):
    try:
        return [parse_rational(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad coefficient list: {exc}") from exc


def _parse_point(text: str):
    try:
        return [parse_rational(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad point: {exc}") from exc


def _resolve_base(args, config: dict) -> GeoBase:
    raw = args.rho or config.get("rho") or os.environ.get("GEOPROG_RHO")
    if raw is None:
        raise UsageError("no base given: use --rho, a config file, or GEOPROG_RHO")
    try:
        return GeoBase(parse_rational(raw))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_format(args, config: dict) -> str:
    fmt = args.format or config.get("format") or "text"
    if fmt not in ("text", "machine"):
        raise UsageError(f"unknown format {fmt!r}")
    return fmt


def _resolve_depth(args, config: dict) -> int:
    if args.depth_budget is not None:
        return args.depth_budget
    if "depth-budget" in config:
        try:
            return int(config["depth-budget"])
        except ValueError as exc:
            raise UsageError("depth-budget must be an integer") from exc
    return 64


def _emit(document: dict, fmt: str, text_lines: Sequence[str]) -> None:
    if fmt == "machine":
        print(json.dumps(document, sort_keys=True, separators=(",", ":")))
    else:
        for line in text_lines:
            print(line)


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="geoprog", description=__doc__)
    top.add_argument("--config", help="config file with default settings")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--rho", help="progression base, a rational > 1")
        p.add_argument("--format", choices=("text", "machine"))
        p.add_argument("--depth-budget", type=int)

    p = sub.add_parser("enumerate", help="window values of a linear form on E-tuples")
    common(p)
    p.add_argument("--coeffs", required=True, help="comma-separated rationals")
    p.add_argument("--radius", required=True)
    p.add_argument("--witnesses", action="store_true")

    p = sub.add_parser("separation", help="separation radius of a linear form")
    common(p)
    p.add_argument("--coeffs", required=True)

    p = sub.add_parser("sat", help="decide an E-constraint system")
    common(p)
    p.add_argument("--file", required=True)

    p = sub.add_parser("eliminate", help="bounded elimination of the E-predicate")
    common(p)
    p.add_argument("--file", required=True)
    p.add_argument("--radius", required=True)

    p = sub.add_parser("member", help="pointwise truth of a formula")
    common(p)
    p.add_argument("--file", required=True)
    p.add_argument("--point", required=True)

    p = sub.add_parser("residues", help="residues of E modulo a rational lattice")
    common(p)
    p.add_argument("--mod", required=True)
    p.add_argument("--max-k", type=int, required=True)

    p = sub.add_parser("oracle", help="brute-force counterparts")
    osub = p.add_subparsers(dest="oracle_command", required=True)

    q = osub.add_parser("enumerate")
    common(q)
    q.add_argument("--coeffs", required=True)
    q.add_argument("--radius", required=True)
    q.add_argument("--depth", type=int, required=True)

    q = osub.add_parser("sat")
    common(q)
    q.add_argument("--file", required=True)
    q.add_argument("--depth", type=int, required=True)

    q = osub.add_parser("member")
    common(q)
    q.add_argument("--file", required=True)
    q.add_argument("--point", required=True)
    q.add_argument("--depth", type=int, required=True)
    return top


def _cmd_enumerate(args, base, fmt):
    radius = parse_rational(args.radius)
    window = enumerate_window(base, _parse_coeffs(args.coeffs), radius)
    doc = {
        "rho": format_rational(base.rho),
        "coeffs": [format_rational(c) for c in window.coeffs],
        "radius": format_rational(radius),
        "values": [format_rational(v) for v in window.values],
        "depth_bound": window.depth_bound,
    }
    lines = [f"values ({len(window.values)}): "
             + ", ".join(format_rational(v) for v in window.values)]
    if args.witnesses:
        doc["witnesses"] = {
            format_rational(v): [list(w) for w in window.witnesses[v]]
            for v in window.values
        }
        for v in window.values:
            wits = ", ".join(str(list(w)) for w in window.witnesses[v])
            lines.append(f"  {format_rational(v)}: {wits}")
    lines.append(f"depth bound: {window.depth_bound}")
    _emit(doc, fmt, lines)
    return EXIT_OK


def _cmd_separation(args, base, fmt):
    r = separation_radius(base, _parse_coeffs(args.coeffs))
    _emit({"rho": format_rational(base.rho), "separation_radius": format_rational(r)},
          fmt, [f"separation radius: {format_rational(r)}"])
    return EXIT_OK


def _cmd_sat(args, base, fmt, depth_budget):
    with open(args.file, encoding="utf-8") as handle:
        system = parse_system(handle.read())
    result = esystem_sat(base, system, depth_budget)
    doc = {
        "rho": format_rational(base.rho),
        "verdict": result.verdict.value,
        "witness": list(result.witness) if result.witness is not None else None,
        "certificate": result.certificate,
    }
    lines = [f"verdict: {result.verdict.value}"]
    if result.witness is not None:
        lines.append(f"witness: {list(result.witness)}")
    if result.certificate:
        lines.append(f"certificate: {result.certificate}")
    _emit(doc, fmt, lines)
    return EXIT_UNKNOWN if result.verdict is Verdict.UNKNOWN else EXIT_OK


def _cmd_eliminate(args, base, fmt, depth_budget):
    with open(args.file, encoding="utf-8") as handle:
        formula = parse_formula(handle.read())
    radius = parse_rational(args.radius)
    box = Box(len(free_variables(formula)), radius)
    result = eliminate_bounded(formula, box, base, depth_budget)
    doc = result.to_document()
    lines = [f"status: {result.status}", result.set.describe()]
    _emit(doc, fmt, lines)
    return EXIT_OK if result.status == "exact" else EXIT_UNKNOWN


def _cmd_member(args, base, fmt, depth_budget):
    with open(args.file, encoding="utf-8") as handle:
        formula = parse_formula(handle.read())
    point = _parse_point(args.point)
    try:
        truth = decide_membership(formula, point, base, depth_budget)
    except UndecidedError:
        _emit({"verdict": "unknown"}, fmt, ["verdict: unknown"])
        return EXIT_UNKNOWN
    _emit({"verdict": truth}, fmt, [f"verdict: {'true' if truth else 'false'}"])
    return EXIT_OK


def _cmd_residues(args, base, fmt):
    modulus = parse_rational(args.mod)
    trace = residues(base, modulus, args.max_k)
    report = detect_cycle(trace)
    doc = {
        "rho": format_rational(base.rho),
        "modulus": format_rational(modulus),
        "max_k": trace.max_exponent,
        "residues": [format_rational(r) for r in trace.residues],
        "denominators": [r.denominator for r in trace.residues],
        "distinct_count": trace.distinct_count,
        "cycle": (
            {"preperiod": report.preperiod, "period": report.period}
            if isinstance(report, Cycle)
            else None
        ),
    }
    lines = ["    k  rho^k           residue         denominator"]
    for k, r in enumerate(trace.residues):
        lines.append(
            f"{k:5d}  {format_rational(base.power(k)):<15} "
            f"{format_rational(r):<15} {r.denominator}"
        )
    lines.append(f"distinct residues: {trace.distinct_count}")
    if isinstance(report, Cycle):
        lines.append(f"cycle: preperiod {report.preperiod}, period {report.period}")
    else:
        lines.append(f"no cycle within {report.searched}")
    _emit(doc, fmt, lines)
    return EXIT_OK


def _cmd_oracle(args, base, fmt):
    if args.oracle_command == "enumerate":
        values = oracle.brute_window(
            base, _parse_coeffs(args.coeffs), parse_rational(args.radius), args.depth
        )
        _emit(
            {"values": [format_rational(v) for v in values], "depth": args.depth},
            fmt,
            [f"values ({len(values)}): " + ", ".join(format_rational(v) for v in values)],
        )
        return EXIT_OK
    if args.oracle_command == "sat":
        with open(args.file, encoding="utf-8") as handle:
            system = parse_system(handle.read())
        witness = oracle.brute_esat(base, system, args.depth)
        if witness is None:
            _emit({"verdict": f"no witness within {args.depth}"}, fmt,
                  [f"no witness within depth {args.depth}"])
        else:
            _emit({"verdict": "sat", "witness": list(witness)}, fmt,
                  [f"witness: {list(witness)}"])
        return EXIT_OK
    with open(args.file, encoding="utf-8") as handle:
        formula = parse_formula(handle.read())
    truth = oracle.brute_member(formula, _parse_point(args.point), base, args.depth)
    _emit({"verdict": truth}, fmt, [f"verdict: {'true' if truth else 'false'}"])
    return EXIT_OK


def run(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        config = _read_config(args.config) if args.config else {}
        base = _resolve_base(args, config)
        fmt = _resolve_format(args, config)
        depth_budget = _resolve_depth(args, config)
        if args.command == "enumerate":
            return _cmd_enumerate(args, base, fmt)
        if args.command == "separation":
            return _cmd_separation(args, base, fmt)
        if args.command == "sat":
            return _cmd_sat(args, base, fmt, depth_budget)
        if args.command == "eliminate":
            return _cmd_eliminate(args, base, fmt, depth_budget)
        if args.command == "member":
            return _cmd_member(args, base, fmt, depth_budget)
        if args.command == "residues":
            return _cmd_residues(args, base, fmt)
        if args.command == "oracle":
            return _cmd_oracle(args, base, fmt)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ParseError, FragmentError, ValueError, OSError) as exc:
        print(f"geoprog: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
