"""Finite windows of a linear form on E-tuples, and E-constraint solving.

The central object is ``enumerate_window``: given rational coefficients
(a_1, ..., a_m) and a radius R it computes the finite set

    { sum_j a_j * rho**k_j  :  k_j >= 0 }  intersected with  (-R, R)

together with exponent-tuple witnesses, by the per-pivot recursion: fix the
position carrying the minimal exponent, enumerate its level-0 set from the
shorter coefficient vector, and rescale level 0 by rho**k for k up to a
stopping bound N with rho**N * d > R (d the least nonzero magnitude at
level 0).  Beyond N a level contributes at most {0}.

``esystem_sat`` decides linear constraint systems over E-tuples.  It is
sound; completeness is best effort and an ``UNKNOWN`` verdict is possible
for purely one-sided ("saturated") systems.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .numeric import GeoBase, Rational, format_rational, parse_rational

Coeffs = Tuple[Fraction, ...]

RELATIONS = ("=", "<", "<=", ">", ">=")


def _as_coeffs(coeffs: Sequence[Rational]) -> Coeffs:
    return tuple(Fraction(c) for c in coeffs)


# ---------------------------------------------------------------------------
# Window enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PivotData:
    """Level-0 set and stopping bound recorded for one pivot position."""

    pivot: int
    level0: Tuple[Fraction, ...]
    stop: int


@dataclass
class WindowEnumeration:
    coeffs: Coeffs
    radius: Fraction
    values: Tuple[Fraction, ...]
    witnesses: Dict[Fraction, Tuple[Tuple[int, ...], ...]]
    pivot_data: List[PivotData]
    depth_bound: int

    def __contains__(self, value) -> bool:
        return Fraction(value) in self.witnesses


def enumerate_window(
    base: GeoBase, coeffs: Sequence[Rational], radius: Rational
) -> WindowEnumeration:
    """All values of the form on E-tuples inside the open interval (-R, R)."""
    radius = Fraction(radius)
    if radius <= 0:
        raise ValueError("radius must be > 0")
    coeffs = _as_coeffs(coeffs)
    table, depth, pdata = _window(base, coeffs, radius)
    values = tuple(sorted(table))
    witnesses = {v: tuple(sorted(table[v])) for v in values}
    return WindowEnumeration(coeffs, radius, values, witnesses, pdata, depth)


def _window(base: GeoBase, coeffs: Coeffs, radius: Fraction):
    """Recursive core; returns (value -> witness set, depth bound, pivot data)."""
    m = len(coeffs)
    if m == 0:
        return {Fraction(0): {()}}, 0, []
    table: Dict[Fraction, set] = {}
    pdata: List[PivotData] = []
    depth = 0
    for i in range(m):
        a = coeffs[i]
        rest = coeffs[:i] + coeffs[i + 1 :]
        sub, sub_depth, _ = _window(base, rest, radius + abs(a))
        # Level 0: pivot exponent fixed at 0, the rest arbitrary.
        level0: Dict[Fraction, set] = {}
        for s, wits in sub.items():
            x = a + s
            if -radius < x < radius:
                level0.setdefault(x, set()).update(
                    w[:i] + (0,) + w[i:] for w in wits
                )
        nonzero = [abs(x) for x in level0 if x != 0]
        stop = base.min_exponent_exceeding(min(nonzero), radius) if nonzero else 0
        pdata.append(PivotData(i, tuple(sorted(level0)), stop))
        for k in range(stop + 1):
            scale = base.power(k)
            for x, wits in level0.items():
                xk = scale * x
                if -radius < xk < radius:
                    table.setdefault(xk, set()).update(
                        tuple(c + k for c in w) for w in wits
                    )
        depth = max(depth, stop + sub_depth)
    return table, depth, pdata


def level_set(
    base: GeoBase,
    coeffs: Sequence[Rational],
    pivot: int,
    k: int,
    radius: Rational,
) -> Tuple[Fraction, ...]:
    """Values with the pivot exponent equal to k and all exponents >= k.

    Computed directly from the definition (via the shifted sub-window), not
    by rescaling the k = 0 level, so the scaling identity is testable.
    """
    radius = Fraction(radius)
    if radius <= 0:
        raise ValueError("radius must be > 0")
    coeffs = _as_coeffs(coeffs)
    if not 0 <= pivot < len(coeffs):
        raise ValueError(f"pivot {pivot} out of range for {len(coeffs)} coefficients")
    if k < 0:
        raise ValueError("level exponent must be >= 0")
    a = coeffs[pivot]
    rest = coeffs[:pivot] + coeffs[pivot + 1 :]
    scale = base.power(k)
    sub, _, _ = _window(base, rest, radius / scale + abs(a))
    out = set()
    for s in sub:
        x = scale * (a + s)
        if -radius < x < radius:
            out.add(x)
    return tuple(sorted(out))


def separation_radius(base: GeoBase, coeffs: Sequence[Rational]) -> Fraction:
    """r > 0 such that the only window value in (-r, r) is possibly 0."""
    coeffs = _as_coeffs(coeffs)
    start = abs(sum(coeffs, Fraction(0))) + 1  # window contains v(1, ..., 1)
    window = enumerate_window(base, coeffs, start)
    nonzero = [abs(v) for v in window.values if v != 0]
    return min(nonzero) if nonzero else start


# ---------------------------------------------------------------------------
# Constraint systems over E-tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    coeffs: Coeffs
    rel: str
    bound: Fraction

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")

    def holds(self, value: Fraction) -> bool:
        if self.rel == "=":
            return value == self.bound
        if self.rel == "<":
            return value < self.bound
        if self.rel == "<=":
            return value <= self.bound
        if self.rel == ">":
            return value > self.bound
        return value >= self.bound

    def __str__(self) -> str:
        lhs = " ".join(format_rational(c) for c in self.coeffs)
        return f"{lhs} {self.rel} {format_rational(self.bound)}"


@dataclass
class EConstraintSystem:
    m: int
    constraints: List[Constraint]

    def __post_init__(self):
        for c in self.constraints:
            if len(c.coeffs) != self.m:
                raise ValueError(
                    f"constraint has {len(c.coeffs)} coefficients, expected {self.m}"
                )

    def evaluate(self, base: GeoBase, exponents: Sequence[int]) -> bool:
        if len(exponents) != self.m:
            raise ValueError("witness length mismatch")
        powers = [base.power(k) for k in exponents]
        for c in self.constraints:
            total = sum((a * p for a, p in zip(c.coeffs, powers)), Fraction(0))
            if not c.holds(total):
                return False
        return True


def parse_system(text: str) -> EConstraintSystem:
    """One constraint per line: `a1 a2 ... am REL c`; `#` comments."""
    constraints: List[Constraint] = []
    m: Optional[int] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        rel_positions = [i for i, tok in enumerate(parts) if tok in RELATIONS]
        if len(rel_positions) != 1:
            raise ValueError(f"line {lineno}: expected exactly one relation")
        pos = rel_positions[0]
        if pos != len(parts) - 2:
            raise ValueError(f"line {lineno}: relation must precede the final bound")
        try:
            coeffs = tuple(parse_rational(tok) for tok in parts[:pos])
            bound = parse_rational(parts[-1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if m is None:
            m = len(coeffs)
        elif len(coeffs) != m:
            raise ValueError(f"line {lineno}: expected {m} coefficients")
        constraints.append(Constraint(coeffs, parts[pos], bound))
    if m is None:
        raise ValueError("empty constraint system")
    return EConstraintSystem(m, constraints)


class Verdict(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass
class SatResult:
    verdict: Verdict
    witness: Optional[Tuple[int, ...]] = None
    certificate: dict = field(default_factory=dict)


# Normalized internal constraints use relations {"=", "<", "<="} only.
_FLIP = {">": "<", ">=": "<="}

_SHAPE_DEPTH = 12  # max component of pivot-normalized tuples in the SAT search
_NODE_BUDGET = 50000


def esystem_sat(
    base: GeoBase, system: EConstraintSystem, depth_budget: int = 64
) -> SatResult:
    """Decide satisfiability of the system over non-negative E-exponents.

    SAT results carry a verified witness.  UNSAT results carry a structural
    certificate.  UNKNOWN means the budgeted search was exhausted without a
    structural handle on the remaining saturated constraints.
    """
    if depth_budget < 1:
        raise ValueError("depth_budget must be >= 1")
    cons = []
    for c in system.constraints:
        if len(c.coeffs) != system.m:
            raise ValueError("coefficient length mismatch")
        if c.rel in _FLIP:
            cons.append(
                Constraint(tuple(-a for a in c.coeffs), _FLIP[c.rel], -c.bound)
            )
        else:
            cons.append(c)
    tracker = {"nodes": 0, "budget": _NODE_BUDGET}
    result = _decide(base, system.m, cons, min(depth_budget, _SHAPE_DEPTH), tracker)
    if result.verdict is Verdict.SAT:
        assert result.witness is not None
        if not system.evaluate(base, result.witness):
            raise AssertionError("internal error: non-verifying witness")
    return result


def _decide(
    base: GeoBase,
    m: int,
    cons: List[Constraint],
    shape_depth: int,
    tracker: dict,
) -> SatResult:
    tracker["nodes"] += 1
    if tracker["nodes"] > tracker["budget"]:
        return SatResult(Verdict.UNKNOWN, certificate={"reason": "budget exhausted"})

    # Constant constraints are decided outright.
    live: List[Constraint] = []
    for c in cons:
        if all(a == 0 for a in c.coeffs):
            if not c.holds(Fraction(0)):
                return SatResult(
                    Verdict.UNSAT, certificate={"reason": "constant constraint", "constraint": str(c)}
                )
        else:
            live.append(c)
    if not live:
        return SatResult(Verdict.SAT, witness=(0,) * m)
    if m == 0:
        # live constraints over zero variables would be constant; unreachable
        return SatResult(Verdict.SAT, witness=())

    # Per-constraint value interval (intrinsic range meets the relation).
    intervals = [_combined_interval(c) for c in live]
    for c, iv in zip(live, intervals):
        if _interval_empty(iv):
            return SatResult(
                Verdict.UNSAT,
                certificate={"reason": "empty value window", "constraint": str(c)},
            )

    # Real relaxation: exponent variables as reals y_i >= 1.
    if not _real_relaxation_feasible(m, live):
        return SatResult(
            Verdict.UNSAT, certificate={"reason": "real relaxation infeasible"}
        )

    found = _shape_search(base, m, live, shape_depth, tracker)
    if found is not None:
        return SatResult(Verdict.SAT, witness=found)
    if m == 1:
        # The single normalized shape plus the shift scan covers every tuple.
        return SatResult(
            Verdict.UNSAT, certificate={"reason": "shift scan exhausted", "m": 1}
        )

    # Branch a two-sided ("window") constraint on its achievable values.
    choice = None
    for idx, (c, iv) in enumerate(zip(live, intervals)):
        lo, hi, _ = iv
        if lo is None or hi is None:
            continue
        if choice is None or (c.rel == "=" and live[choice[0]].rel != "="):
            choice = (idx, lo, hi)
        if c.rel == "=" and live[choice[0]].rel == "=":
            break
    if choice is None:
        return SatResult(
            Verdict.UNKNOWN,
            certificate={
                "reason": "saturated system; search exhausted",
                "shape_depth": shape_depth,
            },
        )
    idx, lo, hi = choice
    c = live[idx]
    others = live[:idx] + live[idx + 1 :]
    reach = max(abs(lo), abs(hi)) + 1
    window = enumerate_window(base, c.coeffs, reach)
    values = [v for v in window.values if c.holds(v)]
    if not values:
        return SatResult(
            Verdict.UNSAT,
            certificate={"reason": "window has no admissible value", "constraint": str(c)},
        )
    unknown = False
    for value in values:
        sub = _decide_equal(base, m, c.coeffs, value, others, shape_depth, tracker)
        if sub.verdict is Verdict.SAT:
            return sub
        if sub.verdict is Verdict.UNKNOWN:
            unknown = True
    if unknown:
        return SatResult(Verdict.UNKNOWN, certificate={"reason": "unresolved branch"})
    return SatResult(
        Verdict.UNSAT,
        certificate={
            "reason": "all window branches refuted",
            "constraint": str(c),
            "values": [format_rational(v) for v in values],
        },
    )


def _decide_equal(
    base: GeoBase,
    m: int,
    coeffs: Coeffs,
    value: Fraction,
    others: List[Constraint],
    shape_depth: int,
    tracker: dict,
) -> SatResult:
    """Decide: exists exponents with sum(coeffs * rho**k) == value and others."""
    support = [i for i, a in enumerate(coeffs) if a != 0]
    if not support:
        if value != 0:
            return SatResult(Verdict.UNSAT, certificate={"reason": "0 != value"})
        return _decide(base, m, others, shape_depth, tracker)

    if value == 0:
        return _decide_zero(base, m, coeffs, support, others, shape_depth, tracker)

    # Decompose by the position of the minimal exponent: k = t + u with
    # u_pivot = 0; then value = rho**t * w where w is the level-0 value,
    # and 0 < |w| <= |value| forces both w and t.
    unknown = False
    for pivot in range(m):
        a = coeffs[pivot]
        rest = coeffs[:pivot] + coeffs[pivot + 1 :]
        sub_window = enumerate_window(base, rest, abs(value) + abs(a) + 1)
        for s in sub_window.values:
            w = a + s
            if w == 0 or abs(w) > abs(value):
                continue
            ratio = value / w
            if ratio <= 0:
                continue
            t = base.exponent_of(ratio)
            if t is None:
                continue
            scale = base.power(t)
            reduced: List[Constraint] = [Constraint(rest, "=", w - a)]
            for oc in others:
                rcoeffs = tuple(
                    oc.coeffs[j] * scale for j in range(m) if j != pivot
                )
                reduced.append(
                    Constraint(rcoeffs, oc.rel, oc.bound - oc.coeffs[pivot] * scale)
                )
            sub = _decide(base, m - 1, reduced, shape_depth, tracker)
            if sub.verdict is Verdict.SAT:
                partial = list(sub.witness)
                partial.insert(pivot, 0)
                return SatResult(
                    Verdict.SAT, witness=tuple(u + t for u in partial)
                )
            if sub.verdict is Verdict.UNKNOWN:
                unknown = True
    if unknown:
        return SatResult(Verdict.UNKNOWN, certificate={"reason": "unresolved branch"})
    return SatResult(
        Verdict.UNSAT, certificate={"reason": "pivot decomposition refuted"}
    )


def _decide_zero(
    base: GeoBase,
    m: int,
    coeffs: Coeffs,
    support: List[int],
    others: List[Constraint],
    shape_depth: int,
    tracker: dict,
) -> SatResult:
    """The equality-to-zero case; scale invariant, so the shift is free."""
    if len(support) == 1:
        return SatResult(
            Verdict.UNSAT, certificate={"reason": "single term cannot vanish"}
        )
    if len(support) == 2:
        # a_i rho**k_i + a_j rho**k_j = 0 forces k_i - k_j to a fixed offset.
        i, j = support
        ratio = -coeffs[j] / coeffs[i]
        if ratio <= 0:
            return SatResult(
                Verdict.UNSAT, certificate={"reason": "same-sign pair cannot vanish"}
            )
        if ratio >= 1:
            e = base.exponent_of(ratio)
            delta = e if e is not None else None
        else:
            e = base.exponent_of(1 / ratio)
            delta = -e if e is not None else None
        if delta is None:
            return SatResult(
                Verdict.UNSAT, certificate={"reason": "ratio not a base power"}
            )
        # Substitute k_i = k_j + delta, k_j = max(0, -delta) + u, u >= 0.
        shift = base.power(max(0, -delta))
        step = base.power(max(0, delta)) / base.power(max(0, -delta))  # rho**delta
        reduced = []
        for oc in others:
            merged = (oc.coeffs[i] * step * shift) + oc.coeffs[j] * shift
            rcoeffs = []
            for pos in range(m):
                if pos == i:
                    continue
                rcoeffs.append(merged if pos == j else oc.coeffs[pos])
            reduced.append(Constraint(tuple(rcoeffs), oc.rel, oc.bound))
        sub = _decide(base, m - 1, reduced, shape_depth, tracker)
        if sub.verdict is Verdict.SAT:
            partial = list(sub.witness)
            j_reduced = j if j < i else j - 1
            kj = max(0, -delta) + partial[j_reduced]
            partial[j_reduced] = kj
            partial.insert(i, kj + delta)
            return SatResult(Verdict.SAT, witness=tuple(partial))
        return sub
    if not others:
        unknown = False
        for pivot in support:
            rest = coeffs[:pivot] + coeffs[pivot + 1 :]
            sub = _decide(
                base,
                m - 1,
                [Constraint(rest, "=", -coeffs[pivot])],
                shape_depth,
                tracker,
            )
            if sub.verdict is Verdict.SAT:
                partial = list(sub.witness)
                partial.insert(pivot, 0)
                return SatResult(Verdict.SAT, witness=tuple(partial))
            if sub.verdict is Verdict.UNKNOWN:
                unknown = True
        if unknown:
            return SatResult(Verdict.UNKNOWN, certificate={"reason": "unresolved branch"})
        return SatResult(
            Verdict.UNSAT, certificate={"reason": "zero sum unreachable"}
        )
    return SatResult(
        Verdict.UNKNOWN,
        certificate={"reason": "zero-sum equality with residual constraints"},
    )


# --- bounded SAT search -----------------------------------------------------


def _shape_search(
    base: GeoBase,
    m: int,
    cons: List[Constraint],
    shape_depth: int,
    tracker: dict,
) -> Optional[Tuple[int, ...]]:
    """Search pivot-normalized tuples (min component 0) plus a global shift.

    For a fixed shape u the constraint values scale by rho**t under the
    shift k = u + t, so the admissible shifts form an interval computed
    exactly per constraint.
    """
    from itertools import product

    for shape in product(range(shape_depth + 1), repeat=m):
        if 0 not in shape:
            continue
        tracker["nodes"] += 1
        if tracker["nodes"] > tracker["budget"]:
            return None
        lo, hi = 0, None  # admissible shift interval, hi None = unbounded
        ok = True
        for c in cons:
            w = sum(
                (a * base.power(u) for a, u in zip(c.coeffs, shape)), Fraction(0)
            )
            clo, chi = _shift_interval(base, w, c.rel, c.bound)
            if clo is None:
                ok = False
                break
            lo = max(lo, clo)
            if chi is not None:
                hi = chi if hi is None else min(hi, chi)
            if hi is not None and lo > hi:
                ok = False
                break
        if ok:
            return tuple(u + lo for u in shape)
    return None


def _shift_interval(base: GeoBase, w: Fraction, rel: str, b: Fraction):
    """Shifts t >= 0 with rho**t * w REL b, as (lo, hi); (None, None) if empty."""
    if w == 0:
        ok = (b == 0) if rel == "=" else (b > 0 if rel == "<" else b >= 0)
        return (0, None) if ok else (None, None)
    if rel == "=":
        ratio = b / w
        if ratio < 1:
            return (None, None)
        t = base.exponent_of(ratio)
        return (t, t) if t is not None else (None, None)
    strict = rel == "<"
    if w > 0:
        # Increasing in t: admissible iff t <= t_max.
        t = 0
        value = w
        if (value >= b) if strict else (value > b):
            return (None, None)
        while True:
            nxt = value * base.rho
            if (nxt >= b) if strict else (nxt > b):
                return (0, t)
            value = nxt
            t += 1
    # w < 0: decreasing in t, admissible iff t >= t_min.
    t = 0
    value = w
    while (value >= b) if strict else (value > b):
        value *= base.rho
        t += 1
    return (t, None)


# --- per-constraint intervals and the real relaxation -----------------------


def _combined_interval(c: Constraint):
    """([lo, hi] with None for unbounded, strict-hi flag) of admissible values."""
    has_neg = any(a < 0 for a in c.coeffs)
    has_pos = any(a > 0 for a in c.coeffs)
    total = sum(c.coeffs, Fraction(0))
    inf = None if has_neg else total
    sup = None if has_pos else total
    if c.rel == "=":
        lo, hi, strict_hi = c.bound, c.bound, False
    else:
        lo, hi, strict_hi = None, c.bound, c.rel == "<"
    if inf is not None:
        lo = inf if lo is None else max(lo, inf)
    if sup is not None:
        if hi is None or sup < hi:
            hi, strict_hi = sup, False
        elif sup == hi:
            pass
    return lo, hi, strict_hi


def _interval_empty(iv) -> bool:
    lo, hi, strict_hi = iv
    if lo is None or hi is None:
        return False
    return lo > hi or (lo == hi and strict_hi)


def _real_relaxation_feasible(m: int, cons: List[Constraint]) -> bool:
    """Fourier-Motzkin feasibility of the system over reals with y_i >= 1."""
    # Rows: (coeffs list, bound, strict) meaning sum coeffs * y (<|<=) bound.
    rows: List[Tuple[List[Fraction], Fraction, bool]] = []
    for c in cons:
        co = list(c.coeffs)
        if c.rel == "=":
            rows.append((co, c.bound, False))
            rows.append(([-a for a in co], -c.bound, False))
        else:
            rows.append((co, c.bound, c.rel == "<"))
    for i in range(m):
        co = [Fraction(0)] * m
        co[i] = Fraction(-1)
        rows.append((co, Fraction(-1), False))  # -y_i <= -1
    for var in range(m):
        uppers, lowers, rest = [], [], []
        for co, b, strict in rows:
            a = co[var]
            if a == 0:
                rest.append((co, b, strict))
            elif a > 0:
                uppers.append((co, b, strict, a))
            else:
                lowers.append((co, b, strict, a))
        for uco, ub, ustrict, ua in uppers:
            for lco, lb, lstrict, la in lowers:
                combo = [
                    uco[j] / ua - lco[j] / la for j in range(m)
                ]
                combo[var] = Fraction(0)
                rest.append((combo, ub / ua - lb / la, ustrict or lstrict))
        rows = rest
    for co, b, strict in rows:
        if (0 >= b) if strict else (0 > b):
            return False
    return True
