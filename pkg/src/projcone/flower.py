"""
Rectangular flowers.

A flower over ``[n]`` is described by log-space edge lengths ``f[S, i]`` for
every nonempty ``S`` and every ``i in S``, monotone under inclusion
(``f[S, i] >= f[S', i]`` whenever ``S`` is a subset of ``S'``).  Its log-projection
vector is ``pi[S] = sum_{i in S} f[S, i]``; a vector is a flower vector iff
that linear system (``LP(pi)``) is feasible, and the flower vectors are
exactly the points satisfying every FNC inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .boxgeom import Box, BoxUnion
from .core import (
    AxisSet,
    LogProjectionVector,
    ProjectionInequality,
    SchemaError,
    canonicalize,
    check_dimension,
    enumerate_subsets,
    format_rational,
    format_subset,
    parse_rational,
    parse_subset,
    sides,
)
from .ratflow import c1_holds, check_c1, saturates
from .ratlp import EQ, GE, LinearSystem, solve


class PreconditionError(ValueError):
    """Operation called outside its documented domain."""


class ScalingError(ValueError):
    """Flower log-lengths must be integers before materialization."""


def flower_keys(n: int) -> list[tuple[AxisSet, int]]:
    return [(s, i) for s in enumerate_subsets(n) for i in sorted(s)]


def covering_pairs(n: int):
    """``(S, S + {j}, i)`` for all ``i in S``, ``j`` outside ``S``."""
    for s in enumerate_subsets(n):
        if len(s) == n:
            continue
        for j in range(1, n + 1):
            if j in s:
                continue
            bigger = s | {j}
            for i in sorted(s):
                yield s, bigger, i


@dataclass(frozen=True)
class RectangularFlower:
    n: int
    log_lengths: Mapping[tuple[AxisSet, int], Fraction]

    def __post_init__(self):
        check_dimension(self.n)
        raw = {(frozenset(s), i): Fraction(v) for (s, i), v in self.log_lengths.items()}
        keys = flower_keys(self.n)
        missing = [k for k in keys if k not in raw]
        if missing:
            raise ValueError(f"flower missing {len(missing)} log-lengths, e.g. {_key_str(missing[0])}")
        if len(raw) != len(keys):
            raise ValueError("flower has log-lengths for pairs (S, i) with i outside S")
        object.__setattr__(self, "log_lengths", {k: raw[k] for k in keys})
        bad = self.monotonicity_violations()
        if bad:
            s, t, i = bad[0]
            raise ValueError(
                f"flower not cornered: f[{format_subset(s)}|{i}] < f[{format_subset(t)}|{i}]"
            )

    def __getitem__(self, key) -> Fraction:
        s, i = key
        return self.log_lengths[(frozenset(s), i)]

    def monotonicity_violations(self) -> list:
        f = self.log_lengths
        return [(s, t, i) for s, t, i in covering_pairs(self.n) if f[(s, i)] < f[(t, i)]]

    @classmethod
    def constant(cls, n: int, value) -> "RectangularFlower":
        return cls(n, {k: Fraction(value) for k in flower_keys(n)})

    @classmethod
    def box(cls, sides: list) -> "RectangularFlower":
        """The flower of a single box with the given log side lengths."""
        n = len(sides)
        return cls(n, {(s, i): Fraction(sides[i - 1]) for s, i in flower_keys(n)})

    def scaled(self, factor) -> "RectangularFlower":
        factor = Fraction(factor)
        if factor < 0:
            raise ValueError("flowers only scale by nonnegative factors")
        return RectangularFlower(self.n, {k: v * factor for k, v in self.log_lengths.items()})

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "log_lengths": {_key_str(k): format_rational(v) for k, v in self.log_lengths.items()},
        }

    @classmethod
    def from_json(cls, data, where: str = "flower") -> "RectangularFlower":
        if not isinstance(data, dict):
            raise SchemaError("expected an object", where)
        n = data.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise SchemaError("missing or non-integer 'n'", f"{where}.n")
        raw = data.get("log_lengths")
        if not isinstance(raw, dict):
            raise SchemaError("missing 'log_lengths' object", f"{where}.log_lengths")
        values = {}
        for key, value in raw.items():
            loc = f"{where}.log_lengths[{key!r}]"
            if not isinstance(key, str) or key.count("|") != 1:
                raise SchemaError("keys look like 'S|i', e.g. '1,2|1'", loc)
            left, right = key.split("|")
            s = parse_subset(left, n, loc)
            try:
                i = int(right)
            except ValueError:
                raise SchemaError("axis after '|' must be an integer", loc) from None
            values[(s, i)] = parse_rational(value, loc)
        try:
            return cls(n, values)
        except ValueError as exc:
            raise SchemaError(str(exc), where) from None


def _key_str(key) -> str:
    s, i = key
    return f"{format_subset(s)}|{i}"


def pi_from_flower(fl: RectangularFlower) -> LogProjectionVector:
    f = fl.log_lengths
    return LogProjectionVector(
        fl.n, {s: sum((f[(s, i)] for i in s), Fraction(0)) for s in enumerate_subsets(fl.n)}
    )


def flower_lp(pi: LogProjectionVector) -> LinearSystem:
    """``LP(pi)``: free variables ``f[S, i]``; monotonicity on covering pairs."""
    system = LinearSystem()
    for key in flower_keys(pi.n):
        system.add_variable(key, nonneg=False)
    for s in enumerate_subsets(pi.n):
        system.add_constraint({(s, i): 1 for i in s}, EQ, pi[s], name=("sum", s))
    for s, t, i in covering_pairs(pi.n):
        system.add_constraint({(s, i): 1, (t, i): -1}, GE, 0, name=("mono", s, t, i))
    return system


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of ``LP(pi)``: a flower, or an FNC inequality that ``pi`` violates."""

    flower: RectangularFlower | None
    certificate: ProjectionInequality | None

    @property
    def member(self) -> bool:
        return self.flower is not None


def flower_from_pi(pi: LogProjectionVector) -> MembershipResult:
    if not isinstance(pi, LogProjectionVector):
        raise SchemaError("expected a LogProjectionVector", "pi")
    system = flower_lp(pi)
    result = solve(system)
    if result.feasible:
        return MembershipResult(RectangularFlower(pi.n, result.witness), None)
    # multipliers on the sum rows form a valid FNC inequality that pi violates
    coeff = {}
    for lam, con in zip(result.farkas, system.constraints):
        if con.name[0] == "sum" and lam:
            coeff[con.name[1]] = lam
    cert = canonicalize(ProjectionInequality(pi.n, coeff)).integral()
    return MembershipResult(None, cert)


@dataclass(frozen=True)
class StrictnessReport:
    """Coefficients of ``tau`` on both sides of the claim for a violating flower."""

    case: str  # "mass", "c1" or "cut"
    lhs_coef: Fraction
    rhs_coef: Fraction
    tau: Fraction

    @property
    def strict(self) -> bool:
        return self.lhs_coef < self.rhs_coef


def tau_coefficients(ineq: ProjectionInequality, fl: RectangularFlower, tau) -> tuple:
    pi = pi_from_flower(fl)
    tau = Fraction(tau)
    lhs = sum((c * pi[s] for s, c in ineq.coeff.items() if c > 0), Fraction(0)) / tau
    rhs = sum((-c * pi[s] for s, c in ineq.coeff.items() if c < 0), Fraction(0)) / tau
    return lhs, rhs


def violating_flower(ineq: ProjectionInequality, tau=1) -> tuple[RectangularFlower, StrictnessReport]:
    """A flower whose log-projection vector strictly violates a non-FNC claim.

    Unequal total mass: a cube, grown (``f = tau``) if the B-side is heavier
    and shrunk (``f = -tau``) otherwise.  Balanced mass but an unbalanced
    axis ``x``: the box stretched by ``tau`` along an axis whose B-load
    exceeds its A-load.  Otherwise take the residual min cut of ``N(A, B)``
    and set ``f[S, x] = tau`` iff some sink-side node ``(B_j, x)`` has ``S``
    inside ``B_j``.
    """
    ineq = canonicalize(ineq)
    tau = Fraction(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    a, b = sides(ineq)
    report = saturates(a, b)
    if report.saturates:
        raise PreconditionError(f"{ineq} is an FNC inequality; no flower violates it")
    n = ineq.n
    if a.mass() != b.mass():
        sign = 1 if a.mass() < b.mass() else -1
        fl = RectangularFlower.constant(n, sign * tau)
        case = "mass"
    elif not c1_holds(a, b):
        balance = check_c1(a, b)
        x = min(k for k, v in balance.items() if v < 0)
        fl = RectangularFlower(n, {(s, i): (tau if i == x else Fraction(0)) for s, i in flower_keys(n)})
        case = "c1"
    else:
        starved = [
            (b.entries[node[1]][0], node[2])
            for node in report.network.lambda_nodes
            if node in report.cut.sink_side
        ]
        values = {}
        for s, x in flower_keys(n):
            hit = any(y == x and s <= bj for bj, y in starved)
            values[(s, x)] = tau if hit else Fraction(0)
        fl = RectangularFlower(n, values)
        case = "cut"
    lhs, rhs = tau_coefficients(ineq, fl, tau)
    strict = StrictnessReport(case, lhs, rhs, tau)
    if not strict.strict:
        raise AssertionError(f"violating flower construction failed on {ineq}: {lhs} >= {rhs}")
    return fl, strict


def materialize_flower(fl: RectangularFlower, base: int = 2, thickness: int = 0) -> BoxUnion:
    """Closed-box realization of a flower with integer log-lengths.

    Petal ``S`` becomes the box with side ``base**f[S, i]`` on each ``i in S``
    and ``base**thickness`` on the remaining axes, anchored at the origin.
    Boxes contained in other petals are dropped.  With ``thickness = 0``
    this is the unit-thickened object; a very negative ``thickness`` makes
    the projected volumes approach ``base**pi[S]``.
    """
    if not isinstance(base, int) or base < 2:
        raise ValueError("base must be an integer >= 2")
    lengths = {}
    for key, v in fl.log_lengths.items():
        if v.denominator != 1:
            raise ScalingError(f"log-length {v} at {_key_str(key)} is not an integer; scale first")
        lengths[key] = int(v)
    if int(thickness) != thickness:
        raise ScalingError("thickness exponent must be an integer")
    thin = Fraction(base) ** int(thickness)
    boxes = []
    for s in enumerate_subsets(fl.n):
        sides_ = [
            Fraction(base) ** lengths[(s, i)] if i in s else thin for i in range(1, fl.n + 1)
        ]
        boxes.append(Box.at_origin(sides_))
    return BoxUnion(fl.n, tuple(boxes)).pruned()
