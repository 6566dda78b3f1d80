"""
Counterexample constructions for incorrect projection inequalities.

Every construction produces a finite union of boxes, and every report is
re-checked by exact evaluation before it is returned.  Parameters grow along
fixed geometric schedules so reports are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .boxgeom import Box, BoxUnion, Evaluation, evaluate_inequality
from .btcone import single_cover_system
from .core import (
    AxisSet,
    ProjectionInequality,
    WeightedFamily,
    canonicalize,
    common_denominator,
    format_rational,
    integer_direction,
    sides,
)
from .flower import materialize_flower, violating_flower
from .ratflow import c1_holds, is_fnc
from .ratlp import GE, LE, LinearSystem, solve

M_START = 10
M_CAP = 2**20
KAPPAS = tuple(range(2, 9))
FLOWER_SCALES = (1, 2, 4, 8, 16, 32, 64)
DEFAULT_RADIUS = 2
MAX_SPLITS = 4096

SKELETON = "skeleton"
UNIONBOX = "unionbox"
SINGLECOVER = "singlecover+unionbox"
HYBRID = "hybrid"
MULTIBOX = "multibox"
FLOWER = "flower"
ALL_METHODS = (FLOWER, SKELETON, UNIONBOX, SINGLECOVER, HYBRID, MULTIBOX)


class CapReachedError(RuntimeError):
    """A construction whose asymptotic condition holds never violated below the cap."""


class RefutationError(ValueError):
    """Refutation method called outside its precondition."""


def m_schedule(start: int = M_START, cap: int = M_CAP) -> list[int]:
    out = []
    m = start
    while m <= cap:
        out.append(m)
        m *= 2
    return out


@dataclass(frozen=True)
class RefutationReport:
    method: str
    ineq: ProjectionInequality
    witness: BoxUnion
    params: dict
    evaluation: Evaluation
    diagnostics: dict = field(default_factory=dict)

    @property
    def lhs(self) -> Fraction:
        return self.evaluation.lhs

    @property
    def rhs(self) -> Fraction:
        return self.evaluation.rhs

    @property
    def margin(self) -> Fraction:
        return self.evaluation.margin

    def verify(self) -> bool:
        again = evaluate_inequality(self.ineq, self.witness)
        return again.violated and again.lhs == self.lhs and again.rhs == self.rhs

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "inequality": self.ineq.to_json(),
            "witness": self.witness.to_json(),
            "params": _jsonable(self.params),
            "lhs": format_rational(self.lhs),
            "rhs": format_rational(self.rhs),
            "margin": format_rational(self.margin),
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _report(method, ineq, witness, params, diagnostics=None) -> RefutationReport | None:
    ev = evaluate_inequality(ineq, witness)
    if not ev.violated:
        return None
    return RefutationReport(method, ineq, witness, params, ev, diagnostics or {})


# --------------------------------------------------------------------------
# connection graph and cliques
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConnectionGraph:
    n: int
    edges: frozenset  # of frozenset({i, j})

    def neighbours(self, v: int) -> set[int]:
        return {w for e in self.edges if v in e for w in e if w != v}

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


def connection_graph(ineq_or_sides) -> ConnectionGraph:
    """Axis pairs jointly inside some B-side set and inside no A-side set."""
    a, b = _families(ineq_or_sides)
    in_a = {frozenset(p) for s in a.sets for p in itertools.combinations(sorted(s), 2)}
    in_b = {frozenset(p) for s in b.sets for p in itertools.combinations(sorted(s), 2)}
    return ConnectionGraph(a.n, frozenset(in_b - in_a))


def _families(ineq_or_sides) -> tuple[WeightedFamily, WeightedFamily]:
    if isinstance(ineq_or_sides, ProjectionInequality):
        return sides(canonicalize(ineq_or_sides))
    a, b = ineq_or_sides
    return a, b


def maximal_cliques(g: ConnectionGraph, within: Iterable[int] | None = None) -> list[frozenset]:
    """Bron-Kerbosch with pivoting; deterministic order of the output."""
    verts = set(range(1, g.n + 1)) if within is None else set(within)
    adj = {v: g.neighbours(v) & verts for v in verts}
    found = []

    def expand(r: set, p: set, x: set):
        if not p and not x:
            found.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: (len(adj[u] & p), -u))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    if verts:
        expand(set(), set(verts), set())
    return sorted(found, key=lambda c: (-len(c), sorted(c)))


def max_clique_size(g: ConnectionGraph, s: Iterable[int]) -> int:
    s = set(s)
    if not s:
        return 0
    return max(len(c) for c in maximal_cliques(g, s))


def skeleton_build(g: ConnectionGraph, m: int) -> BoxUnion:
    """One box per maximal clique: side ``m`` on its axes, 1 elsewhere."""
    if m < 1:
        raise ValueError("skeleton scale must be positive")
    boxes = [
        Box.at_origin([m if x in c else 1 for x in range(1, g.n + 1)])
        for c in maximal_cliques(g)
    ]
    return BoxUnion(g.n, tuple(boxes))


def skeleton_exponents(ineq_or_sides, g: ConnectionGraph | None = None) -> tuple[Fraction, Fraction]:
    """``(sum alpha_i, sum beta_j * Delta(B_j))``."""
    a, b = _families(ineq_or_sides)
    g = connection_graph((a, b)) if g is None else g
    return a.total_weight(), sum((w * max_clique_size(g, s) for s, w in b), Fraction(0))


def skeleton_refute(ineq: ProjectionInequality, m_start: int = M_START, m_cap: int = M_CAP):
    ineq = canonicalize(ineq)
    g = connection_graph(ineq)
    lhs_exp, rhs_exp = skeleton_exponents(ineq, g)
    if not lhs_exp < rhs_exp:
        return None
    for m in m_schedule(m_start, m_cap):
        rep = _report(
            SKELETON,
            ineq,
            skeleton_build(g, m),
            {"M": m, "edges": g.edge_list()},
            {"alpha_sum": lhs_exp, "beta_delta_sum": rhs_exp},
        )
        if rep is not None:
            return rep
    raise CapReachedError(f"skeleton condition {lhs_exp} < {rhs_exp} holds but M <= {m_cap} never violated")


# --------------------------------------------------------------------------
# union of two boxes
# --------------------------------------------------------------------------

def unionbox_exponents(ineq_or_sides, t: Sequence[int]) -> tuple[Fraction, Fraction]:
    """``(sum alpha_i |t . a_i|, sum beta_j |t . b_j|)``."""
    a, b = _families(ineq_or_sides)

    def dot(s):
        return sum(t[x - 1] for x in s)

    return (
        sum((w * abs(dot(s)) for s, w in a), Fraction(0)),
        sum((w * abs(dot(s)) for s, w in b), Fraction(0)),
    )


def unionbox_condition(ineq_or_sides, t: Sequence[int]) -> bool:
    lhs, rhs = unionbox_exponents(ineq_or_sides, t)
    return lhs < rhs


def unionbox_object(n: int, t: Sequence[int], m: int) -> BoxUnion:
    """Unit cube plus the box with sides ``m**t_i`` translated by the all-ones vector."""
    big = Box(tuple([1] * n), tuple(Fraction(m) ** int(ti) for ti in t))
    return BoxUnion(n, (Box.at_origin([1] * n), big))


def _check_t(t, n: int) -> list[int]:
    t = list(t)
    if len(t) != n:
        raise RefutationError(f"exponent vector needs {n} entries, got {len(t)}")
    for v in t:
        if isinstance(v, bool) or not (isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1)):
            raise RefutationError(f"exponent vector entries must be integers, got {v!r}")
    return [int(v) for v in t]


def unionbox_refute(
    ineq: ProjectionInequality,
    t: Sequence[int],
    m_start: int = M_START,
    m_cap: int = M_CAP,
    method: str = UNIONBOX,
):
    ineq = canonicalize(ineq)
    t = _check_t(t, ineq.n)
    a, b = sides(ineq)
    if not c1_holds(a, b):
        raise RefutationError("union-of-boxes construction needs a C1-balanced inequality")
    lhs_exp, rhs_exp = unionbox_exponents((a, b), t)
    if not lhs_exp < rhs_exp:
        return None
    for m in m_schedule(m_start, m_cap):
        rep = _report(
            method,
            ineq,
            unionbox_object(ineq.n, t, m),
            {"M": m, "t": t},
            {"lhs_exponent": lhs_exp, "rhs_exponent": rhs_exp},
        )
        if rep is not None:
            return rep
    raise CapReachedError(f"union-box condition holds for t={t} but M <= {m_cap} never violated")


# --------------------------------------------------------------------------
# exact single cover
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SingleCoverVerdict:
    index: int
    target: AxisSet
    beta: Fraction
    certificate: list | None  # c with 0 <= c <= alpha and sum c_i a_i = beta b
    direction: list | None  # integer separating t when infeasible

    @property
    def feasible(self) -> bool:
        return self.certificate is not None


def single_cover_check(ineq_or_sides) -> list[SingleCoverVerdict]:
    a, b = _families(ineq_or_sides)
    verdicts = []
    for j, (bj, beta) in enumerate(b):
        system = single_cover_system(a, bj, beta)
        result = solve(system)
        if result.feasible:
            c = [result.witness[("c", i)] for i in range(len(a))]
            verdicts.append(SingleCoverVerdict(j, bj, beta, c, None))
            continue
        # axis-row multipliers y give the separating direction t = -y
        y = [Fraction(0)] * a.n
        for lam, con in zip(result.farkas, system.constraints):
            if con.name[0] == "axis":
                y[con.name[1] - 1] = lam
        t = integer_direction([-v for v in y])
        verdicts.append(SingleCoverVerdict(j, bj, beta, None, t))
    return verdicts


# --------------------------------------------------------------------------
# exponent search
# --------------------------------------------------------------------------

def _grid(n: int, radius: int):
    return itertools.product(range(-radius, radius + 1), repeat=n)


def search_t(ineq: ProjectionInequality, radius: int = DEFAULT_RADIUS, use_single_cover: bool = True):
    """First exponent vector passing the union-box test.

    Separating directions from failed single-cover LPs are tried before the
    lexicographic grid ``{-radius..radius}^n``.  Returns ``(t, source)`` with
    ``source`` in ``{"single_cover", "grid"}``, or ``None``.
    """
    if radius > 4:
        raise RefutationError("search radius is limited to 4")
    ineq = canonicalize(ineq)
    a, b = sides(ineq)
    if use_single_cover:
        for v in single_cover_check((a, b)):
            if v.direction is not None and unionbox_condition((a, b), v.direction):
                return list(v.direction), "single_cover"
    for t in _grid(ineq.n, radius):
        if unionbox_condition((a, b), t):
            return list(t), "grid"
    return None


# --------------------------------------------------------------------------
# hybrid: skeleton for one part, a far box for the other
# --------------------------------------------------------------------------

def _splits(ineq: ProjectionInequality):
    """Balanced splits ``(part1, part2)``; part 1 is never empty."""
    items = list(ineq.coeff.items())
    choices = []
    for s, c in items:
        if c.denominator == 1 and abs(c) <= 8:
            k = abs(int(c))
            choices.append([Fraction(i) * (1 if c > 0 else -1) for i in range(k + 1)])
        else:
            choices.append([Fraction(0), c])
    count = 1
    for ch in choices:
        count *= len(ch)
    if count > MAX_SPLITS:
        choices = [[Fraction(0), c] for _, c in items]
    seen = set()
    for combo in itertools.product(*choices):
        part1 = {s: v for (s, _), v in zip(items, combo) if v}
        if not part1 or not any(v < 0 for v in part1.values()):
            continue
        key = tuple(sorted((tuple(sorted(s)), v) for s, v in part1.items()))
        if key in seen:
            continue
        seen.add(key)
        p1 = ProjectionInequality(ineq.n, part1)
        p2 = ProjectionInequality(ineq.n, {s: c - part1.get(s, 0) for s, c in items})
        if not c1_holds(*sides(p1)):
            continue
        yield p1, p2


def box_exponents(part1: ProjectionInequality, part2: ProjectionInequality) -> list[int] | None:
    """Integer ``r`` with ``r . s >= 1`` on part-2 sets and ``r . s <= 0`` on part-1 sets."""
    n = part1.n
    system = LinearSystem()
    for x in range(1, n + 1):
        system.add_variable(x, nonneg=False)
    for s in part2.coeff:
        system.add_constraint({x: 1 for x in s}, GE, 1)
    for s in part1.coeff:
        system.add_constraint({x: 1 for x in s}, LE, 0)
    result = solve(system)
    if not result.feasible:
        return None
    r = [result.witness[x] for x in range(1, n + 1)]
    den = common_denominator(r)
    return [int(v * den) for v in r]


def hybrid_object(g: ConnectionGraph, m: int, r: Sequence[int] | None, big_r: int) -> BoxUnion:
    skel = skeleton_build(g, m)
    if r is None:
        return skel
    corner = skel.upper_bounds()
    box = Box(tuple(corner), tuple(Fraction(big_r) ** int(v) for v in r))
    return BoxUnion(g.n, skel.boxes + (box,))


def hybrid_refute(
    ineq: ProjectionInequality,
    m: int | None = None,
    big_r: int | None = None,
    r: Sequence[int] | None = None,
    split: tuple[ProjectionInequality, ProjectionInequality] | None = None,
    m_start: int = M_START,
    m_cap: int = M_CAP,
    kappas: Sequence[int] = KAPPAS,
):
    """Skeleton counterexample for part 1 plus a far box neutralizing part 2.

    ``m`` / ``big_r`` pin the scales; otherwise ``M`` runs the doubling
    schedule and ``R = M**kappa``.  ``r`` and ``split`` pin the box exponents
    and the split; otherwise splits are enumerated and ``r`` comes from an
    exact feasibility LP.
    """
    ineq = canonicalize(ineq)
    if not is_fnc(ineq):
        raise RefutationError("hybrid construction is for FNC inequalities")
    candidates = [split] if split is not None else _splits(ineq)
    for part1, part2 in candidates:
        part1 = canonicalize(part1)
        g = connection_graph(part1)
        lhs_exp, rhs_exp = skeleton_exponents(part1, g)
        if not lhs_exp < rhs_exp:
            continue
        if part2.is_zero():
            exps = None
        elif r is not None:
            exps = _check_t(r, ineq.n)
        else:
            exps = box_exponents(part1, part2)
            if exps is None:
                continue
        ms = [m] if m is not None else m_schedule(m_start, m_cap)
        for mm in ms:
            rs = [big_r] if big_r is not None else [mm**k for k in kappas]
            for rr in rs:
                obj = hybrid_object(g, mm, exps, rr)
                params = {
                    "M": mm,
                    "R": rr,
                    "kappa": _kappa(mm, rr),
                    "r": exps,
                    "part1": str(part1),
                    "part2": str(part2) if not part2.is_zero() else "",
                    "edges": g.edge_list(),
                }
                rep = _report(HYBRID, ineq, obj, params, {"alpha_sum": lhs_exp, "beta_delta_sum": rhs_exp})
                if rep is not None:
                    return rep
    return None


def _kappa(m: int, big_r: int):
    k = 0
    v = 1
    while v < big_r:
        v *= m
        k += 1
    return k if v == big_r else None


# --------------------------------------------------------------------------
# several far-apart boxes with exponents from an LP
# --------------------------------------------------------------------------
#
# Boxes with sides M**e_b placed so that all their projections are disjoint
# give |T_S| = sum_b M**(e_b . 1_S), which is M**max_b(e_b . 1_S) up to a
# factor k.  A strict exponent gap therefore refutes.  Which box attains the
# maximum on each B-side set is fixed by a set partition of the B-side; the
# A-side maxima are bounded by auxiliary variables p_i.


def set_partitions(items: Sequence) -> Iterable[list]:
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def multibox_exponents(ineq: ProjectionInequality, max_partitions: int = 5000):
    """``(partition, exponent rows)`` with a strict asymptotic gap, or ``None``."""
    a, b = sides(canonicalize(ineq))
    n = ineq.n
    for count, part in enumerate(set_partitions(range(len(b)))):
        if count >= max_partitions:
            break
        system = LinearSystem()
        for q in range(len(part)):
            for x in range(1, n + 1):
                system.add_variable(("e", q, x), nonneg=False)
        gap: dict = {}
        for i, (s, w) in enumerate(a):
            system.add_variable(("p", i), nonneg=False)
            gap[("p", i)] = w
            for q in range(len(part)):
                row = {("p", i): 1}
                row.update({("e", q, x): -1 for x in s})
                system.add_constraint(row, GE, 0)
        for q, block in enumerate(part):
            for j in block:
                bj, beta = b.entries[j]
                for x in bj:
                    gap[("e", q, x)] = gap.get(("e", q, x), Fraction(0)) - beta
        system.add_constraint(gap, LE, -1)
        result = solve(system)
        if result.feasible:
            rows = [[result.witness[("e", q, x)] for x in range(1, n + 1)] for q in range(len(part))]
            den = common_denominator(v for row in rows for v in row)
            return part, [[int(v * den) for v in row] for row in rows]
    return None


def multibox_object(n: int, exponents: Sequence[Sequence[int]], m: int) -> BoxUnion:
    boxes = []
    offset = Fraction(0)
    for row in exponents:
        box = Box(tuple([offset] * n), tuple(Fraction(m) ** v for v in row))
        boxes.append(box)
        offset = max(box.upper)
    return BoxUnion(n, tuple(boxes))


def multibox_refute(ineq: ProjectionInequality, m_start: int = M_START, m_cap: int = M_CAP):
    ineq = canonicalize(ineq)
    found = multibox_exponents(ineq)
    if found is None:
        return None
    part, exps = found
    for m in m_schedule(m_start, m_cap):
        rep = _report(MULTIBOX, ineq, multibox_object(ineq.n, exps, m), {"M": m, "exponents": exps}, {"partition": part})
        if rep is not None:
            return rep
    raise CapReachedError(f"multibox exponents {exps} have a strict gap but M <= {m_cap} never violated")


# --------------------------------------------------------------------------
# flowers, for inequalities that are not FNC
# --------------------------------------------------------------------------

def flower_refute(ineq: ProjectionInequality, base: int = 2, scales: Sequence[int] = FLOWER_SCALES):
    ineq = canonicalize(ineq)
    n = ineq.n
    for s in scales:
        fl, strict = violating_flower(ineq, tau=s)
        low = min(min(fl.log_lengths.values()), 0)
        thickness = int(low) - s * (n + 1) - n - 2
        obj = materialize_flower(fl, base=base, thickness=thickness)
        rep = _report(
            FLOWER,
            ineq,
            obj,
            {"tau": s, "base": base, "thickness": thickness, "case": strict.case},
            {"tau_lhs": strict.lhs_coef, "tau_rhs": strict.rhs_coef},
        )
        if rep is not None:
            return rep
    return None


# --------------------------------------------------------------------------
# pipeline
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineOutcome:
    report: RefutationReport | None
    attempts: list  # (method, outcome string)

    @property
    def refuted(self) -> bool:
        return self.report is not None


def refute_pipeline(
    ineq: ProjectionInequality,
    methods: Sequence[str] = ALL_METHODS,
    radius: int = DEFAULT_RADIUS,
    m_cap: int = M_CAP,
    m_start: int = M_START,
    hybrid_r: Sequence[int] | None = None,
) -> PipelineOutcome:
    """Try the constructions in order; the first exact violation wins."""
    ineq = canonicalize(ineq)
    unknown = set(methods) - set(ALL_METHODS)
    if unknown:
        raise ValueError(f"unknown methods {sorted(unknown)}")
    attempts = []

    def done(rep, method):
        if rep is None:
            attempts.append((method, "no witness"))
            return None
        if not rep.verify():
            raise AssertionError(f"{method} report failed re-verification")
        attempts.append((method, "refuted"))
        return PipelineOutcome(rep, attempts)

    if not is_fnc(ineq):
        if FLOWER in methods:
            out = done(flower_refute(ineq), FLOWER)
            if out:
                return out
        return PipelineOutcome(None, attempts)

    if SKELETON in methods:
        try:
            out = done(skeleton_refute(ineq, m_start, m_cap), SKELETON)
        except CapReachedError as exc:
            attempts.append((SKELETON, f"cap reached: {exc}"))
            out = None
        if out:
            return out
    if UNIONBOX in methods:
        found = search_t(ineq, radius, use_single_cover=False)
        if found is None:
            attempts.append((UNIONBOX, f"no t within radius {radius}"))
        else:
            try:
                out = done(unionbox_refute(ineq, found[0], m_start, m_cap), UNIONBOX)
            except CapReachedError as exc:
                attempts.append((UNIONBOX, f"cap reached: {exc}"))
                out = None
            if out:
                return out
    if SINGLECOVER in methods:
        directions = [v.direction for v in single_cover_check(ineq) if v.direction is not None]
        if not directions:
            attempts.append((SINGLECOVER, "every B-set has an exact single cover"))
        for t in directions:
            try:
                out = done(unionbox_refute(ineq, t, m_start, m_cap, method=SINGLECOVER), SINGLECOVER)
            except CapReachedError as exc:
                attempts.append((SINGLECOVER, f"cap reached: {exc}"))
                out = None
            if out:
                return out
    if HYBRID in methods:
        out = done(hybrid_refute(ineq, r=hybrid_r, m_start=m_start, m_cap=min(m_cap, 2**10)), HYBRID)
        if out:
            return out
    if MULTIBOX in methods:
        try:
            out = done(multibox_refute(ineq, m_start, m_cap), MULTIBOX)
        except CapReachedError as exc:
            attempts.append((MULTIBOX, f"cap reached: {exc}"))
            out = None
        if out:
            return out
    return PipelineOutcome(None, attempts)
