"""
Saturation networks, exact max-flow / min-cut, and the cover predicates.

The network ``N(A, B)`` has a source arc of capacity ``alpha_i`` into every
node ``(A_i, x)`` with ``x in A_i``, a sink arc of capacity ``beta_j`` out of
every node ``(B_j, y)``, and an uncapacitated arc ``(A_i, x) -> (B_j, x)``
whenever ``A_i`` is a subset of ``B_j``.

Max-flow is Edmonds-Karp (shortest augmenting paths), which terminates after
O(V E^2) augmentations for arbitrary capacities, so exact rationals are safe.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import (
    ProjectionInequality,
    WeightedFamily,
    canonicalize,
    format_rational,
    sides,
)

SOURCE = ("s",)
SINK = ("t",)
INF = None  # capacity marker for uncapacitated arcs


def sigma_node(i: int, x: int) -> tuple:
    return ("A", i, x)


def lambda_node(j: int, y: int) -> tuple:
    return ("B", j, y)


@dataclass(frozen=True)
class FlowNetwork:
    source: tuple
    sink: tuple
    sigma_nodes: tuple
    lambda_nodes: tuple
    arcs: tuple  # (tail, head, capacity or INF)

    @property
    def nodes(self) -> list:
        return [self.source, *self.sigma_nodes, *self.lambda_nodes, self.sink]

    def sink_capacity(self) -> Fraction:
        return sum((c for u, v, c in self.arcs if v == self.sink), Fraction(0))

    def middle_arcs(self) -> list:
        return [(u, v) for u, v, c in self.arcs if c is INF]


@dataclass(frozen=True)
class CutCertificate:
    value: Fraction
    source_side: frozenset
    sink_side: frozenset

    def to_json(self) -> dict:
        def fmt(node):
            return list(node)

        return {
            "value": format_rational(self.value),
            "source_side": sorted((fmt(v) for v in self.source_side), key=repr),
            "sink_side": sorted((fmt(v) for v in self.sink_side), key=repr),
        }


@dataclass(frozen=True)
class FlowResult:
    value: Fraction
    cut: CutCertificate
    flow: dict  # (tail, head) -> flow on that arc (positive entries only)


def build_network(a: WeightedFamily, b: WeightedFamily) -> FlowNetwork:
    if a.n != b.n:
        raise ValueError("families live in different dimensions")
    sigma = [sigma_node(i, x) for i, (s, _) in enumerate(a) for x in sorted(s)]
    lam = [lambda_node(j, y) for j, (s, _) in enumerate(b) for y in sorted(s)]
    arcs = []
    for i, (s, w) in enumerate(a):
        for x in sorted(s):
            arcs.append((SOURCE, sigma_node(i, x), w))
    for i, (sa, _) in enumerate(a):
        for j, (sb, _) in enumerate(b):
            if sa <= sb:
                for x in sorted(sa):
                    arcs.append((sigma_node(i, x), lambda_node(j, x), INF))
    for j, (s, w) in enumerate(b):
        for y in sorted(s):
            arcs.append((lambda_node(j, y), SINK, w))
    return FlowNetwork(SOURCE, SINK, tuple(sigma), tuple(lam), tuple(arcs))


def max_flow_min_cut(net: FlowNetwork) -> FlowResult:
    """Exact maximum flow with the residual-reachability minimum cut."""
    finite_total = sum((c for _, _, c in net.arcs if c is not INF), Fraction(0))
    big = finite_total + 1  # exceeds every finite cut, so never saturated

    cap: dict = {}
    adj: dict = {v: [] for v in net.nodes}
    for u, v, c in net.arcs:
        c = big if c is INF else Fraction(c)
        if (u, v) not in cap:
            adj[u].append(v)
            adj[v].append(u)
            cap.setdefault((v, u), Fraction(0))
        cap[(u, v)] = cap.get((u, v), Fraction(0)) + c
    residual = dict(cap)

    value = Fraction(0)
    while True:
        parent = {net.source: None}
        queue = deque([net.source])
        while queue and net.sink not in parent:
            u = queue.popleft()
            for v in adj[u]:
                if v not in parent and residual[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if net.sink not in parent:
            break
        path = []
        v = net.sink
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        delta = min(residual[e] for e in path)
        for u, v in path:
            residual[(u, v)] -= delta
            residual[(v, u)] += delta
        value += delta

    reach = {net.source}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in reach and residual[(u, v)] > 0:
                reach.add(v)
                queue.append(v)
    source_side = frozenset(reach)
    sink_side = frozenset(v for v in net.nodes if v not in reach)

    cut_value = Fraction(0)
    for u, v, c in net.arcs:
        if u in source_side and v in sink_side:
            if c is INF:
                raise AssertionError("uncapacitated arc crosses a finite cut")
            cut_value += c
    if cut_value != value:
        raise AssertionError(f"max-flow {value} != min-cut {cut_value}")

    flow = {}
    arc_set = {(u, v) for u, v, _ in net.arcs}
    for (u, v), c in cap.items():
        f = c - residual[(u, v)]
        if f > 0 and (u, v) in arc_set:
            flow[(u, v)] = f
    return FlowResult(value, CutCertificate(cut_value, source_side, sink_side), flow)


def check_c1(a: WeightedFamily, b: WeightedFamily) -> dict[int, Fraction]:
    """Per-axis balance ``sum alpha_i [x in A_i] - sum beta_j [x in B_j]``."""
    if a.n != b.n:
        raise ValueError("families live in different dimensions")
    return {x: a.axis_load(x) - b.axis_load(x) for x in range(1, a.n + 1)}


def c1_holds(a: WeightedFamily, b: WeightedFamily) -> bool:
    return all(v == 0 for v in check_c1(a, b).values())


@dataclass(frozen=True)
class SaturationReport:
    saturates: bool
    c1: dict
    flow_value: Fraction
    sink_capacity: Fraction
    cut: CutCertificate
    network: FlowNetwork

    def __bool__(self) -> bool:
        return self.saturates


def saturates(a: WeightedFamily, b: WeightedFamily) -> SaturationReport:
    """C1 balance plus a max flow equal to the total sink-arc capacity."""
    balance = check_c1(a, b)
    net = build_network(a, b)
    result = max_flow_min_cut(net)
    total = net.sink_capacity()
    ok = all(v == 0 for v in balance.values()) and result.value == total
    return SaturationReport(ok, balance, result.value, total, result.cut, net)


def is_fnc(ineq: ProjectionInequality) -> SaturationReport:
    """Whether the inequality is a fractional nonuniform-cover inequality."""
    a, b = sides(canonicalize(ineq))
    return saturates(a, b)


def covers(a_sets: Iterable, b_sets: Iterable, n: int | None = None):
    """Explicit coordinate-preserving bijection witnessing that A covers B.

    Returns ``{(i, x): (j, x)}`` over family indices, or ``None``.
    """
    a_sets = [frozenset(s) for s in a_sets]
    b_sets = [frozenset(s) for s in b_sets]
    if n is None:
        n = max((max(s) for s in a_sets + b_sets if s), default=1)
    a = WeightedFamily.unweighted(n, a_sets)
    b = WeightedFamily.unweighted(n, b_sets)
    if not c1_holds(a, b):
        return None
    net = build_network(a, b)
    result = max_flow_min_cut(net)
    if result.value != len(net.lambda_nodes) or result.value != len(net.sigma_nodes):
        return None
    mapping = {}
    for (u, v), f in result.flow.items():
        if u[0] == "A" and v[0] == "B":
            if f != 1 or (u[1], u[2]) in mapping:
                raise AssertionError("unit network produced a fractional flow")
            mapping[(u[1], u[2])] = (v[1], v[2])
    return mapping


def is_valid_cover_mapping(a_sets, b_sets, mapping) -> bool:
    a_sets = [frozenset(s) for s in a_sets]
    b_sets = [frozenset(s) for s in b_sets]
    sigma = {(i, x) for i, s in enumerate(a_sets) for x in s}
    gamma = {(j, y) for j, s in enumerate(b_sets) for y in s}
    if set(mapping) != sigma or set(mapping.values()) != gamma or len(sigma) != len(gamma):
        return False
    for (i, x), (j, y) in mapping.items():
        if x != y or not a_sets[i] <= b_sets[j]:
            return False
    return True
