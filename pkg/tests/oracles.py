"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import lcm

import networkx as nx

from projcone.ratlp import EQ, GE, LE


def inclusion_exclusion_volume(boxes) -> Fraction:
    """Union volume by inclusion-exclusion over all box subfamilies."""
    boxes = [(tuple(map(Fraction, lo)), tuple(Fraction(l) + Fraction(s) for l, s in zip(lo, sides)))
             for lo, sides in boxes]
    total = Fraction(0)
    for k in range(1, len(boxes) + 1):
        for combo in itertools.combinations(boxes, k):
            lo = [max(b[0][d] for b in combo) for d in range(len(combo[0][0]))]
            hi = [min(b[1][d] for b in combo) for d in range(len(combo[0][0]))]
            vol = Fraction(1)
            for a, b in zip(lo, hi):
                vol *= max(Fraction(0), b - a)
            total += vol if k % 2 else -vol
    return total


def cell_count_volume(boxes) -> Fraction:
    """Union volume by counting cells of the common-denominator grid."""
    values = [Fraction(v) for lo, sides in boxes for v in (*lo, *sides)]
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    scaled = [([int(Fraction(c) * den) for c in lo], [int((Fraction(c) + Fraction(s)) * den) for c, s in zip(lo, sides)])
              for lo, sides in boxes]
    dim = len(scaled[0][0])
    hi = [max(b[1][d] for b in scaled) for d in range(dim)]
    count = 0
    for cell in itertools.product(*(range(h) for h in hi)):
        if any(all(lo[d] <= cell[d] and cell[d] + 1 <= up[d] for d in range(dim)) for lo, up in scaled):
            count += 1
    return Fraction(count, den**dim)


def union_boxes(u):
    """``BoxUnion`` -> list of (corner, sides) pairs."""
    return [(b.corner, b.sides) for b in u.boxes]


def networkx_max_flow(net) -> Fraction:
    g = nx.DiGraph()
    for u, v, c in net.arcs:
        if c is None:
            g.add_edge(u, v)
        elif g.has_edge(u, v):
            g[u][v]["capacity"] += Fraction(c)
        else:
            g.add_edge(u, v, capacity=Fraction(c))
    g.add_nodes_from(net.nodes)
    # scale to integers so the library's arithmetic stays exact
    den = 1
    for _, _, c in net.arcs:
        if c is not None:
            den = lcm(den, Fraction(c).denominator)
    for u, v, data in g.edges(data=True):
        if "capacity" in data:
            data["capacity"] = int(data["capacity"] * den)
    value = nx.maximum_flow_value(g, net.source, net.sink)
    return Fraction(value, den)


def fourier_motzkin_feasible(system) -> bool:
    """Feasibility by eliminating every variable (exponential, tiny systems only)."""
    rows = []  # (coeff dict, rhs) meaning coeff . x <= rhs
    for con in system.constraints:
        c = {v: Fraction(a) for v, a in con.coeffs.items()}
        if con.relation in (LE, EQ):
            rows.append((c, con.rhs))
        if con.relation in (GE, EQ):
            rows.append(({v: -a for v, a in c.items()}, -con.rhs))
    for v in system.variables:
        if system.is_nonneg(v):
            rows.append(({v: Fraction(-1)}, Fraction(0)))
    for v in system.variables:
        pos = [r for r in rows if r[0].get(v, 0) > 0]
        neg = [r for r in rows if r[0].get(v, 0) < 0]
        rest = [r for r in rows if r[0].get(v, 0) == 0]
        for (cp, bp), (cn, bn) in itertools.product(pos, neg):
            sp, sn = cp[v], -cn[v]
            combo = {}
            for w in set(cp) | set(cn):
                val = cp.get(w, 0) * sn + cn.get(w, 0) * sp
                if w != v and val:
                    combo[w] = val
            rest.append((combo, bp * sn + bn * sp))
        rows = rest
    return all(b >= 0 for c, b in rows if not c)
