"""
The Bollobas-Thomason cone: membership, decompositions, and the 3D eliminator.

A (fractional) BT term over a set ``S`` is ``sum_A w_A x_A - k x_S >= 0``
where the weights ``w_A`` on proper subsets ``A`` of ``S`` load every axis of
``S`` exactly ``k`` times.  The BT cone is the set of nonnegative
combinations of such terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    AxisSet,
    ProjectionInequality,
    WeightedFamily,
    canonicalize,
    enumerate_subsets,
    format_rational,
    sides,
    subset_key,
)
from .ratflow import is_fnc
from .ratlp import EQ, LE, LinearSystem, exact_rank, solve

MAX_BT_DIMENSION = 6


class SizeGuardError(ValueError):
    """Dimension too large for the exact BT-cone LP."""


class DecompositionError(ValueError):
    """A decomposition precondition failed; ``reason`` says which."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class BtTerm:
    target: AxisSet
    cover: WeightedFamily
    k: Fraction
    multiplier: Fraction = Fraction(1)

    def is_uniform_cover(self) -> bool:
        if self.k <= 0 or self.multiplier <= 0:
            return False
        for s, _ in self.cover:
            if not s <= self.target:
                return False
        return all(self.cover.axis_load(x) == self.k for x in self.target)

    def coefficients(self) -> dict[AxisSet, Fraction]:
        out: dict[AxisSet, Fraction] = {}
        for s, w in self.cover:
            out[s] = out.get(s, Fraction(0)) + self.multiplier * w
        out[self.target] = out.get(self.target, Fraction(0)) - self.multiplier * self.k
        return out

    def inequality(self) -> ProjectionInequality:
        return ProjectionInequality(self.cover.n, self.coefficients())

    def to_json(self) -> dict:
        return {
            "target": sorted(self.target),
            "cover": [{"subset": sorted(s), "weight": format_rational(w)} for s, w in self.cover],
            "k": format_rational(self.k),
            "multiplier": format_rational(self.multiplier),
        }


@dataclass(frozen=True)
class BtCombination:
    n: int
    terms: tuple

    def recombine(self) -> ProjectionInequality:
        total: dict[AxisSet, Fraction] = {}
        for term in self.terms:
            for s, c in term.coefficients().items():
                total[s] = total.get(s, Fraction(0)) + c
        return ProjectionInequality(self.n, total)

    def reproduces(self, ineq: ProjectionInequality) -> bool:
        return self.recombine().coeff == ProjectionInequality(ineq.n, ineq.coeff).coeff

    def is_valid(self) -> bool:
        return all(t.is_uniform_cover() for t in self.terms)

    @property
    def integral(self) -> bool:
        """Whether every weight, k and multiplier is an integer."""
        for t in self.terms:
            values = [t.k, t.multiplier, *t.cover.weights]
            if any(v.denominator != 1 for v in values):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "integral": self.integral,
            "terms": [t.to_json() for t in self.terms],
        }


def _proper_subsets(s: AxisSet) -> list[AxisSet]:
    items = sorted(s)
    out = []
    for mask in range(1, (1 << len(items)) - 1):
        out.append(frozenset(items[b] for b in range(len(items)) if mask >> b & 1))
    return sorted(out, key=subset_key)


def bt_cone_lp(ineq: ProjectionInequality) -> LinearSystem:
    n = ineq.n
    system = LinearSystem()
    subsets = enumerate_subsets(n)
    pairs = [(s, a) for s in subsets for a in _proper_subsets(s)]
    for s, a in pairs:
        system.add_variable(("w", s, a))
    for s in subsets:
        system.add_variable(("k", s))
    for s in subsets:
        for x in sorted(s):
            row = {("w", s, a): 1 for a in _proper_subsets(s) if x in a}
            row[("k", s)] = -1
            system.add_constraint(row, EQ, 0, name=("cover", s, x))
    for u in subsets:
        row = {("w", s, u): 1 for s in subsets if u < s}
        row[("k", u)] = -1
        system.add_constraint(row, EQ, ineq[u], name=("target", u))
    return system


def in_bt_cone(ineq: ProjectionInequality) -> BtCombination | None:
    """A fractional BT decomposition of the claim, or ``None`` if none exists."""
    ineq = canonicalize(ineq)
    if ineq.n > MAX_BT_DIMENSION:
        raise SizeGuardError(f"BT-cone LP limited to n <= {MAX_BT_DIMENSION}, got {ineq.n}")
    system = bt_cone_lp(ineq)
    result = solve(system)
    if not result.feasible:
        return None
    w = result.witness
    terms = []
    for s in enumerate_subsets(ineq.n):
        k = w[("k", s)]
        if k == 0:
            continue
        cover = tuple((a, w[("w", s, a)]) for a in _proper_subsets(s) if w[("w", s, a)] > 0)
        terms.append(BtTerm(s, WeightedFamily(ineq.n, cover), k))
    combo = BtCombination(ineq.n, tuple(terms))
    if not (combo.is_valid() and combo.reproduces(ineq)):
        raise AssertionError("BT-cone LP witness does not recombine to the target")
    return combo


def _families(ineq_or_sides) -> tuple[WeightedFamily, WeightedFamily]:
    if isinstance(ineq_or_sides, ProjectionInequality):
        return sides(canonicalize(ineq_or_sides))
    a, b = ineq_or_sides
    return a, b


def single_cover_system(a: WeightedFamily, target: AxisSet, beta: Fraction) -> LinearSystem:
    """``0 <= c <= alpha`` with ``sum_i c_i a_i = beta * b``, one row per axis."""
    system = LinearSystem()
    for i in range(len(a)):
        system.add_variable(("c", i))
    for x in range(1, a.n + 1):
        row = {("c", i): 1 for i, (s, _) in enumerate(a) if x in s}
        system.add_constraint(row, EQ, beta if x in target else 0, name=("axis", x))
    for i, (_, alpha) in enumerate(a):
        system.add_constraint({("c", i): 1}, LE, alpha, name=("cap", i))
    return system


def single_cover_certificate(a: WeightedFamily, target: AxisSet, beta) -> list[Fraction] | None:
    result = solve(single_cover_system(a, target, Fraction(beta)))
    if not result.feasible:
        return None
    return [result.witness[("c", i)] for i in range(len(a))]


def _term_from_certificate(a: WeightedFamily, target: AxisSet, beta: Fraction, c: Sequence) -> BtTerm:
    cover = tuple((s, ci) for (s, _), ci in zip(a, c) if ci > 0)
    return BtTerm(target, WeightedFamily(a.n, cover), beta)


def decompose_independent(ineq_or_sides) -> list[BtTerm]:
    """Split into one BT term per B-side set when the A-side indicators are independent."""
    a, b = _families(ineq_or_sides)
    if len(a) and exact_rank([a.indicator(i) for i in range(len(a))]) < len(a):
        raise DecompositionError("A-side indicator vectors are linearly dependent")
    terms = []
    total = [Fraction(0)] * len(a)
    for j, (bj, beta) in enumerate(b):
        c = single_cover_certificate(a, bj, beta)
        if c is None:
            raise DecompositionError(f"no single-cover certificate for B_{j} = {sorted(bj)}")
        terms.append(_term_from_certificate(a, bj, beta, c))
        total = [t + ci for t, ci in zip(total, c)]
    if total != list(a.weights):
        raise DecompositionError("certificates do not sum to the A-side weights")
    return terms


def decompose_m_le_2(ineq_or_sides) -> list[BtTerm]:
    """Split an inequality with at most two B-side sets into BT terms."""
    a, b = _families(ineq_or_sides)
    if len(b) > 2:
        raise DecompositionError(f"B-side has {len(b)} sets, expected at most 2")
    if len(b) == 0:
        raise DecompositionError("B-side is empty")
    b1, beta1 = b.entries[0]
    c = single_cover_certificate(a, b1, beta1)
    if c is None:
        raise DecompositionError(f"no single-cover certificate for B_0 = {sorted(b1)}")
    terms = [_term_from_certificate(a, b1, beta1, c)]
    rest = [alpha - ci for alpha, ci in zip(a.weights, c)]
    if len(b) == 2:
        b2, beta2 = b.entries[1]
        second = _term_from_certificate(a, b2, beta2, rest)
        if not second.is_uniform_cover():
            raise DecompositionError("remainder is not a uniform cover of B_1 (C1 fails)")
        terms.append(second)
    elif any(rest):
        raise DecompositionError("A-side weight left over after covering the only B-set")
    return terms


def bt3_eliminate(ineq: ProjectionInequality) -> BtCombination:
    """Rewrite an FNC inequality in three dimensions as BT terms.

    Every pair set ``P = {i, j}`` with a negative coefficient is cancelled
    by adding ``|coeff_P|`` copies of ``x_i + x_j - x_P``; what remains has
    only ``x_123`` on the negative side and is a single uniform cover.
    """
    ineq = canonicalize(ineq)
    if ineq.n != 3:
        raise ValueError(f"bt3_eliminate needs n = 3, got {ineq.n}")
    if not is_fnc(ineq):
        raise ValueError(f"{ineq} is not an FNC inequality")
    coeff = {s: ineq[s] for s in enumerate_subsets(3)}
    terms = []
    for p in [s for s in enumerate_subsets(3) if len(s) == 2]:
        c = coeff[p]
        if c >= 0:
            continue
        i, j = sorted(p)
        for x in (i, j):
            if coeff[frozenset({x})] < -c:
                raise AssertionError(f"singleton x{x} cannot absorb x{i}{j} in {ineq}")
        single = WeightedFamily.unweighted(3, [{i}, {j}])
        terms.append(BtTerm(p, single, Fraction(1), -c))
        coeff[frozenset({i})] += c
        coeff[frozenset({j})] += c
        coeff[p] = Fraction(0)
    full = frozenset({1, 2, 3})
    negatives = [s for s, c in coeff.items() if c < 0 and s != full]
    if negatives:
        raise AssertionError(f"residue still has negative terms {negatives}")
    k = -coeff[full]
    cover = tuple((s, c) for s, c in coeff.items() if c > 0 and s != full)
    if k > 0:
        terms.append(BtTerm(full, WeightedFamily(3, cover), k))
    elif cover:
        raise AssertionError("residue has positive terms but nothing to cover")
    combo = BtCombination(3, tuple(terms))
    if not (combo.is_valid() and combo.reproduces(ineq)):
        raise AssertionError(f"elimination of {ineq} does not recombine")
    return combo
