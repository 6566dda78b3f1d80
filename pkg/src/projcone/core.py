"""
Subset algebra and the canonical representation of projection inequalities.

An axis set is a ``frozenset`` of axis indices drawn from ``{1..n}``.  A
projection inequality over ``n`` axes is the claim

    sum_S coeff[S] * pi[S] >= 0

for every constructible log-projection vector ``pi``.  Positive coefficients
form the A-side (the covering family), negative ones the B-side.

All scalars are ``fractions.Fraction``; nothing in this module touches floats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping

AxisSet = frozenset

MAX_DIMENSION = 16

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


class DimensionError(ValueError):
    """Ambient dimension outside the supported range."""


class DegenerateInequalityError(ValueError):
    """Inequality whose coefficients all vanish."""


class SchemaError(ValueError):
    """Malformed JSON payload.  ``where`` names the offending field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


# --------------------------------------------------------------------------
# scalars
# --------------------------------------------------------------------------

def parse_rational(value, where: str = "") -> Fraction:
    """Parse ``"p/q"`` (or ``"p"`` / an int) into a Fraction."""
    if isinstance(value, bool):
        raise SchemaError(f"expected rational, got {value!r}", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise SchemaError(f"expected rational string 'p/q', got {value!r}", where)
    m = _RATIONAL_RE.match(value)
    if not m:
        raise SchemaError(f"expected rational string 'p/q', got {value!r}", where)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise SchemaError("zero denominator", where)
    return Fraction(num, den)


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def common_denominator(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out


def integer_direction(values: Iterable[Fraction]) -> list[int]:
    """Scale a rational vector by a positive factor to coprime integers."""
    values = [Fraction(v) for v in values]
    den = common_denominator(values)
    ints = [int(v * den) for v in values]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return ints


# --------------------------------------------------------------------------
# subsets
# --------------------------------------------------------------------------

def check_dimension(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_DIMENSION:
        raise DimensionError(f"dimension must be an integer in [1, {MAX_DIMENSION}], got {n!r}")
    return n


def subset_key(s: AxisSet) -> tuple:
    """Sort key of the canonical order: by cardinality, then lexicographic."""
    return (len(s), tuple(sorted(s)))


def enumerate_subsets(n: int) -> list[AxisSet]:
    """All ``2**n - 1`` nonempty subsets of ``[n]`` in canonical order."""
    check_dimension(n)
    axes = range(1, n + 1)
    return [frozenset(c) for size in range(1, n + 1) for c in combinations(axes, size)]


def axis_set(members: Iterable[int], n: int | None = None) -> AxisSet:
    s = frozenset(int(x) for x in members)
    if not s:
        raise ValueError("axis set must be nonempty")
    if min(s) < 1 or (n is not None and max(s) > n):
        raise ValueError(f"axis set {sorted(s)} not inside [1, {n}]")
    return s


def format_subset(s: AxisSet) -> str:
    return ",".join(str(x) for x in sorted(s))


def parse_subset(text: str, n: int | None = None, where: str = "") -> AxisSet:
    try:
        members = [int(tok) for tok in text.split(",") if tok.strip()]
        return axis_set(members, n)
    except ValueError as exc:
        raise SchemaError(str(exc), where) from None


def subset_label(s: AxisSet) -> str:
    """Compact label: ``{1,2}`` -> ``"12"`` (comma separated beyond 9 axes)."""
    parts = [str(x) for x in sorted(s)]
    return "".join(parts) if max(s) < 10 else ",".join(parts)


# --------------------------------------------------------------------------
# families and inequalities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedFamily:
    """Multiset of (axis set, positive weight) pairs over ``n`` axes."""

    n: int
    entries: tuple[tuple[AxisSet, Fraction], ...] = ()

    def __post_init__(self):
        check_dimension(self.n)
        normalized = []
        for s, w in self.entries:
            s = axis_set(s, self.n)
            w = Fraction(w)
            if w <= 0:
                raise ValueError(f"family weights must be positive, got {w} on {sorted(s)}")
            normalized.append((s, w))
        object.__setattr__(self, "entries", tuple(normalized))

    @classmethod
    def unweighted(cls, n: int, sets: Iterable[Iterable[int]]) -> "WeightedFamily":
        return cls(n, tuple((frozenset(s), Fraction(1)) for s in sets))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[AxisSet, Fraction]]:
        return iter(self.entries)

    @property
    def sets(self) -> list[AxisSet]:
        return [s for s, _ in self.entries]

    @property
    def weights(self) -> list[Fraction]:
        return [w for _, w in self.entries]

    def total_weight(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def mass(self) -> Fraction:
        """``sum_i w_i * |S_i|``."""
        return sum((w * len(s) for s, w in self.entries), Fraction(0))

    def axis_load(self, x: int) -> Fraction:
        return sum((w for s, w in self.entries if x in s), Fraction(0))

    def indicator(self, i: int) -> list[int]:
        s = self.entries[i][0]
        return [1 if x in s else 0 for x in range(1, self.n + 1)]

    def is_unweighted(self) -> bool:
        return all(w == 1 for w in self.weights)


@dataclass(frozen=True)
class ProjectionInequality:
    """The claim ``sum_S coeff[S] * x_S >= 0`` over nonempty ``S`` in ``[n]``.

    Construction canonicalizes: zero coefficients are dropped.  Use
    :func:`canonicalize` to build one from a raw term list with repeats.
    """

    n: int
    coeff: Mapping[AxisSet, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        check_dimension(self.n)
        clean = {}
        for s, c in self.coeff.items():
            s = axis_set(s, self.n)
            c = Fraction(c)
            if c != 0:
                clean[s] = clean.get(s, Fraction(0)) + c
        clean = {s: clean[s] for s in sorted(clean, key=subset_key) if clean[s] != 0}
        object.__setattr__(self, "coeff", clean)

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[Iterable[int], object]]) -> "ProjectionInequality":
        return canonicalize(n, terms)

    @classmethod
    def from_sides(cls, a: WeightedFamily, b: WeightedFamily) -> "ProjectionInequality":
        if a.n != b.n:
            raise DimensionError("families live in different dimensions")
        terms = [(s, w) for s, w in a] + [(s, -w) for s, w in b]
        return canonicalize(a.n, terms)

    @classmethod
    def from_vector(cls, n: int, vector: Iterable) -> "ProjectionInequality":
        """Build from a coefficient vector in canonical subset order."""
        subsets = enumerate_subsets(n)
        vector = list(vector)
        if len(vector) != len(subsets):
            raise ValueError(f"expected {len(subsets)} coefficients, got {len(vector)}")
        return cls(n, {s: Fraction(c) for s, c in zip(subsets, vector) if c})

    def vector(self) -> list[Fraction]:
        return [self.coeff.get(s, Fraction(0)) for s in enumerate_subsets(self.n)]

    def __getitem__(self, s) -> Fraction:
        return self.coeff.get(frozenset(s), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeff

    def scaled(self, factor) -> "ProjectionInequality":
        factor = Fraction(factor)
        return ProjectionInequality(self.n, {s: c * factor for s, c in self.coeff.items()})

    def integral(self) -> "ProjectionInequality":
        """Positive multiple with coprime integer coefficients."""
        keys = list(self.coeff)
        ints = integer_direction(self.coeff[s] for s in keys)
        return ProjectionInequality(self.n, dict(zip(keys, map(Fraction, ints))))

    def evaluate(self, pi: Mapping[AxisSet, Fraction]) -> Fraction:
        """``sum_S coeff[S] * pi[S]`` for a log-space vector."""
        return sum((c * Fraction(pi[s]) for s, c in self.coeff.items()), Fraction(0))

    def permuted(self, perm: Mapping[int, int]) -> "ProjectionInequality":
        return ProjectionInequality(
            self.n, {frozenset(perm[x] for x in s): c for s, c in self.coeff.items()}
        )

    def __str__(self) -> str:
        if not self.coeff:
            return "0 >= 0"
        pos = [(s, c) for s, c in self.coeff.items() if c > 0]
        neg = [(s, -c) for s, c in self.coeff.items() if c < 0]

        def side(terms):
            if not terms:
                return "0"
            return " + ".join(
                (f"x{subset_label(s)}" if c == 1 else f"{c}*x{subset_label(s)}") for s, c in terms
            )

        return f"{side(pos)} >= {side(neg)}"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"subset": sorted(s), "coeff": format_rational(c)} for s, c in self.coeff.items()
            ],
        }


def canonicalize(ineq_or_n, terms=None) -> ProjectionInequality:
    """Merge duplicate subsets, drop zero coefficients, reject the zero inequality.

    Accepts either an existing :class:`ProjectionInequality` or ``(n, terms)``
    with ``terms`` an iterable of ``(subset, coefficient)`` pairs.
    """
    if isinstance(ineq_or_n, ProjectionInequality):
        n, raw = ineq_or_n.n, list(ineq_or_n.coeff.items())
    else:
        n, raw = ineq_or_n, list(terms or [])
    check_dimension(n)
    merged: dict[AxisSet, Fraction] = {}
    for s, c in raw:
        s = axis_set(s, n)
        merged[s] = merged.get(s, Fraction(0)) + Fraction(c)
    out = ProjectionInequality(n, merged)
    if out.is_zero():
        raise DegenerateInequalityError("all coefficients vanish")
    return out


def sides(ineq: ProjectionInequality) -> tuple[WeightedFamily, WeightedFamily]:
    """(A-side, B-side): positive coefficients and negated negative coefficients."""
    a = tuple((s, c) for s, c in ineq.coeff.items() if c > 0)
    b = tuple((s, -c) for s, c in ineq.coeff.items() if c < 0)
    return WeightedFamily(ineq.n, a), WeightedFamily(ineq.n, b)


def ineq_from_json(data, where: str = "inequality") -> ProjectionInequality:
    if not isinstance(data, dict):
        raise SchemaError("expected an object", where)
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise SchemaError("missing or non-integer 'n'", f"{where}.n")
    try:
        check_dimension(n)
    except DimensionError as exc:
        raise SchemaError(str(exc), f"{where}.n") from None
    raw_terms = data.get("terms")
    if not isinstance(raw_terms, list):
        raise SchemaError("missing 'terms' list", f"{where}.terms")
    terms = []
    for k, term in enumerate(raw_terms):
        loc = f"{where}.terms[{k}]"
        if not isinstance(term, dict) or "subset" not in term or "coeff" not in term:
            raise SchemaError("each term needs 'subset' and 'coeff'", loc)
        subset = term["subset"]
        if not isinstance(subset, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in subset
        ):
            raise SchemaError("'subset' must be a list of integers", f"{loc}.subset")
        try:
            s = axis_set(subset, n)
        except ValueError as exc:
            raise SchemaError(str(exc), f"{loc}.subset") from None
        terms.append((s, parse_rational(term["coeff"], f"{loc}.coeff")))
    try:
        return canonicalize(n, terms)
    except DegenerateInequalityError as exc:
        raise SchemaError(str(exc), f"{where}.terms") from None


# --------------------------------------------------------------------------
# log-projection vectors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LogProjectionVector:
    """Finite rational log-volumes, one per nonempty subset of ``[n]``."""

    n: int
    entries: Mapping[AxisSet, Fraction]

    def __post_init__(self):
        check_dimension(self.n)
        subsets = enumerate_subsets(self.n)
        entries = {frozenset(k): v for k, v in self.entries.items()}
        missing = [s for s in subsets if s not in entries]
        if missing:
            raise SchemaError(
                f"missing entries for {[format_subset(s) for s in missing[:4]]}", "entries"
            )
        extra = set(entries) - set(subsets)
        if extra:
            raise SchemaError(f"unexpected subsets {[sorted(s) for s in extra]}", "entries")
        object.__setattr__(self, "entries", {s: Fraction(entries[s]) for s in subsets})

    @classmethod
    def from_vector(cls, n: int, values: Iterable) -> "LogProjectionVector":
        subsets = enumerate_subsets(n)
        values = list(values)
        if len(values) != len(subsets):
            raise SchemaError(f"expected {len(subsets)} entries, got {len(values)}", "entries")
        return cls(n, dict(zip(subsets, map(Fraction, values))))

    def __getitem__(self, s) -> Fraction:
        return self.entries[frozenset(s)]

    def vector(self) -> list[Fraction]:
        return list(self.entries.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": {format_subset(s): format_rational(v) for s, v in self.entries.items()},
        }

    @classmethod
    def from_json(cls, data, where: str = "pi") -> "LogProjectionVector":
        if not isinstance(data, dict):
            raise SchemaError("expected an object", where)
        n = data.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise SchemaError("missing or non-integer 'n'", f"{where}.n")
        try:
            check_dimension(n)
        except DimensionError as exc:
            raise SchemaError(str(exc), f"{where}.n") from None
        raw = data.get("entries")
        if not isinstance(raw, dict):
            raise SchemaError("missing 'entries' object", f"{where}.entries")
        entries = {}
        for key, value in raw.items():
            loc = f"{where}.entries[{key!r}]"
            entries[parse_subset(key, n, loc)] = parse_rational(value, loc)
        return cls(n, entries)


def axis_permutations(n: int) -> list[dict[int, int]]:
    from itertools import permutations

    return [dict(zip(range(1, n + 1), p)) for p in permutations(range(1, n + 1))]
