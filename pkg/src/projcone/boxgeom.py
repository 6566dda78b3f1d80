"""
Exact geometry of finite unions of closed axis-aligned boxes.

Union volume is computed by coordinate compression: the distinct box
endpoints cut every axis into elementary intervals, and a recursive sweep
sums the measure of the covered grid cells.  Everything stays in
``Fraction``; logarithms are never taken.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    AxisSet,
    ProjectionInequality,
    SchemaError,
    check_dimension,
    common_denominator,
    enumerate_subsets,
    format_rational,
    parse_rational,
)


class DegenerateBoxError(ValueError):
    """A box (or a projection) with zero measure where a volume is needed."""


@dataclass(frozen=True)
class Box:
    corner: tuple
    sides: tuple

    def __post_init__(self):
        corner = tuple(Fraction(c) for c in self.corner)
        sides = tuple(Fraction(s) for s in self.sides)
        if len(corner) != len(sides) or not corner:
            raise ValueError("corner and sides must have the same positive length")
        if any(c < 0 for c in corner):
            raise ValueError("box coordinates must be nonnegative")
        if any(s < 0 for s in sides):
            raise ValueError("box sides must be nonnegative")
        object.__setattr__(self, "corner", corner)
        object.__setattr__(self, "sides", sides)

    @classmethod
    def at_origin(cls, sides: Sequence) -> "Box":
        return cls(tuple(0 for _ in sides), tuple(sides))

    @property
    def n(self) -> int:
        return len(self.sides)

    @property
    def upper(self) -> tuple:
        return tuple(c + s for c, s in zip(self.corner, self.sides))

    @property
    def degenerate(self) -> bool:
        return any(s == 0 for s in self.sides)

    def volume(self) -> Fraction:
        v = Fraction(1)
        for s in self.sides:
            v *= s
        return v

    def translate(self, offset: Sequence) -> "Box":
        return Box(tuple(c + Fraction(o) for c, o in zip(self.corner, offset)), self.sides)

    def restrict(self, axes: Sequence[int]) -> "Box":
        """Coordinate restriction to the given 1-based axes."""
        return Box(tuple(self.corner[a - 1] for a in axes), tuple(self.sides[a - 1] for a in axes))

    def contains(self, other: "Box") -> bool:
        return all(
            c <= oc and oc + os <= c + s
            for c, s, oc, os in zip(self.corner, self.sides, other.corner, other.sides)
        )

    def intersect(self, other: "Box") -> "Box | None":
        lo = [max(a, b) for a, b in zip(self.corner, other.corner)]
        hi = [min(a, b) for a, b in zip(self.upper, other.upper)]
        if any(h < l for l, h in zip(lo, hi)):
            return None
        return Box(tuple(lo), tuple(h - l for l, h in zip(lo, hi)))

    def to_json(self) -> dict:
        return {
            "corner": [format_rational(c) for c in self.corner],
            "sides": [format_rational(s) for s in self.sides],
        }


@dataclass(frozen=True)
class BoxUnion:
    n: int
    boxes: tuple

    def __post_init__(self):
        check_dimension(self.n)
        boxes = tuple(self.boxes)
        if not boxes:
            raise ValueError("a box union needs at least one box")
        for b in boxes:
            if b.n != self.n:
                raise ValueError(f"box of dimension {b.n} in a union of dimension {self.n}")
        object.__setattr__(self, "boxes", boxes)

    def __or__(self, other: "BoxUnion") -> "BoxUnion":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return BoxUnion(self.n, self.boxes + other.boxes)

    def upper_bounds(self) -> list[Fraction]:
        return [max(b.upper[k] for b in self.boxes) for k in range(self.n)]

    def pruned(self) -> "BoxUnion":
        """Drop boxes contained in another box (same point set)."""
        keep = []
        for i, b in enumerate(self.boxes):
            dominated = any(
                o.contains(b) and (not b.contains(o) or j < i)
                for j, o in enumerate(self.boxes)
                if j != i
            )
            if not dominated:
                keep.append(b)
        return BoxUnion(self.n, tuple(keep))

    def to_json(self) -> dict:
        return {"n": self.n, "boxes": [b.to_json() for b in self.boxes]}

    @classmethod
    def from_json(cls, data, where: str = "object") -> "BoxUnion":
        if not isinstance(data, dict):
            raise SchemaError("expected an object", where)
        n = data.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise SchemaError("missing or invalid 'n'", f"{where}.n")
        raw = data.get("boxes")
        if not isinstance(raw, list) or not raw:
            raise SchemaError("'boxes' must be a nonempty list", f"{where}.boxes")
        boxes = []
        for k, item in enumerate(raw):
            loc = f"{where}.boxes[{k}]"
            if not isinstance(item, dict):
                raise SchemaError("expected an object", loc)
            corner, sides = item.get("corner"), item.get("sides")
            for name, vec in (("corner", corner), ("sides", sides)):
                if not isinstance(vec, list) or len(vec) != n:
                    raise SchemaError(f"'{name}' must list {n} rationals", f"{loc}.{name}")
            try:
                boxes.append(
                    Box(
                        tuple(parse_rational(v, f"{loc}.corner[{i}]") for i, v in enumerate(corner)),
                        tuple(parse_rational(v, f"{loc}.sides[{i}]") for i, v in enumerate(sides)),
                    )
                )
            except SchemaError:
                raise
            except ValueError as exc:
                raise SchemaError(str(exc), loc) from None
        return cls(n, tuple(boxes))


def unit_cube(n: int) -> BoxUnion:
    return BoxUnion(n, (Box.at_origin([1] * n),))


def project(u: BoxUnion, s: AxisSet) -> BoxUnion:
    """Orthogonal projection onto the span of the axes in ``s``."""
    if not s:
        raise ValueError("cannot project onto the empty axis set")
    if min(s) < 1 or max(s) > u.n:
        raise ValueError(f"axes {sorted(s)} outside [1, {u.n}]")
    axes = sorted(s)
    return BoxUnion(len(axes), tuple(b.restrict(axes) for b in u.boxes))


def volume(u: BoxUnion) -> Fraction:
    """Exact Lebesgue measure of the union."""
    if any(b.degenerate for b in u.boxes):
        raise DegenerateBoxError("degenerate box in volume computation")
    boxes = [(b.corner, b.upper) for b in u.boxes]
    return _sweep(boxes, 0, u.n)


def _sweep(boxes, axis: int, n: int) -> Fraction:
    if not boxes:
        return Fraction(0)
    if axis == n:
        return Fraction(1)
    cuts = sorted({b[0][axis] for b in boxes} | {b[1][axis] for b in boxes})
    total = Fraction(0)
    for lo, hi in zip(cuts, cuts[1:]):
        active = [b for b in boxes if b[0][axis] <= lo and hi <= b[1][axis]]
        if active:
            total += (hi - lo) * _sweep(active, axis + 1, n)
    return total


def projected_volumes(u: BoxUnion) -> dict[AxisSet, Fraction]:
    """``|T_S|`` for every nonempty ``S`` (linear space, not logs)."""
    return {s: volume(project(u, s)) for s in enumerate_subsets(u.n)}


def log_projection_vector(u: BoxUnion) -> dict[AxisSet, Fraction]:
    """Projected volumes of every subspace; rejects zero-volume projections.

    The entries are kept as exact volumes -- the log-projection vector is
    their elementwise logarithm in any base.
    """
    vols = projected_volumes(u)
    zero = [sorted(s) for s, v in vols.items() if v == 0]
    if zero:
        raise DegenerateBoxError(f"zero-volume projections onto {zero}")
    return vols


HOLDS, TIGHT, VIOLATED = "holds", "tight", "violated"


@dataclass(frozen=True)
class Evaluation:
    status: str
    lhs: Fraction
    rhs: Fraction
    scale: int  # coefficients were multiplied by this to make them integral

    @property
    def margin(self) -> Fraction:
        return self.lhs / self.rhs

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED


def evaluate_on_volumes(ineq: ProjectionInequality, vols: Mapping[AxisSet, Fraction]) -> Evaluation:
    """Compare ``prod |T_A|^alpha`` against ``prod |T_B|^beta`` exactly."""
    scale = common_denominator(ineq.coeff.values())
    lhs = Fraction(1)
    rhs = Fraction(1)
    for s, c in ineq.coeff.items():
        v = Fraction(vols[s])
        if v <= 0:
            raise DegenerateBoxError(f"projection onto {sorted(s)} has zero volume")
        e = int(c * scale)
        if e > 0:
            lhs *= v**e
        else:
            rhs *= v ** (-e)
    status = HOLDS if lhs > rhs else TIGHT if lhs == rhs else VIOLATED
    return Evaluation(status, lhs, rhs, scale)


def evaluate_inequality(ineq: ProjectionInequality, u: BoxUnion) -> Evaluation:
    if u.n != ineq.n:
        raise ValueError("object and inequality live in different dimensions")
    vols = {s: volume(project(u, s)) for s in ineq.coeff}
    return evaluate_on_volumes(ineq, vols)
