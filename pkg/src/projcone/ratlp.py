"""
Exact rational linear programming.

A small two-phase primal simplex over ``fractions.Fraction`` with Bland's
least-index rule.  Tableau rows are stored sparsely (``dict`` column -> value)
because every system built by this package is 0/±1-heavy.

Tableau arithmetic runs on ``gmpy2.mpq`` when available (same exact
rationals, much faster); everything crossing the API is ``Fraction``.

Infeasible systems come back with a Farkas certificate: one multiplier per
constraint, nonnegative on inequality rows, such that combining the rows
(each ``>=`` row first flipped to ``<=``) yields ``c . x <= d`` with
``c_j >= 0`` on nonnegative variables, ``c_j == 0`` on free variables and
``d < 0`` -- an exact contradiction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

LE, EQ, GE = "<=", "==", ">="

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


@dataclass
class Constraint:
    coeffs: dict
    relation: str
    rhs: Fraction
    name: Hashable = None


@dataclass
class LinearSystem:
    """Named variables, linear constraints and an optional objective.

    Variables are nonnegative unless added with ``nonneg=False``.
    """

    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: dict | None = None
    sense: str = "max"
    _nonneg: dict = field(default_factory=dict, repr=False)

    def add_variable(self, name: Hashable, nonneg: bool = True) -> Hashable:
        if name in self._nonneg:
            raise ValueError(f"duplicate variable {name!r}")
        self.variables.append(name)
        self._nonneg[name] = nonneg
        return name

    def is_nonneg(self, name: Hashable) -> bool:
        return self._nonneg[name]

    def add_constraint(self, coeffs: Mapping, relation: str, rhs, name: Hashable = None) -> int:
        if relation not in (LE, EQ, GE):
            raise ValueError(f"unknown relation {relation!r}")
        clean = {}
        for v, c in coeffs.items():
            if v not in self._nonneg:
                raise KeyError(f"unknown variable {v!r}")
            c = Fraction(c)
            if c:
                clean[v] = clean.get(v, _ZERO) + c
        self.constraints.append(Constraint(clean, relation, Fraction(rhs), name))
        return len(self.constraints) - 1

    def set_objective(self, coeffs: Mapping, sense: str = "max") -> None:
        if sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        for v in coeffs:
            if v not in self._nonneg:
                raise KeyError(f"unknown variable {v!r}")
        self.objective = {v: Fraction(c) for v, c in coeffs.items()}
        self.sense = sense


@dataclass
class FeasibilityResult:
    status: str
    witness: dict | None = None
    farkas: list | None = None
    objective: Fraction | None = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status in (FEASIBLE, UNBOUNDED)


class Unsound(AssertionError):
    """Solver produced a witness or certificate that failed exact re-checking."""


def check_witness(system: LinearSystem, witness: Mapping) -> bool:
    for v in system.variables:
        if system.is_nonneg(v) and witness[v] < 0:
            return False
    for con in system.constraints:
        lhs = sum((c * witness[v] for v, c in con.coeffs.items()), _ZERO)
        if con.relation == LE and not lhs <= con.rhs:
            return False
        if con.relation == GE and not lhs >= con.rhs:
            return False
        if con.relation == EQ and lhs != con.rhs:
            return False
    return True


def check_farkas(system: LinearSystem, farkas: list) -> bool:
    """True iff ``farkas`` certifies infeasibility of ``system`` exactly."""
    if len(farkas) != len(system.constraints):
        return False
    combined: dict = {}
    bound = _ZERO
    for lam, con in zip(farkas, system.constraints):
        if con.relation != EQ and lam < 0:
            return False
        if not lam:
            continue
        sign = -1 if con.relation == GE else 1
        for v, c in con.coeffs.items():
            combined[v] = combined.get(v, _ZERO) + lam * sign * c
        bound += lam * sign * con.rhs
    for v, c in combined.items():
        if system.is_nonneg(v):
            if c < 0:
                return False
        elif c != 0:
            return False
    return bound < 0


class _Tableau:
    def __init__(self, system: LinearSystem):
        self.system = system
        self.columns = []  # (variable name, sign) for structural columns
        col_of = {}
        for v in system.variables:
            col_of[v] = [len(self.columns)]
            self.columns.append((v, 1))
            if not system.is_nonneg(v):
                col_of[v].append(len(self.columns))
                self.columns.append((v, -1))
        n_struct = len(self.columns)

        self.rows: list[dict] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.sigma: list[int] = []
        self.init_col: list[int] = []
        self.artificial: set[int] = set()
        next_col = n_struct
        pending_art = []
        for r, con in enumerate(system.constraints):
            orient = -1 if con.relation == GE else 1
            b = orient * _Q(con.rhs)
            sigma = 1 if b >= 0 else -1
            row = {}
            for v, c in con.coeffs.items():
                cols = col_of[v]
                c = _Q(c)
                row[cols[0]] = sigma * orient * c
                if len(cols) == 2:
                    row[cols[1]] = -sigma * orient * c
            if con.relation != EQ:
                slack = next_col
                next_col += 1
                row[slack] = _Q(sigma)
                if sigma == 1:
                    self.basis.append(slack)
                    self.init_col.append(slack)
                else:
                    pending_art.append(r)
                    self.basis.append(None)
                    self.init_col.append(None)
            else:
                pending_art.append(r)
                self.basis.append(None)
                self.init_col.append(None)
            self.rows.append(row)
            self.rhs.append(sigma * b)
            self.sigma.append(sigma)
        for r in pending_art:
            art = next_col
            next_col += 1
            self.rows[r][art] = _Q(1)
            self.basis[r] = art
            self.init_col[r] = art
            self.artificial.add(art)
        self.n_cols = next_col
        self.n_struct = n_struct
        self.pivots = 0

    # -- core pivoting ----------------------------------------------------

    def pivot(self, r: int, j: int, cost: dict) -> None:
        row = self.rows[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            row = {k: v * inv for k, v in row.items()}
            self.rows[r] = row
            self.rhs[r] *= inv
        b = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(j)
            if f is None:
                continue
            for k, v in row.items():
                nv = other.get(k, 0) - f * v
                if nv:
                    other[k] = nv
                else:
                    other.pop(k, None)
            if b:
                self.rhs[i] -= f * b
        f = cost.get(j)
        if f is not None:
            for k, v in row.items():
                nv = cost.get(k, 0) - f * v
                if nv:
                    cost[k] = nv
                else:
                    cost.pop(k, None)
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, c: Mapping[int, Fraction]) -> dict:
        d = {k: v for k, v in c.items() if v}
        for r, bj in enumerate(self.basis):
            cb = c.get(bj)
            if not cb:
                continue
            for k, v in self.rows[r].items():
                nv = d.get(k, 0) - cb * v
                if nv:
                    d[k] = nv
                else:
                    d.pop(k, None)
        return d

    def run(self, cost: dict, allowed) -> bool:
        """Minimize with Bland's rule.  Returns False when unbounded."""
        while True:
            entering = None
            for j in sorted(cost):
                if cost[j] < 0 and allowed(j):
                    entering = j
                    break
            if entering is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], entering, cost)

    def drop_row(self, r: int) -> None:
        del self.rows[r]
        del self.rhs[r]
        del self.basis[r]

    def values(self) -> dict:
        x = {}
        for r, bj in enumerate(self.basis):
            x[bj] = self.rhs[r]
        return x


def solve(system: LinearSystem) -> FeasibilityResult:
    """Decide feasibility (and optimize, if an objective is set) exactly."""
    tab = _Tableau(system)

    phase1 = {j: _Q(1) for j in tab.artificial}
    cost = tab.reduced_costs(phase1)
    tab.run(cost, lambda j: True)
    infeasibility = sum(
        (tab.rhs[r] for r, bj in enumerate(tab.basis) if bj in tab.artificial), _Q(0)
    )

    if infeasibility > 0:
        farkas = []
        for r in range(len(system.constraints)):
            col = tab.init_col[r]
            y = phase1.get(col, 0) - cost.get(col, 0)
            farkas.append(_fraction(_Q(-tab.sigma[r] * y)))
        if not check_farkas(system, farkas):
            raise Unsound("Farkas certificate failed verification")
        return FeasibilityResult(INFEASIBLE, farkas=farkas, pivots=tab.pivots)

    # drive zero-level artificials out of the basis, dropping redundant rows
    r = 0
    while r < len(tab.rows):
        bj = tab.basis[r]
        if bj in tab.artificial:
            candidates = [k for k in tab.rows[r] if k not in tab.artificial]
            if candidates:
                tab.pivot(r, min(candidates), {})
            else:
                tab.drop_row(r)
                continue
        r += 1
    for row in tab.rows:
        for k in [k for k in row if k in tab.artificial]:
            del row[k]
    allowed = lambda j: j not in tab.artificial  # noqa: E731

    objective_value = None
    status = FEASIBLE
    if system.objective is not None:
        sign = -1 if system.sense == "max" else 1
        c = {}
        for j, (v, s) in enumerate(tab.columns):
            coef = system.objective.get(v)
            if coef:
                c[j] = _Q(sign * s * coef)
        cost = tab.reduced_costs(c)
        if not tab.run(cost, allowed):
            status = UNBOUNDED

    x = tab.values()
    witness = {v: _ZERO for v in system.variables}
    for j, (v, s) in enumerate(tab.columns):
        val = x.get(j)
        if val:
            witness[v] += s * _fraction(val)
    if not check_witness(system, witness):
        raise Unsound("witness failed verification")
    if system.objective is not None and status == FEASIBLE:
        objective_value = sum(
            (c * witness[v] for v, c in system.objective.items()), _ZERO
        )
    return FeasibilityResult(status, witness=witness, objective=objective_value, pivots=tab.pivots)


def exact_rank(matrix: list[list]) -> int:
    """Rank of a rational matrix by fraction Gaussian elimination."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    if not rows:
        return 0
    rank = 0
    n_cols = len(rows[0])
    for col in range(n_cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank
