from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import balanced_vectors, coefficient_vectors, ineq
from projcone.boxgeom import projected_volumes
from projcone.core import LogProjectionVector, SchemaError, enumerate_subsets
from projcone.flower import (
    PreconditionError,
    RectangularFlower,
    ScalingError,
    flower_from_pi,
    flower_keys,
    materialize_flower,
    pi_from_flower,
    violating_flower,
)
from projcone.ratflow import is_fnc


@st.composite
def flowers(draw, n, lo=-3, hi=3):
    """Monotone by construction: f[S, i] is a minimum over subsets of S containing i."""
    raw = {k: Fraction(draw(st.integers(lo, hi))) for k in flower_keys(n)}
    vals = {(s, i): min(v for (t, j), v in raw.items() if j == i and t <= s) for s, i in flower_keys(n)}
    return RectangularFlower(n, vals)


def test_pi_of_box_flower():
    fl = RectangularFlower.box([1, 2])
    assert pi_from_flower(fl).vector() == [1, 2, 3]
    assert pi_from_flower(RectangularFlower.constant(2, 0)).vector() == [0, 0, 0]


def test_pi_of_min_cut_flower():
    q = ineq(3, ("1", 1), ("2", 1), ("13", 1), ("23", 1), ("12", -1), ("123", -1), ("3", -1))
    t = Fraction(5)
    fl, _ = violating_flower(q, tau=t)
    pi = pi_from_flower(fl)
    assert (pi[{1, 2}], pi[{1, 3}], pi[{1, 2, 3}], pi[{3}]) == (2 * t, t, 2 * t, t)


def test_non_monotone_rejected():
    vals = {k: Fraction(0) for k in flower_keys(2)}
    vals[(frozenset({1, 2}), 1)] = Fraction(1)
    with pytest.raises(ValueError):
        RectangularFlower(2, vals)


def test_membership_examples():
    assert flower_from_pi(LogProjectionVector.from_vector(2, [1, 2, 3])).member
    res = flower_from_pi(LogProjectionVector.from_vector(2, [0, 0, 1]))
    assert not res.member
    assert str(res.certificate) == "x1 + x2 >= x12"
    assert is_fnc(res.certificate)
    with pytest.raises(SchemaError):
        flower_from_pi({"n": 2})


def test_violating_flower_examples():
    fl, rep = violating_flower(ineq(3, ("123", 1), ("1", -1), ("2", -1), ("3", -1)))
    assert (rep.lhs_coef, rep.rhs_coef) == (0, 3)
    assert all(v == (1 if len(s) == 1 else 0) for (s, i), v in fl.log_lengths.items())

    q = ineq(3, ("1", 1), ("2", 1), ("13", 1), ("23", 1), ("12", -1), ("123", -1), ("3", -1))
    fl, rep = violating_flower(q)
    assert rep.case == "cut" and (rep.lhs_coef, rep.rhs_coef) == (4, 5)
    on = {(tuple(sorted(s)), i) for (s, i), v in fl.log_lengths.items() if v}
    assert {((1,), 1), ((2,), 2), ((1, 2), 1), ((1, 2), 2), ((3,), 3)} <= on

    _, rep = violating_flower(ineq(2, ("1", 1), ("12", -1)))
    assert rep.case == "mass" and rep.lhs_coef < rep.rhs_coef
    _, rep = violating_flower(ineq(2, ("12", 1), ("1", -1)))
    assert rep.lhs_coef < rep.rhs_coef

    with pytest.raises(PreconditionError):
        violating_flower(ineq(2, ("1", 1), ("2", 1), ("12", -1)))


def test_materialization():
    cube = materialize_flower(RectangularFlower.constant(3, 0))
    assert set(projected_volumes(cube).values()) == {1}
    keys = flower_keys(2)
    cross = RectangularFlower(2, {(s, i): 1 if len(s) == 1 else 0 for s, i in keys})
    vols = projected_volumes(materialize_flower(cross))
    assert vols[frozenset({1})] == vols[frozenset({2})] == 2 and vols[frozenset({1, 2})] == 3
    box = materialize_flower(RectangularFlower.box([1, 2, 0]), base=3)
    assert len(box.boxes) == 1 and box.boxes[0].sides == (3, 9, 1)
    with pytest.raises(ScalingError):
        materialize_flower(RectangularFlower.constant(2, Fraction(1, 2)))


@given(flowers(3))
def test_roundtrip(fl):
    pi = pi_from_flower(fl)
    res = flower_from_pi(pi)
    assert res.member and pi_from_flower(res.flower) == pi


@given(flowers(3), balanced_vectors(3, -1, 1))
def test_flower_vectors_satisfy_fnc_inequalities(fl, q):
    assume(is_fnc(q))
    assert q.evaluate(pi_from_flower(fl).entries) >= 0


@given(coefficient_vectors(4), st.integers(1, 4))
def test_violating_flower_is_strict(q, tau):
    assume(not is_fnc(q))
    fl, rep = violating_flower(q, tau=tau)
    assert rep.strict
    assert q.evaluate(pi_from_flower(fl).entries) < 0


@given(st.lists(st.integers(-2, 2), min_size=3, max_size=3))
def test_infeasible_pi_certificate_is_violated_fnc(vec):
    pi = LogProjectionVector.from_vector(2, vec)
    res = flower_from_pi(pi)
    if not res.member:
        assert is_fnc(res.certificate)
        assert res.certificate.evaluate(pi.entries) < 0
