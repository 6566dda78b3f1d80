from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from conftest import EX1, EX3, balanced_vectors, coefficient_vectors, ineq
from oracles import networkx_max_flow
from projcone.core import ProjectionInequality, WeightedFamily, axis_permutations, sides
from projcone.ratflow import (
    build_network,
    check_c1,
    covers,
    is_fnc,
    is_valid_cover_mapping,
    lambda_node,
    max_flow_min_cut,
    saturates,
    sigma_node,
)

HALF = Fraction(1, 2)


def fam(n, *pairs):
    return WeightedFamily(n, tuple((frozenset(int(c) for c in s), Fraction(w)) for s, w in pairs))


def test_example_network_shape():
    a, b = sides(EX1)
    net = build_network(a, b)
    assert len(net.sigma_nodes) == 6 and len(net.lambda_nodes) == 6
    mid = set(net.middle_arcs())
    assert (sigma_node(1, 2), lambda_node(0, 2)) in mid
    assert (sigma_node(1, 2), lambda_node(1, 2)) in mid
    assert (sigma_node(0, 1), lambda_node(1, 1)) not in mid
    assert len(mid) == 8


def test_flow_values():
    a, b = sides(EX1)
    assert max_flow_min_cut(build_network(a, b)).value == 6
    half = fam(3, ("12", HALF), ("13", HALF), ("23", HALF))
    assert saturates(half, fam(3, ("123", 1))).flow_value == 3
    assert all(v == 0 for v in check_c1(*sides(EX1)).values())


def test_non_fnc_cut():
    q = ineq(3, ("1", 1), ("2", 1), ("13", 1), ("23", 1), ("3", -1), ("12", -1), ("123", -1))
    rep = is_fnc(q)
    assert not rep and rep.flow_value == 5 and rep.sink_capacity == 6


def test_cover_mappings():
    m = covers([{1, 2}, {2, 3}, {3, 4}], [{1, 2, 3}, {2, 3, 4}])
    assert m == {(0, 1): (0, 1), (0, 2): (0, 2), (1, 3): (0, 3), (1, 2): (1, 2), (2, 3): (1, 3), (2, 4): (1, 4)}
    a = [{1}, {1, 2}, {2, 3}, {3, 4}, {2, 4}]
    b = [{1, 2, 3}, {2, 3, 4}, {1, 2, 4}]
    assert is_valid_cover_mapping(a, b, covers(a, b))
    assert covers([{1, 2}], [{1}, {2}]) is None


def test_examples_are_fnc():
    assert is_fnc(EX1) and is_fnc(EX3)
    assert not is_fnc(ineq(2, ("1", 1), ("12", -1)))


@given(coefficient_vectors(3))
def test_flow_matches_networkx(q):
    a, b = sides(q)
    if not len(a) or not len(b):
        return
    net = build_network(a, b)
    res = max_flow_min_cut(net)
    assert res.value == networkx_max_flow(net) == res.cut.value
    assert res.value <= net.sink_capacity()


@given(balanced_vectors(3), st.sampled_from(axis_permutations(3)))
def test_fnc_is_permutation_invariant(q, perm):
    assert bool(is_fnc(q)) == bool(is_fnc(q.permuted(perm)))


@given(balanced_vectors(3, -1, 1), balanced_vectors(3, -1, 1), st.integers(1, 3))
def test_fnc_closed_under_nonnegative_combinations(p, q, k):
    if not (is_fnc(p) and is_fnc(q)):
        return
    total = ProjectionInequality(3, {s: p[s] + k * q[s] for s in set(p.coeff) | set(q.coeff)})
    if not total.is_zero():
        assert is_fnc(total)
