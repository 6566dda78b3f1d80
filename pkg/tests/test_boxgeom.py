from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import EX1, box_unions
from oracles import cell_count_volume, inclusion_exclusion_volume, union_boxes
from projcone.boxgeom import (
    HOLDS,
    TIGHT,
    VIOLATED,
    Box,
    BoxUnion,
    DegenerateBoxError,
    evaluate_inequality,
    log_projection_vector,
    project,
    projected_volumes,
    unit_cube,
    volume,
)
from projcone.core import SchemaError, enumerate_subsets
from projcone.refuter import connection_graph, skeleton_build


def skeleton10():
    return skeleton_build(connection_graph(EX1), 10)


def test_skeleton_projections():
    u = skeleton10()
    assert project(u, frozenset({1, 2})).boxes == (
        Box((0, 0), (10, 1)),
        Box((0, 0), (1, 10)),
    )
    vols = projected_volumes(u)
    assert vols[frozenset({1, 2, 3})] == 109
    assert vols[frozenset({2, 3, 4})] == 109
    assert vols[frozenset({1, 2})] == vols[frozenset({2, 3})] == vols[frozenset({3, 4})] == 19


def test_evaluation_status():
    ev = evaluate_inequality(EX1, skeleton10())
    assert ev.status == VIOLATED and (ev.lhs, ev.rhs) == (6859, 11881)
    assert evaluate_inequality(EX1, unit_cube(4)).status == TIGHT
    cross = BoxUnion(4, (Box.at_origin([1, 10, 10, 1]), Box.at_origin([10, 1, 1, 10])))
    ev = evaluate_inequality(EX1, cross)
    assert ev.status == HOLDS and (ev.lhs, ev.rhs) == (36100, 11881)


def test_degenerate_and_schema():
    flat = BoxUnion(2, (Box.at_origin([1, 0]),))
    with pytest.raises(DegenerateBoxError):
        volume(flat)
    with pytest.raises(DegenerateBoxError):
        log_projection_vector(flat)
    with pytest.raises(SchemaError):
        BoxUnion.from_json({"n": 2, "boxes": [{"corner": ["0"], "sides": ["1", "1"]}]})
    with pytest.raises(SchemaError):
        BoxUnion.from_json({"n": 1, "boxes": [{"corner": ["0"], "sides": ["-1"]}]})


def test_overlapping_boxes():
    u = BoxUnion(2, (Box((0, 0), (2, 2)), Box((1, 1), (2, 2))))
    assert volume(u) == 7
    u = BoxUnion(2, (Box((0, 0), (Fraction(1, 2), 1)), Box((Fraction(1, 2), 0), (Fraction(1, 2), 1))))
    assert volume(u) == 1


@given(box_unions(3))
def test_volume_matches_inclusion_exclusion(u):
    assert volume(u) == inclusion_exclusion_volume(union_boxes(u))


@given(box_unions(2, max_boxes=4))
def test_volume_matches_cell_count(u):
    assert volume(u) == cell_count_volume(union_boxes(u))


@given(box_unions(3), st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_translation_invariance_and_json(u, shift):
    moved = BoxUnion(3, tuple(b.translate(shift) for b in u.boxes))
    assert projected_volumes(moved) == projected_volumes(u)
    assert BoxUnion.from_json(u.to_json()) == u


@given(box_unions(3))
def test_union_bounds(u):
    vols = [b.volume() for b in u.boxes]
    assert max(vols) <= volume(u) <= sum(vols)
    assert volume(u.pruned()) == volume(u)


@given(box_unions(3))
def test_loomis_whitney_holds(u):
    # |T|^2 <= |T_12| |T_13| |T_23| for every object
    v = projected_volumes(u)
    s = enumerate_subsets(3)
    assert v[s[-1]] ** 2 <= v[s[3]] * v[s[4]] * v[s[5]]
