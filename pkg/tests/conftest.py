import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from projcone.core import ProjectionInequality, enumerate_subsets  # noqa: E402

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def ineq(n, *terms):
    """``ineq(4, ("12", 1), ("123", -1))`` with single-digit axis labels."""
    return ProjectionInequality.from_terms(n, [([int(ch) for ch in s], c) for s, c in terms])


EX1 = ineq(4, ("12", 1), ("23", 1), ("34", 1), ("123", -1), ("234", -1))
EX2 = ineq(4, ("13", 1), ("23", 1), ("124", 1), ("123", -1), ("1234", -1))
EX3 = ineq(4, ("1", 1), ("12", 1), ("23", 1), ("34", 1), ("24", 1), ("123", -1), ("234", -1), ("124", -1))
BT3 = ineq(3, ("12", 1), ("13", 1), ("23", 1), ("123", -2))
BT4 = ineq(4, ("23", 1), ("24", 1), ("34", 1), ("234", -2))


@pytest.fixture
def examples():
    return {"ex1": EX1, "ex2": EX2, "ex3": EX3, "bt3": BT3, "bt4": BT4}


@st.composite
def coefficient_vectors(draw, n, lo=-2, hi=2):
    k = len(enumerate_subsets(n))
    vec = draw(st.lists(st.integers(lo, hi), min_size=k, max_size=k).filter(any))
    return ProjectionInequality.from_vector(n, vec)


@st.composite
def balanced_vectors(draw, n, lo=-2, hi=2):
    """Nonzero vectors whose singleton coefficients restore per-axis balance."""
    subs = enumerate_subsets(n)
    coeff = {s: Fraction(draw(st.integers(lo, hi))) for s in subs if len(s) > 1}
    for x in range(1, n + 1):
        coeff[frozenset({x})] = -sum((c for s, c in coeff.items() if len(s) > 1 and x in s), Fraction(0))
    out = ProjectionInequality(n, coeff)
    from hypothesis import assume

    assume(not out.is_zero())
    return out


@st.composite
def box_unions(draw, n, max_boxes=3, max_den=2, max_coord=3):
    from projcone.boxgeom import Box, BoxUnion

    def rational(lo):
        den = draw(st.integers(1, max_den))
        return Fraction(draw(st.integers(lo * den, max_coord * den)), den)

    k = draw(st.integers(1, max_boxes))
    boxes = []
    for _ in range(k):
        corner = [rational(0) for _ in range(n)]
        sides = [rational(0) or Fraction(1, max_den) for _ in range(n)]
        boxes.append(Box(tuple(corner), tuple(sides)))
    return BoxUnion(n, tuple(boxes))
