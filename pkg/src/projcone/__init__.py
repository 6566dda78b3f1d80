"""Exact tools for linear inequalities among log projected volumes."""

from .boxgeom import Box, BoxUnion, evaluate_inequality, projected_volumes, volume
from .btcone import BtCombination, BtTerm, bt3_eliminate, in_bt_cone
from .core import LogProjectionVector, ProjectionInequality, WeightedFamily, canonicalize, sides
from .flower import RectangularFlower, flower_from_pi, materialize_flower, pi_from_flower, violating_flower
from .ratflow import covers, is_fnc, saturates
from .refuter import RefutationReport, refute_pipeline

__version__ = "0.1.0"

__all__ = [
    "Box",
    "BoxUnion",
    "BtCombination",
    "BtTerm",
    "LogProjectionVector",
    "ProjectionInequality",
    "RectangularFlower",
    "RefutationReport",
    "WeightedFamily",
    "bt3_eliminate",
    "canonicalize",
    "covers",
    "evaluate_inequality",
    "flower_from_pi",
    "in_bt_cone",
    "is_fnc",
    "materialize_flower",
    "pi_from_flower",
    "projected_volumes",
    "refute_pipeline",
    "saturates",
    "sides",
    "violating_flower",
    "volume",
]
