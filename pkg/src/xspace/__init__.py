"""Exact computations in Tsirelson-type spaces built from Schreier families."""

from .schreier import SchreierIndex, is_schreier, is_maximal_schreier
from .vectors import FinVec, BlockSequence
from .engine import norm, norm_j, certify

__all__ = [
    "SchreierIndex",
    "is_schreier",
    "is_maximal_schreier",
    "FinVec",
    "BlockSequence",
    "norm",
    "norm_j",
    "certify",
]
