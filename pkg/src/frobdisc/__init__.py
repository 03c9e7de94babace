"""Desk-scale experiments on squarefree Frobenius discriminants a_p^2 - 4p in
congruence classes: curve census over F_p, class numbers, Euler-product
constants and GL_2 densities."""

from .census import CensusConfig, PrimeCensus, census_range, deuring_census, direct_census
from .classnum import batch_class_table, class_number, kronecker_H, unit_count
from .constants import EulerProductValue, frak_C, frak_C_alt
from .modarith import CongruenceTarget, in_delta, is_squarefree, kronecker

__version__ = "0.1.0"

__all__ = [
    "CensusConfig",
    "CongruenceTarget",
    "EulerProductValue",
    "PrimeCensus",
    "batch_class_table",
    "census_range",
    "class_number",
    "deuring_census",
    "direct_census",
    "frak_C",
    "frak_C_alt",
    "in_delta",
    "is_squarefree",
    "kronecker",
    "kronecker_H",
    "unit_count",
]
