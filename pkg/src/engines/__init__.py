"""Membership, density and sieve engines"""

from .membership import Classifier, classify, g_mod, is_member
from .density import CompatibilityGraph, density_interval, truncation_index, union_density
from .sieve import ComplementSieve, complement_sieve, cross_validate, empirical_density

__all__ = [
    "Classifier",
    "classify",
    "g_mod",
    "is_member",
    "CompatibilityGraph",
    "density_interval",
    "truncation_index",
    "union_density",
    "ComplementSieve",
    "complement_sieve",
    "cross_validate",
    "empirical_density",
]
