"""
Symmetrized polydisc G_n: membership, peak functions and Caratheodory bounds
"""

from peakkit.sympoly.caratheodory import CarathBound, carath_lb
from peakkit.sympoly.geometry import (
    FracParams,
    MembershipClass,
    MembershipKind,
    SymPoint,
    char_poly,
    classify,
    costara_classify,
    costara_modulus,
    frac_map,
    is_distinguished,
    sample_boundary,
    sample_distinguished,
    sample_interior,
    sym,
)
from peakkit.sympoly.peak import PeakConstruction, construct_peak, peak_at

__all__ = [
    "CarathBound", "carath_lb", "FracParams", "MembershipClass", "MembershipKind", "SymPoint",
    "char_poly", "classify", "costara_classify", "costara_modulus", "frac_map", "is_distinguished",
    "sample_boundary", "sample_distinguished", "sample_interior", "sym", "PeakConstruction",
    "construct_peak", "peak_at",
]
