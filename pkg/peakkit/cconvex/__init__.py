"""
Weak peak functions for bounded convex domains in C^n
"""

from peakkit.cconvex.body import (
    CATALOG,
    ConvexBody,
    WeakPeak,
    construct_weak_peak,
    disc,
    half_disc,
    image_diameter,
    polydisc_box,
    simplex,
    support_complex,
    to_complex,
    to_real,
    unit_ball,
    weak_peak,
)

__all__ = [
    "CATALOG", "ConvexBody", "WeakPeak", "construct_weak_peak", "disc", "half_disc", "image_diameter",
    "polydisc_box", "simplex", "support_complex", "to_complex", "to_real", "unit_ball", "weak_peak",
]
