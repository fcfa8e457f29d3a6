"""
Polyhedral Reinhardt domains: extremality, Laurent peak sequences,
peak-point classification and envelopes
"""

from peakkit.reinhardt.classification import PeakKind, PeakVerdict, classify_peak, classify_peak_via_envelope
from peakkit.reinhardt.dirichlet import dirichlet
from peakkit.reinhardt.domain import (
    CATALOG,
    ReinhardtDomain,
    annulus,
    bidisc,
    irrational_slice,
    log_square,
    staircase,
    two_box_union,
)
from peakkit.reinhardt.envelope import (
    BremermannReport,
    ExtensionReport,
    bremermann_check,
    envelope,
    extension_probe,
    peak_tori,
)
from peakkit.reinhardt.laurent import (
    ConstructionTrace,
    LaurentMonomial,
    LaurentPeak,
    LaurentReport,
    laurent_peak,
    laurent_sequence,
)
from peakkit.reinhardt.polyhedron import (
    Decomposition,
    LogPolyhedron,
    SupportingFunctional,
    decompose,
    fourier_motzkin,
    is_extreme,
    log_map,
    support_at,
)

__all__ = [
    "PeakKind", "PeakVerdict", "classify_peak", "classify_peak_via_envelope", "dirichlet", "CATALOG",
    "ReinhardtDomain", "annulus", "bidisc", "irrational_slice", "log_square", "staircase", "two_box_union",
    "BremermannReport", "ExtensionReport", "bremermann_check", "envelope", "extension_probe", "peak_tori",
    "ConstructionTrace", "LaurentMonomial", "LaurentPeak", "LaurentReport", "laurent_peak",
    "laurent_sequence", "Decomposition", "LogPolyhedron", "SupportingFunctional", "decompose",
    "fourier_motzkin", "is_extreme", "log_map", "support_at",
]
