"""
Proper holomorphic maps: pushing peak functions forward, pulling them back,
and comparing invariants across the map
"""

from peakkit.transfer.lifting import (
    PullbackPeak,
    Separator,
    TransferResult,
    pullback_peak,
    separator,
    transfer_peak,
)
from peakkit.transfer.maps import (
    Composition,
    HalfDiscSquare,
    PowerMap,
    ProperMap,
    Symmetrization,
    annulus_square,
    build_map,
    on_shilov_boundary,
)
from peakkit.transfer.probe import CfcReport, ShilovReport, cfc_probe, shilov_preimage_report

__all__ = [
    "PullbackPeak", "Separator", "TransferResult", "pullback_peak", "separator", "transfer_peak",
    "Composition", "HalfDiscSquare", "PowerMap", "ProperMap", "Symmetrization", "annulus_square",
    "build_map", "on_shilov_boundary", "CfcReport", "ShilovReport", "cfc_probe", "shilov_preimage_report",
]
