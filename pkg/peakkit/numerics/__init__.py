"""
Shared numerical substrate: tolerances, polynomial roots, Mobius geometry,
expression trees and deterministic samplers.
"""

from peakkit.numerics.expressions import (
    AffinePairing,
    Compose,
    Constant,
    Coordinate,
    DiscAutomorphism,
    ExpInvLog,
    FiberCompose,
    FractionalMap,
    HoloFunction,
    LinearScale,
    MobiusAtom,
    Monomial,
    Power,
    Product,
    Stack,
    Sum,
    SymCompose,
    evaluate,
    evaluate_batch,
    fingerprint,
    from_description,
    identity,
)
from peakkit.numerics.mobius import mobius_distance, mobius_distance_batch, poincare_from_mobius
from peakkit.numerics.polynomials import ComplexPoly, elementary_symmetric, roots, roots_with_retry
from peakkit.numerics.sampling import (
    SampleRegion,
    SampleSet,
    SampleStrategy,
    sample_annulus,
    sample_half_disc,
    sample_polydisc,
)
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile

__all__ = [
    "AffinePairing", "Compose", "Constant", "Coordinate", "DiscAutomorphism", "ExpInvLog",
    "FiberCompose", "FractionalMap", "HoloFunction", "LinearScale", "MobiusAtom", "Monomial",
    "Power", "Product", "Stack", "Sum", "SymCompose", "evaluate", "evaluate_batch", "fingerprint", "from_description",
    "identity", "mobius_distance", "mobius_distance_batch", "poincare_from_mobius", "ComplexPoly",
    "elementary_symmetric", "roots", "roots_with_retry", "SampleRegion", "SampleSet", "SampleStrategy",
    "sample_annulus", "sample_half_disc", "sample_polydisc", "DEFAULT_TOLERANCES", "ToleranceProfile",
]
