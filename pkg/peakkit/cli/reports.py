"""
Report models emitted by the subcommands

Every report is serialized with ``model_dump(mode="json")``; the entry point
adds a ``provenance`` block before writing it.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from peakkit.cli.verification import VerificationReport
from peakkit.reinhardt.envelope import BremermannReport
from peakkit.reinhardt.laurent import ConstructionTrace, LaurentReport


class ClassifyReport(BaseModel):
    """Membership of a point in G_n"""
    point: List[List[float]]
    kind: str = Field(..., description="Interior, Boundary or Exterior")
    max_root_modulus: float
    distinguished: bool = Field(..., description="Whether the point lies in the distinguished boundary")


class PeakReport(BaseModel):
    """A constructed peak function and its verification"""
    point: List[List[float]]
    construction: Dict[str, Any]
    fingerprint: str
    function: Dict[str, Any]
    verification: VerificationReport


class ReinhardtClassifyReport(BaseModel):
    domain: str
    point: List[List[float]]
    kind: str
    extrapolated: bool
    reason: str
    via_envelope: bool


class LaurentEntry(BaseModel):
    mu: int
    monomial: Dict[str, Any]
    trace: ConstructionTrace
    report: LaurentReport


class LaurentRunReport(BaseModel):
    """The Laurent monomial sequence at one boundary point"""
    domain: str
    point: List[List[float]]
    entries: List[LaurentEntry]


class TransferReport(BaseModel):
    """A peak function pushed forward through a proper map"""
    map: Dict[str, Any]
    source_point: List[List[float]]
    target_point: List[List[float]]
    fiber_values: List[List[float]]
    fingerprint: str
    function: Dict[str, Any]
    verification: VerificationReport


class PullbackReport(BaseModel):
    """A peak function pulled back to one fiber point by the Bishop series"""
    map: Dict[str, Any]
    target_point: List[List[float]]
    fiber_index: int
    point: List[List[float]]
    fiber: List[List[List[float]]]
    exponents: List[int]
    radii: List[float]
    normalization: List[float]
    fingerprint: str
    function: Dict[str, Any]
    verification: VerificationReport


class EnvelopeReport(BaseModel):
    domain: Dict[str, Any]
    envelope: Dict[str, Any]
    bremermann: BremermannReport


class CarathReport(BaseModel):
    """Lower bound for the Caratheodory distance in G_n"""
    z: List[List[float]]
    w: List[List[float]]
    mobius: float
    poincare: float
    lambdas: List[List[float]]
    grid: int


class ToriReport(BaseModel):
    """Peak tori exp(x) T^n of a Reinhardt domain, given by their log points"""
    domain: str
    log_points: List[List[float]]
    bremermann: BremermannReport


class DistinguishedReport(BaseModel):
    point: List[List[float]]
    kind: str
    distinguished: bool


class ReplayReport(BaseModel):
    """Result of re-running a report from its provenance"""
    subcommand: str
    reproduced: bool
    differences: List[str]
    verdict: Optional[str] = None
