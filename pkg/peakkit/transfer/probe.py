"""
Caratheodory completeness probe and Shilov preimage report for proper maps
"""

from typing import List, Optional, Sequence

import numpy as np
import structlog
from pydantic import BaseModel

from peakkit.numerics.expressions import Coordinate, DiscAutomorphism, FiberCompose, evaluate
from peakkit.numerics.mobius import mobius_distance_batch
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import ScopeViolation
from peakkit.shared.settings import get_settings
from peakkit.sympoly.caratheodory import carath_lb
from peakkit.transfer.maps import ProperMap

logger = structlog.get_logger(__name__)

# cap on grid^(m-1) lattice points for the G_m bound
_LATTICE_BUDGET = 2 ** 16


class CfcRow(BaseModel):
    index: int
    w: List[List[float]]
    coordinate: int
    mobius: float
    poincare: float


class CfcReport(BaseModel):
    """Lower bounds for c*_D2(w0, w_k) along a sequence leaving D2"""
    map: dict
    multiplicity: int
    grid: int
    rows: List[CfcRow]
    increasing: bool


def _cjson(v) -> List[List[float]]:
    return [[float(np.real(c)), float(np.imag(c))] for c in np.atleast_1d(v)]


def lattice_grid(m: int, grid: int) -> int:
    """Largest per-circle grid (at most `grid`, at least 4) within the lattice budget for G_m"""
    if m <= 2:
        return grid
    return max(4, min(grid, int(_LATTICE_BUDGET ** (1.0 / (m - 1)))))


def cfc_probe(F: ProperMap, w0, sequence: Sequence, grid: Optional[int] = None,
              tol: ToleranceProfile = DEFAULT_TOLERANCES) -> CfcReport:
    """
    Lower bounds for the Caratheodory distance on D2 from those on a polydisc source

    For each w_k, take z0 in the fiber of w0 and z in the fiber of w_k, pick
    the coordinate j where the Mobius distance of z0_j and z_j is largest and
    f = the disc automorphism sending z0_j to 0. Then g = pi_m(f over fibers)
    maps D2 into G_m, and carath_lb(g(w0), g(w_k)) bounds c*_D2(w0, w_k).

    Raises:
        ScopeViolation: if the source of F is not a polydisc
    """
    if F.source.family != "polydisc":
        raise ScopeViolation(f"cfc_probe needs a polydisc source, got {F.source.family}")
    grid = grid or get_settings().carath_grid
    m = F.multiplicity
    grid_m = lattice_grid(m, grid)
    w0 = np.atleast_1d(np.asarray(w0, dtype=complex))
    z0 = F.fiber(w0)[0]

    rows: List[CfcRow] = []
    for k, w in enumerate(sequence):
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        z = F.fiber(w)[0]
        j = int(np.argmax(mobius_distance_batch(z0, z)))
        g = FiberCompose(F, DiscAutomorphism(complex(z0[j]), Coordinate(j + 1)))
        bound = carath_lb(np.atleast_1d(evaluate(g, w0)), np.atleast_1d(evaluate(g, w)), grid_m, tol)
        rows.append(CfcRow(index=k, w=_cjson(w), coordinate=j + 1, mobius=bound.mobius, poincare=bound.poincare))

    values = [r.poincare for r in rows]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    logger.info("cfc probe", multiplicity=m, grid=grid_m, points=len(rows), increasing=increasing)
    return CfcReport(map=F.describe(), multiplicity=m, grid=grid_m, rows=rows, increasing=increasing)


class ShilovRow(BaseModel):
    w: List[List[float]]
    target_shilov: bool
    fiber_shilov: bool

    @property
    def agree(self) -> bool:
        return self.target_shilov == self.fiber_shilov


class ShilovReport(BaseModel):
    """Whether F^-1 of the Shilov boundary of D2 is the Shilov boundary of D1, on sample points"""
    map: dict
    rows: List[ShilovRow]
    all_agree: bool


def shilov_preimage_report(F: ProperMap, points, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> ShilovReport:
    """
    For each target point w: is w in the Shilov boundary of D2, and is every
    fiber point in the Shilov boundary of D1
    """
    rows: List[ShilovRow] = []
    for w in np.atleast_2d(np.asarray(points, dtype=complex)):
        fiber = F.fiber(w)
        rows.append(ShilovRow(
            w=_cjson(w),
            target_shilov=F.target_shilov(w, tol),
            fiber_shilov=all(F.source_shilov(z, tol) for z in fiber),
        ))
    report = ShilovReport(map=F.describe(), rows=rows, all_agree=all(r.agree for r in rows))
    logger.info("shilov preimage report", points=len(rows), all_agree=report.all_agree)
    return report
