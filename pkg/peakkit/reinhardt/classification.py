"""
Peak-point classification for pseudoconvex Reinhardt domains

Off the axes z is a peak point iff log z is an extreme point of the closure
of log D. The origin never is. A point whose last coordinate vanishes is a
peak point iff its projection z' is one for the projected domain and the
slice ({z'} x C) of the closure of D is the single point z; points with
several vanishing coordinates apply this step once per zero.
"""

from enum import Enum
from typing import Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel

from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.reinhardt.domain import ReinhardtDomain
from peakkit.reinhardt.envelope import convex_model, envelope
from peakkit.reinhardt.polyhedron import LogPolyhedron, fourier_motzkin, is_extreme, log_map, lp_maximize
from peakkit.shared.errors import NotInClosure, ScopeViolation

logger = structlog.get_logger(__name__)


class PeakKind(str, Enum):
    PEAK = "Peak"
    NOT_PEAK = "NotPeak"


class PeakVerdict(BaseModel):
    kind: PeakKind
    extrapolated: bool = False
    reason: str = ""


def _verdict(peak: bool, reason: str, extrapolated: bool = False) -> PeakVerdict:
    return PeakVerdict(kind=PeakKind.PEAK if peak else PeakKind.NOT_PEAK, extrapolated=extrapolated, reason=reason)


def _slice_has_offaxis_point(G: LogPolyhedron, zero: Sequence[int], j: int, x_known: np.ndarray,
                             known: Sequence[int]) -> bool:
    """
    Whether the closure of D has a point with z_j != 0 over the fixed coordinates

    The other vanishing coordinates are eliminated first, then the remaining
    known log coordinates are pinned by equality constraints.
    """
    P = G
    kept = list(range(G.n))
    for i in sorted((i for i in zero if i != j), reverse=True):
        P = fourier_motzkin(P, kept.index(i))
        kept.remove(i)
    if not known:
        return True
    A_eq = np.zeros((len(known), P.n))
    for r, i in enumerate(known):
        A_eq[r, kept.index(i)] = 1.0
    res = lp_maximize(np.zeros(P.n), P.A, P.b + DEFAULT_TOLERANCES.lp_feas_tol, A_eq, np.asarray(x_known))
    return res.feasible


def _classify(G: LogPolyhedron, meets_axes: Tuple[bool, ...], z: np.ndarray, tol: ToleranceProfile) -> PeakVerdict:
    zero = [int(i) for i in np.flatnonzero(z == 0)]
    if len(zero) == z.size:
        return _verdict(False, "the origin is never a peak point")
    if not zero:
        x = log_map(z)
        if is_extreme(G, x, tol):
            return _verdict(True, "log z is an extreme point of the closure of log D")
        return _verdict(False, "log z is not an extreme point of the closure of log D")

    for i in zero:
        if not meets_axes[i] or not G.recession_contains(-np.eye(G.n)[i]):
            raise NotInClosure(f"z_{i + 1} = 0 but the closure of D does not reach that axis")

    # explicit permutation: the last vanishing coordinate plays the role of z_n
    j = zero[-1]
    rest = [i for i in range(z.size) if i != j]
    projected = fourier_motzkin(G, j)
    sub = _classify(projected, tuple(meets_axes[i] for i in rest), z[rest], tol)
    known = [i for i in range(z.size) if i not in zero]
    fat = _slice_has_offaxis_point(G, zero, j, np.log(np.abs(z[known])), known)
    extrapolated = len(zero) > 1 or sub.extrapolated
    if sub.kind == PeakKind.NOT_PEAK:
        return _verdict(False, f"projection without z_{j + 1}: {sub.reason}", extrapolated)
    if fat:
        return _verdict(False, f"the slice over the other coordinates meets z_{j + 1} != 0", extrapolated)
    return _verdict(True, f"projection is a peak point and the z_{j + 1} slice is a single point", extrapolated)


def classify_peak(D: ReinhardtDomain, z, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> PeakVerdict:
    """
    Peak or NotPeak for a point of the closure of a pseudoconvex Reinhardt domain

    Raises:
        NotPseudoconvex: if the log pieces do not form a convex union
        NotInClosure: if z is outside the closure of D
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    G = convex_model(D)
    verdict = _classify(G, D.meets_axes, z, tol)
    if verdict.extrapolated:
        logger.warning("several vanishing coordinates; verdict extrapolated by iteration",
                       domain=D.name, zeros=int(np.sum(z == 0)))
    logger.info("peak classification", domain=D.name, kind=verdict.kind.value)
    return verdict


def classify_peak_via_envelope(D: ReinhardtDomain, z, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> PeakVerdict:
    """
    Classify z off the axes by extremality in conv(log D)

    Works for domains whose log pieces are not convex together, since D and
    its envelope share their peak points off the axes.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z == 0):
        raise ScopeViolation("classification through the envelope is limited to points off the axes")
    x = log_map(z)
    if not D.contains_log(x, tol.lp_feas_tol):
        raise NotInClosure(f"log z = {x.tolist()} is outside the closure of log D")
    hull = envelope(D).pieces[0]
    peak = is_extreme(hull, x, tol)
    return _verdict(peak, "extreme point of conv(log D)" if peak else "not an extreme point of conv(log D)")
