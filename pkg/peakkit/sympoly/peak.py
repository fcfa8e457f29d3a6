"""
Recursive peak-function construction on the boundary of G_n

A boundary point a of G_n is pushed down one dimension at a time by a
fractional map p_{n,lambda} chosen so that p_{n,lambda}(a) stays on the
boundary of G_{n-1}. At dimension one (or when |a_1| = n) the peak function
is explicit, and composing back up gives a peak function at a.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy.optimize import minimize

from peakkit.numerics.expressions import Compose, Coordinate, FractionalMap, HoloFunction, LinearScale, MobiusAtom
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import NonConvergence, NotOnBoundary, SearchFailure
from peakkit.shared.settings import get_settings
from peakkit.sympoly.geometry import (
    FracParams,
    MembershipKind,
    circle_grid,
    classify,
    disc_grid,
    frac_map,
    frac_map_many,
    max_root_modulus_batch,
    refine_on_circle,
)

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class PeakConstruction:
    """
    Result of construct_peak

    Attributes:
        function: the peak function at `point`
        point: the boundary point a
        lambdas: lambda* chosen at each fractional level, outermost first
        value_tolerance: peak_value_tol widened by one band per level
    """
    function: HoloFunction
    point: np.ndarray
    lambdas: Tuple[complex, ...]
    value_tolerance: float

    @property
    def levels(self) -> int:
        return len(self.lambdas)


def _mu(lams: np.ndarray, a: np.ndarray, tol: ToleranceProfile) -> np.ndarray:
    """Approximate max root modulus of char_poly(frac_map(lambda, a)); poles give -inf"""
    W, denom = frac_map_many(lams, a)
    ok = denom > tol.lp_feas_tol
    out = np.full(lams.size, -np.inf)
    if ok.any():
        out[ok] = max_root_modulus_batch(W[ok], tol)
    return out


def _accepts(lam: complex, a: np.ndarray, tol: ToleranceProfile) -> bool:
    """Root-finder check that frac_map(lam, a) lies in the boundary band"""
    if abs(a.size + lam * a[0]) <= tol.lp_feas_tol:
        return False
    try:
        cls = classify(frac_map(FracParams(a.size, lam), a, tol), tol)
    except NonConvergence:
        return False
    return cls.kind == MembershipKind.BOUNDARY


def search_lambda(a: np.ndarray, tol: ToleranceProfile = DEFAULT_TOLERANCES,
                  circle_points: int = 256, grid_size: int = 64) -> complex:
    """
    Find lambda* in the closed disc with frac_map(lambda*, a) on the boundary of G_{n-1}

    Order: the circle grid (first hit wins), golden/Brent refinement around the
    best circle points, the full-disc grid, then a Nelder-Mead polish from the
    best disc point.

    Raises:
        SearchFailure: when no candidate reaches the boundary band
    """
    threshold = 1.0 - tol.boundary_band
    candidates: List[complex] = []

    circle = circle_grid(circle_points)
    mu_circle = _mu(circle, a, tol)
    for idx in np.flatnonzero(mu_circle >= threshold):
        if _accepts(complex(circle[idx]), a, tol):
            logger.debug("lambda from circle grid", index=int(idx))
            return complex(circle[idx])

    spacing = 2.0 * np.pi / circle_points

    def on_circle(theta: float) -> float:
        return float(_mu(np.array([np.exp(1j * theta)]), a, tol)[0])

    for idx in np.argsort(mu_circle)[::-1][:3]:
        theta, value = refine_on_circle(on_circle, float(np.angle(circle[idx])), spacing)
        candidates.append(complex(np.exp(1j * theta)))
        if value >= threshold and _accepts(candidates[-1], a, tol):
            logger.debug("lambda from circle refinement", theta=theta, mu=value)
            return candidates[-1]

    disc = disc_grid(grid_size)
    mu_disc = _mu(disc, a, tol)
    for idx in np.flatnonzero(mu_disc >= threshold):
        if _accepts(complex(disc[idx]), a, tol):
            logger.debug("lambda from disc grid", index=int(idx))
            return complex(disc[idx])

    def clipped(x: np.ndarray) -> complex:
        lam = complex(x[0], x[1])
        return lam / abs(lam) if abs(lam) > 1.0 else lam

    start = disc[int(np.argmax(mu_disc))]
    res = minimize(
        lambda x: -_mu(np.array([clipped(x)]), a, tol)[0],
        x0=np.array([start.real, start.imag]),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000},
    )
    lam = clipped(res.x)
    if _accepts(lam, a, tol):
        logger.debug("lambda from disc polish", lam=str(lam), mu=-res.fun)
        return lam

    best = max(np.max(mu_circle), np.max(mu_disc), -res.fun)
    raise SearchFailure(
        f"no lambda brings frac_map(lambda, a) within {tol.boundary_band:g} of the boundary "
        f"(best max root modulus {best:.12f}, n={a.size})"
    )


def construct_peak(a, tol: ToleranceProfile = DEFAULT_TOLERANCES,
                   circle_points: Optional[int] = None, grid_size: Optional[int] = None) -> PeakConstruction:
    """
    Build a peak function for G_n at the boundary point a

    Args:
        a: point with classify(a) == Boundary
        tol: tolerance profile
        circle_points: circle grid for the lambda search (default from settings)
        grid_size: disc grid for the fallback search (default from settings)

    Raises:
        NotOnBoundary: if a is not a boundary point
        SearchFailure: if some level finds no admissible lambda
    """
    settings = get_settings()
    circle_points = circle_points or settings.circle_search_points
    grid_size = grid_size or settings.lambda_grid_size
    point = np.atleast_1d(np.asarray(a, dtype=complex))

    cls = classify(point, tol)
    if cls.kind != MembershipKind.BOUNDARY:
        raise NotOnBoundary(
            f"peak_at needs a boundary point of G_{point.size}; got {cls.kind.value} "
            f"(max root modulus {cls.max_root_modulus:.12g})"
        )

    maps: List[FractionalMap] = []
    lambdas: List[complex] = []
    current = point
    while True:
        n = current.size
        if n == 1:
            base: HoloFunction = MobiusAtom(complex(current[0]))
            break
        if abs(current[0]) >= n - tol.peak_value_tol:
            a1 = complex(current[0])
            base = LinearScale(abs(a1) / (n * a1), Coordinate(1))
            break
        lam = search_lambda(current, tol, circle_points, grid_size)
        lambdas.append(lam)
        maps.append(FractionalMap(n, lam, tol.lp_feas_tol))
        current = frac_map(FracParams(n, lam), current, tol)

    function = base
    for fmap in reversed(maps):
        function = Compose(function, fmap)

    logger.info("peak constructed", n=point.size, levels=len(lambdas), depth=function.depth())
    return PeakConstruction(function, point, tuple(lambdas), tol.widened(len(lambdas)))


def peak_at(a, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> HoloFunction:
    """Peak function for G_n at the boundary point a (see construct_peak)"""
    return construct_peak(a, tol).function
