"""
Moving peak functions across a proper map F: D1 -> D2 of multiplicity m

Forward: if phi peaks at a in D1, g(w) = pi_m(phi over the fiber of w) maps D2
into the closure of G_m, and composing with a peak function of G_m at g(F(a))
gives a peak function for D2 at F(a).

Backward: if psi peaks at y in D2, psi o F peaks on the whole fiber of y. A
polynomial separator that is 1 at one fiber point and 0 at the others, raised
against high powers of psi o F in a Bishop-type series, isolates that point.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import structlog

from peakkit.numerics.expressions import (
    Compose,
    Constant,
    Coordinate,
    FiberCompose,
    HoloFunction,
    LinearScale,
    Power,
    Product,
    Sum,
    evaluate,
    evaluate_batch,
)
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import (
    ExponentSearchFailure,
    FiberBoundaryMismatch,
    IndistinctPoints,
    InputError,
    NotOnBoundary,
)
from peakkit.shared.settings import get_settings
from peakkit.sympoly.geometry import MembershipKind, classify
from peakkit.sympoly.peak import PeakConstruction, construct_peak
from peakkit.transfer.maps import ProperMap

logger = structlog.get_logger(__name__)

_EXPONENT_CAP = 2 ** 20
_TERM_TARGET = 0.25


@dataclass(frozen=True)
class TransferResult:
    """
    A peak function pushed forward through F

    Attributes:
        function: psi o g, the peak function on D2
        point: b = F(a)
        fiber_values: g(b), a boundary point of G_m
        inner: the G_m construction behind psi
    """
    function: HoloFunction
    point: np.ndarray
    fiber_values: np.ndarray
    inner: PeakConstruction


def transfer_peak(F: ProperMap, phi: HoloFunction, a, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> TransferResult:
    """
    Peak function for F(D1) at F(a) from a peak function phi for D1 at a

    Raises:
        FiberBoundaryMismatch: if g(F(a)) is not a boundary point of G_m
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    if a.size != F.source_dim:
        raise InputError(f"point has {a.size} coordinates, the map expects {F.source_dim}")
    b = F(a)
    g = FiberCompose(F, phi)
    gb = np.atleast_1d(evaluate(g, b))
    cls = classify(gb, tol)
    if cls.kind != MembershipKind.BOUNDARY:
        raise FiberBoundaryMismatch(
            f"g(b) is {cls.kind.value} in G_{gb.size} (max root modulus {cls.max_root_modulus:.12g})"
        )
    inner = construct_peak(gb, tol)
    logger.info("peak transferred", map=F.describe()["map"], multiplicity=F.multiplicity, levels=inner.levels)
    return TransferResult(Compose(inner.function, g), b, gb, inner)


@dataclass(frozen=True)
class Separator:
    """
    Polynomial that is 1 at points[index] and 0 at every other point

    coordinates[i] is the coordinate used to separate the i-th other point.
    """
    function: HoloFunction
    points: np.ndarray
    index: int
    coordinates: Tuple[int, ...]


def separator(E, j: int, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> Separator:
    """
    Product over l != j of (lambda_s - x^l_s) / (x^j_s - x^l_s), s the first
    coordinate where x^j and x^l differ; j counts from 0

    Raises:
        IndistinctPoints: if some x^l agrees with x^j in every coordinate
    """
    E = np.atleast_2d(np.asarray(E, dtype=complex))
    if not 0 <= j < E.shape[0]:
        raise InputError(f"separator index {j} outside 0..{E.shape[0] - 1}")
    x = E[j]
    factors: List[HoloFunction] = []
    coords: List[int] = []
    scale = 1.0 + 0.0j
    for l, y in enumerate(E):
        if l == j:
            continue
        differ = np.flatnonzero(np.abs(x - y) > tol.lp_feas_tol)
        if differ.size == 0:
            raise IndistinctPoints(f"fiber points {j} and {l} coincide")
        s = int(differ[0])
        coords.append(s)
        factors.append(Sum((Coordinate(s + 1), Constant(-y[s]))))
        scale *= x[s] - y[s]
    if not factors:
        return Separator(Constant(1.0), E, j, ())
    return Separator(LinearScale(1.0 / scale, Product(tuple(factors))), E, j, tuple(coords))


@dataclass(frozen=True)
class PullbackPeak:
    """
    Peak function for D1 at one point of the fiber of y

    Attributes:
        function: c * sum_k 2^-k (psi o F)^n_k * Phi
        point: the chosen fiber point
        fiber: the whole fiber of y
        exponents: n_k for k = 1..terms (empty when the fiber is a single point)
        radii: the neighbourhood radii r_0 2^-k used to pick each n_k
        normalization: c
    """
    function: HoloFunction
    point: np.ndarray
    fiber: np.ndarray
    exponents: Tuple[int, ...]
    radii: Tuple[float, ...]
    normalization: complex


def pullback_peak(F: ProperMap, psi: HoloFunction, y, j: int = 0,
                  tol: ToleranceProfile = DEFAULT_TOLERANCES, terms: Optional[int] = None,
                  radius: Optional[float] = None, samples: Optional[int] = None,
                  seed: Optional[int] = None) -> PullbackPeak:
    """
    Pull a peak function psi for D2 at y back to the fiber point x^j

    The exponents n_k are the smallest powers of two with
    |psi o F|^n_k |Phi| <= 1/4 on the sampled source outside B(x^j, r_0 2^-k).

    Raises:
        NotOnBoundary: if psi(y) is not 1
        IndistinctPoints: if the fiber has repeated points
        ExponentSearchFailure: if some n_k would exceed 2^20
    """
    settings = get_settings()
    terms = terms or settings.bishop_terms
    radius = radius or settings.neighborhood_radius
    samples = samples or settings.interior_samples
    seed = settings.seed if seed is None else seed

    y = np.atleast_1d(np.asarray(y, dtype=complex))
    if abs(evaluate(psi, y) - 1.0) > tol.peak_value_tol:
        raise NotOnBoundary(f"psi(y) = {evaluate(psi, y)!r} is not 1")
    fiber = F.fiber(y)
    sep = separator(fiber, j, tol)
    x = fiber[j]
    h = Compose(psi, F.as_function())

    if fiber.shape[0] == 1:
        return PullbackPeak(h, x, fiber, (), (), 1.0 + 0.0j)

    S = F.source.sample(samples, seed).points
    h_mod = np.abs(evaluate_batch(h, S))
    phi_mod = np.abs(evaluate_batch(sep.function, S))
    dist = np.linalg.norm(S - x[None, :], axis=1)

    exponents: List[int] = []
    radii: List[float] = []
    for k in range(1, terms + 1):
        r_k = radius * 2.0 ** -k
        outside = dist >= r_k
        n = 1
        while outside.any() and np.max(h_mod[outside] ** n * phi_mod[outside]) > _TERM_TARGET:
            n *= 2
            if n > _EXPONENT_CAP:
                raise ExponentSearchFailure(f"term {k} needs an exponent above {_EXPONENT_CAP}")
        inside = ~outside
        if inside.any() and np.max(phi_mod[inside]) > 1.0 + 2.0 ** -k:
            logger.warning("separator exceeds its bound near the fiber point", term=k,
                           sup=float(np.max(phi_mod[inside])), bound=1.0 + 2.0 ** -k)
        exponents.append(n)
        radii.append(r_k)

    series = Sum(tuple(
        LinearScale(2.0 ** -k, Product((Power(h, n), sep.function)))
        for k, n in enumerate(exponents, start=1)
    ))
    c = 1.0 / complex(evaluate(series, x))
    logger.info("peak pulled back", multiplicity=fiber.shape[0], exponents=exponents)
    return PullbackPeak(LinearScale(c, series), x, fiber, tuple(exponents), tuple(radii), c)
