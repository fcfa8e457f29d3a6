"""
Geometry of the symmetrized polydisc G_n

G_n is the image of the unit polydisc under the elementary symmetric map
pi_n, i.e. the set of coefficient vectors of monic polynomials whose roots
all lie in the unit disc. Two membership tests live here:

- classify: roots of the characteristic polynomial (the ground truth)
- costara_classify: the recursive fractional-map criterion (a cross-check)
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence, Tuple

import numpy as np
import structlog
from scipy.optimize import minimize_scalar

from peakkit.numerics.polynomials import (
    ComplexPoly,
    elementary_symmetric,
    elementary_symmetric_batch,
    roots_with_retry,
)
from peakkit.numerics.sampling import (
    SampleSet,
    SampleStrategy,
    register_sampler,
    uniform_annulus,
    uniform_circle,
    uniform_disc,
)
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import PoleHit

logger = structlog.get_logger(__name__)

# keeps disc grids off the real and imaginary axes
_GRID_OFFSET = np.sqrt(5.0) - 2.0
# grid values this close to 1 trigger local refinement on the circle
_REFINE_WINDOW = 5e-2


class MembershipKind(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


@dataclass(frozen=True)
class MembershipClass:
    """Verdict of a membership test; max_root_modulus is the thresholded value"""
    kind: MembershipKind
    max_root_modulus: float
    witness_roots: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    method: str = "roots"
    pole_hit: bool = False


@dataclass(frozen=True)
class SymPoint:
    """A candidate point of G_n; its class is always recomputed"""
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.atleast_1d(np.asarray(self.z, dtype=complex)))

    @property
    def n(self) -> int:
        return int(self.z.size)

    def classify(self, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> MembershipClass:
        return classify(self.z, tol)


@dataclass(frozen=True)
class FracParams:
    """Parameters (n, lambda) of the fractional map z -> z~(lambda)"""
    n: int
    lam: complex

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"fractional maps need n >= 2, got {self.n}")
        if abs(self.lam) > 1.0 + 1e-12:
            raise ValueError(f"lambda must lie in the closed disc, got {self.lam}")


def _band_kind(value: float, tol: ToleranceProfile) -> MembershipKind:
    if value < 1.0 - tol.boundary_band:
        return MembershipKind.INTERIOR
    if abs(value - 1.0) <= tol.boundary_band:
        return MembershipKind.BOUNDARY
    return MembershipKind.EXTERIOR


def sym(lam: Sequence[complex]) -> np.ndarray:
    """pi_n(lambda): the elementary symmetric polynomials of lambda"""
    return elementary_symmetric(lam)


def char_poly(z: Sequence[complex]) -> ComplexPoly:
    """t^n - z_1 t^(n-1) + z_2 t^(n-2) - ... + (-1)^n z_n"""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.size
    signs = (-1.0) ** np.arange(1, n + 1)
    # coefficient of t^(n-k) is (-1)^k z_k; stored low to high
    return ComplexPoly((signs * z)[::-1])


def classify(z: Sequence[complex], tol: ToleranceProfile = DEFAULT_TOLERANCES, seed: int = 0) -> MembershipClass:
    """
    Classify z against G_n by the largest root modulus of char_poly(z)

    Raises:
        NonConvergence: if the root finder fails twice (seed, seed + 1)
    """
    r = roots_with_retry(char_poly(z), tol, seed)
    value = float(np.max(np.abs(r)))
    return MembershipClass(_band_kind(value, tol), value, r)


def is_distinguished(z: Sequence[complex], tol: ToleranceProfile = DEFAULT_TOLERANCES) -> bool:
    """True iff every root of char_poly(z) is unimodular: z lies in pi_n(T^n)"""
    r = roots_with_retry(char_poly(z), tol)
    return bool(np.all(np.abs(np.abs(r) - 1.0) <= tol.boundary_band))


def frac_map(fp: FracParams, z: Sequence[complex], tol: ToleranceProfile = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    z~(lambda)_j = ((n - j) z_j + lambda (j + 1) z_{j+1}) / (n + lambda z_1), j = 1..n-1

    Raises:
        PoleHit: if |n + lambda z_1| <= lp_feas_tol
    """
    z = np.asarray(z, dtype=complex)
    n = fp.n
    denom = n + fp.lam * z[0]
    if abs(denom) <= tol.lp_feas_tol:
        raise PoleHit(f"n + lambda*z1 = {denom!r} vanishes (n={n}, lambda={fp.lam})")
    j = np.arange(1, n)
    return ((n - j) * z[:n - 1] + fp.lam * (j + 1) * z[1:n]) / denom


def frac_map_many(lams: np.ndarray, z: Sequence[complex]) -> Tuple[np.ndarray, np.ndarray]:
    """
    z~(lambda) for many lambdas at once

    Returns:
        (values of shape (G, n-1), |n + lambda z_1| of shape (G,)); pole rows hold nan
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    lams = np.asarray(lams, dtype=complex)
    denom = n + lams * z[0]
    j = np.arange(1, n)
    numer = (n - j)[None, :] * z[None, :n - 1] + lams[:, None] * (j + 1)[None, :] * z[None, 1:n]
    with np.errstate(divide="ignore", invalid="ignore"):
        values = numer / denom[:, None]
    return values, np.abs(denom)


def circle_grid(count: int) -> np.ndarray:
    """count equally spaced points of the unit circle starting at 1"""
    return np.exp(2j * np.pi * np.arange(count) / count)


def disc_grid(count: int) -> np.ndarray:
    """
    Deterministic grid of the closed unit disc on concentric circles

    The centre plus rings at radii k/R, with points per ring proportional to the
    radius; the outermost ring is the unit circle. Exactly `count` points.
    """
    rings = max(2, int(round(np.sqrt(count / np.pi))))
    radii = np.arange(1, rings + 1) / rings
    per_ring = np.floor(radii / radii.sum() * (count - 1)).astype(int)
    per_ring[-1] += (count - 1) - per_ring.sum()
    points = [np.zeros(1, dtype=complex)]
    for r, m in zip(radii, per_ring):
        angles = 2.0 * np.pi * (np.arange(m) + 0.5 + _GRID_OFFSET) / m
        points.append(r * np.exp(1j * angles))
    return np.concatenate(points)


def max_root_modulus_batch(W: np.ndarray, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> np.ndarray:
    """Largest root modulus of char_poly for each row of W (closed forms up to degree 2)"""
    W = np.asarray(W, dtype=complex)
    if W.shape[1] == 1:
        return np.abs(W[:, 0])
    if W.shape[1] == 2:
        s, p = W[:, 0], W[:, 1]
        root_disc = np.sqrt(s * s - 4.0 * p)
        return np.maximum(np.abs(s + root_disc), np.abs(s - root_disc)) / 2.0
    return np.array([classify(w, tol).max_root_modulus for w in W])


def refine_on_circle(objective: Callable[[float], float], theta0: float, half_width: float) -> Tuple[float, float]:
    """
    Bounded golden-section/Brent maximization of objective(theta) near theta0

    Non-finite objective values count as -inf so isolated poles are stepped over.
    """
    def negated(theta: float) -> float:
        value = objective(theta)
        return -value if np.isfinite(value) else np.inf

    res = minimize_scalar(
        negated,
        bounds=(theta0 - half_width, theta0 + half_width),
        method="bounded",
        options={"xatol": 1e-12},
    )
    best = -res.fun if np.isfinite(res.fun) else -np.inf
    return float(res.x), float(best)


def _level_two_sup(W: np.ndarray, pole_tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact sup over the closed disc of |(w1 + 2 lam w2) / (2 + lam w1)| for each row

    The Mobius image of the unit circle is a circle whose centre is the image of
    the reflection of the pole; the sup is |centre| + radius. Rows with the pole
    in the closed disc come back as (inf, True).
    """
    a = W[:, 0]
    b = 2.0 * W[:, 1]
    det = a * a - 2.0 * b
    degenerate = np.abs(det) <= 1e-13 * (1.0 + np.abs(a) ** 2 + np.abs(b))
    pole = (~degenerate) & (np.abs(a) >= 2.0 - pole_tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        centre = (2.0 * a - b * np.conj(a)) / (4.0 - np.abs(a) ** 2)
        radius = np.abs((a + b) / (2.0 + a) - centre)
        value = np.abs(centre) + radius
    value = np.where(degenerate, np.abs(a) / 2.0, value)
    value = np.where(pole, np.inf, value)
    return value, pole


def _costara_values(points: np.ndarray, grid_size: int, tol: ToleranceProfile) -> Tuple[np.ndarray, np.ndarray]:
    """Costara modulus of each row when used as an inner level"""
    n = points.shape[1]
    if n == 1:
        return np.abs(points[:, 0]), np.zeros(points.shape[0], dtype=bool)
    if n == 2:
        return _level_two_sup(points, tol.lp_feas_tol)
    values = np.empty(points.shape[0])
    poles = np.zeros(points.shape[0], dtype=bool)
    for i, w in enumerate(points):
        values[i], poles[i] = costara_modulus(w, grid_size, tol)
    return values, poles


def costara_modulus(z: Sequence[complex], grid_size: int = 64,
                    tol: ToleranceProfile = DEFAULT_TOLERANCES) -> Tuple[float, bool]:
    """
    Worst case over the closed disc of the Costara modulus of z~(lambda)

    For n = 1 this is |z| and for n = 2 the exact supremum of a Mobius image of
    the disc. From n = 3 on lambda ranges over disc_grid(grid_size), inner
    levels are evaluated recursively, and the best circle points (plus the
    direction of the pole -n/z_1 when it sits near the circle) are refined.

    Returns:
        (modulus, pole_hit)
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.size
    if n == 1:
        return float(abs(z[0])), False

    # lambda = -n / z_1 lies in the closed disc
    if abs(z[0]) > n + tol.lp_feas_tol:
        return float("inf"), True
    if n == 2:
        value, pole = _level_two_sup(z[None, :], tol.lp_feas_tol)
        return float(value[0]), bool(pole[0])

    lams = disc_grid(grid_size)
    W, denom = frac_map_many(lams, z)
    if np.any(denom <= tol.lp_feas_tol):
        return float("inf"), True
    values, poles = _costara_values(W, grid_size, tol)
    if poles.any():
        return float("inf"), True

    value = float(np.max(values))
    near_pole = abs(z[0]) >= n - 1
    if abs(value - 1.0) <= _REFINE_WINDOW or near_pole:
        on_circle = np.flatnonzero(np.isclose(np.abs(lams), 1.0))
        spacing = 2.0 * np.pi / on_circle.size

        def objective(theta: float) -> float:
            w, d = frac_map_many(np.array([np.exp(1j * theta)]), z)
            if d[0] <= tol.lp_feas_tol:
                return np.nan
            v, p = _costara_values(w, grid_size, tol)
            return np.nan if p[0] else float(v[0])

        # the three best circle points guard against a second local maximum
        seeds = [(float(np.angle(lams[i])), spacing) for i in on_circle[np.argsort(values[on_circle])[::-1][:3]]]
        if near_pole:
            pole_angle = float(np.angle(-n / z[0]))
            seeds += [(pole_angle, spacing / 16.0 ** k) for k in range(3)]
        for theta0, half_width in seeds:
            _, refined = refine_on_circle(objective, theta0, half_width)
            value = max(value, refined)
    return value, False


def costara_classify(z: Sequence[complex], grid_size: int = 64,
                     tol: ToleranceProfile = DEFAULT_TOLERANCES) -> MembershipClass:
    """
    Independent membership test through the fractional-map criterion

    A pole anywhere on the grid gives an Exterior verdict with pole_hit set.
    """
    if grid_size < 64:
        raise ValueError(f"lambda grid needs at least 64 points, got {grid_size}")
    value, pole = costara_modulus(z, grid_size, tol)
    kind = MembershipKind.EXTERIOR if pole else _band_kind(value, tol)
    logger.debug("costara verdict", n=int(np.size(z)), modulus=value, pole_hit=pole, kind=kind.value)
    return MembershipClass(kind, value, method="costara", pole_hit=pole)


def _sym_samples(n: int, count: int, seed: int, strategy: SampleStrategy = SampleStrategy.INTERIOR,
                 shell: float = 1e-2) -> SampleSet:
    rng = np.random.default_rng(seed)
    strategy = SampleStrategy(strategy)
    if strategy == SampleStrategy.INTERIOR:
        lam = np.column_stack([uniform_disc(rng, count) for _ in range(n)])
    elif strategy == SampleStrategy.BOUNDARY:
        cols = [uniform_circle(rng, count)] + [uniform_disc(rng, count, closed=True) for _ in range(n - 1)]
        lam = np.column_stack(cols)
    else:
        lam = np.column_stack([uniform_annulus(rng, count, 1.0 - shell, 1.0) for _ in range(n)])
    return SampleSet(elementary_symmetric_batch(lam), seed, strategy, "symmetrized_polydisc",
                     {"n": n, "shell": shell})


register_sampler("symmetrized_polydisc", _sym_samples)


def sample_interior(n: int, count: int, seed: int) -> SampleSet:
    """sym(lambda) for lambda uniform in D^n"""
    return _sym_samples(n, count, seed, SampleStrategy.INTERIOR)


def sample_boundary(n: int, count: int, seed: int) -> SampleSet:
    """sym(lambda) with lambda_1 on the circle and the rest in the closed disc"""
    return _sym_samples(n, count, seed, SampleStrategy.BOUNDARY)


def sample_shell(n: int, count: int, seed: int, shell: float = 1e-2) -> SampleSet:
    """sym(lambda) with every |lambda_j| in [1 - shell, 1): interior points near the boundary"""
    return _sym_samples(n, count, seed, SampleStrategy.ANNULAR_SHELL, shell)


def sample_distinguished(n: int, count: int, seed: int) -> SampleSet:
    """sym of torus points: the distinguished boundary pi_n(T^n)"""
    rng = np.random.default_rng(seed)
    lam = np.column_stack([uniform_circle(rng, count) for _ in range(n)])
    return SampleSet(elementary_symmetric_batch(lam), seed, SampleStrategy.BOUNDARY, "distinguished", {"n": n})

