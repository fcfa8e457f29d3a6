"""
Monic complex polynomials, elementary symmetric functions and root finding

Roots are found with the Aberth-Ehrlich simultaneous iteration started on a
circle of radius 1 + max|coeff|. The start angles carry a fixed irrational
rotation so no two runs depend on anything but (polynomial, seed).
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import structlog

from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import NonConvergence

logger = structlog.get_logger(__name__)

# radians; irrational so the start circle never lines up with real/imaginary axes
_ROTATION = 0.5 * (np.sqrt(5.0) - 1.0)
_SEED_ROTATION = np.sqrt(2.0) - 1.0
_EPS = np.finfo(float).eps
_CLUSTER_RADIUS = 1e-4


@dataclass(frozen=True)
class ComplexPoly:
    """
    Monic polynomial t^n + c_{n-1} t^{n-1} + ... + c_0

    Attributes:
        coeffs: c_0..c_{n-1} (low to high); the leading 1 is implicit
    """
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size < 1:
            raise ValueError("ComplexPoly needs degree >= 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return int(self.coeffs.size)

    @property
    def max_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def descending(self) -> np.ndarray:
        """Coefficients high to low including the leading 1 (numpy.polyval order)"""
        return np.concatenate(([1.0 + 0.0j], self.coeffs[::-1]))

    def __call__(self, t):
        return np.polyval(self.descending(), t)

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "ComplexPoly":
        high = np.poly(np.asarray(roots, dtype=complex))
        return cls(np.asarray(high[1:][::-1], dtype=complex))


def elementary_symmetric(lam: Sequence[complex]) -> np.ndarray:
    """
    Elementary symmetric polynomials (e_1, ..., e_n) of lam

    Uses the coefficient recurrence of prod_j (t + lam_j), which never forms
    the 2^n subset sums.
    """
    lam = np.asarray(lam, dtype=complex)
    n = lam.size
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for j, value in enumerate(lam):
        e[1:j + 2] = e[1:j + 2] + value * e[0:j + 1]
    return e[1:]


def elementary_symmetric_batch(lam: np.ndarray) -> np.ndarray:
    """Row-wise elementary_symmetric for an (N, n) array"""
    lam = np.asarray(lam, dtype=complex)
    if lam.ndim == 1:
        lam = lam[:, None]
    rows, n = lam.shape
    e = np.zeros((rows, n + 1), dtype=complex)
    e[:, 0] = 1.0
    for j in range(n):
        e[:, 1:j + 2] = e[:, 1:j + 2] + lam[:, j:j + 1] * e[:, 0:j + 1]
    return e[:, 1:]


def _initial_guess(degree: int, radius: float, seed: int) -> np.ndarray:
    k = np.arange(degree)
    angles = 2.0 * np.pi * k / degree + _ROTATION + seed * _SEED_ROTATION
    return radius * (1.0 + 0.05 * seed) * np.exp(1j * angles)


def _aberth(high: np.ndarray, x: np.ndarray, max_iterations: int) -> np.ndarray:
    dhigh = np.polyder(high)
    abs_high = np.abs(high)
    for _ in range(max_iterations):
        pv = np.polyval(high, x)
        floor = 16.0 * _EPS * np.polyval(abs_high, np.abs(x))
        settled = np.abs(pv) <= floor
        if np.all(settled):
            break
        dpv = np.polyval(dhigh, x)
        diff = x[:, None] - x[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            inv[~np.isfinite(inv)] = 0.0
            np.fill_diagonal(inv, 0.0)
            ratio = pv / dpv
            ratio = np.where(np.isfinite(ratio), ratio, pv)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
            step = np.where(np.isfinite(step), step, ratio)
        step[settled] = 0.0
        x = x - step
        if np.all(np.abs(step) <= 4.0 * _EPS * (1.0 + np.abs(x))):
            break
    return x


def _merge_clusters(x: np.ndarray, high: np.ndarray, bound: float) -> np.ndarray:
    """Replace tight root clusters by their mean when the coefficients still match"""
    n = x.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(x[i] - x[j]) <= _CLUSTER_RADIUS * (1.0 + abs(x[i])):
                parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    merged = x.copy()
    for members in groups.values():
        if len(members) < 2:
            continue
        trial = merged.copy()
        trial[members] = np.mean(merged[members])
        if np.max(np.abs(np.poly(trial) - high)) <= bound:
            merged = trial
    return merged


def sort_roots(r: np.ndarray) -> np.ndarray:
    """Order by (modulus desc, argument asc); moduli compared at 12 digits"""
    r = np.asarray(r, dtype=complex)
    order = np.lexsort((np.angle(r), -np.round(np.abs(r), 12)))
    return r[order]


def roots(p: ComplexPoly, tol: ToleranceProfile = DEFAULT_TOLERANCES, seed: int = 0) -> np.ndarray:
    """
    All roots of a monic polynomial, with multiplicity

    Args:
        p: monic polynomial of degree >= 1
        tol: tolerance profile (root_converge, max_iterations)
        seed: start perturbation index; retry with seed + 1 on failure

    Returns:
        complex array of length deg(p), sorted by (modulus desc, argument asc)

    Raises:
        NonConvergence: if some residual exceeds root_converge * (1 + max|coeff|)
    """
    bound = tol.root_converge * (1.0 + p.max_coeff)
    if p.degree == 1:
        return np.array([-p.coeffs[0]], dtype=complex)

    high = p.descending()
    x = _aberth(high, _initial_guess(p.degree, 1.0 + p.max_coeff, seed), tol.max_iterations)

    residual = np.abs(np.polyval(high, x))
    if not np.all(np.isfinite(x)) or np.max(residual) > bound:
        raise NonConvergence(
            f"root iteration did not reach residual {bound:.3e} within "
            f"{tol.max_iterations} iterations (worst {np.max(residual):.3e}, seed {seed})"
        )
    return sort_roots(_merge_clusters(x, high, bound))


def roots_with_retry(p: ComplexPoly, tol: ToleranceProfile = DEFAULT_TOLERANCES,
                     seed: int = 0, attempts: int = 2) -> np.ndarray:
    """roots() with the documented seed+1 retry on NonConvergence"""
    for attempt in range(attempts):
        try:
            return roots(p, tol, seed + attempt)
        except NonConvergence:
            if attempt == attempts - 1:
                raise
            logger.warning("root finder retry", seed=seed + attempt + 1, degree=p.degree)
    raise NonConvergence("unreachable")
