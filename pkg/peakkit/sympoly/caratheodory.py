"""
Caratheodory lower bounds on G_n through chained fractional maps

q_Lambda = p_{2,lambda_{n-1}} o ... o p_{n,lambda_1} maps G_n holomorphically
into the unit disc for every Lambda on the torus, so the Mobius distance of
q_Lambda(z) and q_Lambda(w) bounds c*_{G_n}(z, w) from below.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import structlog

from peakkit.numerics.mobius import mobius_distance, mobius_distance_batch, poincare_from_mobius
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import NotInSet
from peakkit.sympoly.geometry import MembershipKind, classify

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class CarathBound:
    """Certified lower bound in the Mobius scale plus its Poincare companion"""
    mobius: float
    poincare: float
    lambdas: Tuple[complex, ...]
    grid: int


def torus_grid(dim: int, grid: int) -> np.ndarray:
    """
    All points of the grid^dim torus lattice, shape (grid**dim, dim)

    Angles are 2 pi k / grid with no offset, so the lattice for 2*grid contains
    the lattice for grid.
    """
    circle = np.exp(2j * np.pi * np.arange(grid) / grid)
    if dim == 0:
        return np.empty((1, 0), dtype=complex)
    axes = np.meshgrid(*([circle] * dim), indexing="ij")
    return np.column_stack([ax.ravel() for ax in axes])


def chained_values(lams: np.ndarray, z, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    q_Lambda(z) for every row Lambda of lams (shape (M, n-1))

    Rows that meet a pole come back as nan.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.size
    current = np.tile(z, (lams.shape[0], 1))
    bad = np.zeros(lams.shape[0], dtype=bool)
    for level, k in enumerate(range(n, 1, -1)):
        lam = lams[:, level]
        denom = k + lam * current[:, 0]
        bad |= np.abs(denom) <= tol.lp_feas_tol
        j = np.arange(1, k)
        numer = (k - j)[None, :] * current[:, :k - 1] + lam[:, None] * (j + 1)[None, :] * current[:, 1:k]
        with np.errstate(divide="ignore", invalid="ignore"):
            current = numer / denom[:, None]
    out = current[:, 0]
    out[bad] = np.nan
    return out


def carath_lb(z, w, grid: int = 64, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> CarathBound:
    """
    Lower bound for the Caratheodory pseudodistance of two interior points of G_n

    Args:
        z, w: interior points of G_n
        grid: points per circle of the parameter torus

    Raises:
        NotInSet: if either point is not an interior point
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    for name, point in (("z", z), ("w", w)):
        cls = classify(point, tol)
        if cls.kind != MembershipKind.INTERIOR:
            raise NotInSet(f"carath_lb needs interior points of G_{point.size}; {name} is {cls.kind.value}")

    if z.size == 1:
        m = mobius_distance(complex(z[0]), complex(w[0]))
        return CarathBound(m, poincare_from_mobius(m), (), grid)

    lams = torus_grid(z.size - 1, grid)
    d = mobius_distance_batch(chained_values(lams, z, tol), chained_values(lams, w, tol))
    if np.all(np.isnan(d)):
        return CarathBound(0.0, 0.0, (), grid)
    best = int(np.nanargmax(d))
    m = float(d[best])
    logger.debug("caratheodory bound", n=z.size, grid=grid, mobius=m)
    return CarathBound(m, poincare_from_mobius(m), tuple(complex(v) for v in lams[best]), grid)
