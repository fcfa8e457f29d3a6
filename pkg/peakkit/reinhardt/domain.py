"""
Reinhardt domains described by finitely many log polyhedra, plus the catalog

log D is the interior of the union of the pieces. meets_axes records, per
coordinate, whether D itself contains points with z_j = 0.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from peakkit.numerics.sampling import SampleSet, SampleStrategy, register_sampler, uniform_circle
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES
from peakkit.reinhardt.polyhedron import LogPolyhedron, lp_maximize
from peakkit.shared.errors import InputError

logger = structlog.get_logger(__name__)


def _closures_meet(p: LogPolyhedron, q: LogPolyhedron, tol: float) -> bool:
    res = lp_maximize(np.zeros(p.n), np.vstack([p.A, q.A]), np.r_[p.b, q.b] + tol)
    return res.feasible


@dataclass(frozen=True)
class ReinhardtDomain:
    """
    Bounded Reinhardt domain D with log D the interior of a union of log polyhedra

    Raises:
        InputError: on dimension mismatch, a meets_axes flag without the
            matching recession direction, or a disconnected union
    """
    pieces: Tuple[LogPolyhedron, ...]
    meets_axes: Tuple[bool, ...]
    name: str = "reinhardt"

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "meets_axes", tuple(bool(m) for m in self.meets_axes))
        if not self.pieces:
            raise InputError("a Reinhardt domain needs at least one log piece")
        n = self.pieces[0].n
        if any(p.n != n for p in self.pieces):
            raise InputError("log pieces have different ambient dimensions")
        if len(self.meets_axes) != n:
            raise InputError(f"meets_axes has {len(self.meets_axes)} flags for dimension {n}")
        for j, meets in enumerate(self.meets_axes):
            if meets and not any(p.recession_contains(-np.eye(n)[j]) for p in self.pieces):
                raise InputError(f"meets_axes[{j}] is set but no piece recedes along -e_{j + 1}")

        # connectivity of the closure-intersection graph
        seen, stack = {0}, [0]
        while stack:
            i = stack.pop()
            for j in range(len(self.pieces)):
                if j not in seen and _closures_meet(self.pieces[i], self.pieces[j], DEFAULT_TOLERANCES.lp_feas_tol):
                    seen.add(j)
                    stack.append(j)
        if len(seen) != len(self.pieces):
            raise InputError(f"log pieces of {self.name} do not form a connected union")

    @property
    def n(self) -> int:
        return self.pieces[0].n

    def contains_log(self, x, tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> bool:
        """Membership of x in the closure of log D"""
        return any(p.contains(x, tol) for p in self.pieces)

    def contains_log_batch(self, X: np.ndarray, tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> np.ndarray:
        X = np.atleast_2d(X)
        out = np.zeros(X.shape[0], dtype=bool)
        for p in self.pieces:
            out |= p.contains_batch(X, tol)
        return out

    def sample_log(self, count: int, seed: int, depth: float = 3.0) -> np.ndarray:
        """Points of log D, split evenly over the pieces"""
        seeds = np.random.SeedSequence(seed).generate_state(len(self.pieces))
        sizes = np.full(len(self.pieces), count // len(self.pieces))
        sizes[: count % len(self.pieces)] += 1
        parts = [p.sample(int(c), int(s), depth) for p, c, s in zip(self.pieces, sizes, seeds) if c]
        return np.vstack(parts)

    def sample(self, count: int, seed: int, depth: float = 3.0) -> SampleSet:
        return _reinhardt_samples(count, seed, SampleStrategy.INTERIOR, **self.sampler_params(depth))

    def sampler_params(self, depth: float = 3.0) -> Dict[str, Any]:
        return {"pieces": [p.describe() for p in self.pieces], "meets_axes": list(self.meets_axes),
                "depth": depth}

    def describe(self) -> Dict[str, Any]:
        return {"type": "reinhardt", "pieces": [p.describe() for p in self.pieces],
                "meets_axes": list(self.meets_axes)}

    @classmethod
    def from_rows(cls, pieces: Sequence[Dict[str, Any]], meets_axes: Sequence[bool],
                  name: str = "reinhardt") -> "ReinhardtDomain":
        return cls(tuple(LogPolyhedron(np.array(p["A"], dtype=float), np.array(p["b"], dtype=float))
                         for p in pieces), tuple(meets_axes), name)


def _reinhardt_samples(count: int, seed: int, strategy: SampleStrategy = SampleStrategy.INTERIOR,
                       pieces: List[Dict[str, Any]] = (), meets_axes: List[bool] = (),
                       depth: float = 3.0) -> SampleSet:
    """exp(x) times uniform phases for x sampled in log D"""
    domain = ReinhardtDomain.from_rows(pieces, meets_axes)
    X = domain.sample_log(count, seed, depth)
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    phases = np.column_stack([uniform_circle(rng, count) for _ in range(domain.n)])
    return SampleSet(np.exp(X) * phases, seed, SampleStrategy(strategy), "reinhardt",
                     {"pieces": list(pieces), "meets_axes": list(meets_axes), "depth": depth})


register_sampler("reinhardt", _reinhardt_samples)


# Catalog -------------------------------------------------------------------

def bidisc() -> ReinhardtDomain:
    """D^2: log D = (-inf, 0)^2, meeting both axes"""
    return ReinhardtDomain((LogPolyhedron.box([-np.inf, -np.inf], [0.0, 0.0]),), (True, True), "bidisc")


def log_square() -> ReinhardtDomain:
    """{e^-1 < |z_j| < 1}: log D = (-1, 0)^2"""
    return ReinhardtDomain((LogPolyhedron.box([-1.0, -1.0], [0.0, 0.0]),), (False, False), "log_square")


def irrational_slice() -> ReinhardtDomain:
    """box(-5, 0)^2 cut by x_1 + sqrt(2) x_2 <= 0; the corner at 0 has an irrational normal"""
    A = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, np.sqrt(2.0)]])
    b = np.array([0.0, 0.0, 5.0, 5.0, 0.0])
    return ReinhardtDomain((LogPolyhedron(A, b),), (False, False), "irrational_slice")


def annulus(r_in: float = 0.5, r_out: float = 1.0) -> ReinhardtDomain:
    """Planar annulus {r_in < |z| < r_out}"""
    if not 0 < r_in < r_out:
        raise InputError(f"annulus radii must satisfy 0 < r_in < r_out, got {r_in}, {r_out}")
    return ReinhardtDomain((LogPolyhedron.box([np.log(r_in)], [np.log(r_out)]),), (False,), "annulus")


def two_box_union() -> ReinhardtDomain:
    """
    (-1, 0)^2 and (-3, -2)^2 joined by a bridge box so the union is connected

    The union is not log-convex; its envelope is the hull of the two squares.
    """
    pieces = (
        LogPolyhedron.box([-1.0, -1.0], [0.0, 0.0]),
        LogPolyhedron.box([-3.0, -3.0], [-2.0, -2.0]),
        LogPolyhedron.box([-2.2, -2.2], [-0.8, -0.8]),
    )
    return ReinhardtDomain(pieces, (False, False), "two_box_union")


def staircase_floor(K: int) -> float:
    return -float(K * K + K) - 2.0


def staircase(K: int, floor: Optional[float] = None) -> ReinhardtDomain:
    """
    Truncated staircase D_K in C^2 with log coordinates (x, y) = (log|z|, log|w|)

    Piece 0 is 0 <= x <= 1, y <= 0; piece n (1 <= n <= K) is
    -n^2 <= x <= -(n-1)^2, y <= -n^2 - n. Every piece is cut at y >= floor.
    """
    if K < 1:
        raise InputError(f"staircase needs K >= 1, got {K}")
    floor = staircase_floor(K) if floor is None else float(floor)
    if floor >= -float(K * K + K):
        raise InputError(f"floor {floor} must lie below the last step top {-(K * K + K)}")
    pieces = [LogPolyhedron.box([0.0, floor], [1.0, 0.0])]
    for n in range(1, K + 1):
        pieces.append(LogPolyhedron.box([-float(n * n), floor], [-float((n - 1) ** 2), -float(n * n + n)]))
    logger.debug("staircase built", K=K, floor=floor)
    return ReinhardtDomain(tuple(pieces), (False, False), f"staircase_{K}")


CATALOG = {
    "bidisc": bidisc,
    "log_square": log_square,
    "irrational_slice": irrational_slice,
    "annulus": annulus,
    "two_box_union": two_box_union,
}
