"""
Bounded convex bodies in C^n and their weak peak functions

A body is {x in R^2n : A x <= b}, optionally intersected with a closed ball,
where z_j = x_(2j-1) + i x_(2j). At a boundary point a an averaged outward
normal nu gives Re <z - a, nu> < 0 on the body, so w = <z - a, nu> maps it
into the left half-plane and exp(1 / Log(w / d)) is a weak peak function at
a once d bounds |w|.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import structlog
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from peakkit.numerics.expressions import AffinePairing, ExpInvLog, HoloFunction
from peakkit.numerics.sampling import SampleSet, SampleStrategy, register_sampler
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import InputError, NotInClosure, NotOnBoundary
from peakkit.shared.settings import get_settings

logger = structlog.get_logger(__name__)

_GRID_POINTS = 4096


def to_real(Z) -> np.ndarray:
    """(N, n) complex -> (N, 2n) real, interleaving real and imaginary parts"""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    X = np.empty((Z.shape[0], 2 * Z.shape[1]))
    X[:, 0::2] = Z.real
    X[:, 1::2] = Z.imag
    return X


def to_complex(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return X[:, 0::2] + 1j * X[:, 1::2]


def _box_bounds(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-coordinate [min, max] of {A x <= b}; +-inf where unbounded"""
    dim = A.shape[1]
    out = np.empty((dim, 2))
    for i in range(dim):
        for side, sign in enumerate((1.0, -1.0)):
            c = np.zeros(dim)
            c[i] = sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * dim, method="highs")
            if res.status == 3:
                out[i, side] = -np.inf if sign > 0 else np.inf
            elif res.status == 0:
                out[i, side] = sign * res.fun
            else:
                raise InputError(f"convex body rows are infeasible ({res.message})")
    return out


@dataclass(frozen=True)
class ConvexBody:
    """
    Bounded convex domain in C^n

    Attributes:
        A, b: half-space rows in the interleaved R^2n coordinates
        complex_dim: n
        ball_center, ball_radius: optional closed ball the rows are intersected with
        name: label used in logs and reports
    """
    A: np.ndarray
    b: np.ndarray
    complex_dim: int
    ball_center: Optional[np.ndarray] = None
    ball_radius: Optional[float] = None
    name: str = "convex"
    interior_point: np.ndarray = field(init=False, repr=False, compare=False)
    box: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dim = 2 * self.complex_dim
        A = np.asarray(self.A, dtype=float).reshape(-1, dim)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.size:
            raise InputError(f"{A.shape[0]} rows but {b.size} offsets")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise InputError("zero row in convex body")
        A, b = A / norms[:, None], b / norms
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

        box = _box_bounds(A, b) if A.shape[0] else np.tile([-np.inf, np.inf], (dim, 1))
        if self.has_ball:
            if self.ball_radius <= 0:
                raise InputError(f"ball radius must be positive, got {self.ball_radius}")
            c = np.asarray(self.ball_center, dtype=complex).reshape(self.complex_dim)
            object.__setattr__(self, "ball_center", c)
            cr = to_real(c)[0]
            box[:, 0] = np.maximum(box[:, 0], cr - self.ball_radius)
            box[:, 1] = np.minimum(box[:, 1], cr + self.ball_radius)
        if not np.all(np.isfinite(box)):
            raise InputError(f"convex body {self.name} is unbounded")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "interior_point", self._find_interior())

    @property
    def has_ball(self) -> bool:
        return self.ball_radius is not None

    @property
    def dim(self) -> int:
        return 2 * self.complex_dim

    def _find_interior(self) -> np.ndarray:
        if not self.has_ball:
            dim = self.dim
            c = np.zeros(dim + 1)
            c[-1] = -1.0
            A_ub = np.hstack([self.A, np.ones((self.A.shape[0], 1))])
            res = linprog(c, A_ub=A_ub, b_ub=self.b, bounds=[(None, None)] * dim + [(0, None)], method="highs")
            if res.status != 0 or res.x[-1] <= 1e-9:
                raise InputError(f"convex body {self.name} has empty interior")
            return res.x[:dim]
        rng = np.random.default_rng(0)
        X = rng.uniform(self.box[:, 0], self.box[:, 1], (_GRID_POINTS, self.dim))
        X = np.vstack([to_real(self.ball_center)[0], X])
        slack = self.slack_real(X)
        best = int(np.argmax(slack))
        if slack[best] <= 1e-9:
            raise InputError(f"convex body {self.name} has empty interior")
        return X[best]

    def slack_real(self, X: np.ndarray) -> np.ndarray:
        """Smallest constraint slack per row of X; positive inside, zero on the boundary"""
        X = np.atleast_2d(X)
        parts = []
        if self.A.shape[0]:
            parts.append(np.min(self.b[None, :] - X @ self.A.T, axis=1))
        if self.has_ball:
            parts.append(self.ball_radius - np.linalg.norm(X - to_real(self.ball_center), axis=1))
        return np.min(np.vstack(parts), axis=0)

    def slack(self, Z) -> np.ndarray:
        return self.slack_real(to_real(Z))

    def contains(self, z, tol: float = 0.0) -> bool:
        return bool(self.slack(z)[0] >= -tol)

    def exit_time(self, p: np.ndarray, d: np.ndarray) -> np.ndarray:
        """
        For rays p + t d (rows of d) from an interior point p, the t where each leaves the body
        """
        d = np.atleast_2d(d)
        t = np.full(d.shape[0], np.inf)
        if self.A.shape[0]:
            rate = d @ self.A.T
            room = self.b - self.A @ p
            with np.errstate(divide="ignore", invalid="ignore"):
                hit = np.where(rate > 0, room[None, :] / rate, np.inf)
            t = np.minimum(t, hit.min(axis=1))
        if self.has_ball:
            q = p - to_real(self.ball_center)[0]
            dd = np.sum(d * d, axis=1)
            qd = d @ q
            disc = qd ** 2 - dd * (q @ q - self.ball_radius ** 2)
            t = np.minimum(t, (-qd + np.sqrt(np.maximum(disc, 0.0))) / dd)
        return t

    def boundary_grid(self, count: int, seed: int = 0) -> np.ndarray:
        """Exact boundary points along random directions from the interior point, real coordinates"""
        rng = np.random.default_rng(seed)
        d = rng.normal(size=(count, self.dim))
        d /= np.linalg.norm(d, axis=1)[:, None]
        p = self.interior_point
        return p[None, :] + self.exit_time(p, d)[:, None] * d

    def vertices(self) -> np.ndarray:
        """Vertices of a polytope body, real coordinates"""
        if self.has_ball:
            raise InputError("vertices exist only for polytope bodies")
        hs = HalfspaceIntersection(np.hstack([self.A, -self.b[:, None]]), self.interior_point)
        return np.unique(np.round(hs.intersections, 12), axis=0)

    def scaled(self, r: float) -> "ConvexBody":
        """The body r * B"""
        center = None if self.ball_center is None else r * self.ball_center
        radius = None if self.ball_radius is None else r * self.ball_radius
        return ConvexBody(self.A, r * self.b, self.complex_dim, center, radius, f"{r}*{self.name}")

    def sample(self, count: int, seed: int, strategy: SampleStrategy = SampleStrategy.INTERIOR) -> SampleSet:
        return _convex_samples(count=count, seed=seed, strategy=strategy, **self.sampler_params())

    def sampler_params(self) -> Dict[str, Any]:
        return {
            "rows": self.A.tolist(),
            "c": self.b.tolist(),
            "complex_dim": self.complex_dim,
            "center": None if self.ball_center is None else to_real(self.ball_center)[0].tolist(),
            "radius": self.ball_radius,
        }

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "type": "convex",
            "rows": [{"nu": row.tolist(), "c": float(c)} for row, c in zip(self.A, self.b)],
            "complex_dim": self.complex_dim,
        }
        if self.has_ball:
            out["ball"] = {"center": to_real(self.ball_center)[0].tolist(), "radius": self.ball_radius}
        return out

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], c: Sequence[float], complex_dim: int,
                  center: Optional[Sequence[float]] = None, radius: Optional[float] = None,
                  name: str = "convex") -> "ConvexBody":
        """Body from real rows; a ball center is given in interleaved real coordinates"""
        ball = None if center is None else to_complex(np.asarray(center, dtype=float))[0]
        A = np.asarray(rows, dtype=float).reshape(-1, 2 * complex_dim)
        return cls(A, np.asarray(c, dtype=float), complex_dim, ball, radius, name)


def _convex_samples(rows, c, complex_dim: int, center, radius, count: int, seed: int,
                    strategy: SampleStrategy = SampleStrategy.INTERIOR, shell: float = 1e-2) -> SampleSet:
    body = ConvexBody.from_rows(rows, c, complex_dim, center, radius)
    rng = np.random.default_rng(seed)
    strategy = SampleStrategy(strategy)
    if strategy == SampleStrategy.INTERIOR:
        out = np.empty((0, body.dim))
        while out.shape[0] < count:
            cand = rng.uniform(body.box[:, 0], body.box[:, 1], (max(16, 2 * (count - out.shape[0])), body.dim))
            out = np.vstack([out, cand[body.slack_real(cand) > 0]])
        X = out[:count]
    else:
        d = rng.normal(size=(count, body.dim))
        d /= np.linalg.norm(d, axis=1)[:, None]
        p = body.interior_point
        t = body.exit_time(p, d)
        if strategy == SampleStrategy.ANNULAR_SHELL:
            t = t * (1.0 - shell * rng.uniform(0.0, 1.0, count)) * (1.0 - 1e-12)
        X = p[None, :] + t[:, None] * d
    params = {**body.sampler_params(), "shell": shell}
    return SampleSet(to_complex(X), seed, strategy, "convex", params)


register_sampler("convex", _convex_samples)


def support_complex(B: ConvexBody, a, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Unit nu in C^n with Re <z - a, nu> <= 0 on B, from the averaged active outward normals

    Raises:
        NotOnBoundary: if a is an interior point
        NotInClosure: if a is outside the closure of B
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    x = to_real(a)[0]
    band = tol.boundary_band
    normals: List[np.ndarray] = []
    if B.A.shape[0]:
        room = B.b - B.A @ x
        if np.any(room < -band):
            raise NotInClosure(f"{a.tolist()} violates a row of {B.name}")
        normals.extend(B.A[room <= band])
    if B.has_ball:
        q = x - to_real(B.ball_center)[0]
        gap = B.ball_radius - np.linalg.norm(q)
        if gap < -band:
            raise NotInClosure(f"{a.tolist()} is outside the ball of {B.name}")
        if gap <= band:
            normals.append(q / np.linalg.norm(q))
    if not normals:
        raise NotOnBoundary(f"{a.tolist()} is an interior point of {B.name}")
    nu = np.mean(normals, axis=0)
    nu /= np.linalg.norm(nu)
    return to_complex(nu)[0]


def _planar_diameter(w: np.ndarray) -> float:
    """Largest pairwise distance of planar points, taken over their hull vertices"""
    P = np.column_stack([w.real, w.imag])
    if P.shape[0] > 3:
        try:
            P = P[ConvexHull(P).vertices]
        except QhullError:
            pass  # collinear image: keep every point
    diff = P[:, None, :] - P[None, :, :]
    return float(np.sqrt(np.max(np.sum(diff ** 2, axis=-1))))


def image_diameter(B: ConvexBody, nu: np.ndarray, a) -> float:
    """
    Diameter d of {<z - a, nu> : z in B}

    Polytopes use their vertices and a lone ball its closed form, both exact.
    A ball cut by rows uses a boundary grid inflated by the configured factor,
    capped by the diameter of the ball's own image.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    scale = float(np.linalg.norm(nu))
    if not B.has_ball:
        W = (to_complex(B.vertices()) - a[None, :]) @ np.conj(nu)
        return _planar_diameter(W)
    ball_bound = 2.0 * B.ball_radius * scale
    if not B.A.shape[0]:
        return ball_bound
    W = (to_complex(B.boundary_grid(_GRID_POINTS)) - a[None, :]) @ np.conj(nu)
    return min(ball_bound, get_settings().diameter_inflation * _planar_diameter(W))


@dataclass(frozen=True)
class WeakPeak:
    function: HoloFunction
    point: np.ndarray
    nu: np.ndarray
    d: float


def construct_weak_peak(B: ConvexBody, a, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> WeakPeak:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    nu = support_complex(B, a, tol)
    d = image_diameter(B, nu, a)
    logger.info("weak peak constructed", body=B.name, n=B.complex_dim, d=d)
    return WeakPeak(ExpInvLog(AffinePairing(tuple(nu), tuple(a)), d), a, nu, d)


def weak_peak(B: ConvexBody, a, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> HoloFunction:
    """
    exp(1 / Log(<z - a, nu> / d)): |phi| < 1 on B and phi -> 1 at a

    Raises:
        NotOnBoundary: if a is an interior point
    """
    return construct_weak_peak(B, a, tol).function


# Catalog --------------------------------------------------------------------

def unit_ball(n: int = 2, radius: float = 1.0) -> ConvexBody:
    return ConvexBody(np.empty((0, 2 * n)), np.empty(0), n, np.zeros(n, dtype=complex), radius, f"ball{n}")


def disc(radius: float = 1.0) -> ConvexBody:
    return unit_ball(1, radius)


def half_disc() -> ConvexBody:
    """{|z| < 1, Re z > 0}"""
    return ConvexBody(np.array([[-1.0, 0.0]]), np.zeros(1), 1, np.zeros(1, dtype=complex), 1.0, "half_disc")


def polydisc_box(n: int = 2) -> ConvexBody:
    """|Re z_j| <= 1 and |Im z_j| <= 1 for every j"""
    eye = np.eye(2 * n)
    return ConvexBody(np.vstack([eye, -eye]), np.ones(4 * n), n, name=f"box{n}")


def simplex(n: int = 1) -> ConvexBody:
    """x_i >= 0 and sum x_i <= 1 in R^2n"""
    dim = 2 * n
    A = np.vstack([-np.eye(dim), np.ones((1, dim))])
    return ConvexBody(A, np.r_[np.zeros(dim), 1.0], n, name=f"simplex{n}")


CATALOG = {
    "ball2": lambda: unit_ball(2),
    "disc": disc,
    "half_disc": half_disc,
    "box2": lambda: polydisc_box(2),
    "simplex1": lambda: simplex(1),
}
