"""
Log polyhedra: convex polyhedra {x : <l_i, x> <= l0_i} in R^n modelling log D

Rows are stored normalized to unit length, so slacks are Euclidean distances
to the bounding hyperplanes and lp_feas_tol means the same thing everywhere.
All optimization goes through scipy's HiGHS linear programming backend.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import AxisPoint, InputError, NotInClosure, NotInSet, NotOnBoundary, NumericError

logger = structlog.get_logger(__name__)

_RANK_TOL = 1e-9
# generic objective used to pick a vertex of a bounded face
_GENERIC = np.array([1.0, np.sqrt(2.0), np.sqrt(3.0), np.sqrt(5.0), np.sqrt(7.0)])


@dataclass(frozen=True)
class LPResult:
    """Outcome of one linear program; value is +inf when unbounded, -inf when infeasible"""
    value: float
    x: Optional[np.ndarray]

    @property
    def feasible(self) -> bool:
        return self.value != -np.inf

    @property
    def bounded(self) -> bool:
        return np.isfinite(self.value)


def lp_maximize(c: np.ndarray, A: np.ndarray, b: np.ndarray,
                A_eq: Optional[np.ndarray] = None, b_eq: Optional[np.ndarray] = None) -> LPResult:
    """max <c, x> subject to A x <= b (and A_eq x = b_eq), x free"""
    c = np.asarray(c, dtype=float)
    res = linprog(
        -c,
        A_ub=A if A.size else None,
        b_ub=b if A.size else None,
        A_eq=A_eq if A_eq is not None and A_eq.size else None,
        b_eq=b_eq if A_eq is not None and A_eq.size else None,
        bounds=[(None, None)] * c.size,
        method="highs",
    )
    if res.status == 0:
        return LPResult(float(-res.fun), np.asarray(res.x))
    if res.status == 2:
        return LPResult(-np.inf, None)
    if res.status == 3:
        return LPResult(np.inf, None)
    raise NumericError(f"linear program failed: {res.message}")


def log_map(z: Sequence[complex]) -> np.ndarray:
    """
    (log|z_1|, ..., log|z_n|)

    Raises:
        AxisPoint: if some coordinate vanishes
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zero = np.flatnonzero(z == 0)
    if zero.size:
        raise AxisPoint(f"log_map needs nonvanishing coordinates; z_{zero[0] + 1} = 0")
    return np.log(np.abs(z))


def _normalize_rows(A: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        raise InputError(f"row {int(np.flatnonzero(norms == 0)[0])} has a zero normal")
    return A / norms[:, None], b / norms


def _dedupe_rows(A: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    rows = np.unique(np.round(np.column_stack([A, b]), 12), axis=0)
    return rows[:, :-1], rows[:, -1]


@dataclass(frozen=True)
class LogPolyhedron:
    """
    H-representation <l_i, x> <= l0_i of a convex polyhedron with nonempty interior

    Construction certifies an interior point (Chebyshev centre) and that every
    coordinate is bounded above, so the recession cone lies in the nonpositive
    orthant.

    Raises:
        InputError: on shape mismatch, empty interior or a coordinate unbounded above
    """
    A: np.ndarray
    b: np.ndarray
    interior_point: np.ndarray = field(init=False, repr=False, compare=False)
    upper: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float)).ravel()
        if A.shape[0] != b.size:
            raise InputError(f"A has {A.shape[0]} rows but b has {b.size} entries")
        A, b = _normalize_rows(A, b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

        n = A.shape[1]
        cheb = lp_maximize(
            np.r_[np.zeros(n), 1.0],
            np.vstack([np.column_stack([A, np.ones(b.size)]), np.r_[np.zeros(n), 1.0]]),
            np.r_[b, 1.0],
        )
        if not cheb.bounded or cheb.value <= 1e-9:
            raise InputError("log polyhedron has empty interior")
        object.__setattr__(self, "interior_point", cheb.x[:n])

        upper = np.empty(n)
        for j in range(n):
            res = lp_maximize(np.eye(n)[j], A, b)
            if not res.bounded:
                raise InputError(f"coordinate {j + 1} is unbounded above; the domain must be bounded")
            upper[j] = res.value
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return int(self.A.shape[1])

    @property
    def rows(self) -> List[Tuple[np.ndarray, float]]:
        return [(self.A[i], float(self.b[i])) for i in range(self.b.size)]

    def slack(self, x) -> np.ndarray:
        return self.b - self.A @ np.asarray(x, dtype=float)

    def contains(self, x, tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> bool:
        """Closure membership within tol"""
        return bool(np.all(self.slack(x) >= -tol))

    def contains_batch(self, X: np.ndarray, tol: float = 0.0, strict: bool = False) -> np.ndarray:
        s = self.b[None, :] - np.asarray(X, dtype=float) @ self.A.T
        return np.all(s > tol, axis=1) if strict else np.all(s >= -tol, axis=1)

    def active(self, x, tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> np.ndarray:
        return np.flatnonzero(self.slack(x) <= tol)

    def maximize(self, c, A_extra: Optional[np.ndarray] = None, b_extra: Optional[np.ndarray] = None,
                 A_eq: Optional[np.ndarray] = None, b_eq: Optional[np.ndarray] = None) -> LPResult:
        A, b = self.A, self.b
        if A_extra is not None:
            A = np.vstack([A, A_extra])
            b = np.r_[b, b_extra]
        return lp_maximize(np.asarray(c, dtype=float), A, b, A_eq, b_eq)

    def recession_contains(self, d, tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> bool:
        return bool(np.all(self.A @ np.asarray(d, dtype=float) <= tol))

    def is_bounded(self) -> bool:
        return all(self.maximize(-np.eye(self.n)[j]).bounded for j in range(self.n))

    def lower(self) -> np.ndarray:
        """Coordinatewise infimum (-inf along recession directions)"""
        return np.array([-self.maximize(-np.eye(self.n)[j]).value for j in range(self.n)])

    def vertices(self, tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> np.ndarray:
        """All vertices by enumeration of n-row active sets (desk-scale sizes only)"""
        n = self.n
        found: List[np.ndarray] = []
        for idx in combinations(range(self.b.size), n):
            sub = self.A[list(idx)]
            if np.linalg.matrix_rank(sub, _RANK_TOL) < n:
                continue
            x = np.linalg.solve(sub, self.b[list(idx)])
            if self.contains(x, 10 * tol) and not any(np.allclose(x, v, atol=1e-9) for v in found):
                found.append(x)
        return np.array(found).reshape(-1, n)

    def recession_rays(self, tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> np.ndarray:
        """
        Unit extreme rays of the recession cone {d : A d <= 0}

        The cone is pointed (it lies in the nonpositive orthant), so every
        extreme ray is the null direction of n-1 independent rows.
        """
        n = self.n
        if n == 1:
            candidates = [np.array([1.0]), np.array([-1.0])]
        else:
            candidates = []
            for idx in combinations(range(self.b.size), n - 1):
                sub = self.A[list(idx)]
                if np.linalg.matrix_rank(sub, _RANK_TOL) < n - 1:
                    continue
                d = np.linalg.svd(sub)[2][-1]
                candidates.extend([d, -d])
        found: List[np.ndarray] = []
        for d in candidates:
            d = d / np.linalg.norm(d)
            if self.recession_contains(d, tol) and not any(np.allclose(d, r, atol=1e-9) for r in found):
                found.append(d)
        return np.array(found).reshape(-1, n)

    def sample(self, count: int, seed: int, depth: float = 3.0) -> np.ndarray:
        """
        Uniform samples of the polyhedron truncated `depth` below its upper corner

        Rejection from the bounding box of the truncation.
        """
        rng = np.random.default_rng(seed)
        hi = self.upper
        lo = np.maximum(self.lower(), hi - depth)
        out = np.empty((0, self.n))
        for _ in range(1000):
            cand = rng.uniform(lo, hi, (max(64, 4 * count), self.n))
            out = np.vstack([out, cand[self.contains_batch(cand, strict=True)]])
            if out.shape[0] >= count:
                return out[:count]
        raise NumericError("rejection sampling found too few interior points")

    def describe(self) -> Dict[str, list]:
        return {"A": self.A.tolist(), "b": self.b.tolist()}

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "LogPolyhedron":
        """lo <= x <= hi; entries of lo may be -inf"""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        n = hi.size
        A = [np.eye(n)[j] for j in range(n)]
        b = list(hi)
        for j in range(n):
            if np.isfinite(lo[j]):
                A.append(-np.eye(n)[j])
                b.append(-lo[j])
        return cls(np.array(A), np.array(b))

    @classmethod
    def from_vertices(cls, V: np.ndarray) -> "LogPolyhedron":
        """H-representation of the convex hull of finitely many points"""
        V = np.atleast_2d(np.asarray(V, dtype=float))
        if V.shape[1] == 1:
            return cls(np.array([[1.0], [-1.0]]), np.array([V.max(), -V.min()]))
        hull = ConvexHull(V)
        A, b = _dedupe_rows(hull.equations[:, :-1], -hull.equations[:, -1])
        return cls(A, b)

    @classmethod
    def from_generators(cls, V: np.ndarray, R: np.ndarray) -> "LogPolyhedron":
        """
        H-representation of conv(V) + cone(R)

        Hulls V together with every v + T r for a large T, then drops the
        facets that cap the far points (those with <a, r> > 0 for some ray).
        """
        V = np.atleast_2d(np.asarray(V, dtype=float))
        n = V.shape[1]
        R = np.asarray(R, dtype=float).reshape(-1, n)
        if R.shape[0] == 0:
            return cls.from_vertices(V)
        if n == 1:
            return cls(np.array([[1.0]]), np.array([V.max()]))
        T = 10.0 * (1.0 + float(np.ptp(V, axis=0).max()))
        far = (V[:, None, :] + T * R[None, :, :]).reshape(-1, n)
        hull = ConvexHull(np.vstack([V, far]))
        normals, offsets = hull.equations[:, :-1], -hull.equations[:, -1]
        keep = np.all(normals @ R.T <= _RANK_TOL, axis=1)
        A, b = _dedupe_rows(normals[keep], offsets[keep])
        return cls(A, b)


def fourier_motzkin(P: LogPolyhedron, j: int) -> LogPolyhedron:
    """Projection of P onto the coordinates other than j (0-based) by Fourier-Motzkin elimination"""
    a = P.A[:, j]
    keep = [i for i in range(P.n) if i != j]
    pos, neg, zero = np.flatnonzero(a > 1e-12), np.flatnonzero(a < -1e-12), np.flatnonzero(np.abs(a) <= 1e-12)
    rows, rhs = [P.A[zero][:, keep]], [P.b[zero]]
    for p in pos:
        for q in neg:
            # a_p x_j <= ... and a_q x_j <= ... combined to cancel x_j
            row = (-a[q]) * P.A[p] + a[p] * P.A[q]
            rows.append(row[keep][None, :])
            rhs.append(np.array([(-a[q]) * P.b[p] + a[p] * P.b[q]]))
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    nonzero = np.linalg.norm(A, axis=1) > 1e-12
    A, b = _normalize_rows(A[nonzero], b[nonzero])
    A, b = _dedupe_rows(A, b)
    return LogPolyhedron(A, b)


def is_extreme(P: LogPolyhedron, x0, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> bool:
    """
    True iff x0 is an extreme point of the closure of P

    Rank test: the normals of the rows active at x0 span R^n.

    Raises:
        NotInClosure: if x0 is farther than lp_feas_tol outside P
    """
    x0 = np.asarray(x0, dtype=float)
    if not P.contains(x0, tol.lp_feas_tol):
        raise NotInClosure(f"point {x0.tolist()} is outside the closure (worst slack {P.slack(x0).min():.3e})")
    active = P.active(x0, tol.lp_feas_tol)
    return bool(active.size and np.linalg.matrix_rank(P.A[active], _RANK_TOL) == P.n)


@dataclass(frozen=True)
class SupportingFunctional:
    """
    <l, x> <= l0 on P with equality at the contact point

    `permutation` lists the original coordinate placed at each position;
    after applying it the last entry of l has modulus 1. That entry is -1
    when the outward normal points towards smaller log-modulus (the inner
    circle of an annulus); rescaling it to +1 would reverse the inequality.
    """
    l: np.ndarray
    l0: float
    permutation: Tuple[int, ...]

    @property
    def pivot(self) -> int:
        return self.permutation[-1]

    @property
    def pivot_sign(self) -> int:
        return 1 if self.l[self.pivot] > 0 else -1


def support_at(P: LogPolyhedron, x0, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> SupportingFunctional:
    """
    Supporting functional at a boundary point: the average of the active unit normals

    The pivot is the last coordinate when its entry is nonzero, otherwise the
    entry of largest modulus; l is scaled by 1/|l_pivot| so the inequality
    direction is kept.

    Raises:
        NotOnBoundary: if no row is active at x0
    """
    x0 = np.asarray(x0, dtype=float)
    if not P.contains(x0, tol.lp_feas_tol):
        raise NotInClosure(f"point {x0.tolist()} is outside the closure")
    active = P.active(x0, tol.lp_feas_tol)
    if active.size == 0:
        raise NotOnBoundary(f"point {x0.tolist()} is interior; no supporting hyperplane touches it")
    l = P.A[active].mean(axis=0)
    n = P.n
    pivot = n - 1 if abs(l[n - 1]) > tol.lp_feas_tol else int(np.argmax(np.abs(l)))
    l = l / abs(l[pivot])
    perm = list(range(n))
    perm[pivot], perm[n - 1] = perm[n - 1], perm[pivot]
    return SupportingFunctional(l, float(l @ x0), tuple(perm))


@dataclass(frozen=True)
class Decomposition:
    """x0 = sum_j weights_j vertices_j + direction * t0"""
    vertices: np.ndarray
    weights: np.ndarray
    direction: np.ndarray
    t0: float

    def reconstruct(self) -> np.ndarray:
        return self.weights @ self.vertices + self.direction * self.t0


def _ratio_step(P: LogPolyhedron, x: np.ndarray, d: np.ndarray, tol: float) -> float:
    """Largest s with x + s d in P (d must leave P eventually)"""
    Ad = P.A @ d
    leaving = Ad > tol
    if not leaving.any():
        raise NumericError("ratio test found no blocking row")
    return float(np.min(np.maximum(P.slack(x)[leaving], 0.0) / Ad[leaving]))


def _decompose(P: LogPolyhedron, x: np.ndarray, tol: float,
               depth: int) -> Tuple[List[Tuple[np.ndarray, float]], np.ndarray]:
    n = P.n
    active = P.active(x, tol)
    if active.size and np.linalg.matrix_rank(P.A[active], _RANK_TOL) == n:
        return [(x, 1.0)], np.zeros(n)
    if depth > n:
        raise NumericError("decomposition did not reach a vertex")

    A_eq = P.A[active] if active.size else None
    b_eq = np.zeros(active.size) if active.size else None
    inactive = np.setdiff1d(np.arange(P.b.size), active)

    # recession direction of the minimal face: maximize how strongly it leaves the inactive rows
    ray = lp_maximize(
        -P.A[inactive].sum(axis=0),
        np.vstack([P.A, -P.A[inactive]]),
        np.r_[np.zeros(P.b.size), np.ones(inactive.size)],
        A_eq, b_eq,
    )
    if ray.bounded and ray.value > tol:
        d = ray.x
        s = _ratio_step(P, x, -d, tol)
        y = x - s * d
        parts, rec = _decompose(P, y, tol, depth + 1)
        return parts, rec + s * d

    # bounded face: pick a vertex v, then walk from v through x to the far side
    c = _GENERIC[:n] if n <= _GENERIC.size else np.arange(1, n + 1) ** 0.5
    res = lp_maximize(-c, P.A, P.b, A_eq, P.b[active] if active.size else None)
    if not res.bounded:
        raise NumericError("face expected bounded but LP is unbounded")
    v = res.x
    tight = P.active(v, 1e-7)
    v = np.linalg.lstsq(P.A[tight], P.b[tight], rcond=None)[0]
    step = x - v
    s = _ratio_step(P, x, step, tol)
    y = x + s * step
    lam = 1.0 + s
    parts, rec = _decompose(P, y, tol, depth + 1)
    merged = [(v, 1.0 - 1.0 / lam)] + [(u, w / lam) for u, w in parts]
    return merged, rec / lam


def decompose(P: LogPolyhedron, x0, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> Decomposition:
    """
    Write x0 as a convex combination of vertices plus a recession ray

    Recursively marches along a recession direction of the minimal face to its
    boundary, or for a bounded face from a vertex through x0 to the opposite
    face, until a vertex is reached.

    Raises:
        NotInSet: if x0 is not in P
    """
    x0 = np.asarray(x0, dtype=float)
    if not P.contains(x0, tol.lp_feas_tol):
        raise NotInSet(f"point {x0.tolist()} is not in the polyhedron")
    parts, rec = _decompose(P, x0, tol.lp_feas_tol, 0)

    vertices: List[np.ndarray] = []
    weights: List[float] = []
    for v, w in parts:
        if w <= 1e-15:
            continue
        for i, u in enumerate(vertices):
            if np.allclose(u, v, atol=1e-10):
                weights[i] += w
                break
        else:
            vertices.append(np.asarray(v))
            weights.append(w)
    t0 = float(np.linalg.norm(rec))
    direction = rec / t0 if t0 > 0 else np.zeros(P.n)
    result = Decomposition(np.array(vertices), np.array(weights), direction, t0)
    logger.debug("decomposition", vertices=len(vertices), t0=t0)
    return result
