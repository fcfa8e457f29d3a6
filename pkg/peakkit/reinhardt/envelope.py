"""
Envelope of holomorphy of polyhedral Reinhardt domains and the staircase probe

For a Reinhardt domain not meeting the axes, log of the envelope is the
convex hull of log D. The staircase probe shows a Laurent monomial bounded
on a truncated staircase while its sup over the hull shell near the origin
is far larger.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel

from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.reinhardt.domain import ReinhardtDomain
from peakkit.reinhardt.polyhedron import LogPolyhedron
from peakkit.shared.errors import InputError, NotPseudoconvex, ScopeViolation

logger = structlog.get_logger(__name__)

_MAX_DIM = 3
_SHELL_GAP = 1e-9


def _generators(D: ReinhardtDomain) -> Tuple[np.ndarray, np.ndarray]:
    """Vertices and unit recession rays of every piece, rays deduplicated"""
    V = np.vstack([p.vertices() for p in D.pieces])
    rays: List[np.ndarray] = []
    for p in D.pieces:
        for r in p.recession_rays():
            if not any(np.allclose(r, s, atol=1e-9) for s in rays):
                rays.append(r)
    return V, np.array(rays).reshape(-1, D.n)


def envelope(D: ReinhardtDomain) -> ReinhardtDomain:
    """
    Single-piece domain whose log is the closed convex hull of log D

    Pieces unbounded below contribute their recession rays to the hull.

    Raises:
        ScopeViolation: if D meets an axis, n > 3, or the hull recedes along
            some -e_j (the envelope would then reach the axis z_j = 0)
    """
    if any(D.meets_axes):
        raise ScopeViolation(f"envelope needs a domain off the coordinate axes; {D.name} meets them")
    if D.n > _MAX_DIM:
        raise ScopeViolation(f"envelope is limited to n <= {_MAX_DIM}, got {D.n}")
    V, R = _generators(D)
    hull = LogPolyhedron.from_generators(V, R)
    for j in range(D.n):
        if hull.recession_contains(-np.eye(D.n)[j]):
            raise ScopeViolation(f"the log hull of {D.name} recedes along -e_{j + 1}; "
                                 f"its envelope reaches z_{j + 1} = 0")
    logger.debug("envelope computed", domain=D.name, vertices=V.shape[0], rays=R.shape[0],
                 rows=hull.b.size)
    return ReinhardtDomain((hull,), (False,) * D.n, f"envelope({D.name})")


def is_log_convex(D: ReinhardtDomain, pairs: int = 4000, seed: int = 0,
                  tol: float = DEFAULT_TOLERANCES.lp_feas_tol) -> bool:
    """Sampled test that every chord between points of log D stays in its closure"""
    if len(D.pieces) == 1:
        return True
    rng = np.random.default_rng(seed)
    X = D.sample_log(2 * pairs, seed)
    perm = rng.permutation(X.shape[0])
    Y = X[perm]
    t = rng.uniform(0.0, 1.0, (X.shape[0], 1))
    return bool(np.all(D.contains_log_batch(t * X + (1 - t) * Y, tol)))


def convex_model(D: ReinhardtDomain) -> LogPolyhedron:
    """
    Closed convex model of log D for log-convex D

    Raises:
        NotPseudoconvex: if the union of pieces is not log-convex
    """
    if len(D.pieces) == 1:
        return D.pieces[0]
    if not is_log_convex(D):
        raise NotPseudoconvex(f"the log pieces of {D.name} do not form a convex union")
    return LogPolyhedron.from_generators(*_generators(D))


def hull_model(D: ReinhardtDomain) -> LogPolyhedron:
    """Closed convex hull of log D with no convexity requirement"""
    if len(D.pieces) == 1:
        return D.pieces[0]
    return envelope(D).pieces[0]


def peak_tori(D: ReinhardtDomain) -> List[np.ndarray]:
    """
    Extreme points of the closed convex hull of log D

    Each x gives the torus exp(x) T^n of peak points off the axes.
    """
    return list(hull_model(D).vertices())


class BremermannReport(BaseModel):
    """Envelope extreme points checked against the closure of log D"""
    domain: str
    vertices: List[List[float]]
    in_closure: List[bool]
    holds: bool


def bremermann_check(D: ReinhardtDomain, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> BremermannReport:
    """Every extreme point of conv(log D) must lie in the closure of log D"""
    V = hull_model(D).vertices()
    inside = [D.contains_log(v, 1e3 * tol.lp_feas_tol) for v in V]
    report = BremermannReport(domain=D.name, vertices=V.tolist(), in_closure=inside, holds=all(inside))
    logger.info("bremermann check", domain=D.name, vertices=len(inside), holds=report.holds)
    return report


# Staircase probe -----------------------------------------------------------

class StepBound(BaseModel):
    step: int
    bound: float
    sampled_sup: float
    certified_sup: float


class ExtensionReport(BaseModel):
    """Sup of a Laurent monomial over D_K, over its envelope shell and along rays"""
    K: int
    exponent: List[int]
    shell_log_radius: float
    steps: List[StepBound]
    sampled_sup_domain: float
    domain_shell_sampled_sup: float
    domain_shell_certified_sup: float
    envelope_shell_sampled_sup: float
    envelope_shell_certified_sup: float
    ray_limits: Dict[str, float]
    samples: int
    seed: int


def _log_modulus(exponent: np.ndarray, log_coeff: float, X: np.ndarray) -> np.ndarray:
    return X @ exponent + log_coeff


def _shell_piece(P: LogPolyhedron, x_max: float) -> Optional[LogPolyhedron]:
    """P cut by x_1 <= x_max, or None when the cut has empty interior"""
    row = np.zeros(P.n)
    row[0] = 1.0
    try:
        return LogPolyhedron(np.vstack([P.A, row]), np.r_[P.b, x_max])
    except InputError:
        return None


def _augmented_samples(P: LogPolyhedron, count: int, seed: int) -> np.ndarray:
    """Uniform samples plus every vertex pulled 1e-6 towards the interior point"""
    V = P.vertices()
    near = V + 1e-6 * (P.interior_point[None, :] - V)
    depth = float(np.max(P.upper - P.lower()))
    return np.vstack([P.sample(count, seed, depth), near])


def extension_probe(D: ReinhardtDomain, K: int, exponent=(-1, 1), log_coeff: float = 0.0,
                    samples: int = 2000, seed: int = 0, rays=(0.5, 0.9)) -> ExtensionReport:
    """
    Compare a Laurent monomial (w/z by default) on D_K and on its envelope

    Pieces of D are read as the staircase steps 0..K. The shell is
    log|z| <= -(K-1)^2; for D_K it is cut 1e-9 further out so the closed
    step K-1 box is excluded.
    """
    if len(D.pieces) != K + 1 or D.n != 2:
        raise InputError(f"extension_probe expects the {K}-step staircase in C^2")
    exponent = np.asarray(exponent, dtype=float)
    shell = -float((K - 1) ** 2)
    per_piece = max(1, samples // (K + 1))

    steps: List[StepBound] = []
    domain_sup = -np.inf
    domain_shell_sampled = -np.inf
    domain_shell_certified = -np.inf
    for n, piece in enumerate(D.pieces):
        X = piece.sample(per_piece, seed + n, depth=float(np.max(piece.upper - piece.lower())))
        vals = _log_modulus(exponent, log_coeff, X)
        domain_sup = max(domain_sup, float(vals.max()))
        cert = piece.maximize(exponent).value + log_coeff
        steps.append(StepBound(step=n, bound=float(np.exp(-n)), sampled_sup=float(np.exp(vals.max())),
                               certified_sup=float(np.exp(cert))))
        in_shell = X[:, 0] <= shell - _SHELL_GAP
        if in_shell.any():
            domain_shell_sampled = max(domain_shell_sampled, float(vals[in_shell].max()))
        cut = np.zeros(2)
        cut[0] = 1.0
        res = piece.maximize(exponent, cut[None, :], np.array([shell - _SHELL_GAP]))
        if res.feasible:
            domain_shell_certified = max(domain_shell_certified, res.value + log_coeff)

    hull = envelope(D).pieces[0]
    hull_shell = _shell_piece(hull, shell)
    if hull_shell is None:
        env_sampled = env_certified = -np.inf
    else:
        H = _augmented_samples(hull_shell, samples, seed + K + 1)
        env_sampled = float(_log_modulus(exponent, log_coeff, H).max())
        env_certified = hull_shell.maximize(exponent).value + log_coeff

    # on w = c z the default monomial is the constant c; evaluate deep in |w| < |z| < 1
    ray_limits = {}
    depth = np.array([1e-2, 1e-4, 1e-6])
    for c in rays:
        X = np.column_stack([np.log(depth), np.log(c * depth)])
        ray_limits[str(c)] = float(np.exp(_log_modulus(exponent, log_coeff, X)[-1]))

    report = ExtensionReport(
        K=K,
        exponent=[int(e) for e in exponent],
        shell_log_radius=shell,
        steps=steps,
        sampled_sup_domain=float(np.exp(domain_sup)),
        domain_shell_sampled_sup=float(np.exp(domain_shell_sampled)),
        domain_shell_certified_sup=float(np.exp(domain_shell_certified)),
        envelope_shell_sampled_sup=float(np.exp(env_sampled)),
        envelope_shell_certified_sup=float(np.exp(env_certified)),
        ray_limits=ray_limits,
        samples=samples,
        seed=seed,
    )
    logger.info("extension probe", K=K, envelope_shell=report.envelope_shell_certified_sup,
                domain_shell=report.domain_shell_certified_sup)
    return report
