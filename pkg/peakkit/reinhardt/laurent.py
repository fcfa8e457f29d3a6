"""
Laurent-monomial peak sequences at extreme boundary points of Reinhardt domains

For z0 with x0 = log z0 an extreme point of the closed convex hull G of
log D, we build integer exponents beta with

    log|F(e^x)| = <beta, x - x0>

so |F(z0)| = 1, F <= e^eps on D and F <= e^-N off the Reinhardt
neighborhood {z : |log|z_j| - x0_j| < rho}. beta = t + alpha where

- t comes from the same construction one dimension down, on the face of G
  at x0 (projected along the pivot coordinate and inflated to a simplex),
- (alpha, k) is a Dirichlet approximation of the supporting functional l,
  scaled so k >= M, the slope that makes M <l, x - x0> + <t, x - x0> small.

M is doubled until linear programs over G certify the bounds.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel

from peakkit.numerics.expressions import Monomial
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.reinhardt.dirichlet import dirichlet
from peakkit.reinhardt.domain import ReinhardtDomain
from peakkit.reinhardt.envelope import hull_model
from peakkit.reinhardt.polyhedron import LogPolyhedron, is_extreme, log_map, support_at
from peakkit.shared.errors import NotExtreme, RecursionBudgetExceeded, ScopeViolation
from peakkit.shared.settings import get_settings

logger = structlog.get_logger(__name__)

_MAX_DIM = 3
_M_CAP = 2.0 ** 40
_DIRICHLET_CAP = 1 << 24
_INFLATION = 0.01
_CEILING_SLACK = 1e-12


@dataclass(frozen=True)
class LaurentMonomial:
    """exp(log_modulus + i phase) * z^exponent"""
    exponent: Tuple[int, ...]
    log_modulus: float
    phase: float

    @property
    def coeff(self) -> complex:
        return complex(np.exp(self.log_modulus + 1j * self.phase))

    def log_abs(self, X: np.ndarray) -> np.ndarray:
        """log|F(e^x)| for log points X of shape (N, n)"""
        return np.atleast_2d(X) @ np.asarray(self.exponent, dtype=float) + self.log_modulus

    def as_function(self) -> Monomial:
        return Monomial(complex(np.exp(1j * self.phase)), self.exponent, self.log_modulus)

    def describe(self) -> Dict[str, object]:
        return {"exponent": list(self.exponent), "log_modulus": self.log_modulus, "phase": self.phase}


class ConstructionTrace(BaseModel):
    """
    Audit record of one level of the construction

    log|F(e^x)| = k (<l, x> - l0) + <t, x> - t0 + <alpha - k l, x> - dirichlet_offset
    """
    level: int
    l: List[float]
    l0: float
    permutation: List[int]
    pivot_sign: int = 1
    face_projection: Optional[Dict[str, list]] = None
    inflation_vectors: List[List[float]] = []
    t: List[int]
    t0: float
    M_used: float
    alpha: List[int]
    k: int
    base_alpha: List[int]
    base_k: int
    q: int
    dirichlet_offset: float
    theta: float = 0.0
    eps: float
    N: float
    rho: float
    effective_mu: int
    inner: Optional["ConstructionTrace"] = None

    @property
    def exponent(self) -> np.ndarray:
        return np.asarray(self.t) + np.asarray(self.alpha)

    def log_modulus(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        l = np.asarray(self.l)
        drift = np.asarray(self.alpha) - self.k * l
        return (self.k * (X @ l - self.l0) + X @ np.asarray(self.t, dtype=float) - self.t0
                + X @ drift - self.dirichlet_offset)


ConstructionTrace.model_rebuild()


class LaurentReport(BaseModel):
    """Certified (LP) and sampled bounds for one monomial of the sequence"""
    mu: int
    eps: float
    N: float
    u_radius: float
    value: float
    sampled_sup: float
    sampled_sup_off_u: float
    sampled_log_sup_off_u: float
    certified_sup: float
    certified_sup_off_u: float
    samples: int
    seed: int


@dataclass(frozen=True)
class LaurentPeak:
    monomial: LaurentMonomial
    trace: ConstructionTrace
    report: LaurentReport


def _shifted_sup(G: LogPolyhedron, c: np.ndarray, x0: np.ndarray) -> float:
    """sup over G of <c, x - x0>"""
    return G.maximize(c).value - float(c @ x0)


def _shifted_sup_off_box(G: LogPolyhedron, c: np.ndarray, x0: np.ndarray, rho: float) -> float:
    """sup of <c, x - x0> over points of G at l-infinity distance >= rho from x0"""
    best = -np.inf
    for j in range(G.n):
        e = np.eye(G.n)[j]
        for row, rhs in ((-e, -(x0[j] + rho)), (e, x0[j] - rho)):
            res = G.maximize(c, row[None, :], np.array([rhs]))
            best = max(best, res.value - float(c @ x0) if res.feasible else -np.inf)
    return best


def _scale(G: LogPolyhedron, depth: float) -> float:
    hi = G.upper
    lo = np.maximum(G.lower(), hi - depth)
    return float(np.linalg.norm(hi - lo))


def _inflated_face(x0p: np.ndarray, r: float) -> Tuple[LogPolyhedron, np.ndarray]:
    """Simplex with vertex x0p and n-1 further vertices pushed into the negative orthant"""
    m = x0p.size
    inward = -np.ones(m) / np.sqrt(m)
    Y = np.array([x0p + r * inward + 0.1 * r * np.eye(m)[j] for j in range(m)])
    return LogPolyhedron.from_vertices(np.vstack([x0p, Y])), Y


def _construct(G: LogPolyhedron, x0: np.ndarray, mu: int, eps: float, N: float, rho: float,
               level: int, tol: ToleranceProfile, depth: float, M_start: float = 1.0,
               check_points: Optional[np.ndarray] = None,
               ceiling: Optional[float] = None) -> Tuple[np.ndarray, ConstructionTrace]:
    n = G.n
    if not is_extreme(G, x0, tol):
        raise NotExtreme(f"log z0 = {x0.tolist()} is not an extreme point of the closed convex hull")
    sf = support_at(G, x0, tol)
    l, l0, perm = sf.l, sf.l0, list(sf.permutation)

    t = np.zeros(n, dtype=np.int64)
    inner = None
    face = None
    inflation: List[List[float]] = []
    if n > 1:
        # the supporting face at a vertex is {x0}; inflate its projection to a simplex
        x0p = x0[perm[:-1]]
        face, Y = _inflated_face(x0p, _INFLATION * _scale(G, depth))
        inflation = Y.tolist()
        beta_inner, inner = _construct(face, x0p, mu, eps / 2, 2 * N, rho / 2, level + 1, tol, depth)
        t[perm] = np.r_[beta_inner, 0]
    t0 = float(t @ x0)

    M = float(M_start)
    mu_eff = int(mu)
    while True:
        if M > _M_CAP:
            raise RecursionBudgetExceeded(f"M exceeded 2^40 at level {level}")
        c = M * l + t
        if _shifted_sup(G, c, x0) > eps / 2 or _shifted_sup_off_box(G, c, x0, rho) > -2 * N:
            M *= 2
            continue
        while True:
            base_alpha, base_k = dirichlet(l, mu_eff)
            q = max(1, math.ceil(M / base_k))
            alpha = q * base_alpha
            beta = t + alpha
            sup = _shifted_sup(G, beta.astype(float), x0)
            off = _shifted_sup_off_box(G, beta.astype(float), x0, rho)
            if sup > eps:
                mu_eff *= 2
                if mu_eff ** n > _DIRICHLET_CAP:
                    raise RecursionBudgetExceeded(f"Dirichlet parameter exceeded its cap at level {level}")
                continue
            break
        sampled_ok = True
        if check_points is not None and check_points.size and ceiling is not None:
            sampled_ok = float(np.max((check_points - x0) @ beta)) <= ceiling + _CEILING_SLACK
        if off <= -N and sampled_ok:
            break
        M *= 2

    k = q * base_k
    trace = ConstructionTrace(
        level=level,
        l=l.tolist(),
        l0=l0,
        permutation=perm,
        pivot_sign=sf.pivot_sign,
        face_projection=face.describe() if face is not None else None,
        inflation_vectors=inflation,
        t=t.tolist(),
        t0=t0,
        M_used=M,
        alpha=alpha.tolist(),
        k=k,
        base_alpha=base_alpha.tolist(),
        base_k=base_k,
        q=q,
        dirichlet_offset=float((alpha - k * l) @ x0),
        eps=eps,
        N=N,
        rho=rho,
        effective_mu=mu_eff,
        inner=inner,
    )
    logger.debug("laurent level", level=level, n=n, M=M, k=k, effective_mu=mu_eff, sup=sup, off=off)
    return beta, trace


def laurent_peak(D: ReinhardtDomain, z0: Sequence[complex], mu: int, N: float = 3.0,
                 U_radius: Optional[float] = None, tol: ToleranceProfile = DEFAULT_TOLERANCES,
                 samples: int = 2000, seed: int = 0, M_start: float = 1.0,
                 off_u_ceiling: Optional[float] = None) -> LaurentPeak:
    """
    Laurent monomial F_mu with |F_mu(z0)| = 1, |F_mu| <= e^(1/mu) on D and
    |F_mu| <= e^-N off the Reinhardt neighborhood of z0 of radius U_radius

    Args:
        off_u_ceiling: optional log bound the sampled sup off U must not exceed
            (used by laurent_sequence to keep that sup nonincreasing)

    Raises:
        NotExtreme: if log z0 is not an extreme point of conv(log D)
        RecursionBudgetExceeded: if M or the Dirichlet parameter outgrow their caps
    """
    settings = get_settings()
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    if z0.size > _MAX_DIM:
        raise ScopeViolation(f"laurent_peak is limited to n <= {_MAX_DIM}")
    rho = settings.laurent_radius if U_radius is None else float(U_radius)
    depth = settings.laurent_depth
    eps = 1.0 / mu
    x0 = log_map(z0)
    G = hull_model(D)

    X = D.sample_log(samples, seed, depth)
    off_mask = np.max(np.abs(X - x0[None, :]), axis=1) >= rho
    beta, trace = _construct(G, x0, mu, eps, N, rho, 0, tol, depth, M_start,
                             X[off_mask], off_u_ceiling)

    theta = -float(beta @ np.angle(z0))
    trace = trace.model_copy(update={"theta": theta})
    monomial = LaurentMonomial(tuple(int(b) for b in beta), -float(beta @ x0), theta)

    vals = monomial.log_abs(X)
    report = LaurentReport(
        mu=mu,
        eps=eps,
        N=N,
        u_radius=rho,
        value=float(np.exp(monomial.log_abs(x0[None, :])[0])),
        sampled_sup=float(np.exp(vals.max())),
        sampled_sup_off_u=float(np.exp(vals[off_mask].max())) if off_mask.any() else 0.0,
        sampled_log_sup_off_u=float(vals[off_mask].max()) if off_mask.any() else -np.inf,
        certified_sup=float(np.exp(_shifted_sup(G, beta.astype(float), x0))),
        certified_sup_off_u=float(np.exp(_shifted_sup_off_box(G, beta.astype(float), x0, rho))),
        samples=samples,
        seed=seed,
    )
    logger.info("laurent monomial constructed", domain=D.name, mu=mu, exponent=list(monomial.exponent),
                M=trace.M_used, sup_off_u=report.certified_sup_off_u)
    return LaurentPeak(monomial, trace, report)


def laurent_sequence(D: ReinhardtDomain, z0: Sequence[complex], mus: Sequence[int], N: float = 3.0,
                     U_radius: Optional[float] = None, tol: ToleranceProfile = DEFAULT_TOLERANCES,
                     samples: int = 2000, seed: int = 0) -> List[LaurentPeak]:
    """
    laurent_peak for each mu, carrying M forward and capping the sampled
    sup off U at its previous value
    """
    out: List[LaurentPeak] = []
    M = 1.0
    ceiling = None
    for mu in mus:
        peak = laurent_peak(D, z0, mu, N, U_radius, tol, samples, seed, M, ceiling)
        out.append(peak)
        M = peak.trace.M_used
        if np.isfinite(peak.report.sampled_log_sup_off_u):
            ceiling = peak.report.sampled_log_sup_off_u
    return out
