"""
Sampled peak verification

verify_peak checks a constructed function f against a target point a of a
sampled region:

- |f(a) - 1| within the value tolerance
- |f| < 1 at every interior sample
- a positive margin 1 - sup |f| over the samples outside B(a, radius)
- a continuity probe at a: the deviation |f - f(a)| near a must either stay
  under continuity_tol or shrink as the probe radius shrinks

Evaluation errors (poles, branch cuts) turn into a Fail with the cause
recorded. Sweeps run in fixed chunks, optionally on a thread pool, and are
reassembled in chunk order, so a report is reproduced bit for bit from its
seed whatever the thread count.
"""

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, Field, PrivateAttr

from peakkit.cconvex.body import ConvexBody
from peakkit.numerics.expressions import HoloFunction, evaluate, evaluate_batch, fingerprint
from peakkit.numerics.polynomials import elementary_symmetric_batch, roots_with_retry
from peakkit.numerics.sampling import SampleRegion, SampleStrategy, sample_polydisc
from peakkit.numerics.tolerance import ToleranceProfile
from peakkit.reinhardt.domain import ReinhardtDomain
from peakkit.shared.errors import DomainViolation, ScopeViolation
from peakkit.shared.settings import get_settings
from peakkit.sympoly.geometry import char_poly, max_root_modulus_batch

logger = structlog.get_logger(__name__)

_PROBE_POINTS = 256
_DECAY_RATIO = 0.9


class Verdict(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"


class ContinuityRow(BaseModel):
    radius: float
    samples: int
    deviation: Optional[float] = Field(None, description="sup |f - f(a)| over probe points; None when none landed")


class VerificationReport(BaseModel):
    """Outcome of the sampled peak protocol, re-runnable from seed and region"""
    target: List[List[float]] = Field(..., description="Target point as [re, im] pairs")
    fingerprint: str = Field(..., description="SHA-256 of the function tree")
    value_at_target: Optional[List[float]] = None
    abs_value_at_target: Optional[float] = None
    value_tolerance: float
    sampled_sup_interior: Optional[float] = None
    margin_radius: float
    sup_off_neighborhood: Optional[float] = None
    margin_off_neighborhood: Optional[float] = None
    boundary_sup_off_neighborhood: Optional[float] = None
    continuity: List[ContinuityRow] = Field(default_factory=list)
    continuity_ok: bool = True
    interior_samples: int
    boundary_samples: int
    seed: int
    region: Dict[str, Any]
    tolerances: Dict[str, Any]
    verdict: Verdict
    cause: Optional[str] = None

    _points: Optional[np.ndarray] = PrivateAttr(default=None)
    _abs_values: Optional[np.ndarray] = PrivateAttr(default=None)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def samples_frame(self) -> pd.DataFrame:
        """Interior samples with |f|; columns z1_re, z1_im, ..., abs_value"""
        if self._points is None:
            return pd.DataFrame(columns=["abs_value"])
        columns: Dict[str, np.ndarray] = {}
        for j in range(self._points.shape[1]):
            columns[f"z{j + 1}_re"] = self._points[:, j].real
            columns[f"z{j + 1}_im"] = self._points[:, j].imag
        columns["abs_value"] = self._abs_values
        return pd.DataFrame(columns)


def _pairs(z: np.ndarray) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in np.atleast_1d(z)]


def evaluate_abs(f: HoloFunction, Z: np.ndarray, threads: int = 1, chunk_size: int = 2048) -> np.ndarray:
    """
    |f| on every row of Z, chunk by chunk

    Raises:
        DomainViolation: naming the first bad row of the whole batch
    """
    starts = list(range(0, Z.shape[0], chunk_size))

    def run(start: int) -> np.ndarray:
        try:
            return np.abs(evaluate_batch(f, Z[start:start + chunk_size]))
        except DomainViolation as e:
            base = str(e).split(" (sample row")[0]
            raise type(e)(base, start + max(e.row, 0)) from e

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts) if parts else np.empty(0)


# Region membership and probe points ----------------------------------------

def region_contains(region: SampleRegion, Z: np.ndarray) -> np.ndarray:
    """Strict interior membership for every row of Z"""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    p = region.params
    family = region.family
    if family == "polydisc":
        return np.all(np.abs(Z) < 1.0, axis=1)
    if family == "symmetrized_polydisc":
        return max_root_modulus_batch(Z) < 1.0
    if family == "annulus":
        r = np.abs(Z[:, 0])
        return (r > p["r_in"]) & (r < p["r_out"])
    if family == "half_disc":
        return (Z[:, 0].real > 0.0) & (np.abs(Z[:, 0]) < 1.0)
    if family == "convex":
        body = ConvexBody.from_rows(p["rows"], p["c"], p["complex_dim"], p.get("center"), p.get("radius"))
        return body.slack(Z) > 0.0
    if family == "reinhardt":
        domain = ReinhardtDomain.from_rows(p["pieces"], p["meets_axes"])
        off_axes = np.all(Z != 0, axis=1)
        X = np.log(np.abs(np.where(Z == 0, 1.0, Z)))
        inside = np.zeros(Z.shape[0], dtype=bool)
        for piece in domain.pieces:
            inside |= piece.contains_batch(X, 0.0, strict=True)
        return off_axes & inside
    raise ScopeViolation(f"no membership test for the {family} family")


def probe_points(region: SampleRegion, a: np.ndarray, radius: float, count: int, seed: int) -> np.ndarray:
    """
    Interior points within `radius` of a

    For G_n the roots of a are pulled into the polydisc and symmetrized again,
    since near its distinguished boundary G_n is too thin for ball sampling.
    Other regions pull a towards their own interior samples.
    """
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, count)
    if region.family == "symmetrized_polydisc":
        n = a.size
        lam = roots_with_retry(char_poly(a), seed=seed)
        lam = lam / np.maximum(1.0, np.abs(lam))
        mu = sample_polydisc(n, count, seed).points
        s = radius * u / (n * 2.0 ** n)
        L = (1.0 - s)[:, None] * lam[None, :] + s[:, None] * mu
        P = elementary_symmetric_batch(L)[np.max(np.abs(L), axis=1) < 1.0]
    else:
        Z = region.sample(count, seed).points
        d = np.linalg.norm(Z - a[None, :], axis=1)
        s = radius * u / np.maximum(d, radius)
        P = (1.0 - s)[:, None] * a[None, :] + s[:, None] * Z
        P = P[region_contains(region, P)]
    return P[np.linalg.norm(P - a[None, :], axis=1) <= radius]


def continuity_probe(f: HoloFunction, a: np.ndarray, fa: complex, region: SampleRegion,
                     radius: float, seed: int) -> List[ContinuityRow]:
    """sup |f - f(a)| over probe points at radius, radius/10 and radius/100"""
    rows = []
    for k, r in enumerate((radius, radius / 10.0, radius / 100.0)):
        P = probe_points(region, a, r, _PROBE_POINTS, seed + k)
        dev = float(np.max(np.abs(evaluate_batch(f, P) - fa))) if P.shape[0] else None
        rows.append(ContinuityRow(radius=r, samples=int(P.shape[0]), deviation=dev))
    return rows


def _continuity_ok(rows: List[ContinuityRow], tol: float) -> bool:
    """Fails only when the innermost deviation is large and has not decayed"""
    measured = [r.deviation for r in rows if r.deviation is not None]
    if not measured:
        return True
    inner, outer = measured[-1], measured[0]
    return not (inner > tol and inner >= _DECAY_RATIO * outer)


# Protocol ------------------------------------------------------------------

def verify_peak(f: HoloFunction, a, region: SampleRegion,
                interior_samples: Optional[int] = None, boundary_samples: Optional[int] = None,
                seed: Optional[int] = None, radius: Optional[float] = None,
                tol: Optional[ToleranceProfile] = None, value_tol: Optional[float] = None,
                threads: Optional[int] = None) -> VerificationReport:
    """
    Run the sampled peak protocol for f at a over region

    Args:
        f: the candidate peak function
        a: target point in the closure of the region
        region: sampler family plus parameters
        value_tol: allowed |f(a) - 1|; defaults to tol.peak_value_tol

    Returns:
        VerificationReport with verdict Pass or Fail; never raises on
        evaluation errors
    """
    settings = get_settings()
    tol = tol or ToleranceProfile.from_settings()
    interior_samples = settings.interior_samples if interior_samples is None else interior_samples
    boundary_samples = settings.boundary_samples if boundary_samples is None else boundary_samples
    seed = settings.seed if seed is None else seed
    radius = settings.neighborhood_radius if radius is None else radius
    threads = settings.threads if threads is None else threads
    value_tol = tol.peak_value_tol if value_tol is None else value_tol
    a = np.atleast_1d(np.asarray(a, dtype=complex))

    report = VerificationReport(
        target=_pairs(a),
        fingerprint=fingerprint(f),
        value_tolerance=value_tol,
        margin_radius=radius,
        interior_samples=interior_samples,
        boundary_samples=boundary_samples,
        seed=seed,
        region=region.describe(),
        tolerances=tol.model_dump(),
        verdict=Verdict.FAIL,
    )
    logger.info("verification started", region=region.family, samples=interior_samples, seed=seed)

    def fail(cause: str) -> VerificationReport:
        report.verdict = Verdict.FAIL
        report.cause = cause
        logger.info("verification finished", verdict="Fail", cause=cause)
        return report

    try:
        fa = evaluate(f, a)
    except DomainViolation as e:
        return fail(f"evaluation at the target failed: {e}")
    report.value_at_target = [float(fa.real), float(fa.imag)]
    report.abs_value_at_target = float(abs(fa))

    Z = region.sample(interior_samples, seed).points
    try:
        mods = evaluate_abs(f, Z, threads, settings.chunk_size)
    except DomainViolation as e:
        return fail(f"evaluation on interior samples failed: {e}")
    report._points, report._abs_values = Z, mods
    report.sampled_sup_interior = float(mods.max())

    off = np.linalg.norm(Z - a[None, :], axis=1) >= radius
    if off.any():
        report.sup_off_neighborhood = float(mods[off].max())
        report.margin_off_neighborhood = 1.0 - report.sup_off_neighborhood

    try:
        B = region.sample(boundary_samples, seed + 1, SampleStrategy.BOUNDARY).points
        bmods = evaluate_abs(f, B, threads, settings.chunk_size)
        boff = np.linalg.norm(B - a[None, :], axis=1) >= radius
        if boff.any():
            report.boundary_sup_off_neighborhood = float(bmods[boff].max())
    except DomainViolation as e:
        logger.warning("boundary sweep skipped", reason=str(e))

    try:
        report.continuity = continuity_probe(f, a, fa, region, settings.probe_radius, seed)
    except DomainViolation as e:
        report.continuity_ok = False
        return fail(f"evaluation near the target failed: {e}")
    report.continuity_ok = _continuity_ok(report.continuity, settings.continuity_tol)

    if abs(fa - 1.0) > value_tol:
        return fail(f"|f(a) - 1| = {abs(fa - 1.0):.3e} exceeds {value_tol:.1e}")
    if report.sampled_sup_interior >= 1.0:
        worst = int(np.argmax(mods))
        return fail(f"|f| = {mods[worst]!r} >= 1 at interior sample {worst}")
    if report.margin_off_neighborhood is None:
        return fail(f"no interior samples outside B(a, {radius})")
    if report.margin_off_neighborhood <= 0.0:
        return fail("nonpositive margin off the neighborhood")
    if not report.continuity_ok:
        return fail("f is discontinuous at the target: the deviation does not shrink with the probe radius")

    report.verdict = Verdict.PASS
    logger.info("verification finished", verdict="Pass", margin=report.margin_off_neighborhood)
    return report


def _same(e: Any, a: Any) -> bool:
    if isinstance(e, float) and isinstance(a, float) and np.isnan(e) and np.isnan(a):
        return True
    if isinstance(e, list) and isinstance(a, list):
        return len(e) == len(a) and all(_same(x, y) for x, y in zip(e, a))
    return e == a


def report_differences(expected: Dict[str, Any], actual: Dict[str, Any], prefix: str = "") -> List[str]:
    """Dotted paths where two JSON report dictionaries differ, provenance excluded"""
    out: List[str] = []
    keys = set(expected) | set(actual)
    for key in sorted(keys):
        if not prefix and key == "provenance":
            continue
        path = f"{prefix}{key}"
        e, a = expected.get(key), actual.get(key)
        if isinstance(e, dict) and isinstance(a, dict):
            out.extend(report_differences(e, a, path + "."))
        elif not _same(e, a):
            out.append(path)
    return out
