"""
peakkit command line

Usage:
    peakkit peak --domain g2.json --point 2,1
    peakkit transfer --map sym2.json --source-peak mean.json --point 1,1
    peakkit verify --report report.json

Exit codes: 0 success or Pass, 1 verification Fail, 2 input or precondition
error, 3 numerical failure.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, ValidationError

from peakkit import __version__
from peakkit.cconvex.body import construct_weak_peak
from peakkit.cli.reports import (
    CarathReport,
    ClassifyReport,
    DistinguishedReport,
    EnvelopeReport,
    LaurentEntry,
    LaurentRunReport,
    PeakReport,
    PullbackReport,
    ReinhardtClassifyReport,
    ReplayReport,
    ToriReport,
    TransferReport,
)
from peakkit.cli.schemas import (
    ConvexSpec,
    ReinhardtSpec,
    SymmetrizedPolydiscSpec,
    parse_domain,
    parse_function,
    parse_map,
    parse_point,
    read_json,
)
from peakkit.cli.verification import VerificationReport, report_differences, verify_peak
from peakkit.numerics.expressions import fingerprint
from peakkit.numerics.tolerance import ToleranceProfile
from peakkit.reinhardt.classification import classify_peak, classify_peak_via_envelope
from peakkit.reinhardt.domain import staircase
from peakkit.reinhardt.envelope import bremermann_check, envelope, extension_probe, peak_tori
from peakkit.reinhardt.laurent import laurent_sequence
from peakkit.shared.errors import DomainViolation, InputError, NumericError, PreconditionError, ScopeViolation
from peakkit.shared.logging_config import configure_logging
from peakkit.shared.settings import get_settings
from peakkit.sympoly.caratheodory import carath_lb
from peakkit.sympoly.geometry import classify, is_distinguished
from peakkit.sympoly.peak import construct_peak
from peakkit.transfer.lifting import pullback_peak, transfer_peak
from peakkit.transfer.probe import cfc_probe, shilov_preimage_report

logger = structlog.get_logger(__name__)

# argparse destinations that name JSON files; their contents go into provenance
_FILE_INPUTS = ("domain", "map", "source_peak", "target_peak", "report")
_NOT_REPLAYED = ("output", "csv", "log_level") + _FILE_INPUTS


@dataclass
class Outcome:
    report: BaseModel
    code: int = 0
    frame: Optional[pd.DataFrame] = None


@dataclass
class RunContext:
    """Parsed arguments plus the JSON documents they referenced"""
    args: argparse.Namespace
    inputs: Dict[str, Any] = field(default_factory=dict)
    tol: ToleranceProfile = field(default_factory=ToleranceProfile.from_settings)

    def document(self, name: str) -> Any:
        if name not in self.inputs:
            flag = "--" + name.replace("_", "-")
            raise InputError(f"{self.args.command} needs {flag}")
        return self.inputs[name]

    def domain(self):
        return parse_domain(self.document("domain"))

    def point(self, name: str = "point") -> np.ndarray:
        raw = getattr(self.args, name, None)
        if raw is None:
            raise InputError(f"{self.args.command} needs --{name.replace('_', '-')}")
        return parse_point(raw.split(","))

    def points(self, name: str = "sequence") -> List[np.ndarray]:
        raw = getattr(self.args, name, None)
        if not raw:
            raise InputError(f"{self.args.command} needs --{name} (points separated by ';')")
        return [parse_point(p.split(",")) for p in raw.split(";") if p.strip()]


def _pairs(z) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in np.atleast_1d(np.asarray(z, dtype=complex))]


def _require(spec, kinds: Tuple[type, ...], command: str):
    if not isinstance(spec, kinds):
        raise ScopeViolation(f"{command} does not support {spec.type} domains")
    return spec


def _check_dim(z: np.ndarray, dim: int, what: str = "point") -> None:
    if z.size != dim:
        raise InputError(f"{what} has {z.size} coordinates, the domain has dimension {dim}")


def _verify(ctx: RunContext, f, a, region, value_tol: Optional[float] = None) -> VerificationReport:
    args = ctx.args
    return verify_peak(f, a, region, interior_samples=args.interior_samples,
                       boundary_samples=args.boundary_samples, seed=args.seed, radius=args.radius,
                       tol=ctx.tol, value_tol=value_tol, threads=args.threads)


def _verdict_code(report: VerificationReport) -> int:
    return 0 if report.passed else 1


# Handlers ------------------------------------------------------------------

def cmd_classify(ctx: RunContext) -> Outcome:
    spec = _require(ctx.domain(), (SymmetrizedPolydiscSpec,), "classify")
    z = ctx.point()
    _check_dim(z, spec.n)
    cls = classify(z, ctx.tol, ctx.args.seed)
    return Outcome(ClassifyReport(point=_pairs(z), kind=cls.kind.value, max_root_modulus=cls.max_root_modulus,
                                  distinguished=is_distinguished(z, ctx.tol)))


def cmd_peak(ctx: RunContext) -> Outcome:
    spec = _require(ctx.domain(), (SymmetrizedPolydiscSpec, ConvexSpec), "peak")
    a = ctx.point()
    _check_dim(a, spec.dim)
    if isinstance(spec, SymmetrizedPolydiscSpec):
        built = construct_peak(a, ctx.tol)
        f = built.function
        construction = {"kind": "symmetrized_polydisc", "lambdas": _pairs(built.lambdas),
                        "levels": built.levels, "value_tolerance": built.value_tolerance}
        report = _verify(ctx, f, a, spec.region(), built.value_tolerance)
    else:
        weak = construct_weak_peak(spec.build(), a, ctx.tol)
        f = weak.function
        construction = {"kind": "weak_peak", "nu": _pairs(weak.nu), "d": weak.d}
        report = _verify(ctx, f, a, spec.region())
    out = PeakReport(point=_pairs(a), construction=construction, fingerprint=fingerprint(f),
                     function=f.describe(), verification=report)
    return Outcome(out, _verdict_code(report), report.samples_frame())


def cmd_reinhardt_classify(ctx: RunContext) -> Outcome:
    spec = _require(ctx.domain(), (ReinhardtSpec,), "reinhardt-classify")
    D = spec.build()
    z = ctx.point()
    _check_dim(z, D.n)
    via = bool(ctx.args.via_envelope)
    verdict = classify_peak_via_envelope(D, z, ctx.tol) if via else classify_peak(D, z, ctx.tol)
    return Outcome(ReinhardtClassifyReport(domain=D.name, point=_pairs(z), kind=verdict.kind.value,
                                           extrapolated=verdict.extrapolated, reason=verdict.reason,
                                           via_envelope=via))


def cmd_laurent(ctx: RunContext) -> Outcome:
    spec = _require(ctx.domain(), (ReinhardtSpec,), "laurent")
    D = spec.build()
    z0 = ctx.point()
    _check_dim(z0, D.n)
    try:
        mus = [int(m) for m in str(ctx.args.mu).split(",")]
    except ValueError as e:
        raise InputError(f"--mu must be a comma separated list of integers, got {ctx.args.mu!r}") from e
    if any(m < 1 for m in mus):
        raise InputError("--mu values must be positive")
    peaks = laurent_sequence(D, z0, mus, ctx.args.N, ctx.args.u_radius, ctx.tol,
                             samples=ctx.args.interior_samples, seed=ctx.args.seed)
    entries = [LaurentEntry(mu=mu, monomial=p.monomial.describe(), trace=p.trace, report=p.report)
               for mu, p in zip(mus, peaks)]
    return Outcome(LaurentRunReport(domain=D.name, point=_pairs(z0), entries=entries))


def cmd_transfer(ctx: RunContext) -> Outcome:
    F = parse_map(ctx.document("map"))
    phi = parse_function(ctx.document("source_peak"))
    a = ctx.point()
    result = transfer_peak(F, phi, a, ctx.tol)
    report = _verify(ctx, result.function, result.point, F.target, result.inner.value_tolerance)
    out = TransferReport(map=F.describe(), source_point=_pairs(a), target_point=_pairs(result.point),
                         fiber_values=_pairs(result.fiber_values), fingerprint=fingerprint(result.function),
                         function=result.function.describe(), verification=report)
    return Outcome(out, _verdict_code(report), report.samples_frame())


def cmd_pullback(ctx: RunContext) -> Outcome:
    F = parse_map(ctx.document("map"))
    psi = parse_function(ctx.document("target_peak"))
    y = ctx.point()
    j = int(ctx.args.fiber_index)
    result = pullback_peak(F, psi, y, j, ctx.tol, seed=ctx.args.seed)
    report = _verify(ctx, result.function, result.point, F.source)
    out = PullbackReport(map=F.describe(), target_point=_pairs(y), fiber_index=j, point=_pairs(result.point),
                         fiber=[_pairs(x) for x in result.fiber], exponents=list(result.exponents),
                         radii=list(result.radii), normalization=_pairs(result.normalization)[0],
                         fingerprint=fingerprint(result.function), function=result.function.describe(),
                         verification=report)
    return Outcome(out, _verdict_code(report), report.samples_frame())


def cmd_cfc_probe(ctx: RunContext) -> Outcome:
    F = parse_map(ctx.document("map"))
    w0 = ctx.point("base")
    return Outcome(cfc_probe(F, w0, ctx.points(), ctx.args.grid, ctx.tol))


def cmd_envelope(ctx: RunContext) -> Outcome:
    D = _require(ctx.domain(), (ReinhardtSpec,), "envelope").build()
    E = envelope(D)
    return Outcome(EnvelopeReport(domain=D.describe(), envelope=E.describe(), bremermann=bremermann_check(D, ctx.tol)))


def cmd_extension_probe(ctx: RunContext) -> Outcome:
    K = int(ctx.args.steps)
    D = _require(ctx.domain(), (ReinhardtSpec,), "extension-probe").build() if "domain" in ctx.inputs \
        else staircase(K)
    return Outcome(extension_probe(D, K, samples=ctx.args.interior_samples, seed=ctx.args.seed))


def cmd_carath_lb(ctx: RunContext) -> Outcome:
    spec = _require(ctx.domain(), (SymmetrizedPolydiscSpec,), "carath-lb")
    z, w = ctx.point("from_point"), ctx.point("to_point")
    _check_dim(z, spec.n, "--from")
    _check_dim(w, spec.n, "--to")
    bound = carath_lb(z, w, ctx.args.grid, ctx.tol)
    return Outcome(CarathReport(z=_pairs(z), w=_pairs(w), mobius=bound.mobius, poincare=bound.poincare,
                                lambdas=_pairs(bound.lambdas), grid=bound.grid))


def cmd_shilov(ctx: RunContext) -> Outcome:
    if "map" in ctx.inputs:
        return Outcome(shilov_preimage_report(parse_map(ctx.inputs["map"]), ctx.points(), ctx.tol))
    spec = _require(ctx.domain(), (ReinhardtSpec, SymmetrizedPolydiscSpec), "shilov")
    if isinstance(spec, ReinhardtSpec):
        D = spec.build()
        tori = [np.asarray(x, dtype=float).tolist() for x in peak_tori(D)]
        return Outcome(ToriReport(domain=D.name, log_points=tori, bremermann=bremermann_check(D, ctx.tol)))
    z = ctx.point()
    _check_dim(z, spec.n)
    return Outcome(DistinguishedReport(point=_pairs(z), kind=classify(z, ctx.tol, ctx.args.seed).kind.value,
                                       distinguished=is_distinguished(z, ctx.tol)))


def cmd_verify(ctx: RunContext) -> Outcome:
    doc = ctx.document("report")
    provenance = doc.get("provenance") if isinstance(doc, dict) else None
    if not provenance or "subcommand" not in provenance:
        raise InputError("the report carries no provenance block")
    if provenance["subcommand"] == "verify":
        raise InputError("replay reports cannot be verified again")
    args = argparse.Namespace(**provenance["args"])
    args.command = provenance["subcommand"]
    try:
        tol = ToleranceProfile(**provenance["tolerances"])
    except ValidationError as e:
        raise InputError(f"provenance tolerances are invalid: {e.errors()[0]['msg']}") from e
    payload, _, _ = run(args, provenance.get("inputs", {}), tol)
    diffs = report_differences(doc, payload)
    verdict = (payload.get("verification") or {}).get("verdict")
    logger.info("replay finished", subcommand=args.command, differences=len(diffs))
    return Outcome(ReplayReport(subcommand=args.command, reproduced=not diffs, differences=diffs, verdict=verdict),
                   0 if not diffs else 1)


HANDLERS: Dict[str, Callable[[RunContext], Outcome]] = {
    "classify": cmd_classify,
    "peak": cmd_peak,
    "reinhardt-classify": cmd_reinhardt_classify,
    "laurent": cmd_laurent,
    "transfer": cmd_transfer,
    "pullback": cmd_pullback,
    "cfc-probe": cmd_cfc_probe,
    "envelope": cmd_envelope,
    "extension-probe": cmd_extension_probe,
    "carath-lb": cmd_carath_lb,
    "shilov": cmd_shilov,
    "verify": cmd_verify,
}


# Plumbing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", type=str, help="Domain spec JSON file")
    common.add_argument("--seed", type=int, help="Sampling seed (default: PEAKKIT_SEED)")
    common.add_argument("--threads", type=int, help="Worker threads for sampled sweeps (default: PEAKKIT_THREADS)")
    common.add_argument("--interior-samples", type=int,
                        help="Interior sample count (default: PEAKKIT_INTERIOR_SAMPLES)")
    common.add_argument("--boundary-samples", type=int,
                        help="Boundary sample count (default: PEAKKIT_BOUNDARY_SAMPLES)")
    common.add_argument("--radius", type=float,
                        help="Neighborhood radius for the margin (default: PEAKKIT_NEIGHBORHOOD_RADIUS)")
    common.add_argument("--output", type=str, help="Write the JSON report here instead of stdout")
    common.add_argument("--csv", type=str, help="Write sampled |f| values as CSV")
    common.add_argument("--log-level", type=str, help="Log level (default: PEAKKIT_LOG_LEVEL)")

    parser = argparse.ArgumentParser(prog="peakkit", description="Peak functions and Shilov boundaries, computed")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("classify", "Interior/Boundary/Exterior for a point of G_n")
    p.add_argument("--point", type=str, help="Comma separated complex coordinates, e.g. 2,1 or 0.5+0.5j,0")

    p = add("peak", "Construct and verify a peak function at a boundary point")
    p.add_argument("--point", type=str)

    p = add("reinhardt-classify", "Peak/NotPeak for a boundary point of a Reinhardt domain")
    p.add_argument("--point", type=str)
    p.add_argument("--via-envelope", action="store_true", help="Classify by extremality in the envelope")

    p = add("laurent", "Laurent monomial peak sequence at a boundary point")
    p.add_argument("--point", type=str)
    p.add_argument("--mu", type=str, default="1", help="Comma separated sequence indices (default: 1)")
    p.add_argument("--N", type=float, default=3.0, help="Required decay e^-N off the neighborhood (default: 3)")
    p.add_argument("--u-radius", type=float, help="Reinhardt neighborhood radius (default: PEAKKIT_LAURENT_RADIUS)")

    p = add("transfer", "Push a peak function forward through a proper map")
    p.add_argument("--map", type=str, help="Proper map JSON file")
    p.add_argument("--source-peak", type=str, help="Function JSON file peaking at --point")
    p.add_argument("--point", type=str, help="Source point a")

    p = add("pullback", "Pull a peak function back to one fiber point")
    p.add_argument("--map", type=str)
    p.add_argument("--target-peak", type=str, help="Function JSON file peaking at --point")
    p.add_argument("--point", type=str, help="Target point y")
    p.add_argument("--fiber-index", type=int, default=0, help="Index of the fiber point (default: 0)")

    p = add("cfc-probe", "Caratheodory lower bounds along a sequence approaching the boundary")
    p.add_argument("--map", type=str)
    p.add_argument("--base", type=str, help="Base point w0")
    p.add_argument("--sequence", type=str, help="Points separated by ';'")
    p.add_argument("--grid", type=int, help="Lambda lattice size (default: PEAKKIT_CARATH_GRID)")

    add("envelope", "Envelope of holomorphy of a Reinhardt domain")

    p = add("extension-probe", "Compare w/z on the staircase domain and its envelope")
    p.add_argument("--steps", type=int, default=4, help="Staircase steps K (default: 4)")

    p = add("carath-lb", "Lower bound for the Caratheodory distance in G_n")
    p.add_argument("--from", dest="from_point", type=str)
    p.add_argument("--to", dest="to_point", type=str)
    p.add_argument("--grid", type=int)

    p = add("shilov", "Peak tori, distinguished boundary test or preimage check")
    p.add_argument("--point", type=str)
    p.add_argument("--map", type=str)
    p.add_argument("--sequence", type=str, help="Target points for --map, separated by ';'")

    p = add("verify", "Re-run a report from its provenance and compare")
    p.add_argument("--report", type=str, help="Report JSON file")

    return parser


def _resolve_defaults(args: argparse.Namespace) -> None:
    """Fill unset sampling flags from settings so provenance is self-contained"""
    settings = get_settings()
    defaults = {
        "seed": settings.seed,
        "threads": settings.threads,
        "interior_samples": settings.interior_samples,
        "boundary_samples": settings.boundary_samples,
        "radius": settings.neighborhood_radius,
        "grid": settings.carath_grid,
        "u_radius": settings.laurent_radius,
    }
    for key, value in defaults.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def _read_inputs(args: argparse.Namespace) -> Dict[str, Any]:
    return {name: read_json(getattr(args, name)) for name in _FILE_INPUTS if getattr(args, name, None)}


def run(args: argparse.Namespace, inputs: Dict[str, Any],
        tol: Optional[ToleranceProfile] = None) -> Tuple[Dict[str, Any], int, Optional[pd.DataFrame]]:
    """Dispatch one subcommand; returns the JSON payload, exit code and optional CSV frame"""
    ctx = RunContext(args, inputs, tol or ToleranceProfile.from_settings())
    outcome = HANDLERS[args.command](ctx)
    payload = outcome.report.model_dump(mode="json")
    payload["provenance"] = {
        "subcommand": args.command,
        "args": {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_REPLAYED and k != "command"},
        "inputs": {k: v for k, v in inputs.items() if k != "report"},
        "tolerances": ctx.tol.model_dump(),
        "version": __version__,
    }
    return payload, outcome.code, outcome.frame


def _emit(payload: Dict[str, Any], frame: Optional[pd.DataFrame], args: argparse.Namespace) -> None:
    text = json.dumps(payload, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")
    if args.csv:
        if frame is None:
            logger.warning("no sampled values to write", subcommand=args.command)
        else:
            frame.to_csv(args.csv, index=False, lineterminator="\n", encoding="utf-8")


def main(argv: Optional[List[str]] = None) -> int:
    """Main function with command-line interface."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    logger.info("peakkit started", subcommand=args.command, version=__version__)

    try:
        inputs = _read_inputs(args)
        _resolve_defaults(args)
        payload, code, frame = run(args, inputs)
        _emit(payload, frame, args)
    except (InputError, PreconditionError, DomainViolation) as e:
        logger.error("input rejected", subcommand=args.command, error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return 2
    except NumericError as e:
        logger.error("numerical failure", subcommand=args.command, error=str(e))
        sys.stderr.write(f"numerical failure: {e}\n")
        return 3
    logger.info("peakkit finished", subcommand=args.command, exit_code=code)
    return code


if __name__ == "__main__":
    sys.exit(main())
