"""
Command line entry point and the peak verification protocol
"""

from peakkit.cli.schemas import load_domain, load_function, load_map, parse_domain, parse_function, parse_map
from peakkit.cli.verification import VerificationReport, Verdict, region_contains, report_differences, verify_peak

__all__ = [
    "load_domain", "load_function", "load_map", "parse_domain", "parse_function", "parse_map",
    "VerificationReport", "Verdict", "region_contains", "report_differences", "verify_peak",
]
