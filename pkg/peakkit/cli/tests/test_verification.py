"""
Unit tests for the sampled peak verification protocol
"""

import numpy as np
import pytest

from peakkit.cconvex.body import half_disc, unit_ball, weak_peak
from peakkit.cli.verification import (
    ContinuityRow,
    Verdict,
    _continuity_ok,
    evaluate_abs,
    probe_points,
    region_contains,
    report_differences,
    verify_peak,
)
from peakkit.numerics.expressions import Constant, Coordinate, ExpInvLog, LinearScale, Sum
from peakkit.numerics.sampling import SampleRegion
from peakkit.reinhardt.domain import ReinhardtDomain
from peakkit.shared.errors import DomainViolation, ScopeViolation
from peakkit.sympoly.peak import peak_at
from peakkit.transfer.lifting import transfer_peak
from peakkit.transfer.maps import HalfDiscSquare

DISC = SampleRegion("polydisc", {"n": 1})
G2 = SampleRegion("symmetrized_polydisc", {"n": 2})


def _disc_peak():
    return LinearScale(0.5, Sum((Constant(1.0), Coordinate(1))))


def _ball_region(n=2):
    return SampleRegion("convex", unit_ball(n).sampler_params())


class TestVerifyPeak:
    """Test cases for verify_peak verdicts"""

    def test_constant_fails(self):
        report = verify_peak(Constant(1.0), [1.0], DISC, interior_samples=500, boundary_samples=50)
        assert report.verdict == Verdict.FAIL
        assert "interior sample" in report.cause

    def test_disc_peak_passes(self):
        report = verify_peak(_disc_peak(), [1.0], DISC, interior_samples=2000, boundary_samples=100, seed=4)
        assert report.passed
        assert report.value_at_target == pytest.approx([1.0, 0.0])
        assert 0.0 < report.margin_off_neighborhood < 0.1
        assert report.continuity_ok
        assert report.cause is None

    def test_value_off_target_fails(self):
        report = verify_peak(_disc_peak(), [1j], DISC, interior_samples=500, boundary_samples=50)
        assert report.verdict == Verdict.FAIL
        assert "|f(a) - 1|" in report.cause

    def test_symmetrized_distinguished_point(self):
        a = np.array([0.0, 1.0], dtype=complex)
        report = verify_peak(peak_at(a), a, G2, interior_samples=2000, boundary_samples=200, seed=1)
        assert report.passed
        assert report.margin_off_neighborhood > 0.0
        assert all(row.samples > 0 for row in report.continuity)

    def test_weak_peak_on_ball(self):
        a = [1.0, 0.0]
        report = verify_peak(weak_peak(unit_ball(2), a), a, _ball_region(), interior_samples=2000,
                             boundary_samples=100, seed=2)
        assert report.passed
        deviations = [row.deviation for row in report.continuity]
        assert deviations[0] > deviations[-1]

    def test_branch_violation_is_a_fail(self):
        report = verify_peak(ExpInvLog(Coordinate(1), 2.0), [-1.0], DISC, interior_samples=500,
                             boundary_samples=50)
        assert report.verdict == Verdict.FAIL
        assert report.cause.startswith("evaluation on interior samples failed")
        assert "sample row" in report.cause
        assert report.sampled_sup_interior is None

    def test_half_disc_slit_fails(self):
        F = HalfDiscSquare()
        result = transfer_peak(F, weak_peak(half_disc(), [0.5j]), [0.5j])
        report = verify_peak(result.function, result.point, F.target, interior_samples=1000,
                             boundary_samples=100, seed=3)
        assert report.verdict == Verdict.FAIL
        assert not report.continuity_ok
        assert "discontinuous" in report.cause

    def test_thread_count_does_not_change_report(self):
        a = np.array([2.0, 1.0], dtype=complex)
        f = peak_at(a)
        one = verify_peak(f, a, G2, interior_samples=5000, boundary_samples=100, seed=7, threads=1)
        four = verify_peak(f, a, G2, interior_samples=5000, boundary_samples=100, seed=7, threads=4)
        assert one.model_dump() == four.model_dump()

    def test_samples_frame(self):
        report = verify_peak(_disc_peak(), [1.0], DISC, interior_samples=300, boundary_samples=20)
        frame = report.samples_frame()
        assert list(frame.columns) == ["z1_re", "z1_im", "abs_value"]
        assert len(frame) == 300
        assert frame["abs_value"].max() == pytest.approx(report.sampled_sup_interior)


class TestEvaluateAbs:
    """Test cases for chunked evaluation"""

    def test_chunks_match_single_pass(self):
        Z = np.linspace(-0.9, 0.9, 1001).astype(complex)[:, None]
        f = _disc_peak()
        np.testing.assert_array_equal(evaluate_abs(f, Z, threads=4, chunk_size=64),
                                      evaluate_abs(f, Z, threads=1, chunk_size=4096))

    def test_violation_names_global_row(self):
        Z = np.full((600, 1), -0.5, dtype=complex)
        Z[437, 0] = 0.5
        with pytest.raises(DomainViolation) as info:
            evaluate_abs(ExpInvLog(Coordinate(1), 2.0), Z, threads=3, chunk_size=100)
        assert info.value.row == 437
        assert str(info.value).endswith("(sample row 437)")


class TestRegionContains:
    """Test cases for strict interior membership"""

    def test_polydisc(self):
        assert region_contains(SampleRegion("polydisc", {"n": 2}), [[0.5, 0.5j], [1.0, 0.0]]).tolist() == \
            [True, False]

    def test_symmetrized(self):
        assert region_contains(G2, [[0.0, 0.0], [1.0, 0.2], [2.0, 1.0], [3.0, 0.0]]).tolist() == \
            [True, True, False, False]

    def test_annulus_and_half_disc(self):
        annulus = SampleRegion("annulus", {"r_in": 0.5, "r_out": 1.0})
        assert region_contains(annulus, [[0.7], [0.3], [1.0]]).tolist() == [True, False, False]
        assert region_contains(SampleRegion("half_disc"), [[0.5], [-0.5], [0.5j]]).tolist() == \
            [True, False, False]

    def test_convex(self):
        assert region_contains(_ball_region(), [[0.5, 0.5j], [0.8, 0.8]]).tolist() == [True, False]

    def test_reinhardt(self):
        D = ReinhardtDomain.from_rows([{"A": [[1, 0], [-1, 0], [0, 1], [0, -1]], "b": [0, 1, 0, 1]}],
                                      [False, False], "log_square")
        region = SampleRegion("reinhardt", D.sampler_params())
        assert region_contains(region, [[0.6, 0.6], [0.2, 0.6], [0.0, 0.6], [1.0, 0.6]]).tolist() == \
            [True, False, False, False]

    def test_unknown_family(self):
        with pytest.raises(ScopeViolation):
            region_contains(SampleRegion("sphere"), [[0.0]])


class TestProbePoints:
    """Test cases for continuity probe points"""

    @pytest.mark.parametrize("region,a", [
        (G2, [2.0, 1.0]),
        (G2, [0.0, 1.0]),
        (DISC, [1.0]),
        (SampleRegion("convex", unit_ball(2).sampler_params()), [1.0, 0.0]),
    ])
    def test_inside_and_close(self, region, a):
        a = np.asarray(a, dtype=complex)
        for radius in (1e-3, 1e-4):
            P = probe_points(region, a, radius, 256, seed=0)
            assert P.shape[0] > 0
            assert np.all(np.linalg.norm(P - a[None, :], axis=1) <= radius)
            # double roots on the torus are only resolved to about sqrt(eps)
            assert region_contains(region, P).mean() > 0.95

    def test_seeded(self):
        a = np.array([2.0, 1.0], dtype=complex)
        np.testing.assert_array_equal(probe_points(G2, a, 1e-3, 64, 5), probe_points(G2, a, 1e-3, 64, 5))


class TestContinuityRule:
    """Test cases for the continuity decision"""

    @staticmethod
    def _rows(*devs):
        return [ContinuityRow(radius=10.0 ** -k, samples=1, deviation=d) for k, d in enumerate(devs)]

    def test_small_deviation_passes(self):
        assert _continuity_ok(self._rows(1e-3, 1e-3, 1e-3), 1e-2)

    def test_slow_decay_passes(self):
        assert _continuity_ok(self._rows(0.12, 0.1, 0.08), 1e-2)

    def test_jump_fails(self):
        assert not _continuity_ok(self._rows(0.8, 0.8, 0.79), 1e-2)

    def test_no_probe_points(self):
        assert _continuity_ok(self._rows(None, None, None), 1e-2)


class TestReportDifferences:
    """Test cases for replay comparison"""

    def test_identical(self):
        doc = {"a": 1, "b": {"c": [1.0, float("nan")]}, "provenance": {"seed": 1}}
        assert report_differences(doc, {"a": 1, "b": {"c": [1.0, float("nan")]}, "provenance": {"seed": 2}}) == []

    def test_nested_paths(self):
        expected = {"verification": {"verdict": "Pass", "sup": 0.5}, "fingerprint": "x"}
        actual = {"verification": {"verdict": "Fail", "sup": 0.5}, "fingerprint": "y", "extra": 1}
        assert report_differences(expected, actual) == ["extra", "fingerprint", "verification.verdict"]
