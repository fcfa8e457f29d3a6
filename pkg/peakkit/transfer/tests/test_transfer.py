"""
Unit tests for proper maps, peak transfer, Bishop pullback and the probes
"""

import numpy as np
import pytest

from peakkit.cconvex.body import half_disc, weak_peak
from peakkit.numerics.expressions import (
    Constant,
    Coordinate,
    FiberCompose,
    LinearScale,
    Sum,
    evaluate,
    evaluate_batch,
)
from peakkit.numerics.sampling import sample_polydisc
from peakkit.shared.errors import (
    FiberBoundaryMismatch,
    IndistinctPoints,
    InputError,
    NotOnBoundary,
    ScopeViolation,
)
from peakkit.sympoly.geometry import sample_interior, sym
from peakkit.sympoly.peak import peak_at
from peakkit.transfer.lifting import pullback_peak, separator, transfer_peak
from peakkit.transfer.maps import (
    Composition,
    HalfDiscSquare,
    PowerMap,
    Symmetrization,
    annulus_square,
    build_map,
)
from peakkit.transfer.probe import cfc_probe, lattice_grid, shilov_preimage_report


def _disc_peak_at_one():
    """(1 + w) / 2"""
    return LinearScale(0.5, Sum((Constant(1.0), Coordinate(1))))


def _fiber_contains(fiber, z, atol=1e-7):
    return np.min(np.linalg.norm(fiber - z[None, :], axis=1)) <= atol


class TestProperMaps:
    """Test cases for fibers of the catalog maps"""

    def test_symmetrization_fiber(self):
        F = Symmetrization(2)
        np.testing.assert_allclose(F.fiber([2, 1]), [[1, 1], [1, 1]], atol=1e-7)
        fiber = F.fiber(sym([0.5, -0.3j]))
        assert fiber.shape == (2, 2)
        np.testing.assert_allclose(np.sort_complex(fiber[:, 0]), np.sort_complex(np.array([0.5, -0.3j])), atol=1e-12)
        np.testing.assert_allclose(fiber[0][::-1], fiber[1], atol=1e-12)

    def test_multiplicities(self):
        assert Symmetrization(3).multiplicity == 6
        assert PowerMap((2, 3)).multiplicity == 6
        assert HalfDiscSquare().multiplicity == 1
        assert Composition((PowerMap((2, 2)), Symmetrization(2))).multiplicity == 8

    @pytest.mark.parametrize("F", [Symmetrization(2), Symmetrization(3), PowerMap((2, 3))],
                             ids=["sym2", "sym3", "power23"])
    def test_fibers_invert_the_map(self, F):
        Z = sample_polydisc(F.source_dim, 1000, seed=4).points
        W = F.apply(Z)
        for z, w in zip(Z, W):
            fiber = F.fiber(w)
            assert fiber.shape == (F.multiplicity, F.source_dim)
            np.testing.assert_allclose(F.apply(fiber), np.tile(w, (F.multiplicity, 1)), atol=1e-9)
            assert _fiber_contains(fiber, z)

    def test_power_roots(self):
        np.testing.assert_allclose(PowerMap((2,)).fiber([1.0]), [[1.0], [-1.0]], atol=1e-15)
        np.testing.assert_array_equal(PowerMap((3,)).fiber([0.0]), np.zeros((3, 1)))

    def test_composition_fiber(self):
        F = Composition((PowerMap((2, 2)), Symmetrization(2)))
        z = np.array([0.3 + 0.1j, -0.6j])
        fiber = F.fiber(F(z))
        assert fiber.shape == (8, 2)
        assert _fiber_contains(fiber, z)

    def test_half_disc_fiber_is_principal(self):
        F = HalfDiscSquare()
        np.testing.assert_allclose(F.fiber([-0.25]), [[0.5j]])
        w = np.array([0.3 - 0.4j])
        root = F.fiber(w)[0, 0]
        assert root.real >= 0
        assert root ** 2 == pytest.approx(w[0])

    def test_build_map_round_trip(self):
        for F in (Symmetrization(3), annulus_square(), HalfDiscSquare(),
                  Composition((PowerMap((2,)), PowerMap((3,))))):
            assert build_map(F.describe()) == F

    def test_unknown_map(self):
        with pytest.raises(InputError):
            build_map({"map": "blaschke"})

    def test_as_function_matches_apply(self):
        Z = sample_polydisc(2, 50, seed=0).points
        for F in (Symmetrization(2), PowerMap((2, 3))):
            np.testing.assert_allclose(evaluate_batch(F.as_function(), Z), F.apply(Z), atol=1e-14)


class TestTransferPeak:
    """Test cases for pushing a peak function forward"""

    def test_symmetrized_mean(self):
        F = Symmetrization(2)
        phi = LinearScale(0.5, Sum((Coordinate(1), Coordinate(2))))
        g = FiberCompose(F, phi)
        W = sample_interior(2, 1000, seed=1).points
        expected = np.column_stack([W[:, 0], W[:, 0] ** 2 / 4])
        np.testing.assert_allclose(evaluate_batch(g, W), expected, atol=1e-10)

        result = transfer_peak(F, phi, [1.0, 1.0])
        np.testing.assert_allclose(result.point, [2, 1])
        np.testing.assert_allclose(result.fiber_values, [2, 1], atol=1e-12)
        assert abs(evaluate(result.function, [2, 1]) - 1.0) <= 1e-6
        pts = sample_interior(2, 2000, seed=2).points
        mods = np.abs(evaluate_batch(result.function, pts))
        assert np.all(mods < 1.0)

    def test_power_map(self):
        F = PowerMap((2,))
        result = transfer_peak(F, _disc_peak_at_one(), [1.0])
        np.testing.assert_allclose(result.fiber_values, [1.0, 0.0], atol=1e-12)
        assert abs(evaluate(result.function, [1.0]) - 1.0) <= 1e-6
        pts = sample_polydisc(1, 2000, seed=3).points
        mods = np.abs(evaluate_batch(result.function, pts))
        assert np.all(mods < 1.0)
        far = np.abs(pts[:, 0] - 1.0) >= 0.1
        assert np.max(mods[far]) < 1.0

    def test_interior_fiber_values_rejected(self):
        with pytest.raises(FiberBoundaryMismatch):
            transfer_peak(Symmetrization(2), LinearScale(0.5, Coordinate(1)), [1.0, 1.0])

    def test_wrong_dimension(self):
        with pytest.raises(InputError):
            transfer_peak(Symmetrization(2), Coordinate(1), [1.0])

    def test_half_disc_slit_is_discontinuous(self):
        phi = weak_peak(half_disc(), [0.5j])
        result = transfer_peak(HalfDiscSquare(), phi, [0.5j])
        np.testing.assert_allclose(result.point, [-0.25])
        assert evaluate(result.function, [-0.25]) == pytest.approx(1.0)
        above = evaluate(result.function, [-0.25 + 1e-4j])
        below = evaluate(result.function, [-0.25 - 1e-4j])
        assert abs(below - 1.0) > 1e-2
        assert abs(above - below) > 1e-2


class TestSeparator:
    """Test cases for the fiber separator polynomial"""

    def test_two_points(self):
        sep = separator([[1.0], [-1.0]], 0)
        np.testing.assert_allclose(evaluate_batch(sep.function, [[0.0], [1.0], [-1.0]]), [0.5, 1.0, 0.0])
        assert sep.coordinates == (0,)

    def test_first_differing_coordinate(self):
        E = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 0.0]])
        sep = separator(E, 0)
        assert sep.coordinates == (1, 0)
        np.testing.assert_allclose(evaluate_batch(sep.function, E), [1.0, 0.0, 0.0], atol=1e-15)

    def test_other_index(self):
        sep = separator([[1.0], [-1.0], [1j]], 2)
        np.testing.assert_allclose(evaluate_batch(sep.function, [[1.0], [-1.0], [1j]]), [0, 0, 1], atol=1e-14)

    def test_repeated_points(self):
        with pytest.raises(IndistinctPoints):
            separator([[0.5, 0.5], [0.5, 0.5]], 0)

    def test_single_point(self):
        assert evaluate(separator([[0.2, 0.1]], 0).function, [0.9, 0.9]) == 1.0


class TestPullbackPeak:
    """Test cases for the Bishop pullback"""

    def test_annulus_square(self):
        F = annulus_square()
        result = pullback_peak(F, _disc_peak_at_one(), [1.0], j=0, samples=4000, seed=1)
        assert abs(evaluate(result.function, [1.0]) - 1.0) <= 1e-9
        assert abs(evaluate(result.function, [-1.0])) <= 1e-9
        assert all(n >= 1 and n & (n - 1) == 0 for n in result.exponents)
        assert len(result.exponents) == 6

        pts = F.source.sample(4000, 1).points
        mods = np.abs(evaluate_batch(result.function, pts))
        assert np.all(mods < 1.0)
        dist = np.abs(pts[:, 0] - 1.0)
        # every term is at most 1/4 on the calibration samples outside the first radius
        assert np.max(mods[dist >= result.radii[0]]) <= 0.25 + 1e-9

    def test_other_fiber_point(self):
        result = pullback_peak(annulus_square(), _disc_peak_at_one(), [1.0], j=1, samples=2000, seed=0)
        np.testing.assert_allclose(result.point, [-1.0])
        assert abs(evaluate(result.function, [-1.0]) - 1.0) <= 1e-9
        assert abs(evaluate(result.function, [1.0])) <= 1e-9

    def test_symmetrization(self):
        F = Symmetrization(2)
        y = sym([1.0, 1j])
        result = pullback_peak(F, peak_at(y), y, j=0, samples=2000, seed=0)
        x = result.point
        other = result.fiber[1]
        assert abs(evaluate(result.function, x) - 1.0) <= 1e-6
        assert abs(evaluate(result.function, other)) <= 1e-9

    def test_single_point_fiber(self):
        result = pullback_peak(PowerMap((1,)), _disc_peak_at_one(), [1.0])
        assert result.exponents == ()
        assert evaluate(result.function, [1.0]) == pytest.approx(1.0)

    def test_psi_must_peak_at_y(self):
        with pytest.raises(NotOnBoundary):
            pullback_peak(annulus_square(), _disc_peak_at_one(), [0.5])


class TestCfcProbe:
    """Test cases for the Caratheodory growth probe"""

    def test_symmetrized_bidisc_sequence(self):
        s = 1.0 - np.array([1e-1, 1e-2, 1e-3])
        sequence = [[2 * v, v ** 2] for v in s]
        report = cfc_probe(Symmetrization(2), [0.0, 0.0], sequence)
        assert report.increasing
        assert report.multiplicity == 2
        np.testing.assert_allclose([r.mobius for r in report.rows], s, atol=1e-6)
        assert report.rows[-1].poincare >= 3.5

    def test_needs_polydisc_source(self):
        with pytest.raises(ScopeViolation):
            cfc_probe(annulus_square(), [0.5], [[0.6]])

    def test_lattice_grid(self):
        assert lattice_grid(2, 64) == 64
        assert lattice_grid(6, 64) == 9
        assert lattice_grid(40, 64) == 4


class TestShilovReport:
    """Test cases for preimages of Shilov boundaries"""

    def test_symmetrization(self):
        points = [sym([1.0, 1j]), sym([0.5, 0.2]), sym([1.0, 0.5])]
        report = shilov_preimage_report(Symmetrization(2), points)
        assert [r.target_shilov for r in report.rows] == [True, False, False]
        assert report.all_agree

    def test_annulus(self):
        report = shilov_preimage_report(annulus_square(), [[0.25], [1j], [0.5]])
        assert [r.target_shilov for r in report.rows] == [True, True, False]
        assert [r.fiber_shilov for r in report.rows] == [True, True, False]
        assert report.all_agree

    def test_half_disc_out_of_scope(self):
        with pytest.raises(ScopeViolation):
            shilov_preimage_report(HalfDiscSquare(), [[0.5]])
