"""
Unit tests for the symmetrized polydisc module

Tests cover the symmetrization map, both membership oracles, samplers, the
recursive peak construction and the Caratheodory lower bound.
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from peakkit.numerics.expressions import evaluate, evaluate_batch
from peakkit.numerics.polynomials import elementary_symmetric_batch, roots
from peakkit.shared.errors import NotInSet, NotOnBoundary, PoleHit
from peakkit.sympoly.caratheodory import carath_lb, chained_values, torus_grid
from peakkit.sympoly.geometry import (
    FracParams,
    MembershipKind,
    SymPoint,
    char_poly,
    classify,
    costara_classify,
    disc_grid,
    frac_map,
    is_distinguished,
    sample_boundary,
    sample_distinguished,
    sample_interior,
    sample_shell,
    sym,
)
from peakkit.sympoly.peak import construct_peak, peak_at

INTERIOR = MembershipKind.INTERIOR
BOUNDARY = MembershipKind.BOUNDARY
EXTERIOR = MembershipKind.EXTERIOR


def _random_lambdas(rng, count, n, max_modulus):
    r = rng.uniform(0.0, max_modulus, (count, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, (count, n)))


def _assert_peak(phi, a, n, count, seed, radius=0.1, value_tol=1e-6):
    """Sampled peak check: value 1 at a, strict bound inside, positive margin off B(a, radius)"""
    assert abs(evaluate(phi, a) - 1.0) <= value_tol
    pts = sample_interior(n, count, seed).points
    mods = np.abs(evaluate_batch(phi, pts))
    assert np.all(mods < 1.0)
    far = np.linalg.norm(pts - np.asarray(a)[None, :], axis=1) >= radius
    if far.any():
        assert np.max(mods[far]) < 1.0


class TestSymmetrization:
    """Test cases for sym and char_poly"""

    def test_sym_examples(self):
        np.testing.assert_allclose(sym([1, 1]), [2, 1])
        np.testing.assert_allclose(sym([1j, -1j]), [0, 1])
        np.testing.assert_allclose(sym([1, 1, 1]), [3, 3, 1])

    def test_char_poly_examples(self):
        # coefficients are stored low to high below the implicit leading 1
        np.testing.assert_allclose(char_poly([0, 1]).coeffs, [1, 0])
        np.testing.assert_allclose(char_poly([2, 1]).coeffs, [1, -2])
        np.testing.assert_allclose(char_poly([0, 0, 0]).coeffs, [0, 0, 0])

    def test_char_poly_vanishes_on_roots(self):
        lam = np.array([0.3, -0.5j, 0.9 + 0.1j])
        p = char_poly(sym(lam))
        np.testing.assert_allclose(p(lam), 0, atol=1e-14)

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        for n in range(1, 6):
            lam = _random_lambdas(rng, 200, n, 1.0)
            for row in elementary_symmetric_batch(lam):
                back = sym(roots(char_poly(row)))
                assert np.max(np.abs(back - row)) < 1e-8

    @pytest.mark.slow
    def test_round_trip_full(self):
        rng = np.random.default_rng(2)
        for n in range(1, 6):
            for row in sample_interior(n, 10_000 // 5, int(rng.integers(1 << 30))).points:
                assert np.max(np.abs(sym(roots(char_poly(row))) - row)) < 1e-8


class TestClassify:
    """Test cases for the root-based membership oracle"""

    def test_examples(self):
        c = classify([0, 0])
        assert c.kind == INTERIOR and c.max_root_modulus == pytest.approx(0.0, abs=1e-12)
        c = classify([2, 1])
        assert c.kind == BOUNDARY and c.max_root_modulus == pytest.approx(1.0, abs=1e-12)
        c = classify([3, 0])
        assert c.kind == EXTERIOR and c.max_root_modulus == pytest.approx(3.0)

    def test_sympoint_recomputes(self):
        p = SymPoint([0, 1])
        assert p.n == 2
        assert p.classify().kind == BOUNDARY

    def test_is_distinguished(self):
        assert is_distinguished([0, 1])
        assert is_distinguished([2, 1])
        assert not is_distinguished([1, 0])
        for z in sample_distinguished(3, 50, 4).points:
            assert is_distinguished(z)


class TestFracMap:
    """Test cases for the fractional maps"""

    @given(st.floats(-0.7, 0.7, allow_nan=False), st.floats(-0.7, 0.7, allow_nan=False))
    def test_boundary_fixed_point(self, re, im):
        """(2, 1) goes to 1 for every lambda away from -1"""
        lam = complex(re, im)
        np.testing.assert_allclose(frac_map(FracParams(2, lam), [2, 1]), [1.0])

    def test_lambda_zero(self):
        z = np.array([0.3, 0.6j, -0.9])
        np.testing.assert_allclose(frac_map(FracParams(3, 0.0), z), [2 * z[0] / 3, z[1] / 3])

    def test_unit_lambda(self):
        np.testing.assert_allclose(frac_map(FracParams(2, 1.0), [0, 1]), [1.0])

    def test_pole(self):
        with pytest.raises(PoleHit):
            frac_map(FracParams(2, -1.0), [2, 1])

    def test_params_validated(self):
        with pytest.raises(ValueError):
            FracParams(1, 0.0)
        with pytest.raises(ValueError):
            FracParams(2, 1.5)

    def test_membership_preserved(self):
        """Interior points stay out of the exterior under every grid fractional map"""
        grid = disc_grid(64)
        for n in (2, 3):
            for z in sample_interior(n, 100, 8).points:
                for lam in grid:
                    assert classify(frac_map(FracParams(n, lam), z)).kind != EXTERIOR


class TestCostara:
    """Test cases for the fractional-map membership cross-check"""

    def test_examples(self):
        assert costara_classify([0, 0]).kind == INTERIOR
        assert costara_classify([2, 1]).kind == BOUNDARY
        c = costara_classify([3, 0])
        assert c.kind == EXTERIOR
        assert c.pole_hit

    def test_grid_size_floor(self):
        with pytest.raises(ValueError):
            costara_classify([0, 0], grid_size=16)

    def test_boundary_samples_agree(self):
        for z in sample_boundary(3, 20, 6).points:
            assert costara_classify(z).kind == BOUNDARY

    @pytest.mark.parametrize("n,count", [(2, 800), (3, 150)])
    def test_oracle_agreement(self, n, count):
        rng = np.random.default_rng(100 + n)
        checked = 0
        for z in elementary_symmetric_batch(_random_lambdas(rng, count, n, 1.3)):
            truth = classify(z)
            if abs(truth.max_root_modulus - 1.0) < 1e-3:
                continue
            assert costara_classify(z).kind == truth.kind, z
            checked += 1
        assert checked > 0

    @pytest.mark.slow
    @pytest.mark.parametrize("n,count", [(2, 10_000), (3, 5_000)])
    def test_oracle_agreement_full(self, n, count):
        rng = np.random.default_rng(200 + n)
        for z in elementary_symmetric_batch(_random_lambdas(rng, count, n, 1.3)):
            truth = classify(z)
            if abs(truth.max_root_modulus - 1.0) >= 1e-3:
                assert costara_classify(z).kind == truth.kind, z


class TestSamplers:
    """Test cases for G_n samplers"""

    def test_boundary_samples_classify_boundary(self):
        for z in sample_boundary(2, 300, 3).points:
            assert classify(z).kind == BOUNDARY

    def test_interior_samples_classify_interior(self):
        for z in sample_interior(2, 300, 3).points:
            assert classify(z).kind == INTERIOR

    def test_shell_samples_are_interior(self):
        for z in sample_shell(3, 100, 3).points:
            assert classify(z).kind == INTERIOR

    def test_determinism(self):
        a = sample_boundary(3, 100, 17)
        assert np.array_equal(a.points, sample_boundary(3, 100, 17).points)
        assert np.array_equal(a.regenerate().points, a.points)


class TestPeakAt:
    """Test cases for the recursive peak construction"""

    def test_maximal_first_coordinate(self):
        phi = peak_at([2, 1])
        assert evaluate(phi, [2, 1]) == pytest.approx(1.0)
        z = np.array([0.3 - 0.2j, 0.1j])
        assert evaluate(phi, z) == pytest.approx(z[0] / 2)

    def test_unit_lambda_example(self):
        build = construct_peak([0, 1])
        assert build.lambdas == (1.0,)
        rng = np.random.default_rng(0)
        for z in sample_interior(2, 20, 1).points:
            assert evaluate(build.function, z) == pytest.approx((z[0] + 2 * z[1]) / (2 + z[0]), abs=1e-14)
        _assert_peak(build.function, [0, 1], 2, 10_000, int(rng.integers(1 << 30)))

    def test_one_dimensional(self):
        theta = 0.7
        phi = peak_at([np.exp(1j * theta)])
        assert evaluate(phi, [0.5]) == pytest.approx(np.exp(-1j * theta) * 0.5)

    def test_rejects_interior(self):
        with pytest.raises(NotOnBoundary):
            peak_at([0, 0])

    def test_value_tolerance_widens(self):
        build = construct_peak([0, 1])
        assert build.levels == 1
        assert build.value_tolerance > 1e-6

    @pytest.mark.parametrize("n,count", [(2, 4), (3, 2)])
    def test_random_boundary_points(self, n, count):
        for i, a in enumerate(sample_boundary(n, count, 31 + n).points):
            build = construct_peak(a)
            _assert_peak(build.function, a, n, 2_000, 500 + i, value_tol=build.value_tolerance)

    @pytest.mark.slow
    @pytest.mark.parametrize("n,count", [(2, 100), (3, 50)])
    def test_random_boundary_points_full(self, n, count):
        for i, a in enumerate(sample_boundary(n, count, 1000 + n).points):
            _assert_peak(peak_at(a), a, n, 10_000, 2000 + i)


class TestCaratheodory:
    """Test cases for the chained fractional-map lower bound"""

    def test_same_point(self):
        z = np.array([0.2, 0.05j])
        assert carath_lb(z, z).mobius == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("p", [0.3, 0.5j, -0.7 + 0.1j])
    def test_origin_pair(self, p):
        bound = carath_lb([0, 0], [0, p], grid=64)
        assert bound.mobius == pytest.approx(abs(p), abs=1e-12)
        assert bound.poincare == pytest.approx(np.arctanh(abs(p)), abs=1e-10)

    def test_symmetry(self):
        z, w = sample_interior(3, 2, 5).points
        assert carath_lb(z, w, grid=16).mobius == pytest.approx(carath_lb(w, z, grid=16).mobius, abs=1e-14)

    def test_grid_doubling_is_monotone(self):
        z, w = sample_interior(3, 2, 6).points
        previous = 0.0
        for grid in (4, 8, 16, 32):
            value = carath_lb(z, w, grid=grid).mobius
            assert value >= previous
            previous = value

    def test_torus_grid_nesting(self):
        coarse = {tuple(np.round(r, 12)) for r in torus_grid(2, 4)}
        fine = {tuple(np.round(r, 12)) for r in torus_grid(2, 8)}
        assert coarse <= fine

    def test_chained_maps_to_disc(self):
        pts = sample_interior(3, 50, 9).points
        lams = torus_grid(2, 8)
        for z in pts:
            assert np.all(np.abs(chained_values(lams, z)) < 1.0)

    def test_closed_form_on_diagonal(self):
        t = 1e-3
        w = [2 * (1 - t), (1 - t) ** 2]
        assert carath_lb([0, 0], w).mobius == pytest.approx(1 - t, abs=1e-12)

    def test_rejects_boundary(self):
        with pytest.raises(NotInSet):
            carath_lb([0, 0], [2, 1])
