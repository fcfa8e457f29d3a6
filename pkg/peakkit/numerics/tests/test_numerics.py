"""
Unit tests for the numerics substrate

Covers root finding, Mobius geometry, expression-tree evaluation, tolerance
profiles and deterministic sampling. mpmath serves as the independent
high-precision oracle for closed-form values.
"""

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from peakkit.numerics.expressions import (
    AffinePairing,
    Compose,
    Constant,
    Coordinate,
    DiscAutomorphism,
    ExpInvLog,
    FractionalMap,
    LinearScale,
    MobiusAtom,
    Monomial,
    Power,
    Product,
    Stack,
    Sum,
    SymCompose,
    evaluate,
    evaluate_batch,
    fingerprint,
    from_description,
    identity,
)
from peakkit.numerics.mobius import mobius_distance, mobius_distance_batch, poincare_from_mobius
from peakkit.numerics.polynomials import ComplexPoly, elementary_symmetric, roots, sort_roots
from peakkit.numerics.sampling import SampleStrategy, sample_annulus, sample_half_disc, sample_polydisc
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import BranchViolation, DomainViolation, PoleHit

finite = dict(allow_nan=False, allow_infinity=False)


def _random_monic(rng, degree):
    r = np.sqrt(rng.uniform(0, 1, degree))
    return ComplexPoly(r * np.exp(2j * np.pi * rng.uniform(0, 1, degree)))


class TestRoots:
    """Test cases for the simultaneous root iteration"""

    def test_double_root(self):
        """(t - 1)^2 has the double root 1"""
        r = roots(ComplexPoly([1.0, -2.0]))
        np.testing.assert_allclose(r, [1.0, 1.0], atol=1e-8)

    def test_triple_zero(self):
        """t^3 has 0 with multiplicity three"""
        r = roots(ComplexPoly([0.0, 0.0, 0.0]))
        assert r.size == 3
        assert np.max(np.abs(r)) < 1e-8

    def test_imaginary_pair(self):
        """t^2 + 1 has roots i and -i, sorted by argument"""
        r = roots(ComplexPoly([1.0, 0.0]))
        np.testing.assert_allclose(r, [-1j, 1j], atol=1e-12)

    def test_linear(self):
        r = roots(ComplexPoly([-0.25 + 0.5j]))
        assert r[0] == pytest.approx(0.25 - 0.5j)

    def test_residual_bound(self):
        """Every returned root meets the residual contract"""
        rng = np.random.default_rng(7)
        for degree in range(1, 9):
            p = _random_monic(rng, degree)
            r = roots(p)
            bound = DEFAULT_TOLERANCES.root_converge * (1.0 + p.max_coeff)
            assert r.size == degree
            assert np.max(np.abs(p(r))) <= bound

    def test_round_trip_coefficients(self):
        """Rebuilding the polynomial from its roots reproduces the coefficients"""
        rng = np.random.default_rng(11)
        for _ in range(300):
            p = _random_monic(rng, int(rng.integers(1, 9)))
            rebuilt = ComplexPoly.from_roots(roots(p))
            assert np.max(np.abs(rebuilt.coeffs - p.coeffs)) < 1e-8

    @pytest.mark.slow
    def test_round_trip_coefficients_full(self):
        rng = np.random.default_rng(12)
        for _ in range(10_000):
            p = _random_monic(rng, int(rng.integers(1, 9)))
            rebuilt = ComplexPoly.from_roots(roots(p))
            assert np.max(np.abs(rebuilt.coeffs - p.coeffs)) < 1e-8

    def test_determinism(self):
        """Identical input and seed give bit-identical roots"""
        p = ComplexPoly([0.3 - 0.1j, 0.2j, -0.7])
        assert np.array_equal(roots(p, seed=3), roots(p, seed=3))

    def test_sort_order(self):
        r = sort_roots(np.array([0.5, 1j, -1.0, 1.0]))
        np.testing.assert_allclose(r, [1.0, 1j, -1.0, 0.5], atol=1e-15)

    def test_elementary_symmetric_examples(self):
        np.testing.assert_allclose(elementary_symmetric([1, 1]), [2, 1])
        np.testing.assert_allclose(elementary_symmetric([1j, -1j]), [0, 1])
        np.testing.assert_allclose(elementary_symmetric([1, 1, 1]), [3, 3, 1])


class TestMobius:
    """Test cases for the pseudo-hyperbolic distance"""

    def test_examples(self):
        assert mobius_distance(0, 0.3 + 0.4j) == pytest.approx(0.5)
        assert mobius_distance(0.2j, 0.2j) == 0.0
        assert mobius_distance(0.5, -0.5) == pytest.approx(0.8)

    def test_outside_disc(self):
        with pytest.raises(DomainViolation):
            mobius_distance(1.0, 0.0)

    def test_batch_marks_outside_as_nan(self):
        d = mobius_distance_batch(np.array([0.0, 1.5]), np.array([0.5, 0.0]))
        assert d[0] == pytest.approx(0.5)
        assert np.isnan(d[1])

    @given(st.floats(-0.7, 0.7, **finite), st.floats(-0.7, 0.7, **finite),
           st.floats(-0.7, 0.7, **finite), st.floats(-0.7, 0.7, **finite))
    def test_symmetry(self, ar, ai, br, bi):
        a, b = complex(ar, ai), complex(br, bi)
        assert mobius_distance(a, b) == pytest.approx(mobius_distance(b, a), abs=1e-14)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(5)
        count = 10_000
        pts = np.sqrt(rng.uniform(0, 1, (3, count))) * np.exp(2j * np.pi * rng.uniform(0, 1, (3, count)))
        a, b, c = pts * 0.999
        lhs = mobius_distance_batch(a, c)
        rhs = mobius_distance_batch(a, b) + mobius_distance_batch(b, c)
        assert np.all(lhs <= rhs + 1e-12)

    def test_poincare_scale(self):
        assert poincare_from_mobius(0.0) == 0.0
        assert poincare_from_mobius(np.tanh(2.0)) == pytest.approx(2.0)
        with pytest.raises(DomainViolation):
            poincare_from_mobius(1.0)


class TestExpressions:
    """Test cases for expression-tree evaluation"""

    def test_monomial_product(self):
        assert evaluate(Monomial(1, (1, 1)), [2, 3j]) == pytest.approx(6j, abs=1e-12)

    def test_monomial_negative_exponent(self):
        f = Monomial(1, (-1, 1))
        assert evaluate(f, [2, 1]) == pytest.approx(0.5)
        with pytest.raises(DomainViolation):
            evaluate(f, [0, 1])

    def test_monomial_vanishing_coordinate(self):
        assert evaluate(Monomial(2, (2, 0)), [0, 5]) == 0

    def test_compose_with_identity(self):
        z = [0.1 + 0.2j, -0.3j, 0.5]
        assert evaluate(Compose(Coordinate(1), identity(3)), z) == pytest.approx(z[0])

    def test_exp_inv_log_against_mpmath(self):
        """w = -1, d = 2 gives exp(1 / (ln(1/2) + i pi))"""
        f = ExpInvLog(Constant(-1.0), 2.0)
        value = evaluate(f, [0.0, 0.0])
        mpmath.mp.dps = 40
        oracle = mpmath.exp(1 / mpmath.log(mpmath.mpc(-0.5, 0)))
        assert value == pytest.approx(complex(oracle), abs=1e-13)
        assert abs(value) == pytest.approx(0.9352, abs=1e-4)

    def test_exp_inv_log_branch(self):
        with pytest.raises(BranchViolation):
            evaluate(ExpInvLog(Constant(0.5), 2.0), [0.0])
        with pytest.raises(BranchViolation):
            evaluate(ExpInvLog(Constant(1j), 2.0), [0.0])

    def test_exp_inv_log_apex(self):
        # the peak point itself takes the limit value
        assert evaluate(ExpInvLog(Coordinate(1), 2.0), [0.0]) == 1.0
        near = abs(evaluate(ExpInvLog(Coordinate(1), 2.0), [-1e-12]))
        assert 0.9 < near < 1.0

    def test_fractional_map(self):
        f = FractionalMap(2, 1.0)
        np.testing.assert_allclose(evaluate(f, [0, 1]), [1.0])
        np.testing.assert_allclose(evaluate(FractionalMap(3, 0.0), [3, 6, 1]), [2, 2])

    def test_fractional_map_pole(self):
        with pytest.raises(PoleHit):
            evaluate(FractionalMap(2, -1.0), [2, 1])

    def test_mobius_atom_normalizes(self):
        f = MobiusAtom(2j)
        assert evaluate(f, [1j]) == pytest.approx(1.0)

    def test_disc_automorphism(self):
        f = DiscAutomorphism(0.5, Coordinate(1))
        assert evaluate(f, [0.5]) == pytest.approx(0.0)
        assert abs(evaluate(f, [1j])) == pytest.approx(1.0)
        with pytest.raises(DomainViolation):
            DiscAutomorphism(1.0, Coordinate(1))

    def test_affine_pairing(self):
        f = AffinePairing((1.0, 1j), (1.0, 0.0))
        # (z1 - 1) + (z2) * conj(i)
        assert evaluate(f, [0.0, 1j]) == pytest.approx(-1.0 + 1.0)

    def test_sym_compose(self):
        f = SymCompose(2, (Coordinate(1), Coordinate(2)))
        np.testing.assert_allclose(evaluate(f, [1, 1]), [2, 1])

    def test_arithmetic_nodes(self):
        z = [0.5, -0.25]
        f = Sum((Product((Coordinate(1), Coordinate(2))), Power(Coordinate(1), 3), LinearScale(2, Constant(1))))
        assert evaluate(f, z) == pytest.approx(-0.125 + 0.125 + 2)
        np.testing.assert_allclose(evaluate(Stack((Coordinate(2), Coordinate(1))), z), [-0.25, 0.5])

    def test_batch_matches_single(self):
        rng = np.random.default_rng(3)
        Z = 0.5 * (rng.uniform(-1, 1, (50, 2)) + 1j * rng.uniform(-1, 1, (50, 2)))
        f = Compose(MobiusAtom(1.0), FractionalMap(2, 1j))
        batch = evaluate_batch(f, Z)
        single = np.array([evaluate(f, z) for z in Z])
        np.testing.assert_allclose(batch, single, rtol=0, atol=1e-15)

    def test_error_names_row(self):
        Z = np.array([[0.1, 0.0], [-0.5, 0.0]])
        with pytest.raises(BranchViolation) as excinfo:
            evaluate_batch(ExpInvLog(Coordinate(1), 2.0), Z)
        assert excinfo.value.row == 0

    def test_fingerprint(self):
        f = Compose(MobiusAtom(1.0), FractionalMap(2, 1.0))
        g = Compose(MobiusAtom(1.0), FractionalMap(2, 1.0))
        h = Compose(MobiusAtom(1.0), FractionalMap(2, -1j))
        assert fingerprint(f) == fingerprint(g)
        assert fingerprint(f) != fingerprint(h)
        assert len(fingerprint(f)) == 64

    def test_from_description_rebuilds(self):
        trees = [
            Compose(MobiusAtom(1j), FractionalMap(3, 0.5 - 0.5j)),
            ExpInvLog(AffinePairing((1.0, 0.0), (1.0, 0.0)), 2.0),
            Sum((Product((Power(Coordinate(2), 3), Monomial(2.0, (1, -1), 0.5))), Constant(0.25j))),
            Stack((DiscAutomorphism(0.3, Coordinate(1)), LinearScale(-1.0, Coordinate(2)))),
            SymCompose(2, (Coordinate(1), Coordinate(2))),
        ]
        for f in trees:
            g = from_description(f.describe())
            assert fingerprint(g) == fingerprint(f)

    def test_fractional_map_keeps_pole_tolerance(self):
        loose = FractionalMap(2, 1.0, pole_tol=1e-3)
        rebuilt = from_description(loose.describe())
        assert rebuilt.pole_tol == 1e-3
        assert fingerprint(rebuilt) == fingerprint(loose)
        assert fingerprint(loose) != fingerprint(FractionalMap(2, 1.0))
        with pytest.raises(PoleHit):
            evaluate(rebuilt, [-2.0 + 1e-4, 0.0])

    def test_from_description_unknown_node(self):
        with pytest.raises(ValueError):
            from_description({"node": "Blaschke"})

    def test_depth(self):
        assert Coordinate(1).depth() == 1
        assert Compose(MobiusAtom(1.0), FractionalMap(2, 1.0)).depth() == 2


class TestToleranceProfile:
    """Test cases for tolerance validation"""

    def test_defaults(self):
        tol = ToleranceProfile()
        assert tol.root_converge < tol.boundary_band < tol.peak_value_tol

    def test_ordering_enforced(self):
        with pytest.raises(ValidationError):
            ToleranceProfile(boundary_band=1e-5, peak_value_tol=1e-6)

    def test_positive(self):
        with pytest.raises(ValidationError):
            ToleranceProfile(lp_feas_tol=0.0)

    def test_widened(self):
        tol = ToleranceProfile()
        assert tol.widened(3) == pytest.approx(1e-6 + 3e-8)

    def test_frozen(self):
        with pytest.raises(ValidationError):
            DEFAULT_TOLERANCES.boundary_band = 1.0


class TestSampling:
    """Test cases for deterministic samplers"""

    @pytest.mark.parametrize("strategy", list(SampleStrategy))
    def test_polydisc_determinism(self, strategy):
        a = sample_polydisc(3, 500, 42, strategy)
        b = sample_polydisc(3, 500, 42, strategy)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.regenerate().points, a.points)

    def test_polydisc_regions(self):
        interior = sample_polydisc(2, 1000, 1).points
        assert np.all(np.abs(interior) < 1)
        boundary = sample_polydisc(2, 1000, 1, SampleStrategy.BOUNDARY).points
        np.testing.assert_allclose(np.abs(boundary[:, 0]), 1.0)
        shell = sample_polydisc(2, 1000, 1, SampleStrategy.ANNULAR_SHELL).points
        assert np.all((np.abs(shell) >= 0.99 - 1e-15) & (np.abs(shell) < 1))

    def test_annulus(self):
        s = sample_annulus(0.5, 1.0, 1000, 9)
        mods = np.abs(s.points[:, 0])
        assert s.points.shape == (1000, 1)
        assert np.all((mods > 0.5) & (mods < 1.0))
        b = sample_annulus(0.5, 1.0, 100, 9, SampleStrategy.BOUNDARY)
        np.testing.assert_allclose(np.abs(b.points[:50, 0]), 0.5)
        np.testing.assert_allclose(np.abs(b.points[50:, 0]), 1.0)

    def test_half_disc(self):
        s = sample_half_disc(400, 2)
        assert np.all(s.points.real > 0)
        assert np.all(np.abs(s.points) < 1)
        assert np.array_equal(s.regenerate().points, s.points)

    def test_different_seeds_differ(self):
        assert not np.array_equal(sample_polydisc(2, 10, 0).points, sample_polydisc(2, 10, 1).points)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=1, max_value=50), st.integers(min_value=0, max_value=2 ** 31))
    def test_count_honoured(self, count, seed):
        assert sample_polydisc(2, count, seed).count == count
