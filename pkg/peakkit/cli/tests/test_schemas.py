"""
Unit tests for the JSON documents accepted by the command line
"""

import numpy as np
import pytest

from peakkit.cli.schemas import (
    ConvexSpec,
    ReinhardtSpec,
    SymmetrizedPolydiscSpec,
    load_domain,
    load_function,
    load_map,
    parse_domain,
    parse_function,
    parse_map,
    parse_point,
    read_json,
)
from peakkit.numerics.expressions import ExpInvLog, evaluate, fingerprint
from peakkit.shared.errors import InputError, SpecValidationError
from peakkit.shared.settings import get_settings
from peakkit.sympoly.peak import peak_at
from peakkit.transfer.maps import Composition, PowerMap, Symmetrization


class TestDomainSpecs:
    """Test cases for domain documents"""

    def test_symmetrized(self, json_file):
        spec = load_domain(json_file({"type": "symmetrized_polydisc", "n": 3}))
        assert isinstance(spec, SymmetrizedPolydiscSpec)
        assert spec.region().describe() == {"family": "symmetrized_polydisc", "n": 3}

    def test_dimension_cap(self):
        with pytest.raises(SpecValidationError) as info:
            parse_domain({"type": "symmetrized_polydisc", "n": 13})
        assert info.value.field_path == "n"

    def test_reinhardt_builds(self):
        spec = parse_domain({"type": "reinhardt", "name": "bidisc_box",
                             "pieces": [{"A": [[1, 0], [0, 1]], "b": [0, 0]}], "meets_axes": [True, True]})
        assert isinstance(spec, ReinhardtSpec)
        domain = spec.build()
        assert domain.n == 2
        assert domain.name == "bidisc_box"

    @pytest.mark.parametrize("document,path", [
        ({"type": "reinhardt", "pieces": [{"A": [[1.0, "x"]], "b": [0.0]}], "meets_axes": [False, False]},
         "pieces.0.A.0.1"),
        ({"type": "reinhardt", "pieces": [{"A": [[1.0, 0.0]], "b": [0.0, 1.0]}], "meets_axes": [False, False]},
         "pieces.0"),
        ({"type": "reinhardt", "pieces": [{"A": [[1.0, 0.0]], "b": [0.0]}], "meets_axes": [False]},
         "<document>"),
        ({"type": "hexagon"}, "type"),
        ({"n": 2}, "type"),
    ])
    def test_error_paths(self, document, path):
        with pytest.raises(SpecValidationError) as info:
            parse_domain(document)
        assert info.value.field_path == path

    def test_convex_ball(self):
        spec = parse_domain({"type": "convex", "complex_dim": 1, "rows": [{"nu": [-1.0, 0.0], "c": 0.0}],
                             "ball": {"center": [0.0, 0.0], "radius": 1.0}})
        assert isinstance(spec, ConvexSpec)
        body = spec.build()
        np.testing.assert_array_equal(body.slack(np.array([[0.5], [-0.5]])) > 0, [True, False])

    def test_convex_needs_rows_or_ball(self):
        with pytest.raises(SpecValidationError):
            parse_domain({"type": "convex", "complex_dim": 1})

    def test_json_syntax(self, json_file, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"type": \n\n  ]', encoding="utf-8")
        with pytest.raises(SpecValidationError, match="line 3"):
            read_json(path)
        with pytest.raises(InputError):
            read_json(tmp_path / "missing.json")


class TestMapSpecs:
    """Test cases for proper-map descriptors"""

    def test_symmetrization(self):
        assert isinstance(parse_map({"map": "symmetrization", "n": 2}), Symmetrization)

    def test_composition(self):
        F = parse_map({"map": "composition", "maps": [{"map": "power", "exponents": [2]},
                                                      {"map": "power", "exponents": [3]}]})
        assert isinstance(F, Composition)

    def test_power_exponents_positive(self):
        with pytest.raises(SpecValidationError) as info:
            parse_map({"map": "power", "exponents": [0]})
        assert info.value.field_path == "exponents"

    def test_nested_error_path(self):
        with pytest.raises(SpecValidationError) as info:
            parse_map({"map": "composition", "maps": [{"map": "symmetrization", "n": "two"}]})
        assert info.value.field_path == "maps.0.n"

    def test_load_from_file(self, json_file):
        F = load_map(json_file({"map": "symmetrization", "n": 3}, "sym3.json"))
        assert F.describe() == {"map": "symmetrization", "n": 3}
        f = load_function(json_file({"construct": "peak_at", "point": [[2.0, 0.0], [1.0, 0.0]]}, "phi.json"))
        assert evaluate(f, [2.0, 1.0]) == pytest.approx(1.0)

    def test_describe_round_trip(self):
        F = PowerMap((2, 1))
        assert parse_map(F.describe()).describe() == F.describe()


class TestFunctions:
    """Test cases for function documents"""

    def test_tree(self):
        f = peak_at([2.0, 1.0])
        assert fingerprint(parse_function(f.describe())) == fingerprint(f)

    def test_peak_at_recipe(self):
        f = parse_function({"construct": "peak_at", "point": ["2", "1"]})
        assert evaluate(f, [2.0, 1.0]) == pytest.approx(1.0)

    def test_weak_peak_recipe(self):
        f = parse_function({"construct": "weak_peak", "point": [[1.0, 0.0]],
                            "domain": {"type": "convex", "complex_dim": 1,
                                       "ball": {"center": [0.0, 0.0], "radius": 1.0}}})
        assert isinstance(f, ExpInvLog)

    def test_weak_peak_needs_domain(self):
        with pytest.raises(SpecValidationError):
            parse_function({"construct": "weak_peak", "point": [1.0]})

    def test_malformed_tree(self):
        with pytest.raises(SpecValidationError) as info:
            parse_function({"node": "Sum"})
        assert info.value.field_path == "node"

    def test_not_an_object(self):
        with pytest.raises(SpecValidationError):
            parse_function([1, 2])


class TestPoints:
    """Test cases for point parsing"""

    def test_forms(self):
        z = parse_point(["0.5+0.5i", [1.0, -2.0], 3, " 1j "])
        np.testing.assert_array_equal(z, [0.5 + 0.5j, 1 - 2j, 3, 1j])

    def test_repr_strings(self, rng):
        z = rng.normal(size=8) + 1j * rng.normal(size=8)
        np.testing.assert_array_equal(parse_point([repr(complex(v)) for v in z]), z)

    @pytest.mark.parametrize("bad", [["abc"], [[1.0, 2.0, 3.0]]])
    def test_rejects(self, bad):
        with pytest.raises(InputError):
            parse_point(bad)


class TestSettings:
    """Test cases for environment-backed settings"""

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("PEAKKIT_INTERIOR_SAMPLES", "123")
        get_settings.cache_clear()
        assert get_settings().interior_samples == 123

    def test_defaults(self, tolerances):
        settings = get_settings()
        assert settings.neighborhood_radius == 0.1
        assert tolerances.peak_value_tol == settings.peak_value_tol
