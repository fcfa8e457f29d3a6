"""
Global pytest configuration for peakkit
Provides common fixtures and test utilities
"""

import os

import numpy as np
import pytest

# Pin the environment-backed settings so a local .env cannot change test outcomes
os.environ.update({
    "PEAKKIT_LOG_LEVEL": "WARNING",
    "PEAKKIT_LOG_FORMAT": "console",
    "PEAKKIT_SEED": "0",
    "PEAKKIT_THREADS": "1",
})


@pytest.fixture(autouse=True)
def fresh_settings():
    """Drop the cached settings around every test"""
    from peakkit.shared.settings import get_settings
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def tolerances():
    """The default tolerance profile"""
    from peakkit.numerics.tolerance import DEFAULT_TOLERANCES
    return DEFAULT_TOLERANCES


@pytest.fixture
def rng():
    """Seeded generator for test-local randomness"""
    return np.random.default_rng(20240101)


@pytest.fixture
def json_file(tmp_path):
    """Write a JSON document to a temporary file and return its path"""
    import json

    def write(document, name="doc.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers automatically"""
    for item in items:
        # Add unit marker to all tests by default
        if not any(marker.name in ["integration", "slow"] for marker in item.iter_markers()):
            item.add_marker(pytest.mark.unit)
