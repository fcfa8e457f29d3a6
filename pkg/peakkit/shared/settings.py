"""
Runtime configuration for peakkit

Values come from the environment (prefix ``PEAKKIT_``) or an optional ``.env``
file in the working directory, loaded through python-dotenv by
pydantic-settings. Everything has a desk-scale default so the toolkit runs
with no configuration at all.

Example:
    PEAKKIT_INTERIOR_SAMPLES=2000 PEAKKIT_LOG_FORMAT=console peakkit peak ...
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class PeakKitSettings(BaseSettings):
    """Environment-backed defaults for sampling, tolerances and logging"""

    model_config = SettingsConfigDict(
        env_prefix="PEAKKIT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Logging
    log_level: str = Field("WARNING", description="stdlib level name for the root logger")
    log_format: str = Field("json", description="'json' or 'console'")

    # Verification protocol
    interior_samples: int = Field(10_000, ge=1)
    boundary_samples: int = Field(1_000, ge=1)
    neighborhood_radius: float = Field(0.1, gt=0)
    probe_radius: float = Field(1e-3, gt=0)
    continuity_tol: float = Field(1e-2, gt=0)
    seed: int = Field(0, ge=0)
    threads: int = Field(1, ge=1)
    chunk_size: int = Field(2_048, ge=1)

    # Tolerance profile defaults
    root_converge: float = Field(1e-12, gt=0)
    boundary_band: float = Field(1e-8, gt=0)
    peak_value_tol: float = Field(1e-6, gt=0)
    lp_feas_tol: float = Field(1e-9, gt=0)
    max_iterations: int = Field(200, ge=1)

    # Construction knobs
    lambda_grid_size: int = Field(64, ge=64)
    circle_search_points: int = Field(256, ge=8)
    carath_grid: int = Field(64, ge=4)
    laurent_radius: float = Field(0.25, gt=0)
    laurent_depth: float = Field(3.0, gt=0)
    bishop_terms: int = Field(6, ge=1)
    diameter_inflation: float = Field(1.01, ge=1.0)


@lru_cache()
def get_settings() -> PeakKitSettings:
    """Get cached settings instance"""
    return PeakKitSettings()
