"""
Numerical tolerance profile threaded through every construction
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from peakkit.shared.settings import get_settings


class ToleranceProfile(BaseModel):
    """Tolerances for root finding, boundary classification, peak values and LPs"""

    model_config = ConfigDict(frozen=True)

    root_converge: float = Field(1e-12, gt=0, description="Relative residual bound for roots")
    boundary_band: float = Field(1e-8, gt=0, description="Half-width of the Boundary band")
    peak_value_tol: float = Field(1e-6, gt=0, description="Allowed |f(a) - 1|")
    lp_feas_tol: float = Field(1e-9, gt=0, description="Slack treated as active / pole guard")
    max_iterations: int = Field(200, ge=1, description="Root iteration budget")

    @model_validator(mode="after")
    def check_ordering(self) -> "ToleranceProfile":
        """Enforce root_converge < boundary_band < peak_value_tol"""
        if not self.root_converge < self.boundary_band < self.peak_value_tol:
            raise ValueError(
                "tolerances must satisfy root_converge < boundary_band < peak_value_tol, "
                f"got {self.root_converge}, {self.boundary_band}, {self.peak_value_tol}"
            )
        return self

    @classmethod
    def from_settings(cls) -> "ToleranceProfile":
        """Build the profile from PEAKKIT_* settings"""
        s = get_settings()
        return cls(
            root_converge=s.root_converge,
            boundary_band=s.boundary_band,
            peak_value_tol=s.peak_value_tol,
            lp_feas_tol=s.lp_feas_tol,
            max_iterations=s.max_iterations,
        )

    def widened(self, levels: int) -> float:
        """Peak value tolerance after `levels` recursion steps, one band per level"""
        return self.peak_value_tol + levels * self.boundary_band


DEFAULT_TOLERANCES = ToleranceProfile()
