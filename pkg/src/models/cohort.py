"""Synthetic cohort specification models."""

from pydantic import BaseModel, Field, model_validator

from src.models.telemetry import Group, Task


class ClassSignature(BaseModel):
    """Class-conditional perturbations superimposed on base handwriting.

    Amplitudes are in tablet units per second (velocity) or pressure units; all of them
    are multiplied by ``CohortSpec.amplitude``, so amplitude 0 makes groups identical.
    """

    model_config = {"frozen": True}

    pd_tremor_amplitude: float = Field(default=6.0, ge=0)
    pd_tremor_band_hz: tuple[float, float] = (4.0, 6.0)
    pdm_tremor_amplitude: float = Field(default=6.0, ge=0)
    pdm_tremor_band_hz: tuple[float, float] = (2.0, 4.0)
    ad_pressure_walk_std: float = Field(default=0.02, ge=0)
    ad_speed_reduction: float = Field(default=0.35, ge=0, lt=1)


DEFAULT_GROUP_COUNTS: dict[Group, int] = {
    Group.CTL: 42,
    Group.PD: 35,
    Group.PDM: 15,
    Group.AD: 21,
}


class CohortSpec(BaseModel):
    """Size, timing and signature settings of a synthetic cohort."""

    model_config = {"frozen": True}

    group_counts: dict[Group, int] = Field(default_factory=lambda: dict(DEFAULT_GROUP_COUNTS))
    tasks: list[Task] = Field(default_factory=lambda: list(Task))
    duration_s: tuple[float, float] = (10.0, 60.0)
    sample_rate_hz: float = Field(default=250.0, gt=0)
    amplitude: float = Field(default=1.0, ge=0)
    signature: ClassSignature = Field(default_factory=ClassSignature)
    seed: int = 0

    @model_validator(mode="after")
    def check_ranges(self) -> "CohortSpec":
        """Counts non-negative, durations long enough for two samples."""
        if any(count < 0 for count in self.group_counts.values()):
            raise ValueError("group counts must be >= 0")
        low, high = self.duration_s
        if low > high:
            raise ValueError("duration range is reversed")
        if low * self.sample_rate_hz < 2:
            raise ValueError("durations must cover at least two samples")
        if not self.tasks:
            raise ValueError("at least one task is required")
        return self

    @property
    def n_subjects(self) -> int:
        return sum(self.group_counts.values())
