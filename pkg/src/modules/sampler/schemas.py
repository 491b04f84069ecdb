"""Pydantic schemas for the sampler module."""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import settings
from src.modules.geometry.schemas import PlanePoint


class RunConfig(BaseModel):
    """Monte Carlo run parameters.

    ``epsilon`` is the capture distance as a fraction of the domain diameter.
    Output is a pure function of the domain and this config, worker_count included.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default_factory=lambda: settings.SEED, ge=0, lt=2**64)
    epsilon: float = Field(default_factory=lambda: settings.EPSILON)
    max_events: int = Field(default_factory=lambda: settings.MAX_EVENTS, ge=1)
    max_steps: int = Field(default_factory=lambda: settings.MAX_STEPS, ge=1)
    path_count: int = Field(default_factory=lambda: settings.PATHS, ge=1)
    worker_count: int = Field(default_factory=lambda: settings.WORKERS, ge=1)

    @field_validator("epsilon")
    @classmethod
    def _epsilon_range(cls, value: float) -> float:
        if not 1e-9 < value < 1e-2:
            raise ValueError(f"epsilon must lie in (1e-9, 1e-2), got {value}")
        return value


class TrajectorySummary(BaseModel):
    """Component hits of one ERBM path; the last hit is 0 unless truncated."""

    model_config = ConfigDict(frozen=True)

    trace: Tuple[int, ...]
    exit_t: Optional[float] = None
    exit_point: Optional[PlanePoint] = None
    events: int
    truncated: bool = False

    @model_validator(mode="after")
    def _ends_outside(self) -> "TrajectorySummary":
        if not self.truncated and (not self.trace or self.trace[-1] != 0):
            raise ValueError("a completed trajectory ends on the outer component")
        return self


class EmpiricalDistribution(BaseModel):
    """Histogram of exit parameters on ∂A₀."""

    model_config = ConfigDict(frozen=True)

    edges: Tuple[float, ...]
    counts: Tuple[int, ...]
    total: int

    @model_validator(mode="after")
    def _consistent(self) -> "EmpiricalDistribution":
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError("edges must have one more entry than counts")
        if sum(self.counts) != self.total:
            raise ValueError("counts must sum to total")
        return self

    @property
    def frequencies(self) -> Tuple[float, ...]:
        return tuple(c / self.total for c in self.counts) if self.total else tuple(0.0 for _ in self.counts)


class ExitReport(BaseModel):
    """Empirical exit distribution against deterministic bin masses."""

    model_config = ConfigDict(frozen=True)

    distribution: EmpiricalDistribution
    reference: Tuple[float, ...]
    total_variation: float
    truncated: int
    paths: int


class ChainEstimate(BaseModel):
    """Empirical q̂ and p̃̂ with entrywise standard errors."""

    model_config = ConfigDict(frozen=True)

    q: Tuple[Tuple[float, ...], ...]
    p_tilde: Tuple[Tuple[float, ...], ...]
    q_stderr: Tuple[Tuple[float, ...], ...]
    p_stderr: Tuple[Tuple[float, ...], ...]
    excursions: int


class OccupationEstimate(BaseModel):
    """Mean occupation density over a small target disk."""

    model_config = ConfigDict(frozen=True)

    value: float
    stderr: float
    paths: int
    truncated: int = 0
