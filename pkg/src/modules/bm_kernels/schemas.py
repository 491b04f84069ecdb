"""Pydantic schemas for the bm_kernels module."""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi


class BoundaryPoint(BaseModel):
    """Point γ_k(t) on boundary component k (0 = outer curve)."""

    model_config = ConfigDict(frozen=True)

    component: int = Field(ge=0)
    t: float

    @field_validator("t")
    @classmethod
    def _wrap(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("boundary parameter must be finite")
        return value % TWO_PI


class BoundaryArc(BaseModel):
    """Parameter interval [t0, t1] on one component, traversed counterclockwise.

    t1 may exceed 2π (the arc wraps through t = 0); 0 < t1 − t0 ≤ 2π.
    """

    model_config = ConfigDict(frozen=True)

    component: int = Field(ge=0)
    t0: float
    t1: float

    @model_validator(mode="after")
    def _ordered(self) -> "BoundaryArc":
        length = self.t1 - self.t0
        if not (math.isfinite(length) and 0.0 < length <= TWO_PI + 1e-12):
            raise ValueError(f"arc needs 0 < t1 - t0 <= 2π, got {length}")
        return self

    @property
    def length(self) -> float:
        return min(self.t1 - self.t0, TWO_PI)

    @property
    def whole(self) -> bool:
        return self.length >= TWO_PI - 1e-12

    @classmethod
    def component_arc(cls, component: int) -> "BoundaryArc":
        return cls(component=component, t0=0.0, t1=TWO_PI)
