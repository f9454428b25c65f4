"""Experiment and verification schemas"""
from enum import Enum
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field, field_validator


class ExperimentScenario(str, Enum):
    rate_k16 = "rate-k16"
    rate_k32 = "rate-k32"
    k_sweep = "k-sweep"
    spike = "spike"
    rand_lb = "rand-lb"
    rand_lb_theta = "rand-lb-theta"


class ExperimentConfig(BaseModel):
    """One experiment grid: K values x parameters x policies"""
    scenario: ExperimentScenario
    policies: List[str]
    k_values: List[int]
    # arrival rates for the rate presets, spike probabilities for spike;
    # rand-lb derives p = 1/K and ignores this
    params: List[float] = Field(default_factory=list)
    # arrivals per slot when params holds spike probabilities
    arrival_rate: float = Field(5.0, gt=0)
    trials: int = Field(200, ge=1)
    seed_base: int = 0
    horizon: int = Field(100, ge=1)
    workers: int = Field(1, ge=1)
    # reference per-job flow values keyed "K|param|policy"
    reference_values: Dict[str, float] = Field(default_factory=dict)

    @field_validator("k_values")
    @classmethod
    def validate_k_values(cls, v):
        if not v:
            raise ValueError("at least one K is required")
        for k in v:
            if k < 2 or k & (k - 1):
                raise ValueError(f"K={k} is not a power of two >= 2")
        return v


class ExperimentRow(BaseModel):
    """Mean per-job flow time for one grid cell"""
    scenario: str
    K: int
    param: str
    policy: str
    trials: int = Field(..., ge=1)
    mean_per_job_flow: float
    seed_base: int = 0
    reference_value: Optional[float] = None
    flow_ratio: Optional[float] = None


class VerificationSummary(BaseModel):
    """Aggregate verdict of a sweep over many instances"""
    name: str
    instances: int = 0
    violations: int = 0
    inconclusive: int = 0
    max_ratio: Optional[float] = None
    counterexample: Optional[Dict[str, Any]] = None

    @property
    def holds(self) -> bool:
        return self.violations == 0
