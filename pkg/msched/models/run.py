"""Run result and monitor report models"""
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field, model_validator

from msched.models.state import SlotClass, SlotDecision


class MonitorReport(BaseModel):
    """Verdict of one runtime monitor"""
    name: str
    holds: bool
    first_violation_slot: Optional[int] = None
    details: Optional[str] = None
    context: Dict[str, Any] = Field(default_factory=dict)
    digest: Optional[str] = None
    inconclusive: bool = False
    checked: int = 0

    @model_validator(mode="after")
    def violation_is_located(self) -> "MonitorReport":
        if not self.holds and self.first_violation_slot is None:
            raise ValueError("a failed monitor must name its first violating slot")
        return self

    def to_line(self) -> str:
        slot = "" if self.first_violation_slot is None else str(self.first_violation_slot)
        return f"{self.name},{str(self.holds).lower()},{slot}"


class RunResult(BaseModel):
    """Outcome of simulating one policy on one trace"""
    policy: str
    K: int
    banks: int = 1
    job_count: int = 0
    departures: Dict[int, int] = Field(default_factory=dict)
    flow_total: int = 0
    # per-slot sequences, index t - 1
    per_slot_count: List[int] = Field(default_factory=list)
    per_slot_need: List[int] = Field(default_factory=list)
    slot_class: List[SlotClass] = Field(default_factory=list)
    schedule: List[SlotDecision] = Field(default_factory=list)
    monitor_reports: List[MonitorReport] = Field(default_factory=list)

    @property
    def slots(self) -> int:
        return len(self.schedule)

    @property
    def mean_flow(self) -> float:
        return self.flow_total / self.job_count if self.job_count else 0.0

    def cumulative_departures(self, horizon: Optional[int] = None) -> List[int]:
        """r_t: jobs departed by the end of slot t, for t = 1..horizon"""
        horizon = self.slots if horizon is None else horizon
        per_slot = [0] * (horizon + 1)
        for slot in self.departures.values():
            if slot <= horizon:
                per_slot[slot] += 1
        totals, running = [], 0
        for slot in range(1, horizon + 1):
            running += per_slot[slot]
            totals.append(running)
        return totals

    def all_monitors_hold(self) -> bool:
        return all(report.holds for report in self.monitor_reports)
