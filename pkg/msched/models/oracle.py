"""Exact solver and scripted schedule models"""
from typing import Dict, List, Optional
from pydantic import BaseModel, Field

from msched.models.state import SlotDecision


class ScheduleCheck(BaseModel):
    """Result of validating a schedule against a trace"""
    feasible: bool
    flow_total: int = 0
    departures: Dict[int, int] = Field(default_factory=dict)
    first_bad_slot: Optional[int] = None
    reason: Optional[str] = None


class OracleResult(BaseModel):
    """Offline optimum and a witness schedule achieving it"""
    opt_flow: int
    # servers the witness was solved for
    K: Optional[int] = None
    witness: List[SlotDecision] = Field(default_factory=list)
    per_slot_remaining: List[int] = Field(default_factory=list)
    per_slot_volume: List[int] = Field(default_factory=list)
    nodes_explored: int = 0

    def remaining_at(self, slot: int) -> int:
        """n_OPT(t); zero once the witness has finished"""
        if 1 <= slot <= len(self.per_slot_remaining):
            return self.per_slot_remaining[slot - 1]
        return 0

    def volume_at(self, slot: int) -> int:
        """V_OPT(t); zero once the witness has finished"""
        if 1 <= slot <= len(self.per_slot_volume):
            return self.per_slot_volume[slot - 1]
        return 0


class ScriptedSchedule(BaseModel):
    """A hand-built offline schedule and its flow bounds"""
    scenario: str
    schedule: List[SlotDecision] = Field(default_factory=list)
    flow: int
    bound: Optional[int] = None
    stated_bound: Optional[int] = None
    per_slot_count: List[int] = Field(default_factory=list)
