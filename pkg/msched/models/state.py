"""Slot-level state and decision models"""
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List
from pydantic import BaseModel, Field

from msched.models.job import Job


class SlotClass(str, Enum):
    full = "full"
    relaxed = "relaxed"


class SystemState(BaseModel):
    """Remaining jobs R(t-) at the start of slot t, arrivals included"""
    slot: int = Field(1, ge=1)
    # job id -> remaining size, kept in id order
    remaining: Dict[int, int] = Field(default_factory=dict)
    held: Dict[int, Job] = Field(default_factory=dict)
    arrivals_seen: int = 0

    @property
    def n(self) -> int:
        return len(self.remaining)

    def jobs(self) -> List[Job]:
        return [self.held[job_id] for job_id in self.remaining]

    def volume(self) -> int:
        """Remaining work weighted by need"""
        return sum(size * self.held[job_id].need for job_id, size in self.remaining.items())

    def need_total(self) -> int:
        return sum(self.held[job_id].need for job_id in self.remaining)


class SlotDecision(BaseModel):
    """Jobs processed in one slot, split over the reserved and free banks"""
    reserved: FrozenSet[int] = frozenset()
    free: FrozenSet[int] = frozenset()
    reserved_need: int = 0
    free_need: int = 0

    @classmethod
    def of(cls, reserved: Iterable[Job] = (), free: Iterable[Job] = ()) -> "SlotDecision":
        reserved = list(reserved)
        free = list(free)
        return cls.model_construct(
            reserved=frozenset(job.id for job in reserved),
            free=frozenset(job.id for job in free),
            reserved_need=sum(job.need for job in reserved),
            free_need=sum(job.need for job in free),
        )

    @property
    def members(self) -> FrozenSet[int]:
        return self.reserved | self.free

    @property
    def occupancy(self) -> int:
        return self.reserved_need + self.free_need

    def is_empty(self) -> bool:
        return not self.reserved and not self.free
