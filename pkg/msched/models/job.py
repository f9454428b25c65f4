"""Job and trace domain models"""
from bisect import bisect_right
from enum import Enum
from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr


def is_power_of_two(value: int) -> bool:
    """True for 1, 2, 4, ..."""
    return value >= 1 and value & (value - 1) == 0


class TraceMode(str, Enum):
    power_of_two = "p2"
    general = "gen"


class SizeMode(str, Enum):
    unit = "unit"
    weighted = "weighted"


class Job(BaseModel):
    """One arriving unit of work"""
    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=0)
    arrival: int = Field(..., ge=1)
    size: int = Field(1, ge=1)
    need: int = Field(..., ge=1)


class TraceViolation(BaseModel):
    """A broken job or trace rule"""
    job_id: Optional[int] = None
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        where = "trace" if self.job_id is None else f"job {self.job_id}"
        return f"{where}: {self.rule} {self.detail}".rstrip()


class Trace(BaseModel):
    """The full input: jobs, server count and modes"""
    jobs: List[Job] = Field(default_factory=list)
    K: int = Field(..., ge=1)
    mode: TraceMode = TraceMode.power_of_two
    size_mode: SizeMode = SizeMode.unit

    _by_slot: Dict[int, List[Job]] = PrivateAttr(default_factory=dict)
    _by_id: Dict[int, Job] = PrivateAttr(default_factory=dict)
    _slots: List[int] = PrivateAttr(default_factory=list)
    _indexed: int = PrivateAttr(default=-1)

    def _index(self) -> None:
        if self._indexed == len(self.jobs):
            return
        by_slot: Dict[int, List[Job]] = {}
        for job in self.jobs:
            by_slot.setdefault(job.arrival, []).append(job)
        self._by_slot = by_slot
        self._by_id = {job.id: job for job in self.jobs}
        self._slots = sorted(by_slot)
        self._indexed = len(self.jobs)

    def add_job(self, arrival: int, need: int, size: int = 1) -> Job:
        """Append a job, assigning the next id in trace order"""
        job = Job(id=len(self.jobs), arrival=arrival, size=size, need=need)
        self.jobs.append(job)
        return job

    def arrivals_at(self, slot: int) -> List[Job]:
        self._index()
        return self._by_slot.get(slot, [])

    def job(self, job_id: int) -> Optional[Job]:
        self._index()
        return self._by_id.get(job_id)

    def next_arrival_after(self, slot: int) -> Optional[int]:
        """First slot strictly after `slot` that has arrivals"""
        self._index()
        position = bisect_right(self._slots, slot)
        return self._slots[position] if position < len(self._slots) else None

    @property
    def last_arrival(self) -> int:
        self._index()
        return self._slots[-1] if self._slots else 0

    @property
    def total_work(self) -> int:
        return sum(job.size for job in self.jobs)

    @property
    def max_size(self) -> int:
        return max((job.size for job in self.jobs), default=1)

    def header(self) -> str:
        return f"# K={self.K} mode={self.mode.value} size={self.size_mode.value}"
