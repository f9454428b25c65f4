"""Adaptive adversary session models"""
from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, Field

from msched.models.job import Trace
from msched.models.run import RunResult


class SessionPhase(str, Enum):
    main = "main"
    drain = "drain"
    tail = "tail"


class SlotVerdict(str, Enum):
    full = "full"
    wasted = "wasted"


class TranscriptEntry(BaseModel):
    slot: int
    phase: SessionPhase
    arrivals: List[int] = Field(default_factory=list)
    verdict: Optional[SlotVerdict] = None


class AdaptiveSession(BaseModel):
    """Adversary bookkeeping while it plays against a policy"""
    K: int
    T: int
    L: int = 0
    t1: int = 0
    phase: SessionPhase = SessionPhase.main
    transcript: List[TranscriptEntry] = Field(default_factory=list)

    def entry(self, slot: int) -> Optional[TranscriptEntry]:
        if 1 <= slot <= len(self.transcript):
            return self.transcript[slot - 1]
        return None


class AdaptiveOutcome(BaseModel):
    """Realized trace plus the run that shaped it"""
    trace: Trace
    run: RunResult
    t1: int
    session: AdaptiveSession
