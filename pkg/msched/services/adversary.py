"""Input constructors: fixed lower-bound traces, adaptive and randomized adversaries, stochastic load"""
from enum import Enum
from typing import Optional, Union
import logging

import numpy as np

from msched.core.config import settings
from msched.models.adversary import (
    AdaptiveOutcome, AdaptiveSession, SessionPhase, SlotVerdict, TranscriptEntry,
)
from msched.models.job import Trace, is_power_of_two
from msched.models.state import SlotDecision, SystemState
from msched.services.harness import HarnessService
from msched.services.policies import PolicySpec
from msched.utils.exceptions import UnclassifiableSlot, ValidationError

logger = logging.getLogger(__name__)


class NeedDistribution(str, Enum):
    uniform = "uniform"
    spike = "spike"


def _require_power_of_two(K: int, minimum: int = 2) -> None:
    if not is_power_of_two(K) or K < minimum:
        raise ValidationError(f"K={K} must be a power of two >= {minimum}")


class AdversaryService:
    """Every input construction used by the lower bounds and the experiments"""

    # ==================== FIXED TRACES ====================

    @staticmethod
    def sfa_lb_trace(K: int, T: int) -> Trace:
        """K/2 unit-need jobs at slot 1 and one need-K job in each slot 1..T"""
        _require_power_of_two(K)
        if T < 1:
            raise ValidationError("T must be at least 1")
        trace = Trace(K=K)
        for _ in range(K // 2):
            trace.add_job(arrival=1, need=1)
        for slot in range(1, T + 1):
            trace.add_job(arrival=slot, need=K)
        return trace

    @staticmethod
    def sfa_gap_trace(K: int, T: int) -> Trace:
        """K/2 unit-need jobs at every odd slot and two need-K jobs at every slot up to T"""
        _require_power_of_two(K)
        if T < 1 or T % 2 == 0:
            raise ValidationError(f"T={T} must be odd")
        trace = Trace(K=K)
        for slot in range(1, T + 1):
            if slot % 2 == 1:
                for _ in range(K // 2):
                    trace.add_job(arrival=slot, need=1)
            trace.add_job(arrival=slot, need=K)
            trace.add_job(arrival=slot, need=K)
        return trace

    @staticmethod
    def greedy_lb_trace(K: int, L1: int, L2: int) -> Trace:
        """Need-K plus quarter jobs in a first phase, then pairs of half jobs"""
        _require_power_of_two(K, minimum=8)
        if L1 < 1 or L2 < 0:
            raise ValidationError("L1 must be at least 1 and L2 non-negative")
        trace = Trace(K=K)
        for step in range(L1):
            trace.add_job(arrival=2 * step + 1, need=K)
            trace.add_job(arrival=2 * step + 1, need=K // 4)
            trace.add_job(arrival=2 * step + 1, need=K // 4)
            trace.add_job(arrival=2 * step + 2, need=K // 4)
            trace.add_job(arrival=2 * step + 2, need=K // 4)
        for step in range(L2):
            trace.add_job(arrival=2 * L1 + step, need=K // 2)
            trace.add_job(arrival=2 * L1 + step, need=K // 2)
        return trace

    # ==================== ADAPTIVE ====================

    @staticmethod
    def adaptive_det_lb(
        policy: Union[str, PolicySpec],
        K: int,
        T: int,
        L: int,
        strict: bool = False,
    ) -> AdaptiveOutcome:
        """Play the deterministic lower-bound adversary against a policy"""
        _require_power_of_two(K)
        if T < 1 or L < 0:
            raise ValidationError("T must be at least 1 and L non-negative")
        trace = Trace(K=K)
        trace.add_job(arrival=1, need=K)
        for _ in range(K // 2):
            trace.add_job(arrival=1, need=1)
        session = AdaptiveSession(K=K, T=T, L=L)

        def hook(state: SystemState, decision: SlotDecision, current: Trace) -> None:
            slot = state.slot
            arrivals = [job.id for job in current.arrivals_at(slot)]
            if slot > T:
                session.transcript.append(TranscriptEntry(slot=slot, phase=session.phase, arrivals=arrivals))
                return

            verdict = AdversaryService.classify(decision, state, K, strict)
            if verdict == SlotVerdict.wasted:
                session.t1 += 1
            session.transcript.append(
                TranscriptEntry(slot=slot, phase=SessionPhase.main, arrivals=arrivals, verdict=verdict)
            )

            if slot < T:
                if verdict == SlotVerdict.wasted:
                    for _ in range(K // 2):
                        current.add_job(arrival=slot + 1, need=1)
                current.add_job(arrival=slot + 1, need=K)
                logger.debug(f"Slot {slot} {verdict.value}: injected arrivals for slot {slot + 1}")
                return

            if session.t1 >= T ** settings.DRAIN_THRESHOLD_EXPONENT:
                session.phase = SessionPhase.drain
                gap = (session.t1 + 1) // 2
                for step in range(1, L + 1):
                    current.add_job(arrival=T + gap + step, need=K // 2)
                    current.add_job(arrival=T + gap + step, need=K // 2)
            else:
                session.phase = SessionPhase.tail
            logger.info(f"Adversary main phase over: t1={session.t1}, branch={session.phase.value}")

        run = HarnessService.simulate(trace, policy, hook=hook)
        return AdaptiveOutcome(trace=trace, run=run, t1=session.t1, session=session)

    @staticmethod
    def classify(decision: SlotDecision, state: SystemState, K: int, strict: bool = False) -> SlotVerdict:
        """Full when a need-K job runs, wasted otherwise"""
        needs = [state.held[job_id].need for job_id in decision.members]
        if K in needs:
            return SlotVerdict.full
        if strict and not (len(needs) == K // 2 and all(need == 1 for need in needs)):
            raise UnclassifiableSlot(f"Slot {state.slot} runs needs {sorted(needs)}: neither full nor wasted")
        return SlotVerdict.wasted

    # ==================== RANDOMIZED ====================

    @staticmethod
    def rand_lb_trace(K: int, T: int, p: Optional[float] = None, seed: int = 0) -> Trace:
        """Per slot: with probability p a unit-need batch of K/2, always one need-K job"""
        _require_power_of_two(K)
        p = 1 / K if p is None else p
        if not 0 <= p <= 1:
            raise ValidationError(f"p={p} must lie in [0, 1]")
        rng = np.random.default_rng(seed)
        draws = rng.random(T)
        trace = Trace(K=K)
        for slot in range(1, T + 1):
            if draws[slot - 1] < p:
                for _ in range(K // 2):
                    trace.add_job(arrival=slot, need=1)
            trace.add_job(arrival=slot, need=K)
        return trace

    @staticmethod
    def rand_lb_session(
        policy: Union[str, PolicySpec],
        K: int,
        T: int,
        p: Optional[float] = None,
        L: int = 0,
        seed: int = 0,
    ) -> AdaptiveOutcome:
        """Randomized input up to T, then a quiet gap and L slots of need-K/2 pairs"""
        trace = AdversaryService.rand_lb_trace(K, T, p, seed)
        session = AdaptiveSession(K=K, T=T, L=L)

        def hook(state: SystemState, decision: SlotDecision, current: Trace) -> None:
            slot = state.slot
            if slot > T:
                return
            needs = [state.held[job_id].need for job_id in decision.members]
            unit_only = bool(needs) and all(need == 1 for need in needs)
            if unit_only:
                session.t1 += 1
            session.transcript.append(TranscriptEntry(
                slot=slot,
                phase=SessionPhase.main,
                arrivals=[job.id for job in current.arrivals_at(slot)],
                verdict=SlotVerdict.wasted if unit_only else SlotVerdict.full,
            ))
            if slot == T and L:
                session.phase = SessionPhase.drain
                gap = (session.t1 + 1) // 2
                for step in range(1, L + 1):
                    current.add_job(arrival=T + gap + step, need=K // 2)
                    current.add_job(arrival=T + gap + step, need=K // 2)

        run = HarnessService.simulate(trace, policy, hook=hook)
        return AdaptiveOutcome(trace=trace, run=run, t1=session.t1, session=session)

    # ==================== STOCHASTIC ====================

    @staticmethod
    def stochastic_trace(
        K: int,
        arr: float,
        horizon: int,
        need_dist: NeedDistribution = NeedDistribution.uniform,
        seed: int = 0,
        p: Optional[float] = None,
    ) -> Trace:
        """round(arr * horizon) unit-size jobs at i.i.d. uniform slots in [1, horizon]"""
        _require_power_of_two(K)
        if horizon < 1 or arr < 0:
            raise ValidationError("horizon must be at least 1 and arr non-negative")
        need_dist = NeedDistribution(need_dist)
        rng = np.random.default_rng(seed)
        count = int(round(arr * horizon))
        arrivals = rng.integers(1, horizon + 1, size=count)

        exponents = int(K).bit_length() - 1
        if need_dist == NeedDistribution.uniform:
            needs = 2 ** rng.integers(0, exponents + 1, size=count)
        else:
            if p is None or not 0 <= p <= 1:
                raise ValidationError("spike distribution needs p in [0, 1]")
            spike = rng.random(count) < p
            smaller = 2 ** rng.integers(0, exponents, size=count)
            needs = np.where(spike, K, smaller)

        order = np.argsort(arrivals, kind="stable")
        trace = Trace(K=K)
        for index in order:
            trace.add_job(arrival=int(arrivals[index]), need=int(needs[index]))
        return trace
