"""Slot engine: arrival and departure accounting, flow time, schedule validation"""
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from msched.models.job import Job, SizeMode, Trace, TraceMode, TraceViolation, is_power_of_two
from msched.models.oracle import ScheduleCheck
from msched.models.state import SlotClass, SlotDecision, SystemState
from msched.utils.exceptions import CapacityExceeded, UnknownJob

logger = logging.getLogger(__name__)


class EngineService:
    """Mechanics shared by every policy, adversary and solver"""

    # ==================== TRACES ====================

    @staticmethod
    def validate_trace(trace: Trace) -> List[TraceViolation]:
        """Check every job and trace rule; an empty list means the trace is valid"""
        violations: List[TraceViolation] = []
        power_of_two = trace.mode == TraceMode.power_of_two

        if power_of_two and not is_power_of_two(trace.K):
            violations.append(TraceViolation(rule="k_not_power_of_two", detail=f"K={trace.K}"))

        seen = set()
        for job in trace.jobs:
            if job.id in seen:
                violations.append(TraceViolation(job_id=job.id, rule="duplicate_id"))
            seen.add(job.id)
            if job.arrival < 1:
                violations.append(TraceViolation(job_id=job.id, rule="arrival_before_slot_one",
                                                 detail=f"arrival={job.arrival}"))
            if job.size < 1:
                violations.append(TraceViolation(job_id=job.id, rule="size_below_one",
                                                 detail=f"size={job.size}"))
            if trace.size_mode == SizeMode.unit and job.size != 1:
                violations.append(TraceViolation(job_id=job.id, rule="size_not_unit",
                                                 detail=f"size={job.size}"))
            if job.need < 1:
                violations.append(TraceViolation(job_id=job.id, rule="need_below_one",
                                                 detail=f"need={job.need}"))
            elif job.need > trace.K:
                violations.append(TraceViolation(job_id=job.id, rule="need_above_k",
                                                 detail=f"need={job.need} K={trace.K}"))
            if power_of_two and not is_power_of_two(job.need):
                violations.append(TraceViolation(job_id=job.id, rule="need_not_power_of_two",
                                                 detail=f"need={job.need}"))
        return violations

    @staticmethod
    def initial_state(trace: Trace) -> SystemState:
        """R(1-): the jobs arriving in slot 1"""
        arrivals = trace.arrivals_at(1)
        return SystemState.model_construct(
            slot=1,
            remaining={job.id: job.size for job in sorted(arrivals, key=lambda j: j.id)},
            held={job.id: job for job in arrivals},
            arrivals_seen=len(arrivals),
        )

    # ==================== SLOTS ====================

    @staticmethod
    def advance_slot(
        state: SystemState,
        decision: SlotDecision,
        trace: Trace,
        K: Optional[int] = None,
        banks: int = 1,
    ) -> Tuple[SystemState, Dict[int, int]]:
        """Serve one slot and return R((t+1)-) together with this slot's departures"""
        K = trace.K if K is None else K

        for job_id in decision.members:
            if job_id not in state.remaining:
                raise UnknownJob(f"Job {job_id} is not held at slot {state.slot}")
        if decision.reserved & decision.free:
            raise CapacityExceeded(f"Jobs {sorted(decision.reserved & decision.free)} placed on both banks")

        reserved_need = sum(state.held[job_id].need for job_id in decision.reserved)
        if reserved_need > K:
            raise CapacityExceeded(f"Reserved bank needs {reserved_need} servers at slot {state.slot}, K={K}")
        if decision.free:
            if banks < 2:
                raise CapacityExceeded(f"Free bank used at slot {state.slot} with a single bank")
            free_need = sum(state.held[job_id].need for job_id in decision.free)
            if free_need > K:
                raise CapacityExceeded(f"Free bank needs {free_need} servers at slot {state.slot}, K={K}")

        remaining = dict(state.remaining)
        held = dict(state.held)
        departures: Dict[int, int] = {}
        for job_id in decision.members:
            remaining[job_id] -= 1
            if remaining[job_id] == 0:
                del remaining[job_id]
                del held[job_id]
                departures[job_id] = state.slot

        next_slot = state.slot + 1
        arrivals = trace.arrivals_at(next_slot)
        for job in arrivals:
            remaining[job.id] = job.size
            held[job.id] = job

        next_state = SystemState.model_construct(
            slot=next_slot,
            remaining=dict(sorted(remaining.items())),
            held=held,
            arrivals_seen=state.arrivals_seen + len(arrivals),
        )
        return next_state, departures

    @staticmethod
    def classify_slot(decision: SlotDecision, K: int) -> SlotClass:
        """Full iff the reserved bank is completely occupied"""
        return SlotClass.full if decision.reserved_need == K else SlotClass.relaxed

    @staticmethod
    def flow_time(job: Job, departure: int) -> int:
        """A job served only in its arrival slot has flow time 1"""
        return departure - job.arrival + 1

    # ==================== SCHEDULES ====================

    @staticmethod
    def check_schedule(
        trace: Trace,
        schedule: Sequence[SlotDecision],
        banks: int = 1,
        K: Optional[int] = None,
    ) -> ScheduleCheck:
        """Independently validate a schedule indexed from slot 1"""
        K = trace.K if K is None else K
        served: Dict[int, int] = {}
        departures: Dict[int, int] = {}

        def infeasible(slot: int, reason: str) -> ScheduleCheck:
            logger.debug(f"Schedule infeasible at slot {slot}: {reason}")
            return ScheduleCheck(feasible=False, first_bad_slot=slot, reason=reason)

        for slot, decision in enumerate(schedule, start=1):
            if decision.reserved & decision.free:
                return infeasible(slot, "job placed on both banks")
            if decision.free and banks < 2:
                return infeasible(slot, "free bank used with a single bank")
            for bank_name, bank in (("reserved", decision.reserved), ("free", decision.free)):
                need = 0
                for job_id in bank:
                    job = trace.job(job_id)
                    if job is None:
                        return infeasible(slot, f"unknown job {job_id}")
                    need += job.need
                if need > K:
                    return infeasible(slot, f"{bank_name} bank needs {need} > K={K}")
            for job_id in sorted(decision.members):
                job = trace.job(job_id)
                if job.arrival > slot:
                    return infeasible(slot, f"job {job_id} served before its arrival slot {job.arrival}")
                if job_id in departures:
                    return infeasible(slot, f"job {job_id} served after completion")
                served[job_id] = served.get(job_id, 0) + 1
                if served[job_id] == job.size:
                    departures[job_id] = slot

        for job in trace.jobs:
            if job.id not in departures:
                return infeasible(
                    len(schedule) + 1,
                    f"job {job.id} received {served.get(job.id, 0)} of {job.size} service slots",
                )

        flow_total = sum(EngineService.flow_time(trace.job(job_id), slot) for job_id, slot in departures.items())
        return ScheduleCheck(feasible=True, flow_total=flow_total, departures=departures)

    @staticmethod
    def replay(
        trace: Trace,
        schedule: Sequence[SlotDecision],
        banks: int = 2,
        K: Optional[int] = None,
    ) -> List[SystemState]:
        """States R(t-) for t = 1..len(schedule) under a given schedule"""
        states: List[SystemState] = []
        state = EngineService.initial_state(trace)
        for decision in schedule:
            states.append(state)
            state, _ = EngineService.advance_slot(state, decision, trace, K=K, banks=banks)
        return states
