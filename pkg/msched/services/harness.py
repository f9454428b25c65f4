"""Simulation driver and competitive ratios"""
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Union
import logging

from msched.models.job import SizeMode, Trace, TraceMode, is_power_of_two
from msched.models.oracle import OracleResult
from msched.models.run import MonitorReport, RunResult
from msched.models.state import SlotDecision, SystemState
from msched.services.engine import EngineService
from msched.services.oracle import OracleService
from msched.services.policies import PolicySpec, get_policy
from msched.utils.exceptions import AppException, PolicyModeMismatch

logger = logging.getLogger(__name__)

Monitor = Callable[[RunResult], MonitorReport]
SlotHook = Callable[[SystemState, SlotDecision, Trace], None]


class HarnessService:
    """Runs policies slot by slot and compares them against the optimum"""

    @staticmethod
    def resolve(policy: Union[str, PolicySpec]) -> PolicySpec:
        return get_policy(policy) if isinstance(policy, str) else policy

    @staticmethod
    def check_mode(trace: Trace, spec: PolicySpec) -> None:
        """Raise PolicyModeMismatch when the policy cannot run this trace"""
        if spec.power_of_two:
            if trace.mode != TraceMode.power_of_two:
                raise PolicyModeMismatch(f"Policy {spec.name} needs a power-of-two trace, got mode={trace.mode.value}")
            odd = [job.id for job in trace.jobs if not is_power_of_two(job.need)]
            if odd:
                raise PolicyModeMismatch(f"Policy {spec.name} needs power-of-two needs; jobs {odd[:5]} are not")
        if spec.unit_only:
            if trace.size_mode == SizeMode.weighted or any(job.size != 1 for job in trace.jobs):
                raise PolicyModeMismatch(f"Policy {spec.name} runs unit-size traces only")

    @staticmethod
    def simulate(
        trace: Trace,
        policy: Union[str, PolicySpec],
        K: Optional[int] = None,
        banks: Optional[int] = None,
        monitors: Sequence[Monitor] = (),
        hook: Optional[SlotHook] = None,
    ) -> RunResult:
        """Run a policy until no job remains and nothing else will arrive"""
        spec = HarnessService.resolve(policy)
        HarnessService.check_mode(trace, spec)
        K = trace.K if K is None else K
        banks = spec.banks if banks is None else banks

        run = RunResult(policy=spec.name, K=K, banks=banks)
        departures: Dict[int, int] = {}
        state = EngineService.initial_state(trace)
        # hooks may append jobs, so the stall limit follows the job count
        known_jobs, stall_limit = -1, 0

        while state.remaining or trace.next_arrival_after(state.slot - 1) is not None:
            if len(trace.jobs) != known_jobs:
                known_jobs = len(trace.jobs)
                stall_limit = trace.last_arrival + trace.total_work + 1
            if state.slot > stall_limit:
                raise AppException(f"Policy {spec.name} stalled at slot {state.slot} with {state.n} jobs held")
            decision = spec.select(state, K)
            if hook is not None:
                hook(state, decision, trace)
            run.per_slot_count.append(state.n)
            run.per_slot_need.append(decision.occupancy)
            run.slot_class.append(EngineService.classify_slot(decision, K))
            run.schedule.append(decision)
            state, done = EngineService.advance_slot(state, decision, trace, K=K, banks=banks)
            departures.update(done)

        run.departures = departures
        run.job_count = len(trace.jobs)
        run.flow_total = sum(EngineService.flow_time(trace.job(job_id), slot) for job_id, slot in departures.items())
        logger.debug(f"Simulated {spec.name} on {run.job_count} jobs: flow={run.flow_total}, slots={run.slots}")

        for monitor in monitors:
            report = monitor(run)
            if not report.holds:
                logger.warning(f"Monitor {report.name} violated at slot {report.first_violation_slot}: {report.details}")
            run.monitor_reports.append(report)
        return run

    @staticmethod
    def competitive_ratio(
        trace: Trace,
        policy: Union[str, PolicySpec],
        K: Optional[int] = None,
        banks: Optional[int] = None,
        oracle: Optional[OracleResult] = None,
        force: bool = False,
    ) -> Fraction:
        """F_policy / F_OPT as an exact fraction; OPT always gets K servers"""
        run = HarnessService.simulate(trace, policy, K=K, banks=banks)
        oracle = oracle or OracleService.opt_flow_time(trace, K=K, force=force)
        if oracle.opt_flow == 0:
            return Fraction(1)
        return Fraction(run.flow_total, oracle.opt_flow)
