"""Hand-built offline schedules that accompany the lower-bound inputs"""
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence
import logging

from msched.models.job import Job, Trace
from msched.models.oracle import ScriptedSchedule
from msched.models.state import SlotDecision, SystemState
from msched.services.adversary import AdversaryService
from msched.services.engine import EngineService
from msched.services.policies import PolicyService
from msched.utils.exceptions import ScenarioMismatch

logger = logging.getLogger(__name__)

Rule = Callable[[SystemState, int], SlotDecision]


class ScriptedScenario(str, Enum):
    sfa_lb = "sfa-lb"
    greedy_lb = "greedy-lb"
    sfa_gap = "sfa-gap"
    det_lb_drain = "det-lb-drain"
    det_lb_tail = "det-lb-tail"
    rand_lb_wait = "rand-lb-wait"
    rand_lb_immediate = "rand-lb-immediate"


def _by_priority(state: SystemState, K: int, first: Sequence[int]) -> SlotDecision:
    """Admit jobs whose need is listed in `first` ahead of the rest, earliest first, while they fit"""
    rank = {need: position for position, need in enumerate(first)}
    ordered = sorted(state.jobs(), key=lambda job: (rank.get(job.need, len(first)), job.arrival, job.id))
    admitted, used = [], 0
    for job in ordered:
        if used + job.need <= K:
            admitted.append(job)
            used += job.need
    return SlotDecision.of(admitted)


def _signature(jobs: Sequence[Job]) -> List[tuple]:
    return sorted((job.arrival, job.size, job.need) for job in jobs)


class ScriptedOfflineService:
    """Concrete offline schedules for each adversarial input"""

    @staticmethod
    def scripted_offline(scenario: str, trace: Trace, params: Optional[Dict[str, int]] = None) -> ScriptedSchedule:
        """Build the schedule, validate it and attach its flow bounds"""
        params = params or {}
        try:
            scenario = ScriptedScenario(scenario)
        except ValueError:
            raise ScenarioMismatch(f"Unknown scripted scenario '{scenario}'")
        K = trace.K
        bound: Optional[int] = None
        stated_bound: Optional[int] = None

        if scenario == ScriptedScenario.sfa_lb:
            T = ScriptedOfflineService._param(params, "T")
            ScriptedOfflineService._expect(trace, AdversaryService.sfa_lb_trace(K, T), scenario)
            rule: Rule = PolicyService.immediate_unit_select
            bound = stated_bound = K // 2 + 2 * T + 1

        elif scenario == ScriptedScenario.greedy_lb:
            L1 = ScriptedOfflineService._param(params, "L1")
            L2 = ScriptedOfflineService._param(params, "L2")
            ScriptedOfflineService._expect(trace, AdversaryService.greedy_lb_trace(K, L1, L2), scenario)
            rule = ScriptedOfflineService._greedy_lb_rule(L1)
            bound = 7 * L1 + 4 * L2
            stated_bound = 4 * L1 + 2 * L2

        elif scenario == ScriptedScenario.sfa_gap:
            T = ScriptedOfflineService._param(params, "T")
            ScriptedOfflineService._expect(trace, AdversaryService.sfa_gap_trace(K, T), scenario)
            rule = ScriptedOfflineService._pairing_rule(T)

        elif scenario in (ScriptedScenario.det_lb_drain, ScriptedScenario.det_lb_tail):
            T = ScriptedOfflineService._param(params, "T")
            ScriptedOfflineService._expect_needs(trace, {1, K // 2, K}, scenario)
            if scenario == ScriptedScenario.det_lb_drain:
                rule = PolicyService.theta_t_select
            else:
                rule = PolicyService.immediate_unit_select
                batches = len({job.arrival for job in trace.jobs if job.need == 1})
                bound = batches * (K // 2) + T * (batches + 1)
                stated_bound = T + 1 + K // 2

        else:
            # the session variant appends need-K/2 pairs after T
            ScriptedOfflineService._expect_needs(trace, {1, K // 2, K}, scenario)
            if scenario == ScriptedScenario.rand_lb_wait:
                rule = PolicyService.theta_t_select
            else:
                rule = PolicyService.immediate_unit_select

        schedule, per_slot_count = ScriptedOfflineService._play(trace, rule)
        check = EngineService.check_schedule(trace, schedule)
        if not check.feasible:
            raise ScenarioMismatch(f"Scripted {scenario.value} schedule is infeasible at slot "
                                   f"{check.first_bad_slot}: {check.reason}")
        logger.info(f"Scripted {scenario.value}: flow={check.flow_total} bound={bound} stated={stated_bound}")
        return ScriptedSchedule(
            scenario=scenario.value,
            schedule=schedule,
            flow=check.flow_total,
            bound=bound,
            stated_bound=stated_bound,
            per_slot_count=per_slot_count,
        )

    # ==================== RULES ====================

    @staticmethod
    def _greedy_lb_rule(L1: int) -> Rule:
        """Need-K jobs in odd slots, quarter jobs in even slots, half jobs once the pairs phase starts"""
        def rule(state: SystemState, K: int) -> SlotDecision:
            if state.slot <= 2 * L1:
                first = [K] if state.slot % 2 else [K // 4]
            else:
                first = [K // 2]
            return _by_priority(state, K, first)
        return rule

    @staticmethod
    def _pairing_rule(T: int) -> Rule:
        """Clear two unit batches together every fourth slot, need-K jobs otherwise"""
        def rule(state: SystemState, K: int) -> SlotDecision:
            if state.slot > T or state.slot % 4 == 3:
                return _by_priority(state, K, [1])
            return _by_priority(state, K, [K])
        return rule

    # ==================== HELPERS ====================

    @staticmethod
    def _play(trace: Trace, rule: Rule):
        schedule: List[SlotDecision] = []
        per_slot_count: List[int] = []
        state = EngineService.initial_state(trace)
        while state.remaining or trace.next_arrival_after(state.slot - 1) is not None:
            decision = rule(state, trace.K)
            schedule.append(decision)
            per_slot_count.append(state.n)
            state, _ = EngineService.advance_slot(state, decision, trace)
        return schedule, per_slot_count

    @staticmethod
    def _param(params: Dict[str, int], name: str) -> int:
        if name not in params:
            raise ScenarioMismatch(f"Scripted schedule needs parameter {name}")
        return int(params[name])

    @staticmethod
    def _expect(trace: Trace, expected: Trace, scenario: ScriptedScenario) -> None:
        if _signature(trace.jobs) != _signature(expected.jobs):
            raise ScenarioMismatch(f"Trace does not have the {scenario.value} shape")

    @staticmethod
    def _expect_needs(trace: Trace, needs: set, scenario: ScriptedScenario) -> None:
        stray = {job.need for job in trace.jobs} - needs
        if stray or any(job.size != 1 for job in trace.jobs):
            raise ScenarioMismatch(f"Trace does not have the {scenario.value} shape: needs {sorted(stray)}")
