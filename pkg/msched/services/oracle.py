"""Exact offline optimum for small instances"""
from typing import Dict, List, Optional, Tuple
import logging

from msched.core.config import settings
from msched.models.job import Job, Trace
from msched.models.oracle import OracleResult
from msched.models.state import SlotDecision
from msched.services.engine import EngineService
from msched.utils.exceptions import TooLarge

logger = logging.getLogger(__name__)

# (need, remaining size) -> count, as a sorted tuple
ClassKey = Tuple[int, int]
Canonical = Tuple[Tuple[ClassKey, int], ...]
Choice = Tuple[int, ...]


def _canonical(counts: Dict[ClassKey, int]) -> Canonical:
    return tuple(sorted((key, count) for key, count in counts.items() if count))


def _add_arrivals(counts: Dict[ClassKey, int], arrivals: List[Job]) -> None:
    for job in arrivals:
        key = (job.need, job.size)
        counts[key] = counts.get(key, 0) + 1


def _maximal_choices(classes: Canonical, K: int) -> List[Choice]:
    """Per-class service counts that fit in K and admit no further job"""
    choices: List[Choice] = []
    current: List[int] = []

    def extend(index: int, free: int) -> None:
        if index == len(classes):
            # maximal: every class with jobs left over is too big for the free servers
            if all(used == count or need > free
                   for ((need, _), count), used in zip(classes, current)):
                choices.append(tuple(current))
            return
        (need, _), count = classes[index]
        top = min(count, free // need)
        for served in range(top, -1, -1):
            current.append(served)
            extend(index + 1, free - served * need)
            current.pop()

    extend(0, K)
    return choices


def _apply(classes: Canonical, choice: Choice) -> Dict[ClassKey, int]:
    counts: Dict[ClassKey, int] = {}
    for ((need, remaining), count), served in zip(classes, choice):
        if count - served:
            counts[(need, remaining)] = counts.get((need, remaining), 0) + count - served
        if served and remaining > 1:
            counts[(need, remaining - 1)] = counts.get((need, remaining - 1), 0) + served
    return counts


class OracleService:
    """Offline optimal flow time by memoized search over canonical states"""

    @staticmethod
    def makespan_bound(trace: Trace, K: Optional[int] = None) -> int:
        """Last arrival plus total work; every optimal schedule is done by then"""
        if not trace.jobs:
            return 0
        return max(job.arrival for job in trace.jobs) + trace.total_work

    @staticmethod
    def check_size(trace: Trace) -> None:
        """Raise TooLarge when the instance is past the solver's size guideline"""
        if all(job.size == 1 for job in trace.jobs):
            if len(trace.jobs) > settings.ORACLE_MAX_UNIT_JOBS:
                raise TooLarge(f"{len(trace.jobs)} unit jobs exceeds the limit of {settings.ORACLE_MAX_UNIT_JOBS}")
            return
        if len(trace.jobs) > settings.ORACLE_MAX_WEIGHTED_JOBS or trace.total_work > settings.ORACLE_MAX_WEIGHTED_WORK:
            raise TooLarge(
                f"{len(trace.jobs)} weighted jobs with total work {trace.total_work} exceeds the limits "
                f"of {settings.ORACLE_MAX_WEIGHTED_JOBS} jobs and {settings.ORACLE_MAX_WEIGHTED_WORK} work"
            )

    @staticmethod
    def opt_flow_time(
        trace: Trace,
        K: Optional[int] = None,
        force: bool = False,
        node_budget: Optional[int] = None,
    ) -> OracleResult:
        """Minimum total flow time with an earliest-first witness schedule"""
        K = trace.K if K is None else K
        node_budget = settings.ORACLE_NODE_BUDGET if node_budget is None else node_budget
        if not force:
            OracleService.check_size(trace)
        if not trace.jobs:
            return OracleResult(opt_flow=0, K=K)

        horizon = trace.last_arrival + 1
        memo: Dict[Tuple[int, Canonical], Tuple[int, Optional[Choice]]] = {}
        nodes = 0

        def solve(slot: int, classes: Canonical) -> int:
            nonlocal nodes
            if not classes:
                upcoming = trace.next_arrival_after(slot - 1)
                if upcoming is None:
                    return 0
                counts: Dict[ClassKey, int] = {}
                _add_arrivals(counts, trace.arrivals_at(upcoming))
                return solve(upcoming, _canonical(counts))

            key = (min(slot, horizon), classes)
            if key in memo:
                return memo[key][0]
            nodes += 1
            if nodes > node_budget:
                raise TooLarge(f"Oracle search exceeded its node budget of {node_budget}")

            present = sum(count for _, count in classes)
            best, best_choice = None, None
            for choice in _maximal_choices(classes, K):
                counts = _apply(classes, choice)
                _add_arrivals(counts, trace.arrivals_at(slot + 1))
                cost = present + solve(slot + 1, _canonical(counts))
                if best is None or cost < best:
                    best, best_choice = cost, choice
            memo[key] = (best, best_choice)
            return best

        counts: Dict[ClassKey, int] = {}
        _add_arrivals(counts, trace.arrivals_at(1))
        opt_flow = solve(1, _canonical(counts))

        witness = OracleService._witness(trace, K, memo, horizon)
        states = EngineService.replay(trace, witness, banks=1, K=K)
        result = OracleResult(
            opt_flow=opt_flow,
            K=K,
            witness=witness,
            per_slot_remaining=[state.n for state in states],
            per_slot_volume=[state.volume() for state in states],
            nodes_explored=nodes,
        )
        logger.info(f"Oracle solved {len(trace.jobs)} jobs: opt_flow={opt_flow}, nodes={nodes}")
        return result

    @staticmethod
    def _witness(trace: Trace, K: int, memo, horizon: int) -> List[SlotDecision]:
        """Replay the memoized choices, serving the earliest jobs within each class"""
        witness: List[SlotDecision] = []
        state = EngineService.initial_state(trace)
        while state.remaining or trace.next_arrival_after(state.slot - 1) is not None:
            if not state.remaining:
                witness.append(SlotDecision())
                state, _ = EngineService.advance_slot(state, SlotDecision(), trace, K=K)
                continue
            by_class: Dict[ClassKey, List[Job]] = {}
            for job_id, remaining in state.remaining.items():
                job = state.held[job_id]
                by_class.setdefault((job.need, remaining), []).append(job)
            classes = _canonical({key: len(jobs) for key, jobs in by_class.items()})
            _, choice = memo[(min(state.slot, horizon), classes)]

            served: List[Job] = []
            for (key, _), count in zip(classes, choice):
                jobs = sorted(by_class[key], key=lambda job: (job.arrival, job.id))
                served.extend(jobs[:count])
            decision = SlotDecision.of(served)
            witness.append(decision)
            state, _ = EngineService.advance_slot(state, decision, trace, K=K)
        return witness

    @staticmethod
    def exhaustive_flow_time(trace: Trace, K: Optional[int] = None) -> int:
        """Plain branch and bound over every feasible subset; reference for tiny traces"""
        K = trace.K if K is None else K
        if not trace.jobs:
            return 0
        makespan = OracleService.makespan_bound(trace, K)
        future_work = {}
        running = 0
        for slot in range(makespan + 1, 0, -1):
            running += sum(job.size for job in trace.arrivals_at(slot))
            future_work[slot] = running
        best = [sum(job.size for job in trace.jobs) * makespan + 1]

        def search(slot: int, remaining: Dict[int, int], cost: int) -> None:
            if not remaining and trace.next_arrival_after(slot - 1) is None:
                best[0] = min(best[0], cost)
                return
            if slot > makespan:
                return
            lower = cost + sum(remaining.values()) + future_work.get(slot + 1, 0)
            if lower >= best[0]:
                return
            ids = list(remaining)
            for mask in range(1 << len(ids)):
                chosen = [ids[bit] for bit in range(len(ids)) if mask >> bit & 1]
                if sum(trace.job(job_id).need for job_id in chosen) > K:
                    continue
                after = dict(remaining)
                for job_id in chosen:
                    after[job_id] -= 1
                    if after[job_id] == 0:
                        del after[job_id]
                for job in trace.arrivals_at(slot + 1):
                    after[job.id] = job.size
                search(slot + 1, after, cost + len(remaining))

        search(1, {job.id: job.size for job in trace.arrivals_at(1)}, 0)
        return best[0]
