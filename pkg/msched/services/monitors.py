"""Runtime monitors for the structural properties of RA, RA-Size and RA-E"""
from typing import Dict, List, Optional, Union
import hashlib
import json
import logging

from msched.models.job import Job, SizeMode, Trace
from msched.models.oracle import OracleResult
from msched.models.run import MonitorReport, RunResult
from msched.models.state import SlotClass, SystemState
from msched.services.engine import EngineService
from msched.services.harness import HarnessService
from msched.services.oracle import OracleService
from msched.services.policies import PolicyService, PolicySpec
from msched.utils.exceptions import SearchBudgetExceeded

logger = logging.getLogger(__name__)


def state_digest(state: SystemState) -> str:
    """Stable fingerprint of R(t-) for reproducing a violation"""
    payload = {
        "slot": state.slot,
        "remaining": [[job_id, size, state.held[job_id].need] for job_id, size in state.remaining.items()],
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _class_index(value: int) -> int:
    return value.bit_length() - 1


def _is_weighted(trace: Trace) -> bool:
    return trace.size_mode == SizeMode.weighted or any(job.size != 1 for job in trace.jobs)


class MonitorService:
    """Each monitor returns a report; none of them raise on a violation"""

    @staticmethod
    def replay_profile(trace: Trace, run: RunResult) -> List[SystemState]:
        """R(t-) for every slot of a finished run"""
        return EngineService.replay(trace, run.schedule, banks=run.banks, K=run.K)

    # ==================== SINGLE RUN ====================

    @staticmethod
    def monitor_relaxed(run: RunResult) -> MonitorReport:
        """In every relaxed slot at most K jobs remain"""
        checked = 0
        for slot, (count, slot_class) in enumerate(zip(run.per_slot_count, run.slot_class), start=1):
            if slot_class != SlotClass.relaxed:
                continue
            checked += 1
            if count > run.K:
                return MonitorReport(
                    name="relaxed", holds=False, first_violation_slot=slot,
                    details=f"n(t)={count} > K={run.K} in a relaxed slot",
                    context={"n": count, "K": run.K}, checked=checked,
                )
        return MonitorReport(name="relaxed", holds=True, checked=checked)

    @staticmethod
    def monitor_full_bound(run: RunResult, oracle: OracleResult) -> MonitorReport:
        """In every full slot n(t) <= K - 1 + 2 n_OPT(t)"""
        checked = 0
        for slot, (count, slot_class) in enumerate(zip(run.per_slot_count, run.slot_class), start=1):
            if slot_class != SlotClass.full:
                continue
            checked += 1
            opt_count = oracle.remaining_at(slot)
            if count > run.K - 1 + 2 * opt_count:
                return MonitorReport(
                    name="full_bound", holds=False, first_violation_slot=slot,
                    details=f"n(t)={count} > K-1+2*n_OPT(t)={run.K - 1 + 2 * opt_count}",
                    context={"n": count, "n_opt": opt_count, "K": run.K}, checked=checked,
                )
        return MonitorReport(name="full_bound", holds=True, checked=checked)

    @staticmethod
    def monitor_volume_drift(run: RunResult, trace: Trace, oracle: OracleResult) -> MonitorReport:
        """In every full slot the volume of classes <= a exceeds OPT's by at most the class bound"""
        weighted = _is_weighted(trace)
        K = run.K
        top_class = _class_index(K * trace.max_size) if weighted else _class_index(K)
        states = MonitorService.replay_profile(trace, run)
        opt_states = EngineService.replay(trace, oracle.witness, banks=1, K=oracle.K or K)
        checked = 0

        for slot, slot_class in enumerate(run.slot_class, start=1):
            if slot_class != SlotClass.full:
                continue
            checked += 1
            state = states[slot - 1]
            ours = MonitorService._volume_by_class(state, weighted, top_class)
            theirs = (MonitorService._volume_by_class(opt_states[slot - 1], weighted, top_class)
                      if slot <= len(opt_states) else [0] * (top_class + 1))
            ours_cum, theirs_cum = 0, 0
            for a in range(top_class + 1):
                ours_cum += ours[a]
                theirs_cum += theirs[a]
                drift = ours_cum - theirs_cum
                bound = (K - 1) * 2 ** (a + 1) if weighted else K - 1
                if drift > bound:
                    return MonitorReport(
                        name="volume_drift", holds=False, first_violation_slot=slot,
                        details=f"drift {drift} of classes <= {a} exceeds {bound}",
                        context={"class": a, "drift": drift, "bound": bound,
                                 "volume": ours_cum, "volume_opt": theirs_cum,
                                 "volume_opt_total": oracle.volume_at(slot)},
                        digest=state_digest(state), checked=checked,
                    )
        return MonitorReport(name="volume_drift", holds=True, checked=checked)

    @staticmethod
    def _volume_by_class(state: SystemState, weighted: bool, top_class: int) -> List[int]:
        volumes = [0] * (top_class + 1)
        for job_id, remaining in state.remaining.items():
            need = state.held[job_id].need
            key = remaining * need if weighted else need
            volumes[min(_class_index(key), top_class)] += remaining * need
        return volumes

    @staticmethod
    def monitor_work(run: RunResult, trace: Trace) -> MonitorReport:
        """Two banks keep K servers busy, or finish everything that remains"""
        states = MonitorService.replay_profile(trace, run)
        for slot, (state, decision) in enumerate(zip(states, run.schedule), start=1):
            held_need = state.need_total()
            if held_need >= run.K:
                ok = decision.occupancy >= run.K
                detail = f"occupied {decision.occupancy} < K={run.K} with held need {held_need}"
            else:
                ok = decision.members == set(state.remaining) and all(
                    size == 1 for size in state.remaining.values()
                )
                detail = f"held need {held_need} < K but {state.n - len(decision.members)} jobs left unserved"
            if not ok:
                return MonitorReport(
                    name="work", holds=False, first_violation_slot=slot, details=detail,
                    context={"held_need": held_need, "reserved": decision.reserved_need, "free": decision.free_need},
                    digest=state_digest(state), checked=slot,
                )
        return MonitorReport(name="work", holds=True, checked=len(states))

    @staticmethod
    def monitor_packing(run: RunResult, trace: Trace) -> MonitorReport:
        """Whenever at least K jobs are held, some subset fills exactly K servers"""
        states = MonitorService.replay_profile(trace, run)
        checked = 0
        for slot, state in enumerate(states, start=1):
            if state.n < run.K:
                continue
            checked += 1
            try:
                subset = PolicyService.exact_fit_subset(state.jobs(), run.K)
            except SearchBudgetExceeded as exc:
                logger.warning(f"Packing check inconclusive at slot {slot}: {exc.detail}")
                return MonitorReport(name="packing", holds=True, inconclusive=True,
                                     details=exc.detail, digest=state_digest(state), checked=checked)
            if subset is None:
                return MonitorReport(
                    name="packing", holds=False, first_violation_slot=slot,
                    details=f"{state.n} jobs held but no subset fills K={run.K}",
                    digest=state_digest(state), checked=checked,
                )
        return MonitorReport(name="packing", holds=True, checked=checked)

    # ==================== PAIRED RUNS ====================

    @staticmethod
    def monitor_augmentation(
        trace: Trace,
        extra: Job,
        policy: Union[str, PolicySpec] = "ra-e",
    ) -> MonitorReport:
        """Adding one job never lowers the cumulative departure count at any slot"""
        augmented = Trace(jobs=list(trace.jobs), K=trace.K, mode=trace.mode, size_mode=trace.size_mode)
        augmented.add_job(arrival=extra.arrival, need=extra.need, size=extra.size)

        base = HarnessService.simulate(trace, policy)
        more = HarnessService.simulate(augmented, policy)
        horizon = max(base.slots, more.slots)
        base_counts = base.cumulative_departures(horizon)
        more_counts = more.cumulative_departures(horizon)
        for slot, (fewer, larger) in enumerate(zip(base_counts, more_counts), start=1):
            if larger < fewer:
                return MonitorReport(
                    name="augmentation", holds=False, first_violation_slot=slot,
                    details=f"r_t drops from {fewer} to {larger} after adding a job",
                    context={"r_base": fewer, "r_augmented": larger,
                             "extra": extra.model_dump()},
                    checked=slot,
                )
        return MonitorReport(name="augmentation", holds=True, checked=horizon)

    @staticmethod
    def monitor_dominance(
        trace: Trace,
        oracle: Optional[OracleResult] = None,
        policy: Union[str, PolicySpec] = "ra-e",
    ) -> MonitorReport:
        """With 2K servers the k-th departure is no later than OPT's k-th departure with K"""
        run = HarnessService.simulate(trace, policy, banks=2)
        oracle = oracle or OracleService.opt_flow_time(trace)
        opt_departures = EngineService.check_schedule(trace, oracle.witness, K=oracle.K).departures

        ours = sorted(run.departures.values())
        theirs = sorted(opt_departures.values())
        context: Dict[str, int] = {"flow": run.flow_total, "opt_flow": oracle.opt_flow}
        for rank, (mine, best) in enumerate(zip(ours, theirs), start=1):
            if mine > best:
                return MonitorReport(
                    name="dominance", holds=False, first_violation_slot=mine,
                    details=f"departure #{rank} at slot {mine} after OPT's at {best}",
                    context={**context, "rank": rank}, checked=rank,
                )
        if run.flow_total > oracle.opt_flow:
            return MonitorReport(
                name="dominance", holds=False, first_violation_slot=max(ours, default=1),
                details=f"flow {run.flow_total} exceeds OPT flow {oracle.opt_flow}",
                context=context, checked=len(ours),
            )
        return MonitorReport(name="dominance", holds=True, context=context, checked=len(ours))
