"""Slot-selection rules built on ordered window sets"""
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence
import logging

from pydantic import BaseModel, Field

from msched.core.config import settings
from msched.models.job import Job
from msched.models.state import SlotDecision, SystemState
from msched.utils.exceptions import SearchBudgetExceeded, ValidationError

logger = logging.getLogger(__name__)


class OrderMode(str, Enum):
    by_need = "by_need"
    by_effective_size = "by_effective_size"


class WindowSet(BaseModel):
    """Maximal run of consecutively ordered jobs whose needs fit in K"""
    start_index: int = Field(..., ge=1)
    members: List[Job] = Field(default_factory=list)
    need_sum: int = 0

    @property
    def ids(self) -> List[int]:
        return [job.id for job in self.members]


class EffectiveSize(BaseModel):
    """Remaining work times need, and its power-of-two class"""
    job_id: int
    effective: int = Field(..., ge=1)
    # effective in [2^size_class, 2^(size_class + 1))
    size_class: int = Field(..., ge=0)


SelectFn = Callable[[SystemState, int], SlotDecision]


class PolicySpec(BaseModel):
    """A named policy with the trace modes it accepts"""
    name: str
    select: SelectFn
    power_of_two: bool = True
    unit_only: bool = True
    banks: int = Field(1, ge=1, le=2)
    description: str = ""


class PolicyService:
    """Ordering, window sets and every slot-selection rule"""

    # ==================== ORDERING ====================

    @staticmethod
    def order_jobs(state: SystemState, mode: OrderMode = OrderMode.by_need) -> List[Job]:
        """Held jobs in the policy's ordering, ties broken by (arrival, id)"""
        jobs = state.jobs()
        if mode == OrderMode.by_effective_size:
            remaining = state.remaining
            return sorted(jobs, key=lambda job: (remaining[job.id] * job.need, job.arrival, job.id))
        return sorted(jobs, key=lambda job: (job.need, job.arrival, job.id))

    @staticmethod
    def window_sets(ordered: Sequence[Job], K: int) -> List[WindowSet]:
        """S_1..S_n: for each start index, the longest run that fits in K"""
        windows: List[WindowSet] = []
        end, need_sum = 0, 0
        for start in range(len(ordered)):
            if end < start:
                end, need_sum = start, 0
            while end < len(ordered) and need_sum + ordered[end].need <= K:
                need_sum += ordered[end].need
                end += 1
            windows.append(WindowSet.model_construct(
                start_index=start + 1,
                members=list(ordered[start:end]),
                need_sum=need_sum,
            ))
            if end > start:
                need_sum -= ordered[start].need
        return windows

    @staticmethod
    def first_exact_window(windows: Sequence[WindowSet], K: int) -> Optional[WindowSet]:
        """S_{i*}: the window with the smallest start index summing exactly to K"""
        for window in windows:
            if window.need_sum == K:
                return window
        return None

    @staticmethod
    def effective_sizes(state: SystemState) -> List[EffectiveSize]:
        """Per held job, remaining size times need and its class index"""
        views = []
        for job_id, remaining in state.remaining.items():
            effective = remaining * state.held[job_id].need
            views.append(EffectiveSize(job_id=job_id, effective=effective, size_class=effective.bit_length() - 1))
        return views

    # ==================== POLICIES ====================

    @staticmethod
    def ra_select(state: SystemState, K: int) -> SlotDecision:
        """Exact-fit window with minimal start index, else S_1"""
        return PolicyService._window_select(state, K, OrderMode.by_need)

    @staticmethod
    def ra_size_select(state: SystemState, K: int) -> SlotDecision:
        """RA over the remaining effective-size ordering"""
        return PolicyService._window_select(state, K, OrderMode.by_effective_size)

    @staticmethod
    def _window_select(state: SystemState, K: int, mode: OrderMode) -> SlotDecision:
        if not state.remaining:
            return SlotDecision()
        windows = PolicyService.window_sets(PolicyService.order_jobs(state, mode), K)
        chosen = PolicyService.first_exact_window(windows, K) or windows[0]
        return SlotDecision.of(chosen.members)

    @staticmethod
    def sfa_select(state: SystemState, K: int) -> SlotDecision:
        """Smallest earliest-arrived prefix reaching K, admitted in decreasing need"""
        by_arrival = sorted(state.jobs(), key=lambda job: (job.arrival, job.id))
        prefix, need_sum = [], 0
        for job in by_arrival:
            if need_sum >= K:
                break
            prefix.append(job)
            need_sum += job.need

        admitted, used = [], 0
        for job in sorted(prefix, key=lambda job: (-job.need, job.arrival, job.id)):
            if used + job.need <= K:
                admitted.append(job)
                used += job.need
        return SlotDecision.of(admitted)

    @staticmethod
    def greedy_select(state: SystemState, K: int) -> SlotDecision:
        """Longest prefix of the increasing-need ordering that fits"""
        admitted, used = [], 0
        for job in PolicyService.order_jobs(state, OrderMode.by_need):
            if used + job.need > K:
                break
            admitted.append(job)
            used += job.need
        return SlotDecision.of(admitted)

    @staticmethod
    def rae_select(state: SystemState, K: int) -> SlotDecision:
        """Reserved bank runs S_{i*} (else S_1); the free bank takes what is left"""
        if not state.remaining:
            return SlotDecision()
        ordered = PolicyService.order_jobs(state, OrderMode.by_need)
        windows = PolicyService.window_sets(ordered, K)
        exact = PolicyService.first_exact_window(windows, K)

        if exact is not None:
            taken = set(exact.ids)
            rest = [job for job in ordered if job.id not in taken]
            free = PolicyService.window_sets(rest, K)[0].members if rest else []
            return SlotDecision.of(exact.members, free)

        first = windows[0]
        taken = set(first.ids)
        smallest = next((job for job in ordered if job.id not in taken), None)
        return SlotDecision.of(first.members, [smallest] if smallest is not None else [])

    @staticmethod
    def immediate_unit_select(state: SystemState, K: int) -> SlotDecision:
        """Serve unit-need jobs the moment they are held, then others in arrival order"""
        by_arrival = sorted(state.jobs(), key=lambda job: (job.arrival, job.id))
        ordered = [job for job in by_arrival if job.need == 1] + [job for job in by_arrival if job.need != 1]
        return SlotDecision.of(PolicyService._admit(ordered, K))

    @staticmethod
    def theta_t_select(state: SystemState, K: int) -> SlotDecision:
        """Hold unit-need jobs until K of them can run together or nothing else waits"""
        by_arrival = sorted(state.jobs(), key=lambda job: (job.arrival, job.id))
        units = [job for job in by_arrival if job.need == 1]
        others = [job for job in by_arrival if job.need != 1]
        if len(units) >= K:
            return SlotDecision.of(units[:K])
        if others:
            return SlotDecision.of(PolicyService._admit(others, K))
        return SlotDecision.of(units)

    @staticmethod
    def _admit(ordered: Sequence[Job], K: int) -> List[Job]:
        admitted, used = [], 0
        for job in ordered:
            if used + job.need <= K:
                admitted.append(job)
                used += job.need
        return admitted

    # ==================== EXACT FIT ====================

    @staticmethod
    def exact_fit_subset(jobs: Sequence[Job], K: int, node_cap: Optional[int] = None) -> Optional[List[Job]]:
        """A subset whose needs sum exactly to K, or None if there is none"""
        node_cap = settings.EXACT_FIT_NODE_CAP if node_cap is None else node_cap
        ordered = sorted(jobs, key=lambda job: (-job.need, job.arrival, job.id))

        picked, used = [], 0
        for job in ordered:
            if used + job.need <= K:
                picked.append(job)
                used += job.need
        if used == K:
            return picked

        suffix = [0] * (len(ordered) + 1)
        for index in range(len(ordered) - 1, -1, -1):
            suffix[index] = suffix[index + 1] + ordered[index].need
        if suffix[0] < K:
            return None

        nodes = 0
        chosen: List[Job] = []

        def search(index: int, target: int) -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > node_cap:
                raise SearchBudgetExceeded(f"Exact-fit search exceeded {node_cap} nodes")
            if target == 0:
                return True
            if index >= len(ordered) or suffix[index] < target:
                return False
            previous = None
            for position in range(index, len(ordered)):
                need = ordered[position].need
                # equal needs give the same subtree
                if need == previous or need > target:
                    continue
                previous = need
                chosen.append(ordered[position])
                if search(position + 1, target - need):
                    return True
                chosen.pop()
            return False

        if search(0, K):
            logger.debug(f"Exact fit found by backtracking after {nodes} nodes")
            return list(chosen)
        return None


# ==================== REGISTRY ====================

POLICIES: Dict[str, PolicySpec] = {
    spec.name: spec
    for spec in (
        PolicySpec(name="ra", select=PolicyService.ra_select,
                   description="exact-fit window sets over the increasing-need order"),
        PolicySpec(name="sfa", select=PolicyService.sfa_select,
                   description="server filling over the earliest-arrived prefix"),
        PolicySpec(name="greedy", select=PolicyService.greedy_select, power_of_two=False,
                   description="as many jobs as fit, smallest need first"),
        PolicySpec(name="ra-e", select=PolicyService.rae_select, power_of_two=False, banks=2,
                   description="RA on the reserved bank plus a free bank of K servers"),
        PolicySpec(name="ra-size", select=PolicyService.ra_size_select, unit_only=False,
                   description="RA over remaining effective sizes"),
        PolicySpec(name="immediate-unit", select=PolicyService.immediate_unit_select,
                   description="unit-need jobs in their arrival slot, others in arrival order"),
        PolicySpec(name="theta0", select=PolicyService.immediate_unit_select,
                   description="no waiting for a second unit batch"),
        PolicySpec(name="thetaT", select=PolicyService.theta_t_select,
                   description="unit-need jobs wait until K can run together"),
    )
}


def policy_help() -> str:
    """One `name: description` entry per registered policy"""
    return "; ".join(f"{name}: {spec.description}" for name, spec in POLICIES.items())


def get_policy(name: str) -> PolicySpec:
    """Look up a policy by its command-line name"""
    spec = POLICIES.get(name)
    if spec is None:
        raise ValidationError(f"Unknown policy '{name}', expected one of: {', '.join(POLICIES)}")
    return spec
