"""Sweeps that check the ratio, monitor and dominance properties over many small instances"""
from itertools import combinations_with_replacement
from math import log2
from typing import Iterable, Iterator, List, Optional, Sequence
import logging

import numpy as np

from msched.models.job import Job, SizeMode, Trace, TraceMode
from msched.models.run import MonitorReport
from msched.schemas.experiment import VerificationSummary
from msched.services.harness import HarnessService
from msched.services.monitors import MonitorService
from msched.services.oracle import OracleService
from msched.services.policies import PolicyService
from msched.utils.exceptions import SearchBudgetExceeded, TooLarge

logger = logging.getLogger(__name__)


def _powers_up_to(K: int) -> List[int]:
    return [2 ** a for a in range(K.bit_length())]


def _describe(trace: Trace) -> List[List[int]]:
    return [[job.arrival, job.size, job.need] for job in trace.jobs]


def _build(K: int, rows: Iterable[tuple], mode: TraceMode = TraceMode.power_of_two) -> Trace:
    rows = sorted(rows)
    weighted = any(size != 1 for _, size, _ in rows)
    trace = Trace(K=K, mode=mode, size_mode=SizeMode.weighted if weighted else SizeMode.unit)
    for arrival, size, need in rows:
        trace.add_job(arrival=arrival, need=need, size=size)
    return trace


class VerificationService:
    """Instance generators and property sweeps"""

    # ==================== INSTANCES ====================

    @staticmethod
    def enumerate_traces(
        K: int,
        max_jobs: int,
        max_arrival: int,
        needs: Optional[Sequence[int]] = None,
    ) -> Iterator[Trace]:
        """Every unit-size job multiset up to max_jobs, with the first arrival at slot 1"""
        needs = list(needs) if needs is not None else _powers_up_to(K)
        kinds = [(arrival, 1, need) for arrival in range(1, max_arrival + 1) for need in needs]
        for count in range(1, max_jobs + 1):
            for rows in combinations_with_replacement(kinds, count):
                if rows[0][0] != 1:
                    continue
                yield _build(K, rows)

    @staticmethod
    def random_traces(
        K: int,
        count: int,
        max_jobs: int,
        max_arrival: int,
        seed: int = 0,
        needs: Optional[Sequence[int]] = None,
        max_size: int = 1,
        max_work: Optional[int] = None,
        mode: TraceMode = TraceMode.power_of_two,
    ) -> Iterator[Trace]:
        """Seeded random small traces, shifted to start at slot 1"""
        needs = list(needs) if needs is not None else _powers_up_to(K)
        rng = np.random.default_rng(seed)
        produced = 0
        while produced < count:
            jobs = int(rng.integers(1, max_jobs + 1))
            arrivals = rng.integers(1, max_arrival + 1, size=jobs)
            sizes = rng.integers(1, max_size + 1, size=jobs)
            chosen = rng.choice(needs, size=jobs)
            if max_work is not None and int(sizes.sum()) > max_work:
                continue
            shift = int(arrivals.min()) - 1
            rows = [(int(a) - shift, int(w), int(s)) for a, w, s in zip(arrivals, sizes, chosen)]
            produced += 1
            yield _build(K, rows, mode)

    # ==================== SWEEPS ====================

    @staticmethod
    def ratio_bound(policy: str, trace: Trace) -> float:
        """Guaranteed competitive ratio of a policy on this trace"""
        if policy == "ra-e":
            return 1.0
        if policy == "ra-size":
            return (trace.K + 1) * log2(trace.K * trace.max_size)
        return float(trace.K + 1)

    @staticmethod
    def sweep_ratio(traces: Iterable[Trace], policy: str = "ra") -> VerificationSummary:
        """F_policy / F_OPT never exceeds the policy's guarantee"""
        summary = VerificationSummary(name=f"ratio:{policy}", max_ratio=0.0)
        for trace in traces:
            summary.instances += 1
            try:
                ratio = HarnessService.competitive_ratio(trace, policy)
            except TooLarge:
                summary.inconclusive += 1
                continue
            summary.max_ratio = max(summary.max_ratio, float(ratio))
            bound = VerificationService.ratio_bound(policy, trace)
            if ratio > bound:
                summary.violations += 1
                if summary.counterexample is None:
                    summary.counterexample = {"K": trace.K, "jobs": _describe(trace),
                                              "ratio": str(ratio), "bound": bound}
        logger.info(f"Ratio sweep {policy}: {summary.instances} instances, {summary.violations} violations, "
                    f"max ratio {summary.max_ratio}")
        return summary

    @staticmethod
    def sweep_monitors(traces: Iterable[Trace], policy: str = "ra") -> VerificationSummary:
        """Relaxed, full-slot, drift and packing monitors on every instance"""
        summary = VerificationSummary(name=f"monitors:{policy}")
        for trace in traces:
            summary.instances += 1
            try:
                oracle = OracleService.opt_flow_time(trace)
            except TooLarge:
                summary.inconclusive += 1
                continue
            run = HarnessService.simulate(trace, policy, monitors=(
                MonitorService.monitor_relaxed,
                lambda run: MonitorService.monitor_full_bound(run, oracle),
                lambda run: MonitorService.monitor_volume_drift(run, trace, oracle),
                lambda run: MonitorService.monitor_packing(run, trace),
            ))
            VerificationService._tally(summary, trace, run.monitor_reports)
        return summary

    @staticmethod
    def sweep_dominance(traces: Iterable[Trace]) -> VerificationSummary:
        """RA-E with 2K servers departs no later than OPT with K, rank by rank"""
        summary = VerificationSummary(name="dominance")
        for trace in traces:
            summary.instances += 1
            try:
                report = MonitorService.monitor_dominance(trace)
            except TooLarge:
                summary.inconclusive += 1
                continue
            VerificationService._tally(summary, trace, [report])
        return summary

    @staticmethod
    def sweep_augmentation(traces: Iterable[Trace], seed: int = 0) -> VerificationSummary:
        """One random extra job per instance never lowers RA-E's departure counts"""
        summary = VerificationSummary(name="augmentation")
        rng = np.random.default_rng(seed)
        for trace in traces:
            summary.instances += 1
            extra = Job(
                id=len(trace.jobs),
                arrival=int(rng.integers(1, trace.last_arrival + 2)),
                need=int(rng.integers(1, trace.K + 1)),
            )
            VerificationService._tally(summary, trace, [MonitorService.monitor_augmentation(trace, extra)])
        return summary

    @staticmethod
    def sweep_exact_fit(K: int, max_cardinality: int) -> VerificationSummary:
        """Every power-of-two multiset of at least K jobs has a subset filling K"""
        summary = VerificationSummary(name=f"exact_fit:K={K}")
        powers = _powers_up_to(K)
        for cardinality in range(K, max_cardinality + 1):
            for needs in combinations_with_replacement(powers, cardinality):
                summary.instances += 1
                jobs = [Job(id=index, arrival=1, need=need) for index, need in enumerate(needs)]
                try:
                    subset = PolicyService.exact_fit_subset(jobs, K)
                except SearchBudgetExceeded:
                    summary.inconclusive += 1
                    continue
                if subset is None or sum(job.need for job in subset) != K:
                    summary.violations += 1
                    if summary.counterexample is None:
                        summary.counterexample = {"K": K, "needs": list(needs)}
        return summary

    @staticmethod
    def _tally(summary: VerificationSummary, trace: Trace, reports: Sequence[MonitorReport]) -> None:
        failed = [report for report in reports if not report.holds]
        summary.inconclusive += sum(1 for report in reports if report.inconclusive)
        if failed:
            summary.violations += 1
            if summary.counterexample is None:
                summary.counterexample = {
                    "K": trace.K,
                    "jobs": _describe(trace),
                    "monitor": failed[0].name,
                    "slot": failed[0].first_violation_slot,
                    "details": failed[0].details,
                }
