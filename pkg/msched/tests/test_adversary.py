"""Tests for the input constructions"""
import pytest

from msched.models.adversary import SessionPhase, SlotVerdict
from msched.models.state import SlotDecision
from msched.services.adversary import AdversaryService, NeedDistribution
from msched.services.engine import EngineService
from msched.tests.conftest import state_of
from msched.utils.exceptions import UnclassifiableSlot, ValidationError


def need_count(trace, need):
    return sum(1 for job in trace.jobs if job.need == need)


# ==================== fixed traces ====================

def test_sfa_lb_trace_shape():
    trace = AdversaryService.sfa_lb_trace(8, 3)
    assert need_count(trace, 1) == 4
    assert [job.arrival for job in trace.jobs if job.need == 8] == [1, 2, 3]
    assert EngineService.validate_trace(trace) == []


def test_sfa_gap_trace_shape():
    trace = AdversaryService.sfa_gap_trace(8, 5)
    assert need_count(trace, 1) == 4 * 3
    assert need_count(trace, 8) == 2 * 5
    assert {job.arrival for job in trace.jobs if job.need == 1} == {1, 3, 5}
    with pytest.raises(ValidationError):
        AdversaryService.sfa_gap_trace(8, 4)


def test_greedy_lb_trace_shape():
    """5 jobs per first-phase pair of slots and 2 per second-phase slot"""
    trace = AdversaryService.greedy_lb_trace(8, 3, 4)
    assert len(trace.jobs) == 5 * 3 + 2 * 4
    assert need_count(trace, 8) == 3
    assert need_count(trace, 4) == 8
    assert min(job.arrival for job in trace.jobs if job.need == 4) == 6
    with pytest.raises(ValidationError):
        AdversaryService.greedy_lb_trace(4, 1, 1)
    with pytest.raises(ValidationError):
        AdversaryService.greedy_lb_trace(8, 0, 1)


# ==================== adaptive ====================

def test_det_lb_against_sfa_takes_tail_branch():
    """SFA runs a need-K job every slot, so nothing is wasted"""
    outcome = AdversaryService.adaptive_det_lb("sfa", 8, 10, 5)
    assert outcome.t1 == 0
    assert outcome.session.phase == SessionPhase.tail
    assert need_count(outcome.trace, 8) == 10
    assert need_count(outcome.trace, 1) == 4
    assert need_count(outcome.trace, 4) == 0
    assert all(entry.verdict == SlotVerdict.full for entry in outcome.session.transcript[:10])


def test_det_lb_against_ra_is_full_every_slot():
    outcome = AdversaryService.adaptive_det_lb("ra", 8, 6, 2)
    assert outcome.t1 == 0
    assert outcome.session.entry(1).verdict == SlotVerdict.full


def test_det_lb_against_immediate_unit_drains():
    """Every main-phase slot is wasted; L pairs of half jobs follow after the gap"""
    K, T, L = 8, 9, 4
    outcome = AdversaryService.adaptive_det_lb("immediate-unit", K, T, L)
    assert outcome.t1 == T
    assert outcome.session.phase == SessionPhase.drain
    halves = [job.arrival for job in outcome.trace.jobs if job.need == K // 2]
    gap = (T + 1) // 2
    assert sorted(halves) == sorted(slot for slot in range(T + gap + 1, T + gap + L + 1) for _ in range(2))
    # a fresh unit batch follows every wasted slot before T
    assert need_count(outcome.trace, 1) == K // 2 * T
    assert outcome.run.flow_total > 0


def test_classify():
    state = state_of([8, 1, 1, 1, 1, 2])
    units = SlotDecision.of([state.held[1], state.held[2], state.held[3], state.held[4]])
    two_units = SlotDecision.of([state.held[1], state.held[2]])
    full = SlotDecision.of([state.held[0]])
    assert AdversaryService.classify(full, state, 8, strict=True) == SlotVerdict.full
    assert AdversaryService.classify(units, state, 8, strict=True) == SlotVerdict.wasted
    assert AdversaryService.classify(two_units, state, 8) == SlotVerdict.wasted
    with pytest.raises(UnclassifiableSlot):
        AdversaryService.classify(two_units, state, 8, strict=True)


# ==================== randomized ====================

def test_rand_lb_batch_frequency():
    """Unit batches appear in about T/K slots, a need-K job in every slot"""
    K, T = 8, 10000
    trace = AdversaryService.rand_lb_trace(K, T, seed=11)
    batch_slots = {job.arrival for job in trace.jobs if job.need == 1}
    print(f"{len(batch_slots)} batch slots out of {T}")
    assert abs(len(batch_slots) - T / K) <= 99
    assert need_count(trace, K) == T
    assert need_count(trace, 1) == len(batch_slots) * K // 2


def test_rand_lb_is_reproducible():
    first = AdversaryService.rand_lb_trace(8, 200, p=0.3, seed=5)
    second = AdversaryService.rand_lb_trace(8, 200, p=0.3, seed=5)
    assert first.jobs == second.jobs
    with pytest.raises(ValidationError):
        AdversaryService.rand_lb_trace(8, 10, p=1.5)


def test_rand_lb_session_counts_unit_slots():
    """Immediate-unit spends exactly the batch slots on units"""
    K, T, L = 8, 32, 10
    outcome = AdversaryService.rand_lb_session("theta0", K, T, p=1 / 4, L=L, seed=3)
    batch_slots = {job.arrival for job in outcome.trace.jobs if job.need == 1}
    assert outcome.t1 == len(batch_slots)
    assert need_count(outcome.trace, K // 2) == 2 * L
    assert len(outcome.session.transcript) == T
    assert len(outcome.run.departures) == len(outcome.trace.jobs)


def test_rand_lb_session_without_drain():
    outcome = AdversaryService.rand_lb_session("thetaT", 8, 16, seed=1)
    assert need_count(outcome.trace, 4) == 0
    assert outcome.session.phase == SessionPhase.main


# ==================== stochastic ====================

def test_stochastic_uniform_trace():
    trace = AdversaryService.stochastic_trace(16, 3.5, 40, seed=2)
    arrivals = [job.arrival for job in trace.jobs]
    assert len(trace.jobs) == 140
    assert arrivals == sorted(arrivals)
    assert 1 <= arrivals[0] and arrivals[-1] <= 40
    assert {job.need for job in trace.jobs} <= {1, 2, 4, 8, 16}
    assert [job.id for job in trace.jobs] == list(range(140))


def test_stochastic_spike_frequency():
    """About a p share of jobs need all K servers"""
    trace = AdversaryService.stochastic_trace(8, 40, 100, NeedDistribution.spike, seed=4, p=0.25)
    spikes = need_count(trace, 8)
    assert abs(spikes - 1000) <= 82
    assert {job.need for job in trace.jobs} <= {1, 2, 4, 8}


def test_stochastic_spike_needs_p():
    with pytest.raises(ValidationError):
        AdversaryService.stochastic_trace(8, 2, 10, NeedDistribution.spike)
    with pytest.raises(ValidationError):
        AdversaryService.stochastic_trace(6, 2, 10)
