"""Tests for ordering, window sets and selection rules"""
from itertools import combinations

import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from msched.models.job import Job
from msched.services.policies import OrderMode, POLICIES, PolicyService, get_policy
from msched.services.verification import VerificationService
from msched.tests.conftest import state_of
from msched.utils.exceptions import SearchBudgetExceeded, ValidationError

EXAMPLE_51 = [1, 1, 1, 1, 2, 4]
EXAMPLE_52 = [1, 1, 1, 1, 2, 8]

power_needs = st.lists(st.sampled_from([1, 2, 4, 8]), min_size=1, max_size=12)


def ids(decision_set):
    return sorted(decision_set)


# ==================== ordering ====================

def test_order_by_need():
    """Needs {4,1,2,1} at equal arrivals order as 1,1,2,4"""
    state = state_of([4, 1, 2, 1])
    assert [job.need for job in PolicyService.order_jobs(state)] == [1, 1, 2, 4]


def test_order_ties_by_arrival():
    """Equal needs put the earlier arrival first"""
    state = state_of([2, 2], arrivals=[3, 1])
    assert [job.id for job in PolicyService.order_jobs(state)] == [1, 0]


def test_order_by_effective_size():
    """(w,s)=(2,1) has w'=2 and goes before (1,4) with w'=4"""
    state = state_of([4, 1], sizes=[1, 2])
    ordered = PolicyService.order_jobs(state, OrderMode.by_effective_size)
    assert [job.id for job in ordered] == [1, 0]


# ==================== window sets ====================

def test_window_sets_example_51():
    """Six window sets over needs 1,1,1,1,2,4 with K=8"""
    ordered = PolicyService.order_jobs(state_of(EXAMPLE_51))
    windows = PolicyService.window_sets(ordered, 8)
    assert [w.ids for w in windows] == [
        [0, 1, 2, 3, 4], [1, 2, 3, 4], [2, 3, 4, 5], [3, 4, 5], [4, 5], [5],
    ]
    assert [w.need_sum for w in windows] == [6, 5, 8, 7, 6, 4]


def test_window_sets_example_52():
    """S_3 stops before the need-8 job, which forms S_6 alone"""
    windows = PolicyService.window_sets(PolicyService.order_jobs(state_of(EXAMPLE_52)), 8)
    assert windows[2].ids == [2, 3, 4]
    assert windows[5].ids == [5]


def test_window_sets_single_job():
    windows = PolicyService.window_sets(PolicyService.order_jobs(state_of([8])), 8)
    assert len(windows) == 1 and windows[0].need_sum == 8


# ==================== RA ====================

def test_ra_example_51():
    """RA runs the last four jobs"""
    assert ids(PolicyService.ra_select(state_of(EXAMPLE_51), 8).reserved) == [2, 3, 4, 5]


def test_ra_example_52():
    """RA runs only the need-8 job"""
    assert ids(PolicyService.ra_select(state_of(EXAMPLE_52), 8).reserved) == [5]


def test_ra_fallback_to_first_window():
    """No exact fit: both small jobs run"""
    decision = PolicyService.ra_select(state_of([1, 1]), 8)
    assert ids(decision.reserved) == [0, 1]
    assert not decision.free


def test_ra_empty_state():
    assert PolicyService.ra_select(state_of([]), 8).is_empty()


@given(power_needs, st.lists(st.integers(1, 4), min_size=12, max_size=12))
@hyp_settings(max_examples=200, deadline=None)
def test_ra_picks_minimal_exact_window(needs, arrivals):
    """The reserved set is a window set, and the first exact one when any exists"""
    state = state_of(needs, arrivals=arrivals[:len(needs)])
    windows = PolicyService.window_sets(PolicyService.order_jobs(state), 8)
    chosen = ids(PolicyService.ra_select(state, 8).reserved)
    exact = [w for w in windows if w.need_sum == 8]
    expected = exact[0] if exact else windows[0]
    assert chosen == sorted(expected.ids)


# ==================== SFA ====================

def test_sfa_takes_need_k_job_first():
    """K/2 unit jobs plus a need-K job: the prefix reaches K and the need-K job runs"""
    state = state_of([1, 1, 1, 1, 8])
    assert ids(PolicyService.sfa_select(state, 8).reserved) == [4]


def test_sfa_insufficient_work():
    """Total need below K: everything runs"""
    assert ids(PolicyService.sfa_select(state_of([1, 1, 1, 1]), 8).reserved) == [0, 1, 2, 3]


def test_sfa_fills_prefix():
    """Needs 1,1,2,4,8 by arrival: the prefix {1,1,2,4} fills K exactly"""
    state = state_of([1, 1, 2, 4, 8], arrivals=[1, 2, 3, 4, 5])
    decision = PolicyService.sfa_select(state, 8)
    assert ids(decision.reserved) == [0, 1, 2, 3]
    assert decision.reserved_need == 8


@given(power_needs, st.lists(st.integers(1, 6), min_size=12, max_size=12))
@hyp_settings(max_examples=200, deadline=None)
def test_sfa_stays_in_prefix(needs, arrivals):
    """SFA never admits a job outside the earliest-arrived prefix"""
    state = state_of(needs, arrivals=arrivals[:len(needs)])
    by_arrival = sorted(state.jobs(), key=lambda job: (job.arrival, job.id))
    prefix, total = set(), 0
    for job in by_arrival:
        if total >= 8:
            break
        prefix.add(job.id)
        total += job.need
    decision = PolicyService.sfa_select(state, 8)
    assert decision.reserved <= prefix
    if total >= 8:
        assert decision.reserved_need == 8


# ==================== Greedy ====================

def test_greedy_examples():
    """Smallest needs first, stopping at the first job that does not fit"""
    assert ids(PolicyService.greedy_select(state_of([1, 1, 2, 4, 8]), 8).reserved) == [0, 1, 2, 3]
    assert ids(PolicyService.greedy_select(state_of([2, 2, 8]), 8).reserved) == [0, 1]
    assert ids(PolicyService.greedy_select(state_of([8]), 8).reserved) == [0]


@given(st.lists(st.sampled_from([1, 2, 4, 8]), min_size=1, max_size=10))
@hyp_settings(max_examples=100, deadline=None)
def test_greedy_maximizes_job_count(needs):
    """No feasible subset has more jobs than Greedy's prefix"""
    decision = PolicyService.greedy_select(state_of(needs), 8)
    best = max(
        size for size in range(len(needs) + 1)
        if any(sum(c) <= 8 for c in combinations(needs, size))
    )
    assert len(decision.reserved) == best


# ==================== RA-E ====================

def test_rae_example_61():
    """Reserved bank runs S_3, the free bank runs the two jobs left over"""
    decision = PolicyService.rae_select(state_of(EXAMPLE_51), 8)
    assert ids(decision.reserved) == [2, 3, 4, 5]
    assert ids(decision.free) == [0, 1]


def test_rae_example_62():
    """No exact fit: S_1 on the reserved bank and the need-6 job on the free bank"""
    decision = PolicyService.rae_select(state_of([1, 1, 1, 3, 6]), 8)
    assert ids(decision.reserved) == [0, 1, 2, 3]
    assert ids(decision.free) == [4]


def test_rae_nothing_left_for_free_bank():
    decision = PolicyService.rae_select(state_of([1, 2, 3]), 8)
    assert ids(decision.reserved) == [0, 1, 2]
    assert not decision.free


@given(st.lists(st.integers(1, 8), min_size=1, max_size=10))
@hyp_settings(max_examples=200, deadline=None)
def test_rae_keeps_k_servers_busy(needs):
    """With at least K need held, both banks together occupy at least K servers"""
    decision = PolicyService.rae_select(state_of(needs), 8)
    assert decision.reserved_need <= 8 and decision.free_need <= 8
    assert not decision.reserved & decision.free
    if sum(needs) >= 8:
        assert decision.occupancy >= 8
    else:
        assert len(decision.members) == len(needs)


# ==================== RA-Size ====================

def test_ra_size_weighted_example():
    """(w,s)=(1,8) and (3,1): the need-8 job is the exact window"""
    state = state_of([8, 1], sizes=[1, 3])
    assert ids(PolicyService.ra_size_select(state, 8).reserved) == [0]


def test_ra_size_single_job():
    assert ids(PolicyService.ra_size_select(state_of([2], sizes=[3]), 8).reserved) == [0]


@given(power_needs, st.lists(st.integers(1, 4), min_size=12, max_size=12))
@hyp_settings(max_examples=200, deadline=None)
def test_ra_size_matches_ra_on_unit_sizes(needs, arrivals):
    """With unit sizes the effective-size ordering is the need ordering"""
    state = state_of(needs, arrivals=arrivals[:len(needs)])
    assert PolicyService.ra_size_select(state, 8).reserved == PolicyService.ra_select(state, 8).reserved


# ==================== theta rules ====================

def test_immediate_unit_serves_units_first():
    state = state_of([8, 1, 1, 1, 1])
    assert ids(PolicyService.immediate_unit_select(state, 8).reserved) == [1, 2, 3, 4]


def test_theta_t_waits_for_k_units():
    """Four units wait behind a need-8 job until a second batch arrives"""
    waiting = state_of([8, 1, 1, 1, 1])
    assert ids(PolicyService.theta_t_select(waiting, 8).reserved) == [0]

    ready = state_of([8] + [1] * 8)
    assert ids(PolicyService.theta_t_select(ready, 8).reserved) == list(range(1, 9))

    alone = state_of([1, 1])
    assert ids(PolicyService.theta_t_select(alone, 8).reserved) == [0, 1]


# ==================== exact fit ====================

def _jobs(needs):
    return [Job(id=index, arrival=1, need=need) for index, need in enumerate(needs)]


def test_exact_fit_examples():
    assert [job.need for job in PolicyService.exact_fit_subset(_jobs([8, 1]), 8)] == [8]
    assert [job.need for job in PolicyService.exact_fit_subset(_jobs([4, 4, 2, 1]), 8)] == [4, 4]
    assert PolicyService.exact_fit_subset(_jobs([2, 1]), 8) is None


def test_exact_fit_backtracks_past_greedy():
    """Greedy takes 4 and gets stuck; backtracking finds 3+3"""
    subset = PolicyService.exact_fit_subset(_jobs([4, 3, 3]), 6)
    assert sorted(job.need for job in subset) == [3, 3]
    assert PolicyService.exact_fit_subset(_jobs([4, 4]), 6) is None


def test_exact_fit_node_cap():
    with pytest.raises(SearchBudgetExceeded):
        PolicyService.exact_fit_subset(_jobs([5, 3, 3]), 6, node_cap=1)


@pytest.mark.parametrize("K", [2, 4, 8])
def test_exact_fit_on_every_large_multiset(K):
    """Every power-of-two multiset of at least K jobs contains an exact fit"""
    summary = VerificationService.sweep_exact_fit(K, K + 3)
    print(f"K={K}: {summary.instances} multisets checked")
    assert summary.instances > 0
    assert summary.holds
    assert summary.inconclusive == 0


# ==================== registry ====================

def test_registry_and_lookup():
    assert {"ra", "sfa", "greedy", "ra-e", "ra-size"} <= set(POLICIES)
    assert get_policy("ra-e").banks == 2
    assert get_policy("theta0").select is get_policy("immediate-unit").select
    with pytest.raises(ValidationError):
        get_policy("fcfs")


def test_effective_sizes():
    """w' = remaining size times need, class is floor(log2 w')"""
    views = PolicyService.effective_sizes(state_of([4, 1], sizes=[3, 1]))
    assert [(v.effective, v.size_class) for v in views] == [(12, 3), (1, 0)]
