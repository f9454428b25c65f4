"""Shared fixtures and hypothesis strategies"""
from typing import Iterable, Optional, Sequence, Tuple

import pytest
from hypothesis import strategies as st

from msched.models.job import Job, SizeMode, Trace, TraceMode
from msched.models.state import SystemState


def build_trace(
    K: int,
    rows: Iterable[Tuple[int, int, int]],
    mode: TraceMode = TraceMode.power_of_two,
    size_mode: Optional[SizeMode] = None,
) -> Trace:
    """Trace from (arrival, size, need) rows, ids in row order"""
    rows = list(rows)
    if size_mode is None:
        size_mode = SizeMode.weighted if any(size != 1 for _, size, _ in rows) else SizeMode.unit
    trace = Trace(K=K, mode=mode, size_mode=size_mode)
    for arrival, size, need in rows:
        trace.add_job(arrival=arrival, need=need, size=size)
    return trace


def state_of(needs: Sequence[int], arrivals: Optional[Sequence[int]] = None,
             sizes: Optional[Sequence[int]] = None, slot: int = 1) -> SystemState:
    """Held jobs with ids 0..n-1 in the given order"""
    arrivals = arrivals or [1] * len(needs)
    sizes = sizes or [1] * len(needs)
    jobs = [Job(id=index, arrival=a, size=w, need=s)
            for index, (a, w, s) in enumerate(zip(arrivals, sizes, needs))]
    return SystemState(
        slot=max([slot, *arrivals]),
        remaining={job.id: job.size for job in jobs},
        held={job.id: job for job in jobs},
        arrivals_seen=len(jobs),
    )


@st.composite
def unit_traces(draw, K: int = 4, max_jobs: int = 6, max_arrival: int = 4, power_of_two: bool = True):
    """Small unit-size traces starting at slot 1"""
    if power_of_two:
        need = st.sampled_from([2 ** a for a in range(K.bit_length())])
    else:
        need = st.integers(1, K)
    rows = draw(st.lists(st.tuples(st.integers(1, max_arrival), need), min_size=1, max_size=max_jobs))
    shift = min(arrival for arrival, _ in rows) - 1
    mode = TraceMode.power_of_two if power_of_two else TraceMode.general
    return build_trace(K, sorted((arrival - shift, 1, s) for arrival, s in rows), mode=mode)


@st.composite
def weighted_traces(draw, K: int = 4, max_jobs: int = 4, max_arrival: int = 3, max_size: int = 3):
    """Tiny power-of-two traces with sizes up to max_size"""
    need = st.sampled_from([2 ** a for a in range(K.bit_length())])
    rows = draw(st.lists(
        st.tuples(st.integers(1, max_arrival), st.integers(1, max_size), need),
        min_size=1, max_size=max_jobs,
    ))
    shift = min(arrival for arrival, _, _ in rows) - 1
    return build_trace(K, sorted((a - shift, w, s) for a, w, s in rows), size_mode=SizeMode.weighted)


@pytest.fixture
def example_51():
    """Six jobs at slot 1, K=8, needs 1,1,1,1,2,4"""
    return build_trace(8, [(1, 1, need) for need in (1, 1, 1, 1, 2, 4)])


@pytest.fixture
def example_52():
    """Six jobs at slot 1, K=8, needs 1,1,1,1,2,8"""
    return build_trace(8, [(1, 1, need) for need in (1, 1, 1, 1, 2, 8)])


@pytest.fixture
def example_62():
    """Five jobs at slot 1, K=8, needs 1,1,1,3,6"""
    return build_trace(8, [(1, 1, need) for need in (1, 1, 1, 3, 6)], mode=TraceMode.general)
