import random

import pytest
from hypothesis import given, settings, strategies as st

from critnoc.noc.kernel import BACKEND, BACKENDS, get_kernel
from critnoc.noc.routing import hops

K = 4


def drain(kern, limit=10**7):
    events = []
    while kern.pending:
        events.extend(kern.run(limit))
    return events


def make(name, priority=False, trace=False):
    return BACKENDS[name](K, 3, 4, 2, 1, priority, True, 0, trace)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_zero_load_latency(name):
    rng = random.Random(7)
    for _ in range(10):
        src, dst = rng.randrange(K * K), rng.randrange(K * K)
        kern = make(name)
        kern.add_packet(1, src, dst, 5, True, rng.randrange(4), 100)
        ev = drain(kern)
        arrivals = [c - 100 for c, _, _, _ in ev]
        h = hops(src, dst, K)
        assert arrivals[0] == 3 * h + 3
        assert arrivals == list(range(arrivals[0], arrivals[0] + 5))


def test_default_backend_is_importable():
    assert get_kernel() is BACKENDS[BACKEND]
    with pytest.raises(ValueError):
        get_kernel("fortran")


def test_rejects_duplicate_and_bad_packets():
    kern = make("python")
    kern.add_packet(1, 0, 1, 1, False, 0, 0)
    with pytest.raises(ValueError):
        kern.add_packet(1, 0, 1, 1, False, 0, 0)
    with pytest.raises(ValueError):
        kern.add_packet(2, 0, 99, 1, False, 0, 0)


traffic = st.lists(
    st.tuples(st.integers(0, K * K - 1), st.integers(0, K * K - 1), st.booleans(),
              st.integers(0, 3), st.integers(0, 40)),
    min_size=1, max_size=60)


@settings(max_examples=25, deadline=None)
@given(traffic, st.booleans())
def test_backends_agree_and_conserve(pkts, priority):
    results = []
    for name in sorted(BACKENDS):
        kern = make(name, priority, trace=True)
        for pid, (s, d, rep, cfi, t) in enumerate(pkts):
            kern.add_packet(pid, s, d, 5 if rep else 1, rep, cfi, t)
        ev = drain(kern)
        kern.check_invariants()
        assert kern.flits_injected == kern.flits_ejected == len(ev)
        per_packet = {}
        for _, pid, seq, _ in ev:
            assert seq == per_packet.get(pid, 0)
            per_packet[pid] = seq + 1
        results.append((ev, kern.take_trace()))
    assert all(r == results[0] for r in results)
