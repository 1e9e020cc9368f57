from critnoc.noc.arbiter import (RoundRobin, VcState, arbitrate_cfi, arbitrate_rr,
                                 priority_key, update_cfi_counter)


def reply_vc(cfi: int) -> VcState:
    vc = VcState()
    vc.bind(1, True, cfi)
    return vc


def test_round_robin_rotates():
    rr = RoundRobin(4)
    assert [arbitrate_rr([0, 2, 3], rr) for _ in range(4)] == [0, 2, 3, 0]


def test_counter_walks_down_to_zero():
    vc = reply_vc(2)
    seen = []
    for seq in range(5):
        seen.append((vc.priority_value(), vc.is_critical()))
        update_cfi_counter(vc, seq, seq == 4)
    assert seen == [(2, True), (2, True), (1, True), (0, True), (0, False)]
    assert vc.occupant is None


def test_cfi_zero_and_three():
    for cfi, crit_flits in ((0, 1), (3, 4)):
        vc = reply_vc(cfi)
        update_cfi_counter(vc, 0, False)
        flags = []
        for seq in range(1, 5):
            flags.append(vc.is_critical())
            update_cfi_counter(vc, seq, seq == 4)
        assert flags == [True] * crit_flits + [False] * (4 - crit_flits)


def test_critical_reply_beats_request():
    req = VcState()
    req.bind(2, False, 0)
    rep = reply_vc(3)
    rr = RoundRobin(8)
    assert arbitrate_cfi([(0, req), (5, rep)], rr) == 5
    assert arbitrate_cfi([(0, req), (5, rep)], RoundRobin(8), enabled=False) == 0


def test_lower_counter_wins_and_ties_use_round_robin():
    a, b = reply_vc(1), reply_vc(3)
    assert arbitrate_cfi([(1, b), (2, a)], RoundRobin(8)) == 2
    c, d = reply_vc(2), reply_vc(2)
    rr = RoundRobin(8)
    assert arbitrate_cfi([(1, c), (2, d)], rr) == 1
    assert arbitrate_cfi([(1, c), (2, d)], rr) == 2


def test_starvation_guard_promotes_waiters():
    req = VcState()
    req.bind(2, False, 0)
    req.waited = 10
    assert priority_key(req, max_wait=10) < priority_key(reply_vc(0), max_wait=10)
    assert priority_key(req, max_wait=0) > priority_key(reply_vc(3))
