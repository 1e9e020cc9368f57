import io

from critnoc.noc.network import Network
from critnoc.noc.flit import make_request, packetize_reply
from critnoc.noc.trace import TraceEvent, audit, parse_trace


def run_traffic(priority: bool):
    buf = io.StringIO()
    net = Network(4, cfi_priority=priority, trace=buf)
    net.sink = lambda *a: None
    pid = 0
    for t in range(0, 60, 2):
        for dst in range(16):
            src = 5
            if dst % 3 == 0:
                pkt = make_request(pid, dst, src, 64 * pid)
            else:
                pkt = packetize_reply(list(range(8)), (pid + dst) % 4, dst, src, packet_id=pid)
            net.send(pkt, t)
            pid += 1
    while net.pending():
        net.advance(10**6)
    net.flush_trace()
    net.check_invariants()
    return buf.getvalue()


def test_priority_trace_passes_audit():
    rep = audit(parse_trace(io.StringIO(run_traffic(True))))
    assert rep.ok, rep.summary()
    assert rep.arbitrations > 0 and rep.injected == rep.ejected


def test_round_robin_trace_fails_priority_check_only():
    events = list(parse_trace(io.StringIO(run_traffic(False))))
    assert audit(events, check_priority=False).ok
    assert audit(events).priority_violations


def ev(cycle, kind, node, pid, seq, ctr=0, crit=0, out=2, vc=0):
    return TraceEvent(cycle, kind, node, 4, vc, out, pid, seq, ctr, crit)


def test_audit_flags_each_violation_kind():
    bad_priority = [ev(5, "W", 1, 1, 1, 4, 0), ev(5, "C", 1, 2, 1, 0, 1, vc=1)]
    assert audit(bad_priority, complete=False).priority_violations
    bad_counter = [ev(1, "I", 0, 3, 0, 2, 1, out=5), ev(4, "W", 0, 3, 0, 2, 1),
                   ev(5, "W", 0, 3, 1, 1, 1)]
    assert audit(bad_counter, complete=False).counter_violations
    bad_order = [ev(1, "E", 0, 4, 1), ev(2, "E", 0, 4, 0)]
    assert audit(bad_order, complete=False).order_violations
    assert audit([ev(1, "I", 0, 5, 0, out=5)]).order_violations   # not conserved


def test_trace_line_format_roundtrip():
    text = run_traffic(True)
    events = list(parse_trace(io.StringIO(text)))
    assert text.startswith("# cycle kind")
    assert {e.kind for e in events} >= {"I", "W", "E"}
