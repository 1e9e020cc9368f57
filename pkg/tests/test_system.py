import dataclasses
import io

import pytest

from critnoc.config import preset
from critnoc.engine import SimulationStalled, WatchdogError, run
from critnoc.metrics.records import Policy, miss_penalty, rdt
from critnoc.memory.l1 import L1Controller, Outcome
from critnoc.memory.geometry import CacheGeometry
from critnoc.noc.network import Network
from critnoc.noc.trace import audit, parse_trace
from critnoc.system import Simulation, build_requests, profile_workload, simulate
from critnoc.workload.request import MemRequest, Op
from conftest import desk


def open_loop(requests=600, policy="Baseline", **wl):
    return desk(requests, policy=policy,
                workload=dict(mode="open", interval=40, store_fraction=0.2, **wl))


def test_single_miss_timeline():
    cfg = desk(0, policy="ER")
    req = [MemRequest(0, Op.LOAD, 0x10028, 0)]    # word 5, CFI 2, home bank 0
    res = simulate(cfg, requests=req)
    (r,) = res.records
    assert r.cfi == 2 and rdt(r) == 4
    assert r.flit_arrivals == [r.head_arrival + i for i in range(1, 5)]
    assert r.resume_cycle == r.critical_arrival == r.flit_arrivals[2]
    assert miss_penalty(r, Policy.ER)[1] - miss_penalty(r, Policy.ER)[0] == 1


def test_coalesced_miss_shares_reply():
    cfg = desk(0, policy="ER", workload=dict(mode="open", window=2))
    reqs = [MemRequest(0, Op.LOAD, 0x40, 0), MemRequest(0, Op.LOAD, 0x78, 1)]
    res = simulate(cfg, requests=reqs)
    assert res.stats.primary_misses == 1 and res.stats.coalesced == 1
    a, b = res.records
    assert b.critical_arrival == a.flit_arrivals[3]


@pytest.mark.parametrize("policy", [p.value for p in Policy])
def test_closed_loop_runs_clean(policy):
    res = Simulation(desk(1200, policy=policy, workload=dict(store_fraction=0.3)),
                     check_every=500).run()
    st = res.stats
    assert res.summary.completed and st.requests == 1200
    assert st.flits_injected == st.flits_ejected
    assert st.rdt_min >= 4
    for r in res.records:
        s, f = miss_penalty(r, res.config.policy_enum)
        assert s <= f


def test_open_loop_baseline_and_er_share_network_behaviour():
    b = simulate(open_loop(policy="Baseline")).stats
    e = simulate(open_loop(policy="ER")).stats
    assert (b.rdt_mean, b.fill_penalty_total, b.flit_latency_hist) == \
           (e.rdt_mean, e.fill_penalty_total, e.flit_latency_hist)
    assert e.stall_penalty_mean < b.stall_penalty_mean


def test_er_noc_trace_audits_clean():
    buf = io.StringIO()
    Simulation(open_loop(policy="ER-NoC", hot_bank_fraction=0.8, kind="hotspot",
                         profile="fft"), trace=buf).run()
    rep = audit(parse_trace(io.StringIO(buf.getvalue())))
    assert rep.ok, rep.summary()


def test_corner_memory_controllers():
    res = simulate(desk(400, corner_mc=True, policy="ER-NoC"))
    assert res.summary.completed and res.stats.flits_injected == res.stats.flits_ejected


def test_trace_workload(tmp_path):
    path = tmp_path / "t.txt"
    path.write_text("# c core op addr\n0 0 R 0x40\n0 3 W 0x1000\n5 0 R 0x48\n")
    cfg = desk(0, workload=dict(kind="trace", trace_path=str(path), mode="open"))
    res = simulate(cfg)
    assert res.stats.requests == 3 and res.stats.stores == 1


def test_requests_are_a_pure_function_of_config():
    cfg = preset("hotspot")
    cfg.workload.requests = 320
    assert build_requests(cfg) == build_requests(cfg)
    assert build_requests(cfg) != build_requests(dataclasses.replace(cfg, seed=2))


def test_profile_pass_matches_timed_run_without_coalescing():
    cfg = desk(2000, workload=dict(kind="profile", profile="radix"))
    fast = profile_workload(cfg)
    timed = simulate(cfg).profile
    assert fast.flit_counts == timed.flit_counts


def test_mshr_full_stalls():
    net = Network(4)
    l1 = L1Controller(0, CacheGeometry(32768, 8), net, num_banks=16, policy=Policy.ER,
                      mshr_count=2)
    outs = [l1.access(MemRequest(0, Op.LOAD, b * 64), 0).outcome for b in range(3)]
    assert outs == [Outcome.MISS, Outcome.MISS, Outcome.STALL]
    l1.check_invariants()


class _Stuck:
    """Packets that never move and no core activity."""

    def finished(self):
        return False

    def begin_cycle(self, cycle):
        pass

    def next_wake(self, cycle):
        return None

    def advance_network(self, start, limit):
        return limit - 1

    def end_cycle(self, cycle):
        pass

    def pending_packets(self):
        return self.pending

    def last_activity(self):
        return 0


def test_watchdog_and_stall_detection():
    s = _Stuck()
    s.pending = 3
    with pytest.raises(WatchdogError):
        run(s, watchdog=50)
    s.pending = 0
    with pytest.raises(SimulationStalled):
        run(s, watchdog=50)


def test_max_cycles_stops_early():
    res = simulate(dataclasses.replace(desk(2000), max_cycles=500))
    assert not res.summary.completed and res.summary.cycles == 500


@pytest.mark.parametrize("policy", ["Baseline", "ER-NoC"])
def test_backends_give_identical_runs(policy):
    from critnoc.noc.kernel import BACKENDS
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    cfg = desk(300, policy=policy, workload=dict(kind="hotspot", hot_bank_fraction=0.7))
    out = []
    for name in sorted(BACKENDS):
        buf = io.StringIO()
        st = Simulation(cfg, trace=buf, backend=name).run().stats
        out.append((buf.getvalue(), st))
    assert out[0] == out[1]
