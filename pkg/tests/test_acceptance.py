"""Acceptance suite: one pass/fail line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` or directly with
``python tests/test_acceptance.py``. Each criterion is a function returning
``(ok, detail)``; the tolerances are the module constants below.
"""
from __future__ import annotations

import dataclasses
import io
import random
import sys
import time
from pathlib import Path

import pytest

from critnoc.cli import main as cli_main
from critnoc.config import preset
from critnoc.memory.geometry import compute_cfi
from critnoc.metrics.records import Policy, rdt
from critnoc.noc.flit import packetize_reply
from critnoc.noc.network import Network
from critnoc.noc.routing import hops
from critnoc.noc.trace import audit, parse_trace
from critnoc.profiler import report
from critnoc.system import RunResult, Simulation, profile_workload, simulate
from critnoc.workload.request import MemRequest, Op

POLICIES = [p.value for p in Policy]

# pinned tolerances and budgets
ZERO_LOAD_RDT = 4
CYCLES_PER_HOP = 3            # 2 router stages + 1 link cycle
NI_COST = 3                   # destination router and its ejection link; injection is free
SERIALIZATION = 4             # tail arrives this many cycles after the head
EQUIVALENCE_BUDGET_S = 10
HOTSPOT_SEEDS = (1, 2, 3, 4, 5)
HOTSPOT_MIN_REQUESTS = 100_000
HOTSPOT_MIN_GAIN = 0.03
HOTSPOT_BUDGET_S = 120
PROFILE_TARGET = (70.37, 11.94, 7.95, 9.74)
PROFILE_TOL_PP = 0.5
PROFILE_REQUESTS = 1_000_000
PROFILE_BUDGET_S = 60
DEADLOCK_CYCLES = 1_000_000
DEADLOCK_BUDGET_S = 120

RESULTS: dict[int, tuple[str, bool, str]] = {}


def verdict(num: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[num] = (title, ok, detail)
    print(verdict_line(num, title, ok, detail))


def verdict_line(num: int, title: str, ok: bool, detail: str) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {title}: {detail}"


def conserved(res: RunResult) -> bool:
    st = res.stats
    return st.flits_injected == st.flits_ejected and res.summary.completed


def desk(**wl):
    cfg = preset("desk")
    cfg.workload = dataclasses.replace(cfg.workload, **wl)
    return cfg


# -- criteria ------------------------------------------------------------------
def criterion_1():
    oracle = {}
    for flit in range(4):
        for byte in range(16 * flit, 16 * flit + 16):
            oracle[byte] = flit
    bad = [o for o in range(64) if compute_cfi(o) != oracle[o]]
    return not bad and len(oracle) == 64, "64/64 offsets match" if not bad else f"mismatch at {bad}"


def criterion_2():
    rdts = {}
    for pol in POLICIES:
        cfg = preset("desk").with_policy(pol)
        res = simulate(cfg, requests=[MemRequest(6, Op.LOAD, 0x12345628, 0)])
        assert conserved(res)
        (rec,) = res.records
        rdts[pol] = rdt(rec)
    ok = all(v == ZERO_LOAD_RDT for v in rdts.values())
    return ok, ", ".join(f"{p} RDT={v}" for p, v in rdts.items()) + f" (want {ZERO_LOAD_RDT})"


def criterion_3():
    rng = random.Random(2024)
    k = preset("desk").mesh_k
    bad = []
    for pid in range(10):
        src, dst = rng.randrange(k * k), rng.randrange(k * k)
        net = Network(k)
        arrivals = []
        net.sink = lambda pkt, seq, cycle: arrivals.append(cycle)
        net.send(packetize_reply(list(range(8)), rng.randrange(4), src, dst, packet_id=pid), 50)
        while net.pending():
            net.advance(10**6)
        h = hops(src, dst, k)
        head = arrivals[0] - 50
        want = h * CYCLES_PER_HOP + NI_COST
        if head != want or arrivals[-1] - arrivals[0] != SERIALIZATION:
            bad.append((src, dst, head, want, arrivals[-1] - arrivals[0]))
    return not bad, ("10 pairs: head = 3h + 3, tail = head + 4" if not bad else f"bad {bad}")


def _trace(cfg) -> tuple[str, RunResult]:
    buf = io.StringIO()
    res = Simulation(cfg, trace=buf).run()
    assert conserved(res)
    return buf.getvalue(), res


def criterion_4():
    start = time.perf_counter()
    cfg = desk(kind="hotspot", mode="open", requests=6_400, interval=30,
               hot_bank_fraction=0.5, store_fraction=0.1, profile="fft")
    base, _ = _trace(cfg.with_policy("Baseline"))
    er, _ = _trace(cfg.with_policy("ER"))
    noc_off, _ = _trace(dataclasses.replace(cfg.with_policy("ER-NoC"), priority_enabled=False))
    noc_on, _ = _trace(cfg.with_policy("ER-NoC"))
    secs = time.perf_counter() - start
    same = base == er and noc_off == er
    lines = base.count("\n")
    ok = same and secs < EQUIVALENCE_BUDGET_S and noc_on != er
    return ok, (f"{lines} trace lines; Baseline==ER {base == er}, ER-NoC(priority off)==ER "
                f"{noc_off == er}, priority on differs {noc_on != er}; {secs:.1f}s "
                f"(< {EQUIVALENCE_BUDGET_S}s)")


def criterion_5():
    start = time.perf_counter()
    rows = []
    ok = True
    for seed in HOTSPOT_SEEDS:
        cfg = dataclasses.replace(preset("hotspot"), seed=seed)
        assert cfg.workload.mode == "closed" and cfg.num_cores == 16
        assert cfg.workload.requests >= HOTSPOT_MIN_REQUESTS
        stall = {}
        for pol in POLICIES:
            res = simulate(cfg.with_policy(pol))
            ok &= conserved(res) and res.stats.requests == cfg.workload.requests
            stall[pol] = res.stats.stall_penalty_mean
        gain = 1 - stall["ER-NoC"] / stall["ER"]
        seed_ok = stall["ER-NoC"] < stall["ER"] <= stall["Baseline"] and gain >= HOTSPOT_MIN_GAIN
        ok &= seed_ok
        rows.append(f"seed {seed}: {stall['Baseline']:.2f}/{stall['ER']:.2f}/"
                    f"{stall['ER-NoC']:.2f} gain {100 * gain:.2f}%{'' if seed_ok else ' !'}")
    secs = time.perf_counter() - start
    ok &= secs < HOTSPOT_BUDGET_S
    return ok, (f"Baseline/ER/ER-NoC mean stall penalty; {'; '.join(rows)}; "
                f"gain >= {100 * HOTSPOT_MIN_GAIN:.0f}% required; {secs:.1f}s "
                f"(< {HOTSPOT_BUDGET_S}s)")


def criterion_6():
    details = []
    ok = True
    for pol in POLICIES:
        cfg = desk(requests=3_200, store_fraction=0.3, kind="hotspot", hot_bank_fraction=0.3)
        buf = io.StringIO()
        res = Simulation(cfg.with_policy(pol), trace=buf, check_every=250).run()
        rep = audit(parse_trace(io.StringIO(buf.getvalue())), check_priority=False)
        run_ok = conserved(res) and rep.ok
        ok &= run_ok
        details.append(f"{pol} {res.stats.flits_injected}/{res.stats.flits_ejected} flits, "
                       f"{len(rep.order_violations)} order errors")
    return ok, "; ".join(details) + "; MSHR/VC/window invariants checked every 250 cycles"


def criterion_7():
    cfg = desk(kind="hotspot", mode="open", requests=6_400, interval=20,
               hot_bank_fraction=0.6, profile="fft")
    text, _ = _trace(cfg.with_policy("ER-NoC"))
    events = list(parse_trace(io.StringIO(text)))
    rep = audit(events)
    contested = {(e.cycle, e.node, e.out_port) for e in events if e.kind == "C" and e.crit}
    replies = sum(1 for e in events if e.kind == "I" and e.seq == 0 and e.crit)
    ok = rep.ok and len(contested) > 0 and replies > 0
    return ok, (f"{rep.summary()}; {len(contested)} arbitrations with a losing critical flit; "
                f"counters audited for {replies} replies")


def criterion_8():
    start = time.perf_counter()
    cfg = preset("blackscholes")
    assert cfg.workload.requests == PROFILE_REQUESTS
    hist = profile_workload(cfg)
    pct = report(hist, "blackscholes").flit_pct
    dev = max(abs(a - b) for a, b in zip(pct, PROFILE_TARGET))
    stride = dataclasses.replace(cfg)
    stride.workload = dataclasses.replace(cfg.workload, kind="strided", stride=64,
                                          requests=64_000)
    spct = report(profile_workload(stride), "stride64").flit_pct
    secs = time.perf_counter() - start
    ok = dev <= PROFILE_TOL_PP and spct[0] == 100.0 and secs < PROFILE_BUDGET_S
    return ok, (f"blackscholes {'/'.join(f'{p:.2f}' for p in pct)} max dev {dev:.2f}pp "
                f"(<= {PROFILE_TOL_PP}); stride-64 B0={spct[0]:.2f}%; {secs:.1f}s "
                f"(< {PROFILE_BUDGET_S}s)")


def criterion_9(tmp: Path):
    outs = {}
    for fmt in ("csv", "json"):
        for i in range(2):
            path = tmp / f"cmp{i}.{fmt}"
            rc = cli_main(["compare", "--preset", "desk", "--requests", "1600", "--seed", "7",
                           "--format", fmt, "--out", str(path)])
            assert rc == 0
            outs[(fmt, i)] = path.read_bytes()
    same = {fmt: outs[(fmt, 0)] == outs[(fmt, 1)] for fmt in ("csv", "json")}
    return all(same.values()), ", ".join(f"{f} byte-identical {v}" for f, v in same.items())


def criterion_10():
    start = time.perf_counter()
    cfg = desk(requests=260_000, store_fraction=0.2)
    res = simulate(cfg)
    secs = time.perf_counter() - start
    cycles = res.summary.cycles
    ok = (conserved(res) and res.stats.requests == 260_000 and cycles >= DEADLOCK_CYCLES
          and secs < DEADLOCK_BUDGET_S)
    return ok, (f"{res.stats.requests} requests done in {cycles} cycles (>= {DEADLOCK_CYCLES}), "
                f"no watchdog; {secs:.1f}s (< {DEADLOCK_BUDGET_S}s)")


TITLES = {
    1: "CFI oracle",
    2: "zero-load RDT",
    3: "zero-load latency",
    4: "open-loop trace equivalence",
    5: "hotspot policy ordering",
    6: "conservation and ordering",
    7: "priority soundness and counters",
    8: "profiler fidelity",
    9: "compare determinism",
    10: "deadlock freedom",
}


def _check(num: int, *args) -> None:
    ok, detail = globals()[f"criterion_{num}"](*args)
    verdict(num, TITLES[num], ok, detail)
    assert ok, detail


def test_criterion_01_cfi_oracle():
    _check(1)


def test_criterion_02_zero_load_rdt():
    _check(2)


def test_criterion_03_zero_load_latency():
    _check(3)


def test_criterion_04_open_loop_equivalence():
    _check(4)


@pytest.mark.slow
def test_criterion_05_hotspot_ordering():
    _check(5)


def test_criterion_06_conservation():
    _check(6)


def test_criterion_07_priority_audit():
    _check(7)


@pytest.mark.slow
def test_criterion_08_profiler_fidelity():
    _check(8)


def test_criterion_09_determinism(tmp_path):
    _check(9, tmp_path)


@pytest.mark.slow
def test_criterion_10_deadlock_freedom():
    _check(10)


if __name__ == "__main__":
    import tempfile

    failed = 0
    for n in TITLES:
        try:
            args = (Path(tempfile.mkdtemp()),) if n == 9 else ()
            _check(n, *args)
        except AssertionError:
            failed += 1
    print(f"{len(TITLES) - failed}/{len(TITLES)} criteria passed")
    sys.exit(1 if failed else 0)
