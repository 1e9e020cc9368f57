"""Assembles cores, caches and the NoC from a config and runs one simulation."""
from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Optional, TextIO

from . import engine
from .config import ExperimentConfig
from .engine import RngStream
from .memory.l1 import L1Controller
from .memory.l2 import L2Bank, memory_controllers
from .metrics.records import MissRecord, Policy, RunStats, summarize
from .noc.flit import MsgOp, Packet
from .noc.network import Network
from .memory.cache import SetAssocCache
from .profiler import CriticalityHistogram, record_miss
from .workload.core import CoreModel, Mode
from .workload.generators import (gen_criticality_profile, gen_hotspot, gen_strided,
                                  gen_uniform, profile_weights)
from .workload.request import MemRequest
from .workload.tracefile import load_trace


def build_requests(cfg: ExperimentConfig) -> list[MemRequest]:
    """The workload's request stream; a pure function of the config."""
    w = cfg.workload
    n = cfg.num_cores
    rng = RngStream(cfg.seed, "workload")
    per_core = w.requests // n
    span = w.footprint_blocks * cfg.block_bytes
    if w.kind == "trace":
        return load_trace(w.trace_path, n)
    if w.kind == "uniform":
        return gen_uniform((w.base, w.base + span), per_core, 0, rng, num_cores=n,
                           store_fraction=w.store_fraction, interval=w.interval)
    if w.kind == "strided":
        streams = [gen_strided(w.base + c * span, w.stride, per_core, c, interval=w.interval)
                   for c in range(n)]
        return [r for i in range(per_core) for s in streams for r in s[i:i + 1]]
    weights = None if w.profile == "uniform" else profile_weights(w.profile)
    if w.kind == "profile":
        return gen_criticality_profile(weights or [1 / 8] * 8, w.footprint_blocks, per_core,
                                       0, rng, num_cores=n, base=w.base,
                                       store_fraction=w.store_fraction, interval=w.interval)
    if w.kind == "hotspot":
        return gen_hotspot(w.hot_bank_fraction, w.footprint_blocks, per_core, rng,
                           num_cores=n, num_banks=n, hot_bank=w.hot_bank,
                           hot_blocks=w.hot_blocks, weights=weights,
                           store_fraction=w.store_fraction, interval=w.interval)
    raise ValueError(f"unknown workload kind {w.kind!r}")


@dataclass
class RunResult:
    config: ExperimentConfig
    stats: RunStats
    records: list[MissRecord]
    profile: CriticalityHistogram
    summary: engine.RunSummary


class Simulation:
    """Implements the engine's ``System`` protocol for one config."""

    def __init__(self, cfg: ExperimentConfig, *, requests: Optional[list[MemRequest]] = None,
                 trace: Optional[TextIO] = None, backend: Optional[str] = None,
                 check_every: int = 0):
        self.cfg = cfg
        self.policy = cfg.policy_enum
        self.network = Network(
            cfg.mesh_k, n_vcs=cfg.n_vcs, depth=cfg.vc_buffer_depth,
            router_stages=cfg.router_stages, link_cycles=cfg.link_cycles,
            cfi_priority=self.policy is Policy.ER_NOC, priority_enabled=cfg.priority_enabled,
            max_wait=cfg.max_wait, backend=backend, trace=trace)
        self.network.sink = self._deliver
        n = cfg.num_cores
        self.profile = CriticalityHistogram(cfg.words_per_block, cfg.word_bytes,
                                            cfg.words_per_flit)
        l1g, l2g = cfg.l1_geometry(), cfg.l2_geometry()
        self.l1s = [L1Controller(c, l1g, self.network, num_banks=n, policy=self.policy,
                                 mshr_count=cfg.mshr_count, hit_latency=cfg.l1_hit_latency,
                                 words_per_flit=cfg.words_per_flit, profile=self.profile)
                    for c in range(n)]
        self.l2s = [L2Bank(b, l2g, self.network, num_banks=n, hit_latency=cfg.l2_hit_latency,
                           memory_latency=cfg.memory_latency, words_per_flit=cfg.words_per_flit,
                           corner_mc=cfg.corner_mc)
                    for b in range(n)]
        self.mcs = (memory_controllers(self.network, memory_latency=cfg.memory_latency,
                                       words_per_flit=cfg.words_per_flit,
                                       words_per_block=cfg.words_per_block,
                                       word_bytes=cfg.word_bytes)
                    if cfg.corner_mc else {})
        if requests is None:
            requests = build_requests(cfg)
        per_core: list[list[MemRequest]] = [[] for _ in range(n)]
        for r in requests:
            if not 0 <= r.core_id < n:
                raise ValueError(f"request for core {r.core_id} on a {n}-core system")
            per_core[r.core_id].append(r)
        self.now = 0
        self._wakes: list[tuple[int, int]] = []
        self.last_core_activity = 0
        mode = Mode(cfg.workload.mode)
        self.cores = [CoreModel(c, per_core[c], self.l1s[c], mode=mode,
                                window=cfg.workload.window, think_time=cfg.workload.think_time,
                                wake=self._wake)
                      for c in range(n)]
        self.requests = len(requests)
        self.check_every = check_every
        self._next_check = check_every

    # -- scheduling --------------------------------------------------------
    def _wake(self, core: int, cycle: int) -> None:
        heapq.heappush(self._wakes, (max(cycle, self.now), core))

    def _deliver(self, packet: Packet, seq: int, cycle: int) -> None:
        self.now = cycle
        op = packet.header.op
        dst = packet.header.dst
        if op is MsgOp.DATA:
            self.l1s[dst].on_flit(packet, seq, cycle)
        elif seq == packet.num_flits - 1:
            if op is MsgOp.MEM_READ:
                self.mcs[dst].on_packet(packet, cycle)
            else:
                self.l2s[dst].on_packet(packet, cycle)

    # -- engine System protocol -------------------------------------------
    def finished(self) -> bool:
        return (self.network.pending() == 0 and all(c.done for c in self.cores)
                and not any(l1.mshr for l1 in self.l1s))

    def begin_cycle(self, cycle: int) -> None:
        self.now = cycle
        wakes = self._wakes
        if not wakes or wakes[0][0] > cycle:
            return
        due = set()
        while wakes and wakes[0][0] <= cycle:
            due.add(heapq.heappop(wakes)[1])
        for c in sorted(due):
            self.cores[c].tick(cycle)
        self.last_core_activity = cycle

    def next_wake(self, cycle: int) -> Optional[int]:
        return self._wakes[0][0] if self._wakes else None

    def advance_network(self, start: int, limit: int) -> int:
        # deliveries rarely wake a core, so keep the fabric going until one does
        net = self.network
        wakes, advance = self._wakes, net.advance
        while True:
            last = advance(limit)
            if (last >= limit - 1 or (wakes and wakes[0][0] <= last + 1)
                    or not net.kernel.pending):
                return last

    def end_cycle(self, cycle: int) -> None:
        if self.check_every and cycle >= self._next_check:
            self.check_invariants()
            self._next_check = cycle + self.check_every

    def pending_packets(self) -> int:
        return self.network.pending()

    def last_activity(self) -> int:
        return max(self.network.last_move, self.last_core_activity)

    # -- results -----------------------------------------------------------
    def check_invariants(self) -> None:
        self.network.check_invariants()
        for l1 in self.l1s:
            l1.check_invariants()
        for core in self.cores:
            core.check_invariants()
        self.profile.check_invariants()

    def run(self, max_cycles: Optional[int] = None) -> RunResult:
        cfg = self.cfg
        limit = max_cycles if max_cycles is not None else cfg.max_cycles
        summary = engine.run(self, limit, cfg.watchdog)
        self.network.flush_trace()
        self.check_invariants()
        return RunResult(cfg, self.stats(summary), self.records(), self.profile, summary)

    def records(self) -> list[MissRecord]:
        out = [r for l1 in self.l1s for r in l1.records]
        return [r for r in out if r.complete]

    def stats(self, summary: engine.RunSummary) -> RunStats:
        cfg = self.cfg
        net = self.network.stats()
        total = max((c.done_cycle for c in self.cores), default=0)
        if cfg.workload.mode == "closed":
            total += 1
        st = summarize(self.records(), self.policy, seed=cfg.seed,
                       workload_id=cfg.workload_id(), mode=cfg.workload.mode,
                       total_cycles=total, sim_cycles=summary.cycles,
                       completed=summary.completed)
        st.requests = sum(c.issued for c in self.cores)
        st.loads = sum(l1.loads for l1 in self.l1s)
        st.stores = sum(l1.stores for l1 in self.l1s)
        st.l1_hits = sum(l1.hits for l1 in self.l1s)
        st.per_core_stall = [c.stall_cycles for c in self.cores]
        st.core_stall_cycles = sum(st.per_core_stall)
        st.mshr_stall_cycles = sum(c.mshr_stall_cycles for c in self.cores)
        st.flits_injected = net["flits_injected"]
        st.flits_ejected = net["flits_ejected"]
        st.packets = net["packets_ejected"]
        st.flit_latency_mean = net["flit_latency_mean"]
        st.flit_latency_hist = dict(sorted(Counter(self.network.latency_hist).items()))
        return st


def simulate(cfg: ExperimentConfig, **kwargs) -> RunResult:
    return Simulation(cfg, **kwargs).run()


def profile_workload(cfg: ExperimentConfig,
                     requests: Optional[list[MemRequest]] = None) -> CriticalityHistogram:
    """Critical-word histogram from an untimed pass through the private L1s.

    Which loads miss depends on the request stream and L1 contents only, so
    the NoC is skipped. A load that would have coalesced into an in-flight
    miss counts as a hit here, because the block is installed immediately.
    """
    if requests is None:
        requests = build_requests(cfg)
    hist = CriticalityHistogram(cfg.words_per_block, cfg.word_bytes, cfg.words_per_flit)
    geom = cfg.l1_geometry()
    caches = [SetAssocCache(geom) for _ in range(cfg.num_cores)]
    mask = geom.block_bytes - 1
    for req in requests:
        cache = caches[req.core_id]
        offset = req.address & mask
        block = req.address - offset
        if cache.lookup(block) is None:
            if req.is_load:
                record_miss(hist, offset)
            cache.install(block, dirty=not req.is_load)
        elif not req.is_load:
            cache.lookup(block, touch=False).dirty = True
    hist.check_invariants()
    return hist
