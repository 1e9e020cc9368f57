"""Per-miss records and the evaluation quantities computed from them."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class Policy(Enum):
    BASELINE = "Baseline"
    ER = "ER"
    ER_NOC = "ER-NoC"

    @classmethod
    def parse(cls, text: str) -> "Policy":
        norm = text.strip().lower().replace("_", "-")
        for p in cls:
            if p.value.lower() == norm:
                return p
        raise ValueError(f"unknown policy {text!r} (expected Baseline, ER or ER-NoC)")

    @property
    def early_restart(self) -> bool:
        return self is not Policy.BASELINE


class ConfigMismatchError(ValueError):
    pass


@dataclass
class MissRecord:
    """Timeline of one L1 miss as seen by one requester.

    ``flit_arrivals`` holds the data flits (B0, B1, B2, T for a 5-flit
    reply). For a request that coalesced into an in-flight miss, arrivals
    are clamped to the cycle its own tag check completes.
    """

    core_id: int
    block_address: int
    cfi: int
    miss_cycle: int
    is_load: bool = True
    primary: bool = True
    head_arrival: Optional[int] = None
    flit_arrivals: list[int] = field(default_factory=list)
    critical_arrival: Optional[int] = None
    fill_complete: Optional[int] = None
    resume_cycle: Optional[int] = None

    @property
    def complete(self) -> bool:
        return self.fill_complete is not None and self.head_arrival is not None

    def expected_resume(self, policy: Policy) -> int:
        if policy.early_restart:
            return self.critical_arrival
        return self.fill_complete


def rdt(rec: MissRecord) -> int:
    """Cycles between the first and the last flit of the reply."""
    if not rec.complete:
        raise ValueError("RDT needs a complete record")
    last = rec.flit_arrivals[-1] if rec.flit_arrivals else rec.head_arrival
    return last - rec.head_arrival


def miss_penalty(rec: MissRecord, policy: Policy) -> tuple[int, int]:
    """``(stall_penalty, fill_penalty)`` in cycles."""
    if not rec.complete:
        raise ValueError("miss penalty needs a complete record")
    resume = rec.resume_cycle if rec.resume_cycle is not None else rec.expected_resume(policy)
    return resume - rec.miss_cycle, rec.fill_complete - rec.miss_cycle


def speedup(base: "RunStats", prop: "RunStats") -> float:
    """Execution-time ratio baseline / proposed (< 1 is a slowdown)."""
    if base.workload_id != prop.workload_id:
        raise ConfigMismatchError(
            f"runs used different workloads ({base.workload_id} vs {prop.workload_id})")
    return base.total_cycles / prop.total_cycles


@dataclass
class RunStats:
    policy: str
    seed: int
    workload_id: str
    mode: str
    total_cycles: int
    sim_cycles: int
    completed: bool
    requests: int = 0
    loads: int = 0
    stores: int = 0
    l1_hits: int = 0
    load_misses: int = 0
    primary_misses: int = 0
    coalesced: int = 0
    rdt_count: int = 0
    rdt_mean: float = 0.0
    rdt_min: int = 0
    rdt_max: int = 0
    stall_penalty_mean: float = 0.0
    stall_penalty_total: int = 0
    fill_penalty_mean: float = 0.0
    fill_penalty_total: int = 0
    core_stall_cycles: int = 0
    mshr_stall_cycles: int = 0
    flits_injected: int = 0
    flits_ejected: int = 0
    packets: int = 0
    flit_latency_mean: float = 0.0
    per_core_stall: list[int] = field(default_factory=list)
    flit_latency_hist: dict[int, int] = field(default_factory=dict)


def summarize(records: list[MissRecord], policy: Policy, **run_fields) -> RunStats:
    """Aggregate a miss-record multiset into :class:`RunStats`."""
    stats = RunStats(policy=policy.value, **run_fields)
    replies = [r for r in records if r.primary]
    if replies:
        rdts = [rdt(r) for r in replies]
        stats.rdt_count = len(rdts)
        stats.rdt_mean = sum(rdts) / len(rdts)
        stats.rdt_min = min(rdts)
        stats.rdt_max = max(rdts)
    loads = [r for r in records if r.is_load]
    stats.load_misses = len(loads)
    stats.primary_misses = len(replies)
    stats.coalesced = sum(1 for r in loads if not r.primary)
    if loads:
        pens = [miss_penalty(r, policy) for r in loads]
        stats.stall_penalty_total = sum(p[0] for p in pens)
        stats.fill_penalty_total = sum(p[1] for p in pens)
        stats.stall_penalty_mean = stats.stall_penalty_total / len(loads)
        stats.fill_penalty_mean = stats.fill_penalty_total / len(loads)
    return stats
