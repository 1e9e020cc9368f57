"""Private L1 data cache controller with MSHRs and the critical flit identifier.

On a miss the controller computes which data flit will carry the requested
word (in parallel with the tag check, so at no extra latency) and ships it
in the request header. When reply flits come back it restarts the core
either on the tail (Baseline) or on the flit carrying the critical word
(ER, ER-NoC). The block itself is installed only once the tail arrives.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional

from ..metrics.records import MissRecord, Policy
from ..noc.flit import MsgOp, Packet, make_request
from ..profiler import CriticalityHistogram, record_miss
from ..workload.request import MemRequest
from .cache import SetAssocCache
from .geometry import CacheGeometry, map_bank

if TYPE_CHECKING:
    from ..noc.network import Network


class Outcome(Enum):
    HIT = "hit"
    MISS = "miss"
    COALESCED = "coalesced"
    STALL = "stall"


@dataclass
class Access:
    request: MemRequest
    issue_cycle: int
    outcome: Outcome
    cfi: int = 0
    resume_cycle: Optional[int] = None
    record: Optional[MissRecord] = None


@dataclass
class MshrEntry:
    block_address: int
    primary: Access
    cfi: int
    issue_cycle: int
    packet_id: int
    reply_id: Optional[int] = None
    coalesced: list[Access] = field(default_factory=list)
    arrivals: list[int] = field(default_factory=list)
    critical_word_arrival_cycle: Optional[int] = None
    fill_complete_cycle: Optional[int] = None
    dirty: bool = False

    def requesters(self) -> list[Access]:
        return [self.primary, *self.coalesced]


class L1Controller:
    def __init__(self, core_id: int, geom: CacheGeometry, network: "Network", *,
                 num_banks: int, policy: Policy, mshr_count: int = 8,
                 hit_latency: int = 2, words_per_flit: int = 2,
                 profile: Optional[CriticalityHistogram] = None):
        self.core_id = core_id
        self.node = core_id
        self.geom = geom
        self.cache = SetAssocCache(geom)
        self.network = network
        self.num_banks = num_banks
        self.policy = policy
        self.mshr_count = mshr_count
        self.hit_latency = hit_latency
        self.flit_bytes = words_per_flit * geom.word_bytes
        self.data_flits = geom.block_bytes // self.flit_bytes
        self._offset_mask = geom.block_bytes - 1
        self.mshr: dict[int, MshrEntry] = {}
        self.profile = profile
        self.records: list[MissRecord] = []
        self.core = None   # set by the core model
        self.loads = self.stores = self.hits = 0
        self.stall_events = 0
        self.writebacks = 0

    # -- core side ------------------------------------------------------
    def access(self, req: MemRequest, cycle: int) -> Access:
        offset = req.address & self._offset_mask
        block = req.address - offset
        blk = self.cache.lookup(block)
        if blk is not None:
            if not req.is_load:
                blk.dirty = True
            self._count(req)
            self.hits += 1
            return Access(req, cycle, Outcome.HIT, resume_cycle=cycle + self.hit_latency)

        cfi = offset // self.flit_bytes
        entry = self.mshr.get(block)
        if entry is None and len(self.mshr) >= self.mshr_count:
            self.stall_events += 1
            return Access(req, cycle, Outcome.STALL, cfi)

        self._count(req)
        if req.is_load and self.profile is not None:
            record_miss(self.profile, offset)

        if entry is not None:
            acc = Access(req, cycle, Outcome.COALESCED, cfi)
            entry.coalesced.append(acc)
            entry.dirty |= not req.is_load
            if req.is_load:
                acc.record = MissRecord(self.core_id, block, cfi, cycle, True, False)
                self.records.append(acc.record)
                self._replay(entry, acc)
            return acc

        acc = Access(req, cycle, Outcome.MISS, cfi)
        acc.record = MissRecord(self.core_id, block, cfi, cycle, req.is_load, True)
        self.records.append(acc.record)
        pid = self.network.new_id()
        entry = MshrEntry(block, acc, cfi, cycle, pid, dirty=not req.is_load)
        self.mshr[block] = entry
        bank = map_bank(block, self.num_banks, self.geom.block_bytes)
        pkt = make_request(pid, self.node, bank, block, cfi, MsgOp.READ)
        # the request leaves once the tag check has resolved the miss
        self.network.send(pkt, cycle + self.hit_latency)
        return acc

    def _count(self, req: MemRequest) -> None:
        if req.is_load:
            self.loads += 1
        else:
            self.stores += 1

    # -- network side ---------------------------------------------------
    def _clamp(self, acc: Access) -> int:
        return acc.issue_cycle + self.hit_latency

    def _replay(self, entry: MshrEntry, acc: Access) -> None:
        """Bring a late coalescing requester up to date with flits already in."""
        rec = acc.record
        floor = self._clamp(acc)
        for seq, t in enumerate(entry.arrivals):
            self._note(rec, acc, seq, max(t, floor))

    def _note(self, rec: MissRecord, acc: Access, seq: int, t: int) -> None:
        if seq == 0:
            rec.head_arrival = t
            return
        rec.flit_arrivals.append(t)
        if seq - 1 == rec.cfi:
            rec.critical_arrival = t
            if self.policy.early_restart and rec.is_load:
                self._resume(acc, t)

    def _resume(self, acc: Access, t: int) -> None:
        if acc.resume_cycle is not None:
            return
        acc.resume_cycle = t
        acc.record.resume_cycle = t
        if self.core is not None:
            self.core.on_resume(acc, t)

    def on_flit(self, packet: Packet, seq: int, cycle: int) -> None:
        block = packet.header.block_address
        entry = self.mshr.get(block)
        assert entry is not None, f"flit for unknown MSHR entry (block {block:#x})"
        if seq == 0:
            assert entry.reply_id is None, "second reply for one MSHR entry"
            entry.reply_id = packet.id
        assert entry.reply_id == packet.id and seq == len(entry.arrivals), \
            "reply flits out of order"
        entry.arrivals.append(cycle)
        if seq - 1 == entry.cfi:
            entry.critical_word_arrival_cycle = cycle
        acc = entry.primary
        self._note(acc.record, acc, seq, cycle)
        for acc in entry.coalesced:
            if acc.record is not None:
                self._note(acc.record, acc, seq, max(cycle, self._clamp(acc)))
        if seq == packet.num_flits - 1:
            self._fill(entry, cycle)

    def _fill(self, entry: MshrEntry, cycle: int) -> None:
        entry.fill_complete_cycle = cycle
        for acc in entry.requesters():
            rec = acc.record
            if rec is None:
                continue
            rec.fill_complete = max(cycle, self._clamp(acc))
            if rec.is_load:
                self._resume(acc, rec.fill_complete)
        del self.mshr[entry.block_address]
        victim = self.cache.install(entry.block_address, dirty=entry.dirty)
        if victim is not None and victim.dirty:
            self.writebacks += 1
            bank = map_bank(victim.block_address, self.num_banks, self.geom.block_bytes)
            wb = make_request(self.network.new_id(), self.node, bank,
                              victim.block_address, 0, MsgOp.WRITEBACK)
            self.network.send(wb, cycle)
        if self.core is not None:
            self.core.on_mshr_free(cycle)

    def check_invariants(self) -> None:
        assert len(self.mshr) <= self.mshr_count, "MSHR over capacity"
        assert len({e.block_address for e in self.mshr.values()}) == len(self.mshr)
        for e in self.mshr.values():
            if e.critical_word_arrival_cycle is not None and e.fill_complete_cycle is not None:
                assert e.critical_word_arrival_cycle <= e.fill_complete_cycle
        self.cache.check_invariants()
