"""Shared L2 slices and the optional corner memory controllers.

Each bank echoes the CFI of an incoming block request into the head of
its reply. By default an L2 miss simply costs a flat ``memory_latency``;
with ``corner_mc`` the miss travels as a request to the nearest corner
node and the block comes back as a reply-class packet.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from ..noc.flit import MsgClass, MsgOp, Packet, make_request, packetize_reply
from ..noc.routing import hops
from .cache import SetAssocCache
from .geometry import CacheGeometry, block_words, corner_nodes

if TYPE_CHECKING:
    from ..noc.network import Network


@dataclass
class PendingFill:
    """Requests parked at a bank while the block comes back from memory."""

    waiters: list[tuple[int, int]] = field(default_factory=list)   # (requester, cfi)


class L2Bank:
    def __init__(self, node: int, geom: CacheGeometry, network: "Network", *,
                 num_banks: int, hit_latency: int = 8, memory_latency: int = 160,
                 words_per_flit: int = 2, corner_mc: bool = False):
        self.node = node
        self.geom = geom
        self.cache = SetAssocCache(geom, interleave=num_banks)
        self.network = network
        self.hit_latency = hit_latency
        self.memory_latency = memory_latency
        self.words_per_flit = words_per_flit
        self.corner_mc = corner_mc
        self.fill_ready: dict[int, int] = {}
        self.pending: dict[int, PendingFill] = {}
        self.mc_node = _nearest_corner(node, network.k) if corner_mc else -1
        self.hits = self.misses = self.writebacks = 0

    def on_packet(self, packet: Packet, cycle: int) -> None:
        h = packet.header
        if h.op is MsgOp.WRITEBACK:
            self.writebacks += 1
            self.cache.install(h.block_address, dirty=True)
            return
        if h.op is MsgOp.MEM_DATA:
            self._memory_fill(h.block_address, cycle)
            return
        assert h.op is MsgOp.READ, f"L2 bank got {h.op}"
        block = h.block_address
        if block in self.pending:
            self.pending[block].waiters.append((h.src, h.cfi))
            return
        ready = self.fill_ready.get(block)
        if ready is not None and ready <= cycle:
            del self.fill_ready[block]
            ready = None
        if self.cache.lookup(block) is not None:
            self.hits += 1
            start = cycle if ready is None else ready
        else:
            self.misses += 1
            if self.corner_mc:
                self.pending[block] = PendingFill([(h.src, h.cfi)])
                req = make_request(self.network.new_id(), self.node, self.mc_node,
                                   block, h.cfi, MsgOp.MEM_READ)
                self.network.send(req, cycle + self.hit_latency)
                return
            self.cache.install(block)
            start = cycle + self.memory_latency
            self.fill_ready[block] = start
        self._reply(block, h.src, h.cfi, start + self.hit_latency)

    def _memory_fill(self, block: int, cycle: int) -> None:
        self.cache.install(block)
        for requester, cfi in self.pending.pop(block).waiters:
            self._reply(block, requester, cfi, cycle + self.hit_latency)

    def _reply(self, block: int, dst: int, cfi: int, inject_at: int) -> None:
        g = self.geom
        pkt = packetize_reply(block_words(block, g.words_per_block, g.word_bytes), cfi,
                              self.node, dst, packet_id=self.network.new_id(),
                              block_address=block, words_per_flit=self.words_per_flit,
                              words_per_block=g.words_per_block)
        self.network.send(pkt, inject_at)

    def check_invariants(self) -> None:
        self.cache.check_invariants()


class MemoryController:
    """Fixed-latency memory behind a corner node."""

    def __init__(self, node: int, network: "Network", *, memory_latency: int = 160,
                 words_per_flit: int = 2, words_per_block: int = 8, word_bytes: int = 8):
        self.node = node
        self.network = network
        self.memory_latency = memory_latency
        self.words_per_flit = words_per_flit
        self.words_per_block = words_per_block
        self.word_bytes = word_bytes
        self.served = 0

    def on_packet(self, packet: Packet, cycle: int) -> None:
        h = packet.header
        assert h.op is MsgOp.MEM_READ and h.msg_class is MsgClass.REQUEST
        self.served += 1
        pkt = packetize_reply(block_words(h.block_address, self.words_per_block, self.word_bytes),
                              h.cfi, self.node, h.src, packet_id=self.network.new_id(),
                              block_address=h.block_address,
                              words_per_flit=self.words_per_flit,
                              words_per_block=self.words_per_block, op=MsgOp.MEM_DATA)
        self.network.send(pkt, cycle + self.memory_latency)


def _nearest_corner(node: int, k: int) -> int:
    return min(corner_nodes(k), key=lambda c: (hops(node, c, k), c))


def memory_controllers(network: "Network", **kwargs) -> dict[int, MemoryController]:
    return {c: MemoryController(c, network, **kwargs) for c in corner_nodes(network.k)}
