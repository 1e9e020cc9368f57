"""Packet-level view of the NoC kernel.

The kernel only knows packet ids, endpoints and flit counts. This wrapper
owns the packet objects, hands out ids, turns ejection events back into
``(packet, seq)`` deliveries and keeps flit latency statistics.
"""
from __future__ import annotations

from collections import Counter
from typing import Callable, Optional, TextIO

from .flit import MsgClass, Packet
from .kernel import get_kernel
from .trace import TraceWriter

Sink = Callable[[Packet, int, int], None]


class Network:
    def __init__(self, k: int, *, n_vcs: int = 3, depth: int = 4, router_stages: int = 2,
                 link_cycles: int = 1, cfi_priority: bool = False,
                 priority_enabled: bool = True, max_wait: int = 0,
                 backend: Optional[str] = None, trace: Optional[TextIO] = None):
        cls = get_kernel(backend)
        self.kernel = cls(k, n_vcs, depth, router_stages, link_cycles,
                          cfi_priority, priority_enabled, max_wait, trace is not None)
        self.k = k
        self.packets: dict[int, Packet] = {}
        self.sink: Optional[Sink] = None
        self.writer = TraceWriter(trace) if trace is not None else None
        self._next_id = 0
        self.latency_hist: Counter[int] = Counter()
        self.latency_total = 0
        self.latency_count = 0

    @property
    def backend(self) -> str:
        import sys
        return getattr(sys.modules[type(self.kernel).__module__], "BACKEND", "unknown")

    def new_id(self) -> int:
        pid = self._next_id
        self._next_id += 1
        return pid

    def send(self, packet: Packet, inject_at: int) -> None:
        self.packets[packet.id] = packet
        h = packet.header
        self.kernel.add_packet(packet.id, h.src, h.dst, packet.num_flits,
                               h.msg_class is MsgClass.REPLY, h.cfi, inject_at)

    def pending(self) -> int:
        return self.kernel.pending

    @property
    def last_move(self) -> int:
        return self.kernel.last_move

    def advance(self, limit: int) -> int:
        """Run the fabric up to ``limit`` (exclusive); returns the last executed cycle.

        Stops right after the first cycle that ejected flits, once those
        flits have been handed to the sink.
        """
        events = self.kernel.run(limit)
        if self.writer is not None:
            self.writer.write_all(self.kernel.take_trace())
        if not events:
            return limit - 1
        packets, sink, hist = self.packets, self.sink, self.latency_hist
        for cycle, pid, seq, inj in events:
            lat = cycle - inj
            hist[lat] += 1
            self.latency_total += lat
            self.latency_count += 1
            pkt = packets[pid]
            if seq == pkt.num_flits - 1:
                del packets[pid]
            if sink is not None:
                sink(pkt, seq, cycle)
        return events[0][0]

    def flush_trace(self) -> None:
        if self.writer is not None:
            self.writer.write_all(self.kernel.take_trace())
            self.writer.flush()

    def stats(self) -> dict:
        kern = self.kernel
        return {
            "flits_injected": kern.flits_injected,
            "flits_ejected": kern.flits_ejected,
            "packets_injected": kern.packets_injected,
            "packets_ejected": kern.packets_ejected,
            "flit_latency_mean": (self.latency_total / self.latency_count
                                  if self.latency_count else 0.0),
        }

    def check_invariants(self) -> None:
        self.kernel.check_invariants()
        assert self.kernel.pending == len(self.packets), "packet registry out of sync"
