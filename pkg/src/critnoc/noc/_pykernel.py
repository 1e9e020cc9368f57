"""Pure-Python NoC fabric: network interfaces, 2-stage VC routers, links.

Timing per router: a flit written into an input buffer at cycle ``t`` does
route compute and VC allocation in ``t`` (stage 1), may win switch
allocation at ``t + stages - 1`` (stage 2) and then spends ``link_cycles``
on the link, so it is written downstream at ``t + stages + link_cycles``.
Credits freed in cycle ``t`` are usable upstream from ``t + 1``. A network
interface writes the flit it injects straight into the local input buffer
of its router in the same cycle; that cycle is the flit's injection time.

This module is the reference semantics; ``_ckernel.pyx`` must produce the
identical flit-event trace.
"""
from __future__ import annotations

import heapq
from collections import deque

from .arbiter import (RoundRobin, VcState, arbitrate_cfi, arbitrate_rr,
                      update_cfi_counter)
from .routing import NUM_PORTS, OPPOSITE, Port, neighbor, route_xy

NI_PORT = 5   # pseudo output port used in trace records for NI injection

BACKEND = "python"


class NocKernel:
    def __init__(self, k: int, n_vcs: int = 3, depth: int = 4,
                 router_stages: int = 2, link_cycles: int = 1,
                 cfi_priority: bool = False, priority_enabled: bool = True,
                 max_wait: int = 0, trace: bool = False):
        if k < 1 or n_vcs < 1 or depth < 1 or router_stages < 1 or link_cycles < 1:
            raise ValueError("invalid NoC parameters")
        self.k = k
        self.n = k * k
        self.n_vcs = n_vcs
        self.depth = depth
        self.stages = router_stages
        self.link = link_cycles
        self.cfi_priority = cfi_priority
        self.priority_enabled = priority_enabled
        self.max_wait = max_wait
        self.tracing = trace
        self.trace: list[tuple] = []

        n, V = self.n, n_vcs
        slots = NUM_PORTS * V
        self.inputs = [[[VcState(depth) for _ in range(V)] for _ in range(NUM_PORTS)]
                       for _ in range(n)]
        self.credits = [[[depth] * V for _ in range(NUM_PORTS)] for _ in range(n)]
        self.busy = [[[False] * V for _ in range(NUM_PORTS)] for _ in range(n)]
        self.rr_sa = [[RoundRobin(slots) for _ in range(NUM_PORTS)] for _ in range(n)]
        self.rr_va = [[RoundRobin(slots) for _ in range(NUM_PORTS)] for _ in range(n)]
        self.buffered = [0] * n

        self.ni_queue: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.ni_vcs = [[VcState(depth, credits_downstream=depth) for _ in range(V)]
                       for _ in range(n)]
        self.ni_next = [[0] * V for _ in range(n)]
        self.ni_busy = [[False] * V for _ in range(n)]
        self.ni_rr = [RoundRobin(V) for _ in range(n)]
        self.ni_active = 0

        # pid -> [src, dst, nflits, is_reply, cfi, ejected]
        self.packets: dict[int, list] = {}
        self.pending_credits: list[tuple] = []
        self.eject_queue: deque = deque()

        self.now = 0
        self.last_move = 0
        self.flits_injected = 0
        self.flits_ejected = 0
        self.packets_injected = 0
        self.packets_ejected = 0
        self.queued = 0

    # -- host interface -------------------------------------------------
    @property
    def pending(self) -> int:
        return len(self.packets)

    def add_packet(self, pid: int, src: int, dst: int, nflits: int,
                   is_reply: bool, cfi: int, inject_at: int) -> None:
        if pid in self.packets:
            raise ValueError(f"duplicate packet id {pid}")
        if not (0 <= src < self.n and 0 <= dst < self.n) or nflits < 1:
            raise ValueError("invalid packet")
        self.packets[pid] = [src, dst, nflits, bool(is_reply), cfi, 0]
        heapq.heappush(self.ni_queue[src], (max(inject_at, self.now), pid))
        self.queued += 1

    def take_trace(self) -> list[tuple]:
        out, self.trace = self.trace, []
        return out

    def run(self, limit: int) -> list[tuple[int, int, int, int]]:
        """Execute cycles until ``limit`` or the first cycle that ejects flits.

        Returns ``(cycle, packet_id, seq, inject_cycle)`` per ejected flit.
        """
        while self.now < limit:
            if self._quiet():
                nxt = self._next_injection()
                if nxt is None or nxt >= limit:
                    self.now = limit
                    break
                if nxt > self.now:
                    self.now = nxt
            events = self._step(self.now)
            self.now += 1
            if events:
                return events
        return []

    # -- cycle ----------------------------------------------------------
    def _quiet(self) -> bool:
        return (not self.pending_credits and not self.eject_queue
                and self.ni_active == 0 and not any(self.buffered))

    def _next_injection(self):
        heads = [q[0][0] for q in self.ni_queue if q]
        return min(heads) if heads else None

    def _step(self, c: int) -> list:
        self._apply_credits()
        for node in range(self.n):
            if self.ni_queue[node] or self.ni_active:
                self._ni_tick(node, c)
        for r in range(self.n):
            if self.buffered[r]:
                self._router_tick(r, c)
        return self._eject(c)

    def _apply_credits(self) -> None:
        credits, self.pending_credits = self.pending_credits, []
        for is_ni, node, port, vc, tail in credits:
            if is_ni:
                self.ni_vcs[node][vc].credits_downstream += 1
                if tail:
                    self.ni_busy[node][vc] = False
            else:
                self.credits[node][port][vc] += 1
                if tail:
                    self.busy[node][port][vc] = False

    def _ni_tick(self, node: int, c: int) -> None:
        V = self.n_vcs
        queue, vcs, busy = self.ni_queue[node], self.ni_vcs[node], self.ni_busy[node]
        while queue and queue[0][0] <= c:
            free = next((v for v in range(V) if not busy[v]), None)
            if free is None:
                break
            _, pid = heapq.heappop(queue)
            self.queued -= 1
            info = self.packets[pid]
            busy[free] = True
            vcs[free].bind(pid, info[3], info[4])
            self.ni_next[node][free] = 0
            self.ni_active += 1
        cands = [v for v in range(V)
                 if vcs[v].occupant is not None and vcs[v].credits_downstream > 0]
        if not cands:
            return
        rr = self.ni_rr[node]
        if self.cfi_priority:
            win = arbitrate_cfi([(v, vcs[v]) for v in cands], rr,
                                self.priority_enabled, self.max_wait)
        else:
            win = arbitrate_rr(cands, rr)
        vc = vcs[win]
        pid = vc.occupant
        seq = self.ni_next[node][win]
        info = self.packets[pid]
        is_tail = seq == info[2] - 1
        if self.tracing:
            for v in cands:
                o = vcs[v]
                self.trace.append((c, "I" if v == win else "C", node, Port.L, v, NI_PORT,
                                   o.occupant, self.ni_next[node][v], o.priority_value(),
                                   int(o.is_critical())))
        for v in cands:
            if v != win:
                vcs[v].waited += 1
        vc.waited = 0
        dest = self.inputs[node][Port.L][win]
        if seq == 0:
            dest.bind(pid, info[3], info[4])
        dest.buffer.append((pid, seq, c, c))
        assert len(dest.buffer) <= self.depth, "local input buffer overflow"
        self.buffered[node] += 1
        vc.credits_downstream -= 1
        self.ni_next[node][win] = seq + 1
        update_cfi_counter(vc, seq, is_tail)
        if is_tail:
            self.ni_active -= 1
            self.packets_injected += 1
        self.flits_injected += 1
        self.last_move = c

    def _router_tick(self, r: int, c: int) -> None:
        V, k = self.n_vcs, self.k
        ports = self.inputs[r]
        x, y = r % k, r // k
        # stage 1: route compute and VC allocation for heads at the buffer front
        va_req: dict[int, list[int]] = {}
        for p in range(NUM_PORTS):
            for v in range(V):
                vc = ports[p][v]
                if not vc.buffer or vc.out_vc >= 0:
                    continue
                pid, seq, arr, _ = vc.buffer[0]
                if arr > c:
                    continue
                if vc.out_port < 0:
                    dst = self.packets[pid][1]
                    vc.out_port = int(route_xy((x, y), (dst % k, dst // k)))
                    if vc.out_port == Port.L:
                        vc.out_vc = 0
                        vc.va_cycle = c
                        continue
                va_req.setdefault(vc.out_port, []).append(p * V + v)
        for o, slots in va_req.items():
            rr = self.rr_va[r][o]
            busy = self.busy[r][o]
            for slot in sorted(slots, key=rr.order):
                free = next((w for w in range(V) if not busy[w]), None)
                if free is None:
                    break
                busy[free] = True
                vc = ports[slot // V][slot % V]
                vc.out_vc = free
                vc.va_cycle = c
                rr.advance_past(slot)

        # stage 2: switch allocation per output port
        sa_req: dict[int, list[int]] = {}
        for p in range(NUM_PORTS):
            for v in range(V):
                vc = ports[p][v]
                if not vc.buffer or vc.out_vc < 0:
                    continue
                arr = vc.buffer[0][2]
                if c < max(arr, vc.va_cycle) + self.stages - 1:
                    continue
                o = vc.out_port
                if o == Port.L or self.credits[r][o][vc.out_vc] > 0:
                    sa_req.setdefault(o, []).append(p * V + v)

        for o in range(NUM_PORTS):
            slots = sa_req.get(o)
            if not slots:
                continue
            rr = self.rr_sa[r][o]
            if self.cfi_priority:
                win = arbitrate_cfi([(s, ports[s // V][s % V]) for s in slots], rr,
                                    self.priority_enabled, self.max_wait)
            else:
                win = arbitrate_rr(slots, rr)
            for s in slots:
                if s != win:
                    ports[s // V][s % V].waited += 1
            if self.tracing:
                for s in slots:
                    vc = ports[s // V][s % V]
                    pid, seq = vc.buffer[0][0], vc.buffer[0][1]
                    self.trace.append((c, "W" if s == win else "C", r, s // V, s % V, o,
                                       pid, seq, vc.priority_value(), int(vc.is_critical())))
            self._depart(r, win // V, win % V, o, c)

    def _depart(self, r: int, p: int, v: int, o: int, c: int) -> None:
        vc = self.inputs[r][p][v]
        pid, seq, _, inj = vc.buffer.popleft()
        self.buffered[r] -= 1
        info = self.packets[pid]
        is_tail = seq == info[2] - 1
        ovc = vc.out_vc
        if p == Port.L:
            self.pending_credits.append((True, r, p, v, is_tail))
        else:
            up = neighbor(r, p, self.k)
            self.pending_credits.append((False, up, OPPOSITE[Port(p)], v, is_tail))
        vc.waited = 0
        update_cfi_counter(vc, seq, is_tail)
        arrive = c + 1 + self.link
        if o == Port.L:
            self.eject_queue.append((arrive, pid, seq, inj))
        else:
            self.credits[r][o][ovc] -= 1
            assert self.credits[r][o][ovc] >= 0, "credit underflow"
            nb = neighbor(r, o, self.k)
            dest = self.inputs[nb][OPPOSITE[Port(o)]][ovc]
            if seq == 0:
                assert dest.occupant is None and not dest.buffer, "VC allocated twice"
                dest.bind(pid, info[3], info[4])
            dest.buffer.append((pid, seq, arrive, inj))
            assert len(dest.buffer) <= self.depth, "input buffer overflow"
            self.buffered[nb] += 1
        self.last_move = c

    def _eject(self, c: int) -> list:
        q = self.eject_queue
        out = []
        while q and q[0][0] == c:
            _, pid, seq, inj = q.popleft()
            info = self.packets[pid]
            info[5] += 1
            assert info[5] == seq + 1, "flits ejected out of order"
            if self.tracing:
                self.trace.append((c, "E", info[1], Port.L, -1, -1, pid, seq, 0, 0))
            if info[5] == info[2]:
                del self.packets[pid]
                self.packets_ejected += 1
            self.flits_ejected += 1
            out.append((c, pid, seq, inj))
        if out:
            self.last_move = c
        return out

    # -- checks ---------------------------------------------------------
    def check_invariants(self) -> None:
        V = self.n_vcs
        for r in range(self.n):
            for p in range(NUM_PORTS):
                for v in range(V):
                    vc = self.inputs[r][p][v]
                    assert len(vc.buffer) <= self.depth
                    pids = {f[0] for f in vc.buffer}
                    assert len(pids) <= 1, "two packets share a VC buffer"
                    if vc.buffer:
                        assert vc.occupant in pids
                    seqs = [f[1] for f in vc.buffer]
                    assert seqs == sorted(seqs)
                    if vc.occupant is not None:
                        assert 0 <= vc.cfi_counter
        assert self.flits_injected >= self.flits_ejected
