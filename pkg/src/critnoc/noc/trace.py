"""Flit-event trace: writer, parser and an offline audit.

One line per event, space separated::

    cycle kind node in_port in_vc out_port packet seq counter crit

``kind`` is ``I`` (network interface injected the flit), ``W`` (router
switch allocation winner), ``C`` (a requester that lost that same
arbitration) or ``E`` (flit ejected at its destination). ``counter`` and
``crit`` describe the requesting VC before the grant.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, TextIO

HEADER = "# cycle kind node in_port in_vc out_port packet seq counter crit\n"
NI_OUT = 5


class TraceEvent(NamedTuple):
    cycle: int
    kind: str
    node: int
    in_port: int
    in_vc: int
    out_port: int
    packet: int
    seq: int
    counter: int
    crit: int


def format_event(ev: tuple) -> str:
    c, kind, node, ip, iv, op, pid, seq, ctr, crit = ev
    return f"{c} {kind} {node} {int(ip)} {iv} {op} {pid} {seq} {ctr} {crit}\n"


class TraceWriter:
    def __init__(self, stream: TextIO):
        self.stream = stream
        self.count = 0
        stream.write(HEADER)

    def write_all(self, events: Iterable[tuple]) -> None:
        lines = [format_event(ev) for ev in events]
        self.count += len(lines)
        self.stream.writelines(lines)

    def flush(self) -> None:
        self.stream.flush()


def parse_trace(lines: Iterable[str]) -> Iterator[TraceEvent]:
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 10:
            raise ValueError(f"trace line {lineno}: expected 10 fields, got {len(parts)}")
        try:
            nums = [int(p) for i, p in enumerate(parts) if i != 1]
        except ValueError:
            raise ValueError(f"trace line {lineno}: non-integer field") from None
        yield TraceEvent(nums[0], parts[1], *nums[1:])


@dataclass
class AuditReport:
    events: int = 0
    arbitrations: int = 0
    injected: int = 0
    ejected: int = 0
    priority_violations: list[str] = field(default_factory=list)
    counter_violations: list[str] = field(default_factory=list)
    order_violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.priority_violations or self.counter_violations
                    or self.order_violations)

    def summary(self) -> str:
        status = "OK" if self.ok else "FAILED"
        return (f"{status}: {self.events} events, {self.arbitrations} arbitrations, "
                f"{self.injected} flits injected, {self.ejected} ejected, "
                f"{len(self.priority_violations)} priority, "
                f"{len(self.counter_violations)} counter, "
                f"{len(self.order_violations)} ordering violations")


def audit(events: Iterable[TraceEvent], cfi_of: dict[int, int] | None = None,
          check_priority: bool = True, complete: bool = True) -> AuditReport:
    """Check an event stream for arbitration, counter and ordering errors.

    ``cfi_of`` maps reply packet ids to their CFI; when omitted it is taken
    from the counter recorded for each reply's head at injection. Priority
    soundness only makes sense for traces recorded with CFI priority on.
    """
    rep = AuditReport()
    groups: dict[tuple[int, int, int], list[TraceEvent]] = defaultdict(list)
    wins: dict[tuple[int, int], list[TraceEvent]] = defaultdict(list)
    head_cfi: dict[int, int] = {}
    ejected: dict[int, int] = {}
    injected: dict[int, int] = {}
    for ev in events:
        rep.events += 1
        if ev.kind in ("W", "C", "I"):
            groups[(ev.cycle, ev.node, ev.out_port)].append(ev)
        if ev.kind == "I":
            rep.injected += 1
            nxt = injected.get(ev.packet, 0)
            if ev.seq != nxt:
                rep.order_violations.append(f"packet {ev.packet} injected seq {ev.seq}, expected {nxt}")
            injected[ev.packet] = ev.seq + 1
            if ev.seq == 0 and ev.crit:
                head_cfi[ev.packet] = ev.counter
        if ev.kind in ("W", "I"):
            wins[(ev.node if ev.kind == "W" else -1 - ev.node, ev.packet)].append(ev)
        elif ev.kind == "E":
            rep.ejected += 1
            nxt = ejected.get(ev.packet, 0)
            if ev.seq != nxt:
                rep.order_violations.append(f"packet {ev.packet} ejected seq {ev.seq}, expected {nxt}")
            ejected[ev.packet] = ev.seq + 1
    if complete and rep.injected != rep.ejected:
        rep.order_violations.append(
            f"conservation: {rep.injected} flits injected, {rep.ejected} ejected")

    for key, grp in groups.items():
        winners = [e for e in grp if e.kind in ("W", "I")]
        if len(winners) != 1:
            rep.priority_violations.append(f"{len(winners)} winners at {key}")
            continue
        rep.arbitrations += 1
        if not check_priority:
            continue
        w = winners[0]
        for e in grp:
            if e is w or not e.crit:
                continue
            if not w.crit:
                rep.priority_violations.append(
                    f"cycle {e.cycle} node {e.node} port {e.out_port}: non-critical packet "
                    f"{w.packet} beat critical packet {e.packet}")
            elif e.counter < w.counter:
                rep.priority_violations.append(
                    f"cycle {e.cycle} node {e.node} port {e.out_port}: counter {w.counter} "
                    f"beat counter {e.counter}")

    cfis = dict(head_cfi)
    if cfi_of:
        cfis.update(cfi_of)
    for (where, pid), evs in wins.items():
        if pid not in cfis:
            continue
        cfi = cfis[pid]
        data = [e for e in evs if e.seq >= 1]
        for e in data:
            i = e.seq - 1
            want_ctr, want_crit = max(cfi - i, 0), int(i <= cfi)
            if e.counter != want_ctr or e.crit != want_crit:
                site = f"router {where}" if where >= 0 else f"interface {-1 - where}"
                rep.counter_violations.append(
                    f"packet {pid} at {site}: flit {e.seq} counter {e.counter}/crit {e.crit}, "
                    f"expected {want_ctr}/{want_crit}")
    return rep


def audit_file(path: str, **kwargs) -> AuditReport:
    with open(path, encoding="utf-8") as fh:
        return audit(parse_trace(fh), **kwargs)
