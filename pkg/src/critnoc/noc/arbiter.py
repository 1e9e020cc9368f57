"""Per-VC router state and the two switch-arbitration policies.

Candidates are identified by their slot ``port * n_vcs + vc``; the
round-robin pointer walks slots in that fixed order.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

NON_CRITICAL = 4   # priority key of the non-critical class, above any 2-bit CFI
PROMOTED = -1      # starvation escape hatch beats everything


class ArbPolicy(Enum):
    ROUND_ROBIN = "rr"
    CFI_PRIORITY = "cfi"


@dataclass
class RoundRobin:
    size: int
    pointer: int = 0

    def order(self, slot: int) -> int:
        return (slot - self.pointer) % self.size

    def advance_past(self, slot: int) -> None:
        self.pointer = (slot + 1) % self.size


@dataclass
class VcState:
    """One virtual channel of one input port.

    ``buffer`` holds ``(packet_id, seq, arrival_cycle, inject_cycle)`` tuples.
    The CFI counter is bound to the occupying packet and only meaningful
    while ``occupant`` is set.
    """

    depth: int = 4
    buffer: deque = field(default_factory=deque)
    occupant: Optional[int] = None
    is_reply: bool = False
    header_cfi: int = 0
    cfi_counter: int = 0
    critical_passed: bool = False
    head_sent: bool = False
    credits_downstream: int = 0
    out_port: int = -1
    out_vc: int = -1
    va_cycle: int = -1
    waited: int = 0

    def bind(self, packet_id: int, is_reply: bool, cfi: int) -> None:
        self.occupant = packet_id
        self.is_reply = is_reply
        self.header_cfi = cfi
        self.cfi_counter = 0
        self.critical_passed = False
        self.head_sent = False
        self.waited = 0

    def release(self) -> None:
        self.occupant = None
        self.is_reply = False
        self.header_cfi = 0
        self.cfi_counter = 0
        self.critical_passed = False
        self.head_sent = False
        self.out_port = -1
        self.out_vc = -1
        self.va_cycle = -1
        self.waited = 0

    def is_critical(self) -> bool:
        return self.is_reply and not self.critical_passed

    def priority_value(self) -> int:
        # a head competes with the CFI it carries; later flits with the counter
        return self.cfi_counter if self.head_sent else self.header_cfi


def arbitrate_rr(candidates: Iterable[int], rr: RoundRobin) -> int:
    """First candidate slot at or after the pointer; moves the pointer past it."""
    slots = list(candidates)
    if not slots:
        raise ValueError("arbitration needs at least one candidate")
    winner = min(slots, key=rr.order)
    rr.advance_past(winner)
    return winner


def priority_key(vc: VcState, enabled: bool = True, max_wait: int = 0) -> int:
    if max_wait and vc.waited >= max_wait:
        return PROMOTED
    if enabled and vc.is_critical():
        return vc.priority_value()
    return NON_CRITICAL


def arbitrate_cfi(candidates: Sequence[tuple[int, VcState]], rr: RoundRobin,
                  enabled: bool = True, max_wait: int = 0) -> int:
    """Critical-class reply flits beat everything else; lower counter first.

    Ties at the same priority are broken by the round-robin pointer, which
    advances past the winner exactly as in :func:`arbitrate_rr`.
    """
    if not candidates:
        raise ValueError("arbitration needs at least one candidate")
    winner = min(candidates,
                 key=lambda c: (priority_key(c[1], enabled, max_wait), rr.order(c[0])))[0]
    rr.advance_past(winner)
    return winner


def update_cfi_counter(vc: VcState, seq: int, is_tail: bool) -> VcState:
    """Apply the counter rule for a flit that just won switch allocation."""
    if seq == 0:
        vc.cfi_counter = vc.header_cfi
        vc.head_sent = True
    elif vc.cfi_counter == 0:
        vc.critical_passed = True
    else:
        vc.cfi_counter -= 1
    assert vc.cfi_counter >= 0, "CFI counter decremented below zero"
    if is_tail:
        vc.release()
    return vc
