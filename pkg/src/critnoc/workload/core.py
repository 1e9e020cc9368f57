"""Simplified cores that issue request streams into their L1 controller.

A closed-loop core keeps at most ``window`` loads outstanding and issues
its next request one cycle after a load resumes (plus ``think_time``).
Stores never block it. An open-loop core issues at the cycles written in
its stream regardless of how memory responds; it only waits when every
MSHR is busy.
"""
from __future__ import annotations

import heapq
from collections import deque
from enum import Enum
from typing import Callable, Iterable, Optional

from ..memory.l1 import Access, L1Controller, Outcome
from .request import MemRequest


class Mode(Enum):
    OPEN = "open"
    CLOSED = "closed"


class CoreModel:
    def __init__(self, core_id: int, requests: Iterable[MemRequest], l1: L1Controller, *,
                 mode: Mode = Mode.CLOSED, window: int = 1, think_time: int = 0,
                 wake: Optional[Callable[[int, int], None]] = None):
        if window < 1 or think_time < 0:
            raise ValueError("window must be >= 1 and think_time >= 0")
        self.core_id = core_id
        self.l1 = l1
        l1.core = self
        self.mode = mode
        self.window = window
        self.think_time = think_time
        reqs = list(requests)
        if mode is Mode.OPEN:
            reqs.sort(key=lambda r: r.cycle)
        self.queue = deque(reqs)
        self.total = len(reqs)
        self._wake = wake or (lambda core, cycle: None)
        self.outstanding = 0
        self.resumes: list[int] = []
        self.next_issue = 0
        self.mshr_blocked_since: Optional[int] = None
        self.full_since: Optional[int] = None
        self.issued = 0
        self.stall_cycles = 0
        self.mshr_stall_cycles = 0
        self.done_cycle = 0
        if self.queue:
            self._wake(core_id, self.queue[0].cycle if mode is Mode.OPEN else 0)

    @property
    def done(self) -> bool:
        return not self.queue and self.outstanding == 0 and self.mshr_blocked_since is None

    # -- events from the L1 ------------------------------------------------
    def on_resume(self, acc: Access, cycle: int) -> None:
        if not acc.request.is_load:
            return
        heapq.heappush(self.resumes, cycle)
        self._wake(self.core_id, cycle + 1)

    def on_mshr_free(self, cycle: int) -> None:
        if self.mshr_blocked_since is not None:
            self._wake(self.core_id, cycle + 1)

    # -- per-cycle behaviour -------------------------------------------
    def _retire(self, cycle: int) -> None:
        """Apply every resume that happened before ``cycle``."""
        while self.resumes and self.resumes[0] < cycle:
            r = heapq.heappop(self.resumes)
            if self.mode is Mode.CLOSED:
                if self.full_since is not None:
                    self.stall_cycles += r - self.full_since
                    self.full_since = None
                self.next_issue = max(self.next_issue, r + 1 + self.think_time)
            self.outstanding -= 1
            self.done_cycle = max(self.done_cycle, r)

    def tick(self, cycle: int) -> None:
        self._retire(cycle)
        if self.mshr_blocked_since is not None:
            if len(self.l1.mshr) >= self.l1.mshr_count:
                return
            waited = cycle - self.mshr_blocked_since
            self.mshr_stall_cycles += waited
            self.stall_cycles += waited
            self.mshr_blocked_since = None
        if self.mode is Mode.OPEN:
            while self.queue and self.queue[0].cycle <= cycle:
                if not self._issue(self.queue[0], cycle):
                    return
            if self.queue:
                self._wake(self.core_id, self.queue[0].cycle)
            return
        if (not self.queue or self.outstanding >= self.window
                or cycle < self.next_issue):
            if self.queue and self.outstanding < self.window:
                self._wake(self.core_id, self.next_issue)
            return
        if self._issue(self.queue[0], cycle) and self.queue and self.outstanding < self.window:
            self._wake(self.core_id, max(cycle + 1, self.next_issue))

    def _issue(self, req: MemRequest, cycle: int) -> bool:
        acc = self.l1.access(req, cycle)
        if acc.outcome is Outcome.STALL:
            self.mshr_blocked_since = cycle
            return False
        self.queue.popleft()
        self.issued += 1
        self.done_cycle = max(self.done_cycle, cycle)
        if req.is_load:
            self.outstanding += 1
            if acc.outcome is Outcome.HIT:
                heapq.heappush(self.resumes, acc.resume_cycle)
                self._wake(self.core_id, acc.resume_cycle + 1)
            if (self.mode is Mode.CLOSED and self.outstanding >= self.window
                    and self.full_since is None):
                self.full_since = cycle
        if self.mode is Mode.CLOSED:
            gap = 0 if req.is_load else self.think_time
            self.next_issue = max(self.next_issue, cycle + 1 + gap)
        return True

    def check_invariants(self) -> None:
        assert self.outstanding >= 0
        if self.mode is Mode.CLOSED:
            assert self.outstanding <= self.window, "closed-loop window exceeded"
