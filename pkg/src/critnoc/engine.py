"""Cycle-driven simulation kernel: clock, seeded random streams and the run loop.

Every cycle the components are observed in a fixed order::

    cores -> L1 controllers -> NoC (network interfaces, then routers in
    row-major index order, then ejection) -> L2 controllers -> metrics

The NoC backend is allowed to execute several consecutive cycles in one
call as long as no core, L1 or L2 controller has anything to do in those
cycles, so the result is identical to calling every component every cycle.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

DEFAULT_WATCHDOG = 100_000


class WatchdogError(RuntimeError):
    """Raised when packets are stuck and nothing moved for too long."""

    def __init__(self, cycle: int, idle: int, pending: int):
        super().__init__(
            f"watchdog: no flit movement or core progress for {idle} cycles "
            f"at cycle {cycle} with {pending} undelivered packets"
        )
        self.cycle = cycle
        self.idle = idle
        self.pending = pending


class SimulationStalled(AssertionError):
    """Nothing is scheduled anywhere, yet the workload has not completed."""

    def __init__(self, cycle: int):
        super().__init__(f"simulation stalled at cycle {cycle}: no pending packets or "
                         f"scheduled core events but the workload is unfinished")
        self.cycle = cycle


@dataclass
class Clock:
    now: int = 0

    def tick(self) -> int:
        self.now += 1
        return self.now

    def advance_to(self, cycle: int) -> None:
        if cycle < self.now:
            raise ValueError(f"clock cannot move backwards ({self.now} -> {cycle})")
        self.now = cycle


class RngStream:
    """Named pseudo-random stream derived from (seed, stream_id).

    Streams are built on numpy's PCG64 seeded through a SeedSequence, so
    the same pair yields the same draws on every platform.
    """

    def __init__(self, seed: int, stream_id: str):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.stream_id = stream_id
        key = zlib.crc32(stream_id.encode("utf-8"))
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, key]))
        )

    def next_random(self, bound: int) -> int:
        return next_random(self, bound)

    def child(self, suffix: str) -> "RngStream":
        return RngStream(self.seed, f"{self.stream_id}/{suffix}")


def next_random(stream: RngStream, bound: int) -> int:
    """Uniform integer in ``[0, bound)``; advances the stream."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    return int(stream.generator.integers(0, bound))


@dataclass(frozen=True)
class RunSummary:
    cycles: int
    completed: bool


class System(Protocol):
    """What the run loop needs from an assembled simulation."""

    def finished(self) -> bool: ...

    def begin_cycle(self, cycle: int) -> None:
        """Core and L1 controller phase for ``cycle``."""

    def next_wake(self, cycle: int) -> Optional[int]:
        """Earliest cycle after ``cycle`` at which a core or controller acts."""

    def advance_network(self, start: int, limit: int) -> int:
        """Run NoC cycles from ``start`` up to (not including) ``limit``.

        Stops early after the first cycle that delivered flits, handing them
        to the L1/L2 controllers. Returns the last executed cycle.
        """

    def end_cycle(self, cycle: int) -> None:
        """L2 controller and metrics phase."""

    def pending_packets(self) -> int: ...

    def last_activity(self) -> int: ...


def run(system: System, max_cycles: Optional[int] = None,
        watchdog: int = DEFAULT_WATCHDOG) -> RunSummary:
    """Run ``system`` until its workload completes or ``max_cycles`` elapse."""
    cycle = 0
    if system.finished():
        return RunSummary(0, True)
    while True:
        if max_cycles is not None and cycle >= max_cycles:
            return RunSummary(max_cycles, False)
        system.begin_cycle(cycle)
        wake = system.next_wake(cycle)
        pending = system.pending_packets()
        if wake is None:
            if not pending:
                if system.finished():
                    return RunSummary(cycle, True)
                raise SimulationStalled(cycle)
            limit = cycle + watchdog + 1
        else:
            limit = max(wake, cycle + 1)
        if max_cycles is not None:
            limit = min(limit, max_cycles)
        # never skip past the point where the watchdog must be checked
        if pending:
            limit = min(limit, max(system.last_activity() + watchdog + 1, cycle + 1))
        last = system.advance_network(cycle, limit)
        system.end_cycle(last)
        cycle = last + 1
        if system.finished():
            return RunSummary(cycle, True)
        pending = system.pending_packets()
        idle = cycle - 1 - system.last_activity()
        if pending and idle >= watchdog:
            raise WatchdogError(cycle, idle, pending)
