from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Op(Enum):
    LOAD = "R"
    STORE = "W"


@dataclass(frozen=True, slots=True)
class MemRequest:
    """One core memory access; ``address`` is the byte address of the critical word.

    ``cycle`` is the issue cycle in open-loop mode and is ignored in
    closed-loop mode, where list order is program order.
    """

    core_id: int
    op: Op
    address: int
    cycle: int = 0

    @property
    def is_load(self) -> bool:
        return self.op is Op.LOAD
