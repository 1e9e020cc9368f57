"""Flit and packet formats.

A read reply is a head flit followed by data flits of ``words_per_flit``
words each; with the default 128-bit channel and 8-word blocks that is
``H, B0, B1, B2, T``. Requests and writebacks are single HeadTail flits.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence


class FlitKind(Enum):
    HEAD = "H"
    BODY = "B"
    TAIL = "T"
    HEAD_TAIL = "HT"


class MsgClass(Enum):
    REQUEST = "request"
    REPLY = "reply"


class MsgOp(Enum):
    """What a packet is for; only the class matters to the routers."""

    READ = "read"              # L1 -> L2 block request
    WRITEBACK = "writeback"    # L1 -> L2 dirty eviction
    DATA = "data"              # L2 -> L1 block reply
    MEM_READ = "mem_read"      # L2 -> corner memory controller
    MEM_DATA = "mem_data"      # memory controller -> L2


class Header(NamedTuple):
    src: int
    dst: int
    msg_class: MsgClass
    block_address: int
    cfi: int = 0
    op: MsgOp = MsgOp.READ


@dataclass(frozen=True)
class Flit:
    kind: FlitKind
    packet_id: int
    seq: int
    payload: tuple[int, ...] = ()
    header: Optional[Header] = None

    @property
    def is_head(self) -> bool:
        return self.kind in (FlitKind.HEAD, FlitKind.HEAD_TAIL)

    @property
    def is_tail(self) -> bool:
        return self.kind in (FlitKind.TAIL, FlitKind.HEAD_TAIL)


@dataclass(slots=True)
class Packet:
    """A packet as the endpoints see it.

    Only the header and flit count travel through the fabric model, so the
    individual flits are built on demand from ``words``.
    """

    id: int
    header: Header
    num_flits: int
    words: tuple[int, ...] = ()

    @property
    def msg_class(self) -> MsgClass:
        return self.header.msg_class

    @property
    def cfi(self) -> int:
        return self.header.cfi

    @property
    def src(self) -> int:
        return self.header.src

    @property
    def dst(self) -> int:
        return self.header.dst

    @property
    def flits(self) -> list[Flit]:
        if self.num_flits == 1:
            return [Flit(FlitKind.HEAD_TAIL, self.id, 0, tuple(self.words), self.header)]
        n_data = self.num_flits - 1
        per = len(self.words) // n_data
        out = [Flit(FlitKind.HEAD, self.id, 0, (), self.header)]
        for i in range(n_data):
            kind = FlitKind.TAIL if i == n_data - 1 else FlitKind.BODY
            out.append(Flit(kind, self.id, i + 1, tuple(self.words[i * per:(i + 1) * per])))
        return out

    def payload_words(self) -> list[int]:
        return list(self.words)


def make_request(packet_id: int, src: int, dst: int, block_address: int,
                 cfi: int = 0, op: MsgOp = MsgOp.READ) -> Packet:
    return Packet(packet_id, Header(src, dst, MsgClass.REQUEST, block_address, cfi, op), 1)


def packetize_reply(block: Sequence[int], cfi: int, src: int, dst: int, *,
                    packet_id: int = 0, block_address: int = 0,
                    words_per_flit: int = 2, words_per_block: int = 8,
                    op: MsgOp = MsgOp.DATA) -> Packet:
    """Split a data block into ``[H, B0, ..., T]`` with ``cfi`` in the head."""
    if len(block) != words_per_block:
        raise ValueError(f"block must have {words_per_block} words, got {len(block)}")
    if words_per_block % words_per_flit:
        raise ValueError("words_per_block must be a multiple of words_per_flit")
    header = Header(src, dst, MsgClass.REPLY, block_address, cfi, op)
    return Packet(packet_id, header, 1 + words_per_block // words_per_flit, tuple(block))


def reply_flits(words_per_block: int, words_per_flit: int) -> int:
    return 1 + words_per_block // words_per_flit
