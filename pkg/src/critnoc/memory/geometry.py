"""Address arithmetic: cache geometry, tag/set/offset split, CFI, home bank."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


@dataclass(frozen=True)
class CacheGeometry:
    size_bytes: int
    associativity: int
    block_bytes: int = 64
    word_bytes: int = 8

    def __post_init__(self):
        for name in ("size_bytes", "associativity", "block_bytes", "word_bytes"):
            if not _is_pow2(getattr(self, name)):
                raise ValueError(f"{name} must be a power of two, got {getattr(self, name)}")
        if self.size_bytes < self.associativity * self.block_bytes:
            raise ValueError("cache smaller than one set")
        if self.word_bytes > self.block_bytes:
            raise ValueError("word larger than block")

    @cached_property
    def num_sets(self) -> int:
        return self.size_bytes // (self.associativity * self.block_bytes)

    @cached_property
    def offset_bits(self) -> int:
        return self.block_bytes.bit_length() - 1

    @cached_property
    def set_bits(self) -> int:
        return self.num_sets.bit_length() - 1

    @property
    def tag_bits(self) -> int:
        return 64 - self.set_bits - self.offset_bits

    @cached_property
    def words_per_block(self) -> int:
        return self.block_bytes // self.word_bytes


@dataclass(frozen=True)
class DecomposedAddress:
    tag: int
    set_index: int
    block_offset: int
    block_address: int


def decompose_address(addr: int, geom: CacheGeometry) -> DecomposedAddress:
    off_bits, set_bits = geom.offset_bits, geom.set_bits
    offset = addr & (geom.block_bytes - 1)
    set_index = (addr >> off_bits) & (geom.num_sets - 1)
    tag = addr >> (off_bits + set_bits)
    return DecomposedAddress(tag, set_index, offset, addr & ~(geom.block_bytes - 1))


def recompose_address(parts: DecomposedAddress, geom: CacheGeometry) -> int:
    return ((parts.tag << (geom.offset_bits + geom.set_bits))
            | (parts.set_index << geom.offset_bits)
            | parts.block_offset)


def critical_flit_index(block_offset: int, flit_payload_bytes: int) -> int:
    """Index of the data flit (0 = first body flit) carrying ``block_offset``."""
    return block_offset // flit_payload_bytes


def compute_cfi(block_offset: int, flit_payload_bytes: int = 16,
                block_bytes: int = 64) -> int:
    """2-bit critical flit identifier: 0 -> B0, 1 -> B1, 2 -> B2, 3 -> tail."""
    if block_bytes // flit_payload_bytes != 4 or block_bytes % flit_payload_bytes:
        raise ValueError("a 2-bit CFI needs exactly four data flits per block")
    if not 0 <= block_offset < block_bytes:
        raise ValueError(f"offset {block_offset} outside a {block_bytes}-byte block")
    return block_offset // flit_payload_bytes


def map_bank(block_address: int, num_banks: int, block_bytes: int = 64) -> int:
    """Home L2 bank of a block: block number interleaved across banks."""
    return (block_address // block_bytes) % num_banks


def corner_nodes(k: int) -> tuple[int, ...]:
    return tuple(sorted({0, k - 1, k * (k - 1), k * k - 1}))


def block_words(block_address: int, words: int = 8, word_bytes: int = 8) -> list[int]:
    """Synthetic block contents: each word holds its own byte address."""
    return [(block_address + i * word_bytes) & 0xFFFFFFFFFFFFFFFF for i in range(words)]
