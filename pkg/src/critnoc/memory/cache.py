"""Set-associative cache array with LRU replacement."""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterator, Optional

from .geometry import CacheGeometry, block_words


@dataclass
class CacheBlockState:
    tag: int
    block_address: int
    valid: bool = True
    dirty: bool = False
    data: Optional[list[int]] = None     # None: synthetic contents, see block_words
    lru_position: int = 0


@dataclass(frozen=True)
class Eviction:
    block_address: int
    dirty: bool


class SetAssocCache:
    """Tag store plus data; each set is an OrderedDict ordered LRU -> MRU.

    ``interleave`` is the number of banks sharing the address space: a bank
    indexes with the bank-local block number ``block_number // interleave``
    so that interleaved banks do not waste sets. With ``interleave=1`` the
    set index and tag are exactly the address bit slices.
    """

    def __init__(self, geom: CacheGeometry, interleave: int = 1):
        self.geom = geom
        self.interleave = interleave
        self.sets: list[OrderedDict[int, CacheBlockState]] = [
            OrderedDict() for _ in range(geom.num_sets)]
        self.hits = 0
        self.misses = 0
        self._stride = geom.block_bytes * interleave
        self._num_sets = geom.num_sets

    def locate(self, block_address: int) -> tuple[int, int]:
        return divmod(block_address // self._stride, self._num_sets)[::-1]

    def lookup(self, block_address: int, touch: bool = True) -> Optional[CacheBlockState]:
        set_index, tag = self.locate(block_address)
        ways = self.sets[set_index]
        blk = ways.get(tag)
        if touch:
            if blk is None:
                self.misses += 1
            else:
                self.hits += 1
                ways.move_to_end(tag)
        return blk

    def contains(self, block_address: int) -> bool:
        return self.lookup(block_address, touch=False) is not None

    def install(self, block_address: int, dirty: bool = False,
                data: Optional[list[int]] = None) -> Optional[Eviction]:
        """Insert a block as MRU; returns the evicted victim, if any."""
        set_index, tag = self.locate(block_address)
        ways = self.sets[set_index]
        blk = ways.get(tag)
        if blk is not None:
            blk.dirty |= dirty
            ways.move_to_end(tag)
            return None
        victim = None
        if len(ways) >= self.geom.associativity:
            _, old = ways.popitem(last=False)
            victim = Eviction(old.block_address, old.dirty)
        ways[tag] = CacheBlockState(tag, block_address, True, dirty, data)
        return victim

    def __iter__(self) -> Iterator[CacheBlockState]:
        for ways in self.sets:
            yield from ways.values()

    def words(self, block_address: int) -> Optional[list[int]]:
        blk = self.lookup(block_address, touch=False)
        if blk is None:
            return None
        if blk.data is not None:
            return blk.data
        return block_words(block_address, self.geom.words_per_block, self.geom.word_bytes)

    def contents(self) -> dict[int, bool]:
        """Block address -> dirty, for every valid block."""
        return {blk.block_address: blk.dirty for blk in self}

    def check_invariants(self) -> None:
        for ways in self.sets:
            assert len(ways) <= self.geom.associativity, "set over-full"
            for pos, blk in enumerate(ways.values()):
                blk.lru_position = pos
            assert sorted(b.lru_position for b in ways.values()) == list(range(len(ways)))
