"""Synthetic request streams.

Every generator is a pure function of its arguments and the random
stream it is given. Streams for several cores are returned in per-core
program order, cores interleaved by position.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..engine import RngStream
from .request import MemRequest, Op

WORD_BYTES = 8
BLOCK_BYTES = 64

# Share of L1 load misses whose critical word sits in B0, B1, B2 and T.
FLIT_PROFILES: dict[str, tuple[float, float, float, float]] = {
    "blackscholes": (70.37, 11.94, 7.95, 9.74),
    "bodytrack": (45.90, 17.91, 17.38, 18.81),
    "canneal": (54.49, 17.20, 13.38, 14.93),
    "facesim": (82.06, 7.06, 5.40, 5.48),
    "ferret": (67.60, 15.04, 8.56, 8.80),
    "fluidanimate": (67.47, 14.34, 8.23, 9.96),
    "freqmine": (57.50, 13.67, 12.32, 16.51),
    "rtview": (45.59, 20.08, 16.26, 18.07),
    "swaptions": (56.33, 14.21, 14.04, 15.42),
    "barnes": (43.70, 14.69, 19.40, 22.21),
    "cholesky": (67.19, 12.27, 10.26, 10.28),
    "fft": (39.10, 14.69, 7.14, 39.07),
    "fmm": (50.46, 15.19, 13.94, 20.41),
    "lu_cb": (70.99, 6.37, 4.32, 18.32),
    "lu_ncb": (58.41, 34.25, 3.70, 3.64),
    "ocean_cp": (58.96, 14.35, 13.27, 13.42),
    "radix": (37.68, 22.81, 15.47, 24.04),
    "raytrace": (45.03, 22.51, 24.03, 8.43),
}


def profile_weights(name: str) -> list[float]:
    """Eight word weights for a named flit profile.

    Only flit shares are known, so each flit's share is split evenly over
    its two words; rows are renormalised because published rows round.
    """
    try:
        flits = FLIT_PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown criticality profile {name!r}; "
                         f"known: {', '.join(FLIT_PROFILES)}") from None
    total = sum(flits)
    return [f / total / 2 for f in flits for _ in range(2)]


def check_weights(weights: Sequence[float], words: int = 8) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (words,) or np.any(w < 0) or not np.isfinite(w).all():
        raise ValueError(f"need {words} non-negative word weights")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError(f"word weights must sum to 1, got {w.sum():.12f}")
    return w


def _ops(rng: RngStream, n: int, store_fraction: float) -> np.ndarray:
    if not 0.0 <= store_fraction <= 1.0:
        raise ValueError("store_fraction must lie in [0, 1]")
    if store_fraction == 0.0:
        return np.zeros(n, dtype=bool)
    return rng.generator.random(n) < store_fraction


def _build(cores: np.ndarray, addrs: np.ndarray, stores: np.ndarray,
           cycles: np.ndarray) -> list[MemRequest]:
    load, store = Op.LOAD, Op.STORE
    return [MemRequest(int(c), store if s else load, int(a), int(t))
            for c, a, s, t in zip(cores.tolist(), addrs.tolist(), stores.tolist(),
                                  cycles.tolist())]


def _layout(count: int, num_cores: int, interval: int) -> tuple[np.ndarray, np.ndarray]:
    """Core ids and issue cycles for ``count`` requests per core, interleaved."""
    idx = np.arange(count * num_cores)
    return idx % num_cores, (idx // num_cores) * interval


def gen_strided(base: int, stride: int, count: int, core: int = 0, *,
                op: Op = Op.LOAD, interval: int = 1) -> list[MemRequest]:
    if stride < 0:
        raise ValueError("stride must be >= 0")
    return [MemRequest(core, op, base + i * stride, i * interval) for i in range(count)]


def gen_uniform(region: tuple[int, int], count: int, core: int, rng: RngStream, *,
                num_cores: int = 1, store_fraction: float = 0.0,
                interval: int = 1) -> list[MemRequest]:
    """Word-aligned addresses uniform over ``[start, end)``.

    With ``num_cores > 1`` cores ``core .. core + num_cores - 1`` each get
    ``count`` requests.
    """
    start, end = region
    first = -(-start // WORD_BYTES)
    n_words = (end - first * WORD_BYTES + WORD_BYTES - 1) // WORD_BYTES
    if n_words < 1:
        raise ValueError("region holds no aligned word")
    cores, cycles = _layout(count, num_cores, interval)
    n = cores.size
    words = rng.generator.integers(0, n_words, n)
    addrs = (first + words) * WORD_BYTES
    return _build(cores + core, addrs, _ops(rng, n, store_fraction), cycles)


def _offsets(rng: RngStream, n: int, weights: Optional[Sequence[float]]) -> np.ndarray:
    if weights is None:
        return rng.generator.integers(0, BLOCK_BYTES // WORD_BYTES, n) * WORD_BYTES
    w = check_weights(weights)
    return rng.generator.choice(w.size, size=n, p=w) * WORD_BYTES


def gen_criticality_profile(distribution: Sequence[float] | str, footprint: int, count: int,
                            core: int, rng: RngStream, *, num_cores: int = 1, base: int = 0,
                            store_fraction: float = 0.0,
                            interval: int = 1) -> list[MemRequest]:
    """Blocks uniform over ``footprint`` blocks; critical word drawn from ``distribution``.

    ``distribution`` is eight word weights or the name of a flit profile.
    """
    weights = profile_weights(distribution) if isinstance(distribution, str) else distribution
    check_weights(weights)
    if footprint < 1:
        raise ValueError("footprint must hold at least one block")
    cores, cycles = _layout(count, num_cores, interval)
    n = cores.size
    blocks = rng.generator.integers(0, footprint, n)
    addrs = base + blocks * BLOCK_BYTES + _offsets(rng, n, weights)
    return _build(cores + core, addrs, _ops(rng, n, store_fraction), cycles)


def gen_hotspot(hot_bank_fraction: float, background: int, count: int, rng: RngStream, *,
                num_cores: int, num_banks: int, hot_bank: int = 0, hot_blocks: int = 4096,
                weights: Optional[Sequence[float]] = None, store_fraction: float = 0.0,
                interval: int = 1) -> list[MemRequest]:
    """``count`` requests per core; a fraction of them target blocks homed at ``hot_bank``.

    The remainder is uniform over ``background`` blocks of the whole
    address space (so it also lands on the hot bank now and then).
    """
    if not 0.0 < hot_bank_fraction <= 1.0:
        raise ValueError("hot_bank_fraction must lie in (0, 1]")
    if not 0 <= hot_bank < num_banks:
        raise ValueError("hot_bank out of range")
    if background < 1 or hot_blocks < 1:
        raise ValueError("footprints must hold at least one block")
    cores, cycles = _layout(count, num_cores, interval)
    n = cores.size
    gen = rng.generator
    hot = gen.random(n) < hot_bank_fraction
    hot_ids = gen.integers(0, hot_blocks, n) * num_banks + hot_bank
    cold_ids = gen.integers(0, background, n)
    blocks = np.where(hot, hot_ids, cold_ids)
    addrs = blocks * BLOCK_BYTES + _offsets(rng, n, weights)
    return _build(cores, addrs, _ops(rng, n, store_fraction), cycles)
