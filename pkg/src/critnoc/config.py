"""Experiment configuration, presets and TOML loading.

A config file is TOML with a ``schema_version`` key, top-level system
parameters and a ``[workload]`` table. Anything left out is taken from the
chosen preset.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .memory.geometry import CacheGeometry
from .metrics.records import Policy
from .workload.generators import FLIT_PROFILES

SCHEMA_VERSION = 1
WORKLOAD_KINDS = ("uniform", "strided", "profile", "hotspot", "trace")


class ConfigError(ValueError):
    """A config file or preset combination violates a constraint."""


@dataclass
class WorkloadSpec:
    kind: str = "uniform"
    mode: str = "closed"
    requests: int = 16_000          # total over all cores
    window: int = 1
    think_time: int = 0
    interval: int = 1               # open loop: cycles between a core's issues
    store_fraction: float = 0.0
    footprint_blocks: int = 1 << 16
    base: int = 0
    stride: int = 64
    profile: str = "blackscholes"
    hot_bank: int = 0
    hot_bank_fraction: float = 0.5
    hot_blocks: int = 4096
    trace_path: Optional[str] = None


@dataclass
class ExperimentConfig:
    mesh_k: int = 8
    n_vcs: int = 3
    vc_buffer_depth: int = 4
    channel_bits: int = 128
    words_per_block: int = 8
    word_bits: int = 64
    router_stages: int = 2
    link_cycles: int = 1
    l1_size: int = 32 * 1024
    l1_assoc: int = 8
    l1_hit_latency: int = 2
    l2_size: int = 512 * 1024
    l2_assoc: int = 16
    l2_hit_latency: int = 8
    memory_latency: int = 160
    corner_mc: bool = False
    mshr_count: int = 8
    policy: str = "Baseline"
    priority_enabled: bool = True
    max_wait: int = 0
    seed: int = 1
    max_cycles: Optional[int] = None
    watchdog: int = 100_000
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)

    # -- derived ----------------------------------------------------------
    @property
    def num_cores(self) -> int:
        return self.mesh_k * self.mesh_k

    @property
    def word_bytes(self) -> int:
        return self.word_bits // 8

    @property
    def block_bytes(self) -> int:
        return self.words_per_block * self.word_bytes

    @property
    def words_per_flit(self) -> int:
        return self.channel_bits // self.word_bits

    @property
    def data_flits(self) -> int:
        return self.words_per_block // self.words_per_flit

    @property
    def policy_enum(self) -> Policy:
        return Policy.parse(self.policy)

    def l1_geometry(self) -> CacheGeometry:
        return CacheGeometry(self.l1_size, self.l1_assoc, self.block_bytes, self.word_bytes)

    def l2_geometry(self) -> CacheGeometry:
        return CacheGeometry(self.l2_size, self.l2_assoc, self.block_bytes, self.word_bytes)

    def with_policy(self, policy: Policy | str) -> "ExperimentConfig":
        name = policy.value if isinstance(policy, Policy) else Policy.parse(policy).value
        return dataclasses.replace(self, policy=name)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def workload_id(self) -> str:
        """Digest of everything except the policy: equal ids mean paired runs."""
        d = self.to_dict()
        d.pop("policy")
        d.pop("priority_enabled")
        d.pop("max_wait")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _table1() -> ExperimentConfig:
    return ExperimentConfig(workload=WorkloadSpec(kind="profile", requests=64_000))


def _desk() -> ExperimentConfig:
    return ExperimentConfig(mesh_k=4, workload=WorkloadSpec(kind="uniform", requests=16_000))


def _hotspot() -> ExperimentConfig:
    return ExperimentConfig(
        mesh_k=4,
        workload=WorkloadSpec(kind="hotspot", requests=100_000, think_time=50,
                              hot_bank=5, hot_bank_fraction=1.0, hot_blocks=256,
                              footprint_blocks=1024, profile="fft"),
    )


def _blackscholes() -> ExperimentConfig:
    return ExperimentConfig(
        mesh_k=4,
        workload=WorkloadSpec(kind="profile", requests=1_000_000, profile="blackscholes"),
    )


PRESETS = {
    "table1": (_table1, "8x8 mesh, 64 cores, full-size default system"),
    "desk": (_desk, "4x4 mesh, 16 cores, uniform random loads"),
    "hotspot": (_hotspot, "desk plus a hot L2 bank that congests reply traffic"),
    "blackscholes": (_blackscholes, "desk with 1M loads following the blackscholes profile"),
}


def preset(name: str) -> ExperimentConfig:
    try:
        factory = PRESETS[name][0]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    return factory()


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def validate(cfg: ExperimentConfig, policies: Optional[list[Policy]] = None) -> ExperimentConfig:
    """Check every cross-field constraint; raises :class:`ConfigError` naming it."""
    def need(cond: bool, what: str) -> None:
        if not cond:
            raise ConfigError(f"constraint violated: {what}")

    need(cfg.mesh_k >= 1, "mesh_k >= 1")
    need(cfg.n_vcs >= 1, "n_vcs >= 1")
    need(cfg.vc_buffer_depth >= 1, "vc_buffer_depth >= 1")
    need(cfg.router_stages >= 1 and cfg.link_cycles >= 1, "router_stages and link_cycles >= 1")
    need(cfg.word_bits % 8 == 0 and cfg.word_bits > 0, "word_bits is a positive multiple of 8")
    need(cfg.channel_bits % cfg.word_bits == 0 and cfg.channel_bits >= cfg.word_bits,
         "channel_bits / word_bits = words_per_flit >= 1")
    need(cfg.words_per_block % cfg.words_per_flit == 0,
         "words_per_block is a multiple of words_per_flit")
    try:
        pols = policies if policies is not None else [cfg.policy_enum]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if Policy.ER_NOC in pols:
        need(cfg.data_flits == 4,
             f"words_per_block / words_per_flit = 4 for ER-NoC (2-bit CFI); got {cfg.data_flits}")
    need(cfg.l1_hit_latency >= 1 and cfg.l2_hit_latency >= 1, "cache latencies >= 1")
    need(cfg.memory_latency >= 0, "memory_latency >= 0")
    need(cfg.mshr_count >= 1, "mshr_count >= 1")
    need(cfg.max_wait >= 0, "max_wait >= 0")
    need(0 <= cfg.seed < 2**64, "seed is a 64-bit unsigned integer")
    need(cfg.watchdog >= 1, "watchdog >= 1")
    need(cfg.max_cycles is None or cfg.max_cycles >= 1, "max_cycles >= 1")
    for name, size, assoc in (("l1", cfg.l1_size, cfg.l1_assoc), ("l2", cfg.l2_size, cfg.l2_assoc)):
        need(_is_pow2(size) and _is_pow2(assoc) and _is_pow2(cfg.block_bytes),
             f"{name} size, associativity and block size are powers of two")
        need(size >= assoc * cfg.block_bytes, f"{name}_size >= {name}_assoc * block bytes")
    if cfg.corner_mc:
        need(cfg.mesh_k >= 2, "corner memory controllers need mesh_k >= 2")

    w = cfg.workload
    need(w.kind in WORKLOAD_KINDS, f"workload.kind in {WORKLOAD_KINDS}")
    need(w.mode in ("open", "closed"), "workload.mode is open or closed")
    need(w.requests >= 0, "workload.requests >= 0")
    need(w.window >= 1, "workload.window >= 1")
    need(w.think_time >= 0 and w.interval >= 1, "think_time >= 0 and interval >= 1")
    need(0.0 <= w.store_fraction <= 1.0, "workload.store_fraction in [0, 1]")
    need(w.footprint_blocks >= 1 and w.hot_blocks >= 1, "footprints hold at least one block")
    need(w.stride >= 0, "workload.stride >= 0")
    need(w.base >= 0, "workload.base >= 0")
    if w.kind in ("profile", "hotspot"):
        need(w.profile in FLIT_PROFILES or w.profile == "uniform",
             f"workload.profile names a known profile (or 'uniform'), got {w.profile!r}")
    if w.kind == "hotspot":
        need(0.0 < w.hot_bank_fraction <= 1.0, "workload.hot_bank_fraction in (0, 1]")
        need(0 <= w.hot_bank < cfg.num_cores, "workload.hot_bank is a bank id")
    if w.kind == "trace":
        need(w.trace_path is not None, "workload.trace_path is set for trace workloads")
        if not Path(w.trace_path).is_file():
            raise ConfigError(f"trace file not found: {w.trace_path}")
    return cfg


def _apply(obj: Any, values: dict[str, Any], where: str) -> None:
    known = {f.name: f for f in dataclasses.fields(obj)}
    for key, val in values.items():
        if key not in known:
            raise ConfigError(f"unknown key {where}{key!r}")
        current = getattr(obj, key)
        if dataclasses.is_dataclass(current):
            if not isinstance(val, dict):
                raise ConfigError(f"{where}{key} must be a table")
            _apply(current, val, f"{where}{key}.")
            continue
        if isinstance(current, bool) and not isinstance(val, bool):
            raise ConfigError(f"{where}{key} must be true or false")
        if isinstance(current, int) and not isinstance(current, bool):
            if isinstance(val, bool) or not isinstance(val, int):
                raise ConfigError(f"{where}{key} must be an integer")
        if isinstance(current, float) and (isinstance(val, bool) or not isinstance(val, (int, float))):
            raise ConfigError(f"{where}{key} must be a number")
        if isinstance(current, float):
            val = float(val)
        setattr(obj, key, val)


def from_dict(data: dict[str, Any], base: str = "table1") -> ExperimentConfig:
    data = dict(data)
    version = data.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")
    base = data.pop("preset", base)
    cfg = preset(base)
    _apply(cfg, data, "")
    return cfg


def load_config(path: Optional[str | Path], preset_name: str = "table1") -> ExperimentConfig:
    """Read a TOML config over a preset and validate it."""
    if path is None:
        return validate(preset(preset_name))
    p = Path(path)
    try:
        with open(p, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from None
    trace = data.get("workload", {}).get("trace_path")
    if isinstance(trace, str) and not Path(trace).is_absolute():
        data["workload"]["trace_path"] = str(p.parent / trace)
    return validate(from_dict(data, preset_name))
