"""Run and comparison reports in CSV and JSON.

Both formats carry the schema version and the full config, so a report is
enough to reproduce itself. Field order is fixed and floats are written
with four decimals, which makes repeated emissions byte-identical.

CSV layout::

    # critnoc-report schema_version=1
    # config={...canonical JSON...}
    policy,seed,workload_id,...,speedup
    Baseline,1,...

The ``norm_*`` columns divide a metric by the reference run (Baseline when
present, otherwise the first policy); ``speedup`` is reference cycles over
this run's cycles.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional

from .records import MissRecord, Policy, RunStats, speedup

SCHEMA_VERSION = 1

RUN_FIELDS = (
    "policy", "seed", "workload_id", "mode", "completed", "total_cycles", "sim_cycles",
    "requests", "loads", "stores", "l1_hits", "load_misses", "primary_misses", "coalesced",
    "rdt_count", "rdt_mean", "rdt_min", "rdt_max",
    "stall_penalty_mean", "stall_penalty_total", "fill_penalty_mean", "fill_penalty_total",
    "core_stall_cycles", "mshr_stall_cycles",
    "flits_injected", "flits_ejected", "packets", "flit_latency_mean",
)
NORMALIZED = ("stall_penalty_mean", "fill_penalty_mean", "rdt_mean", "total_cycles",
              "core_stall_cycles")
COMPARE_FIELDS = RUN_FIELDS + tuple(f"norm_{m}" for m in NORMALIZED) + ("speedup",)


class ReportError(OSError):
    """Writing a report failed; the message names the path."""


def _fmt(value: Any) -> Any:
    if isinstance(value, float):
        return float(f"{value:.4f}")
    return value


def _csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


@dataclass
class Comparison:
    """Per-policy stats of one workload plus the normalized view."""

    config: dict[str, Any]
    runs: list[RunStats]

    def reference(self) -> RunStats:
        for r in self.runs:
            if r.policy == Policy.BASELINE.value:
                return r
        return self.runs[0]

    def normalized(self, run: RunStats) -> dict[str, float]:
        ref = self.reference()
        out = {}
        for m in NORMALIZED:
            base = getattr(ref, m)
            out[f"norm_{m}"] = getattr(run, m) / base if base else 0.0
        out["speedup"] = speedup(ref, run) if run.total_cycles else 0.0
        return out

    def rows(self) -> list[dict[str, Any]]:
        return [{**run_row(r), **self.normalized(r)} for r in self.runs]


def run_row(stats: RunStats) -> dict[str, Any]:
    return {f: getattr(stats, f) for f in RUN_FIELDS}


def _csv(rows: list[dict[str, Any]], fields: tuple[str, ...], config: dict[str, Any]) -> str:
    buf = io.StringIO()
    buf.write(f"# critnoc-report schema_version={SCHEMA_VERSION}\n")
    buf.write("# config=" + json.dumps(config, sort_keys=True, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_csv_cell(row[f]) for f in fields])
    return buf.getvalue()


def _json(rows: list[dict[str, Any]], config: dict[str, Any],
          extras: Optional[list[dict[str, Any]]] = None) -> str:
    runs = []
    for i, row in enumerate(rows):
        item = {k: _fmt(v) for k, v in row.items()}
        if extras is not None:
            item.update(extras[i])
        runs.append(item)
    doc = {"schema_version": SCHEMA_VERSION, "config": config, "runs": runs}
    return json.dumps(doc, indent=2) + "\n"


def _extras(stats: RunStats) -> dict[str, Any]:
    return {
        "per_core_stall": list(stats.per_core_stall),
        "flit_latency_hist": {str(k): v for k, v in sorted(stats.flit_latency_hist.items())},
    }


def emit(stats: RunStats, fmt: str, config: dict[str, Any]) -> str:
    """Serialize one run."""
    rows = [run_row(stats)]
    if fmt == "csv":
        return _csv(rows, RUN_FIELDS, config)
    if fmt == "json":
        return _json(rows, config, [_extras(stats)])
    raise ValueError(f"unknown report format {fmt!r} (expected csv or json)")


def emit_comparison(cmp: Comparison, fmt: str) -> str:
    rows = cmp.rows()
    if fmt == "csv":
        return _csv(rows, COMPARE_FIELDS, cmp.config)
    if fmt == "json":
        return _json(rows, cmp.config, [_extras(r) for r in cmp.runs])
    raise ValueError(f"unknown report format {fmt!r} (expected csv or json)")


def write_text(path: str | Path, text: str) -> None:
    p = Path(path)
    try:
        if p.parent != Path(""):
            p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportError(f"cannot write {p}: {exc.strerror or exc}") from exc


def record_lines(records: Iterable[MissRecord]) -> Iterable[str]:
    """Per-miss dump, one JSON object per line, for offline recomputation."""
    for r in records:
        yield json.dumps({
            "core": r.core_id, "block": r.block_address, "cfi": r.cfi,
            "miss": r.miss_cycle, "load": r.is_load, "primary": r.primary,
            "head": r.head_arrival, "flits": r.flit_arrivals,
            "critical": r.critical_arrival, "fill": r.fill_complete,
            "resume": r.resume_cycle,
        }, separators=(",", ":"))


def parse_record_line(line: str) -> MissRecord:
    d = json.loads(line)
    return MissRecord(d["core"], d["block"], d["cfi"], d["miss"], d["load"], d["primary"],
                      d["head"], list(d["flits"]), d["critical"], d["fill"], d["resume"])


def read_csv(text: str) -> tuple[dict[str, Any], list[dict[str, str]]]:
    """Inverse of the CSV writer: ``(config, rows)``."""
    lines = text.splitlines()
    config: dict[str, Any] = {}
    body = []
    for line in lines:
        if line.startswith("# config="):
            config = json.loads(line[len("# config="):])
        elif not line.startswith("#"):
            body.append(line)
    return config, list(csv.DictReader(body))
