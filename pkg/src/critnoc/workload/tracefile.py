"""Line-delimited request traces: ``<cycle> <core_id> <R|W> <hex address>``."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional

from .request import MemRequest, Op

_OPS = {"R": Op.LOAD, "W": Op.STORE}


class TraceFormatError(ValueError):
    def __init__(self, lineno: Optional[int], message: str):
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)
        self.lineno = lineno


def parse_trace(line: str, lineno: Optional[int] = None,
                num_cores: Optional[int] = None) -> MemRequest:
    parts = line.rstrip("\r\n").split(" ")
    if len(parts) != 4:
        raise TraceFormatError(lineno, f"expected 4 space-separated fields, got {line.strip()!r}")
    cycle_s, core_s, op_s, addr_s = parts
    try:
        cycle, core = int(cycle_s), int(core_s)
    except ValueError:
        raise TraceFormatError(lineno, "cycle and core id must be decimal integers") from None
    if cycle < 0 or core < 0:
        raise TraceFormatError(lineno, "cycle and core id must be non-negative")
    op = _OPS.get(op_s)
    if op is None:
        raise TraceFormatError(lineno, f"unknown op {op_s!r} (expected R or W)")
    try:
        addr = int(addr_s, 16)
    except ValueError:
        raise TraceFormatError(lineno, f"bad hex address {addr_s!r}") from None
    if not 0 <= addr < 2**64:
        raise TraceFormatError(lineno, "address does not fit in 64 bits")
    if num_cores is not None and core >= num_cores:
        raise TraceFormatError(lineno, f"core id {core} but the system has {num_cores} cores")
    return MemRequest(core, op, addr, cycle)


def parse_lines(lines: Iterable[str], num_cores: Optional[int] = None) -> list[MemRequest]:
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        out.append(parse_trace(line, lineno, num_cores))
    return out


def load_trace(path: str | Path, num_cores: Optional[int] = None) -> list[MemRequest]:
    with open(path, encoding="utf-8") as fh:
        return parse_lines(fh, num_cores)


def format_request(req: MemRequest) -> str:
    return f"{req.cycle} {req.core_id} {req.op.value} {req.address:#x}"


def write_trace(path: str | Path, requests: Iterable[MemRequest]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for req in requests:
            fh.write(format_request(req) + "\n")
