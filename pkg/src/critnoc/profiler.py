"""Where the critical word sits inside missed blocks, per word and per flit."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

FLIT_NAMES = ("B0", "B1", "B2", "T")


@dataclass
class CriticalityHistogram:
    words_per_block: int = 8
    word_bytes: int = 8
    words_per_flit: int = 2
    word_counts: list[int] = field(default_factory=list)
    flit_counts: list[int] = field(default_factory=list)
    total_misses: int = 0

    def __post_init__(self):
        if not self.word_counts:
            self.word_counts = [0] * self.words_per_block
        if not self.flit_counts:
            self.flit_counts = [0] * (self.words_per_block // self.words_per_flit)

    @property
    def block_bytes(self) -> int:
        return self.words_per_block * self.word_bytes

    def flit_names(self) -> list[str]:
        n = len(self.flit_counts)
        if n == 4:
            return list(FLIT_NAMES)
        return [f"B{i}" for i in range(n - 1)] + ["T"]

    def merge(self, other: "CriticalityHistogram") -> None:
        self.word_counts = [a + b for a, b in zip(self.word_counts, other.word_counts)]
        self.flit_counts = [a + b for a, b in zip(self.flit_counts, other.flit_counts)]
        self.total_misses += other.total_misses

    def check_invariants(self) -> None:
        assert sum(self.word_counts) == self.total_misses
        assert sum(self.flit_counts) == self.total_misses
        w = self.words_per_flit
        for i, n in enumerate(self.flit_counts):
            assert n == sum(self.word_counts[i * w:(i + 1) * w])


def record_miss(hist: CriticalityHistogram, block_offset: int) -> CriticalityHistogram:
    if not 0 <= block_offset < hist.block_bytes:
        raise ValueError(f"offset {block_offset} outside a {hist.block_bytes}-byte block")
    word = block_offset // hist.word_bytes
    hist.word_counts[word] += 1
    hist.flit_counts[word // hist.words_per_flit] += 1
    hist.total_misses += 1
    return hist


@dataclass(frozen=True)
class ProfileReport:
    workload: str
    total: int
    word_pct: tuple[float, ...]
    flit_pct: tuple[float, ...]
    flit_names: tuple[str, ...]

    @property
    def empty(self) -> bool:
        return self.total == 0


def report(hist: CriticalityHistogram, workload: str = "workload") -> ProfileReport:
    """Percentages to two decimals; an empty histogram gives an explicit empty report."""
    names = tuple(hist.flit_names())
    if hist.total_misses == 0:
        return ProfileReport(workload, 0, (), (), names)
    n = hist.total_misses
    words = tuple(round(100.0 * c / n, 2) for c in hist.word_counts)
    flits = tuple(round(100.0 * c / n, 2) for c in hist.flit_counts)
    return ProfileReport(workload, n, words, flits, names)


def csv_header(rep: ProfileReport, words_per_block: int = 8) -> list[str]:
    return (["workload"] + [f"w{i}" for i in range(words_per_block)]
            + list(rep.flit_names) + ["total"])


def to_csv(reports: list[ProfileReport], words_per_block: int = 8) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(reports[0], words_per_block))
    for rep in reports:
        if rep.empty:
            writer.writerow([rep.workload] + [""] * (words_per_block + len(rep.flit_names)) + [0])
            continue
        writer.writerow([rep.workload] + [f"{p:.2f}" for p in rep.word_pct]
                        + [f"{p:.2f}" for p in rep.flit_pct] + [rep.total])
    return buf.getvalue()


def to_table(rep: ProfileReport) -> str:
    if rep.empty:
        return f"{rep.workload}: no misses recorded"
    lines = [f"critical word position for {rep.workload} ({rep.total} L1 load misses)"]
    lines.append("  word: " + "  ".join(f"w{i}={p:6.2f}%" for i, p in enumerate(rep.word_pct)))
    lines.append("  flit: " + "  ".join(f"{n}={p:6.2f}%" for n, p in zip(rep.flit_names, rep.flit_pct)))
    return "\n".join(lines)
