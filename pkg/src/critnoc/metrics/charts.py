"""Bar charts of a policy comparison, written as SVG.

matplotlib is an optional dependency and is only imported here.
"""
from __future__ import annotations

from pathlib import Path

from .report import Comparison, ReportError


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise ReportError("charts need matplotlib (pip install 'artifact[charts]')") from exc
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "critnoc"
    import matplotlib.pyplot as plt
    return plt


def _bar(plt, labels, series: dict[str, list[float]], ylabel: str, title: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    width = 0.8 / max(len(series), 1)
    for i, (name, values) in enumerate(series.items()):
        xs = [j + (i - (len(series) - 1) / 2) * width for j in range(len(labels))]
        ax.bar(xs, values, width, label=name)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.axhline(1.0, color="black", linewidth=0.6)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False)
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)


def write_charts(cmp: Comparison, out_dir: str | Path) -> list[Path]:
    """Normalized miss penalty and speedup charts; returns the files written."""
    plt = _pyplot()
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create {out}: {exc.strerror or exc}") from exc
    rows = cmp.rows()
    labels = [r["policy"] for r in rows]
    penalty = out / "miss_penalty.svg"
    _bar(plt, labels, {
        "stall": [r["norm_stall_penalty_mean"] for r in rows],
        "fill": [r["norm_fill_penalty_mean"] for r in rows],
    }, "normalized to reference", "L1 miss penalty", penalty)
    spd = out / "speedup.svg"
    _bar(plt, labels, {"speedup": [r["speedup"] for r in rows]},
         "reference cycles / cycles", "System speedup", spd)
    return [penalty, spd]
