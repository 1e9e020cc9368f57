import json

import pytest

from critnoc.metrics.records import (ConfigMismatchError, MissRecord, Policy, RunStats,
                                     miss_penalty, rdt, speedup, summarize)
from critnoc.metrics.report import (COMPARE_FIELDS, RUN_FIELDS, Comparison, ReportError,
                                    emit, emit_comparison, parse_record_line, read_csv,
                                    record_lines, write_text)


def rec(head, flits, miss=100, cfi=0, crit=None):
    r = MissRecord(0, 0x40, cfi, miss, head_arrival=head, flit_arrivals=list(flits),
                   fill_complete=flits[-1] if flits else head)
    r.critical_arrival = crit if crit is not None else (flits[cfi] if flits else head)
    return r


def test_rdt_examples():
    assert rdt(rec(100, [101, 102, 103, 104])) == 4
    assert rdt(rec(100, [101, 105, 110, 139])) == 39
    assert rdt(rec(100, [])) == 0
    with pytest.raises(ValueError):
        rdt(MissRecord(0, 0, 0, 0))


def test_miss_penalty_examples():
    r = rec(120, [125, 130, 140, 150], cfi=1)
    assert miss_penalty(r, Policy.ER) == (30, 50)
    assert miss_penalty(r, Policy.BASELINE) == (50, 50)
    assert miss_penalty(rec(120, [125, 130, 140, 150], cfi=3), Policy.ER) == (50, 50)


def stats(policy="Baseline", cycles=1000, wid="w"):
    return RunStats(policy, 1, wid, "closed", cycles, cycles, True,
                    stall_penalty_mean=10.0, fill_penalty_mean=12.0, rdt_mean=4.5,
                    core_stall_cycles=100, per_core_stall=[50, 50],
                    flit_latency_hist={9: 2, 7: 1})


def test_speedup():
    assert speedup(stats(cycles=1000), stats(cycles=900)) == pytest.approx(1.1111, abs=1e-4)
    assert speedup(stats(), stats()) == 1.0
    assert speedup(stats(cycles=1000), stats(cycles=1100)) == pytest.approx(0.9091, abs=1e-4)
    with pytest.raises(ConfigMismatchError):
        speedup(stats(wid="a"), stats(wid="b"))


def test_summarize_counts():
    recs = [rec(100, [101, 102, 103, 104]), rec(100, [101, 102, 103, 110])]
    recs[1].primary = False
    st = summarize(recs, Policy.ER, seed=1, workload_id="w", mode="open",
                   total_cycles=0, sim_cycles=0, completed=True)
    assert (st.rdt_count, st.rdt_min, st.coalesced, st.load_misses) == (1, 4, 1, 2)


def test_csv_header_and_determinism():
    text = emit(stats(), "csv", {"seed": 1})
    lines = text.splitlines()
    assert lines[0] == "# critnoc-report schema_version=1"
    assert lines[2] == ",".join(RUN_FIELDS)
    assert emit(stats(), "csv", {"seed": 1}) == text
    cfg, rows = read_csv(text)
    assert cfg == {"seed": 1} and rows[0]["stall_penalty_mean"] == "10.0000"


def test_json_roundtrip():
    doc = json.loads(emit(stats(), "json", {"seed": 1}))
    assert doc["schema_version"] == 1
    run = doc["runs"][0]
    assert list(run)[:len(RUN_FIELDS)] == list(RUN_FIELDS)
    assert run["rdt_mean"] == 4.5 and run["flit_latency_hist"] == {"7": 1, "9": 2}


def test_comparison_normalizes_to_baseline():
    cmp = Comparison({}, [stats(), stats("ER", 900)])
    rows = cmp.rows()
    assert rows[0]["norm_stall_penalty_mean"] == 1.0 and rows[0]["speedup"] == 1.0
    assert rows[1]["speedup"] == pytest.approx(1000 / 900)
    assert emit_comparison(cmp, "csv").splitlines()[2] == ",".join(COMPARE_FIELDS)
    with pytest.raises(ValueError):
        emit_comparison(cmp, "xml")


def test_record_dump_roundtrip():
    r = rec(100, [101, 102, 103, 104])
    r.resume_cycle = 101
    assert parse_record_line(next(iter(record_lines([r])))) == r


def test_write_errors_name_the_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ReportError, match="file"):
        write_text(blocker / "out.csv", "data")
