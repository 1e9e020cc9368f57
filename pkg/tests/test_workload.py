import pytest
from hypothesis import given, strategies as st

from critnoc.engine import RngStream, next_random
from critnoc.workload.generators import (FLIT_PROFILES, gen_criticality_profile, gen_hotspot,
                                         gen_strided, gen_uniform, profile_weights)
from critnoc.workload.request import MemRequest, Op
from critnoc.workload.tracefile import (TraceFormatError, format_request, load_trace,
                                        parse_lines, parse_trace, write_trace)


def test_rng_streams_are_reproducible_and_independent():
    a = [next_random(RngStream(9, "x"), 1000) for _ in range(1)]
    b = [next_random(RngStream(9, "x"), 1000) for _ in range(1)]
    s1, s2 = RngStream(9, "x"), RngStream(9, "y")
    assert a == b
    assert [s1.next_random(10**9) for _ in range(5)] != [s2.next_random(10**9) for _ in range(5)]
    with pytest.raises(ValueError):
        RngStream(-1, "x")


def test_strided():
    reqs = gen_strided(0x100, 64, 4)
    assert [r.address for r in reqs] == [0x100, 0x140, 0x180, 0x1C0]
    assert all(r.op is Op.LOAD for r in reqs)


def test_uniform_is_word_aligned_and_in_region():
    reqs = gen_uniform((0x1000, 0x2000), 200, 0, RngStream(1, "u"), num_cores=4,
                       store_fraction=0.5)
    assert len(reqs) == 800
    assert all(0x1000 <= r.address < 0x2000 and r.address % 8 == 0 for r in reqs)
    assert [r.core_id for r in reqs[:8]] == [0, 1, 2, 3, 0, 1, 2, 3]
    assert 0 < sum(not r.is_load for r in reqs) < 800


def test_profile_weights_split_flits_evenly():
    w = profile_weights("blackscholes")
    assert abs(sum(w) - 1) < 1e-12 and w[0] == w[1]
    flit_b0 = (w[0] + w[1]) * 100
    assert abs(flit_b0 - 70.37 / sum(FLIT_PROFILES["blackscholes"]) * 100) < 1e-9
    with pytest.raises(ValueError):
        profile_weights("doom")


def test_profile_generator_follows_distribution():
    reqs = gen_criticality_profile([1, 0, 0, 0, 0, 0, 0, 0], 128, 100, 0, RngStream(1, "p"))
    assert all(r.address % 64 == 0 for r in reqs)
    with pytest.raises(ValueError):
        gen_criticality_profile([0.5] * 8, 128, 10, 0, RngStream(1, "p"))


def test_hotspot_targets_hot_bank():
    reqs = gen_hotspot(1.0, 1024, 50, RngStream(3, "h"), num_cores=16, num_banks=16,
                       hot_bank=5, hot_blocks=32)
    assert len(reqs) == 800
    assert all((r.address // 64) % 16 == 5 for r in reqs)


def test_trace_line_parsing():
    r = parse_trace("12 3 W 0x1f40")
    assert r == MemRequest(3, Op.STORE, 0x1F40, 12)
    assert format_request(r) == "12 3 W 0x1f40"
    for bad in ("1 2 R", "x 2 R 0x0", "1 2 Q 0x0", "1 2 R zz", "-1 2 R 0x0"):
        with pytest.raises(TraceFormatError):
            parse_trace(bad, 7)
    with pytest.raises(TraceFormatError, match="line 3"):
        parse_lines(["# hdr", "0 0 R 0x0", "0 99 R 0x0"], num_cores=16)


@given(st.lists(st.tuples(st.integers(0, 10**6), st.integers(0, 15), st.booleans(),
                          st.integers(0, 2**64 - 1)), max_size=30))
def test_trace_file_roundtrip(tmp_path_factory, rows):
    reqs = [MemRequest(c, Op.LOAD if ld else Op.STORE, a, t) for t, c, ld, a in rows]
    path = tmp_path_factory.mktemp("tr") / "t.txt"
    write_trace(path, reqs)
    assert load_trace(path, 16) == reqs
