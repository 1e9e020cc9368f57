import pytest

from critnoc.config import ConfigError, from_dict, load_config, preset, validate
from critnoc.metrics.records import Policy


def write(tmp_path, text):
    p = tmp_path / "c.toml"
    p.write_text(text)
    return p


def test_empty_file_gives_table1(tmp_path):
    cfg = load_config(write(tmp_path, ""), "table1")
    assert (cfg.mesh_k, cfg.n_vcs, cfg.data_flits + 1) == (8, 3, 5)
    assert cfg.l1_geometry().num_sets == 64 and cfg.l2_geometry().num_sets == 512


def test_mesh4_accepted(tmp_path):
    cfg = load_config(write(tmp_path, "schema_version = 1\nmesh_k = 4\n"))
    assert cfg.num_cores == 16


def test_er_noc_needs_four_data_flits(tmp_path):
    p = write(tmp_path, 'channel_bits = 64\nword_bits = 64\npolicy = "ER-NoC"\n')
    with pytest.raises(ConfigError, match="ER-NoC"):
        load_config(p)
    cfg = from_dict({"channel_bits": 64})
    validate(cfg)
    with pytest.raises(ConfigError):
        validate(cfg, [Policy.BASELINE, Policy.ER_NOC])


@pytest.mark.parametrize("text,match", [
    ("bogus = 1\n", "unknown key"),
    ("[workload]\nwhat = 2\n", "unknown key workload"),
    ("mesh_k = \"four\"\n", "integer"),
    ("schema_version = 9\n", "schema_version"),
    ("l1_size = 3000\n", "powers of two"),
    ("[workload]\nkind = \"trace\"\ntrace_path = \"missing.txt\"\n", "trace file not found"),
    ("mesh_k = \n", "c.toml"),
])
def test_rejections(tmp_path, text, match):
    with pytest.raises(ConfigError, match=match):
        load_config(write(tmp_path, text))


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/nonexistent/c.toml")


def test_relative_trace_path(tmp_path):
    (tmp_path / "t.txt").write_text("0 0 R 0x40\n")
    cfg = load_config(write(tmp_path, '[workload]\nkind = "trace"\ntrace_path = "t.txt"\n'))
    assert cfg.workload.trace_path == str(tmp_path / "t.txt")


def test_workload_id_ignores_policy_only():
    base = preset("desk")
    assert base.workload_id() == base.with_policy("ER-NoC").workload_id()
    other = preset("desk")
    other.seed = 2
    assert other.workload_id() != base.workload_id()


def test_presets_validate():
    for name in ("table1", "desk", "hotspot", "blackscholes"):
        validate(preset(name), list(Policy))
    with pytest.raises(ConfigError):
        preset("nope")
