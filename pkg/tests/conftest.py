import dataclasses
import sys

import pytest

from critnoc.config import ExperimentConfig, preset


def desk(requests: int = 800, **overrides) -> ExperimentConfig:
    """Small desk-preset config; workload fields go in ``workload=dict(...)``."""
    cfg = preset("desk")
    wl = overrides.pop("workload", {})
    cfg = dataclasses.replace(cfg, **overrides)
    cfg.workload = dataclasses.replace(cfg.workload, requests=requests, **wl)
    return cfg


@pytest.fixture
def desk_cfg():
    return desk


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.verdict_line(num, *mod.RESULTS[num]))
