"""Command-line front end: ``critnoc {run,compare,profile,validate,presets}``."""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import PRESETS, ConfigError, ExperimentConfig, load_config, validate
from .engine import WatchdogError
from .metrics import report as rpt
from .metrics.records import Policy
from .profiler import report as profile_report, to_csv as profile_csv, to_table
from .system import RunResult, Simulation, profile_workload

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSERTION = 3
EXIT_WATCHDOG = 4
EXIT_IO = 5

ALL_POLICIES = [p.value for p in Policy]


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _policies(values: Optional[list[str]], default: list[str]) -> list[Policy]:
    names: list[str] = []
    for v in values or default:
        names.extend(x for x in v.split(",") if x.strip())
    try:
        return [Policy.parse(n) for n in names]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _config(args, policies: Optional[list[Policy]] = None) -> ExperimentConfig:
    cfg = load_config(args.config, args.preset)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "max_cycles", None) is not None:
        changes["max_cycles"] = args.max_cycles
    if policies:
        changes["policy"] = policies[0].value
    if changes:
        cfg = dataclasses.replace(cfg, **changes)
    if getattr(args, "requests", None) is not None:
        cfg.workload = dataclasses.replace(cfg.workload, requests=args.requests)
    return validate(cfg, policies)


def _trace_path(base: str, policy: Policy, many: bool) -> Path:
    p = Path(base)
    if not many:
        return p
    tag = policy.value.lower().replace("-", "_")
    return p.with_name(f"{p.stem}.{tag}{p.suffix}")


def _simulate(cfg: ExperimentConfig, trace_path: Optional[Path]) -> RunResult:
    if trace_path is None:
        return Simulation(cfg).run()
    try:
        fh = open(trace_path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {trace_path}: {exc.strerror or exc}") from None
    with fh:
        return Simulation(cfg, trace=fh).run()


def _run_policy(cfg: ExperimentConfig, trace_path: Optional[Path]) -> RunResult:
    try:
        res = _simulate(cfg, trace_path)
    except WatchdogError as exc:
        raise CliError(EXIT_WATCHDOG, f"{cfg.policy}: {exc}") from None
    except AssertionError as exc:
        raise CliError(EXIT_ASSERTION, f"{cfg.policy}: invariant violated: {exc}") from None
    if not res.summary.completed:
        print(f"warning: {cfg.policy} stopped at max_cycles={res.summary.cycles} "
              f"before the workload completed", file=sys.stderr)
    return res


def _output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        rpt.write_text(out, text)


def cmd_run(args) -> int:
    policies = _policies(args.policy, [])
    cfg = _config(args, policies[:1] or None)
    res = _run_policy(cfg, Path(args.flit_trace) if args.flit_trace else None)
    _output(rpt.emit(res.stats, args.format, cfg.to_dict()), args.out)
    if args.records:
        rpt.write_text(args.records, "".join(l + "\n" for l in rpt.record_lines(res.records)))
    return EXIT_OK


def cmd_compare(args) -> int:
    policies = _policies(args.policy, ALL_POLICIES)
    cfg = _config(args, policies)
    runs = []
    for pol in policies:
        trace = (_trace_path(args.flit_trace, pol, len(policies) > 1)
                 if args.flit_trace else None)
        runs.append(_run_policy(cfg.with_policy(pol), trace).stats)
    config = cfg.to_dict()
    config.pop("policy")
    config["policies"] = [p.value for p in policies]
    cmp = rpt.Comparison(config, runs)
    _output(rpt.emit_comparison(cmp, args.format), args.out)
    if args.charts:
        from .metrics.charts import write_charts
        for path in write_charts(cmp, args.charts):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_profile(args) -> int:
    cfg = _config(args)
    name = cfg.workload.profile if cfg.workload.kind in ("profile", "hotspot") else cfg.workload.kind
    if args.timed:
        hist = _run_policy(cfg, None).profile
    else:
        hist = profile_workload(cfg)
    rep = profile_report(hist, name)
    if args.format == "csv":
        _output(profile_csv([rep], cfg.words_per_block), args.out)
    else:
        _output(to_table(rep) + "\n", args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    policies = _policies(args.policy, [])
    cfg = _config(args, policies or None)
    print(f"ok: {cfg.mesh_k}x{cfg.mesh_k} mesh, {cfg.num_cores} cores, "
          f"{cfg.data_flits + 1}-flit replies, workload {cfg.workload.kind} "
          f"({cfg.workload.requests} requests), policy {cfg.policy}")
    return EXIT_OK


def cmd_presets(args) -> int:
    width = max(len(n) for n in PRESETS)
    for name, (_, desc) in PRESETS.items():
        print(f"{name:<{width}}  {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="critnoc",
        description="Cycle-level NoC many-core memory simulator with critical-flit priority.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file (overrides the preset)")
    common.add_argument("--preset", default="table1", choices=sorted(PRESETS),
                        help="base preset (default: table1)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--requests", type=int, help="override workload.requests")
    common.add_argument("--out", help="write the report here instead of stdout")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--policy", action="append",
                     help="Baseline, ER or ER-NoC; repeat or comma-separate for compare")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--flit-trace", help="write the flit event trace to this path")
    sim.add_argument("--max-cycles", type=int, help="stop after this many cycles")

    p = sub.add_parser("run", parents=[common, sim], help="run one policy")
    p.add_argument("--records", help="write the per-miss record dump (JSON lines)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", parents=[common, sim],
                       help="run several policies on the same workload and seed")
    p.add_argument("--charts", metavar="DIR", help="also write SVG bar charts into DIR")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("profile", parents=[common],
                       help="critical-word position histogram of a workload")
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.add_argument("--timed", action="store_true",
                   help="profile inside a full timing simulation instead of the fast L1 pass")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("validate", parents=[common], help="check a config without running it")
    p.add_argument("--policy", action="append")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="list the built-in presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except rpt.ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
