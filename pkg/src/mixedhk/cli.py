"""Command-line scenario runner.

    mixedhk run   --scenario NAME | --config FILE [--steps T] [--seed S] [--out DIR] [--monitors a,b]
    mixedhk check NAME|all [--steps T] [--seed S] [--trials N] [--out DIR]
    mixedhk list

Exit status: 0 success, 1 runtime error, 2 configuration error, 3 a contract
or check failed. The output directory defaults to $BC_OUT_DIR, else ".".
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import monitors as mon
from .engine import ConfigError, WorldConfig, run
from .scenarios import Scenario, check_scenario, get_scenario, library

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_CONTRACT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _out_dir(arg: str | None) -> Path:
    out = Path(arg or os.environ.get("BC_OUT_DIR") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mixedhk", description="Mixed Hegselmann-Krause simulator and property checker.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="simulate one scenario or config file and write CSV traces")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="name of a shipped scenario")
    src.add_argument("--config", help="path to a world-config JSON file")
    r.add_argument("--steps", type=_nonneg_int, help="override the horizon T")
    r.add_argument("--seed", type=_nonneg_int, help="override the seed")
    r.add_argument("--out", help="output directory (default $BC_OUT_DIR or .)")
    r.add_argument("--monitors", help="comma-separated monitor names to record")

    c = sub.add_parser("check", help="evaluate the contracts of a scenario, or of all scenarios")
    c.add_argument("name", help='scenario name, or "all"')
    c.add_argument("--steps", type=_nonneg_int, help="override the horizon T")
    c.add_argument("--seed", type=_nonneg_int, help="override the seed")
    c.add_argument("--trials", type=_nonneg_int, help="instances per randomized suite")
    c.add_argument("--out", help="output directory (default $BC_OUT_DIR or .)")

    sub.add_parser("list", help="list shipped scenarios")
    return p


def _load_run_config(args) -> tuple[str, WorldConfig]:
    if args.scenario:
        sc = get_scenario(args.scenario)
        if sc.kind != "simulation":
            raise ConfigError(f"scenario {sc.name!r} is a randomized suite; use `check`")
        return sc.name, sc.world()
    path = Path(args.config)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "config" in data and "graph" not in data:
        return data.get("name", path.stem), Scenario.from_dict(data).world()
    return path.stem, WorldConfig.from_dict(data)


def cmd_run(args) -> int:
    name, cfg = _load_run_config(args)
    kw = {}
    if args.steps is not None:
        kw["horizon"] = args.steps
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.monitors is not None:
        names = tuple(m.strip() for m in args.monitors.split(",") if m.strip())
        kw["monitors"] = tuple(dict.fromkeys(cfg.monitors + names))
    cfg = cfg.replace(**kw)
    out = _out_dir(args.out)
    tr = run(cfg, record_draws=False)
    tr.write_csv(out / f"{name}_trace.csv")
    tr.write_monitor_csv(out / f"{name}_monitors.csv")
    print(f"{name}: T={cfg.horizon} window={len(tr.window)} targets={len(tr.targets)} -> {out}")
    return EXIT_OK


def cmd_check(args) -> int:
    lib = library()
    if args.name == "all":
        chosen = list(lib.values())
    else:
        chosen = [get_scenario(args.name)]
    out = _out_dir(args.out)
    status = EXIT_OK
    for sc in chosen:
        report = check_scenario(sc, steps=args.steps, seed=args.seed, trials=args.trials)
        (out / f"{sc.name}_report.json").write_text(json.dumps(report, indent=1, default=float) + "\n")
        ff = report["first_failure"]
        line = "PASS" if report["pass"] else f"FAIL first failure {ff['contract']} at t={ff['t']}"
        print(f"{line}  {sc.name}")
        if not report["pass"]:
            status = EXIT_CONTRACT
    return status


def cmd_list(args) -> int:
    for sc in library().values():
        print(f"{sc.name:22s} {sc.kind:10s} {sc.description}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "check": cmd_check, "list": cmd_list}[args.command]
    try:
        return handler(args)
    except (ConfigError, mon.ContractError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
