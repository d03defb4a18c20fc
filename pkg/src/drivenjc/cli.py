"""Command line entry point: ``drivenjc run`` and ``drivenjc compare``."""

from __future__ import annotations

import argparse
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import scenario
from .errors import ConfigError, NumericalGuardError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(scenario.PRESETS), help="named scenario")
    src.add_argument("--config", type=Path, help="key=value configuration file")
    p.add_argument("--lossless", action="store_true", help="set gamma1 = gamma2 = 0")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--fock-cutoff", type=int, dest="fock_cutoff")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivenjc", description="Driven Jaynes-Cummings simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a scenario and write CSV files")
    _add_common(run_p)
    run_p.add_argument("--no-window", action="store_true", help="disable the Hann window")
    run_p.add_argument("--method", choices=("lindblad", "closedform"))
    run_p.add_argument("--sweep", type=Path, help="file with one 'name key=value ...' line per run")
    run_p.add_argument("--jobs", type=int, default=1, help="parallel workers for --sweep")

    cmp_p = sub.add_parser("compare", help="integrator vs closed form (resonant only)")
    _add_common(cmp_p)
    return parser


def _values(args) -> dict:
    values = scenario.read_config_file(args.config) if args.config else {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip()] = value.strip()
    flags = {
        "preset": args.preset,
        "output_dir": args.out,
        "dt": args.dt,
        "t_end": args.t_end,
        "fock_cutoff": args.fock_cutoff,
    }
    if args.lossless:
        flags["lossless"] = True
    if getattr(args, "no_window", False):
        flags["window"] = False
    if getattr(args, "method", None):
        flags["method"] = args.method
    values.update({k: v for k, v in flags.items() if v is not None})
    return values


def read_sweep(path: Path) -> list[tuple[str, dict[str, str]]]:
    runs = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, *pairs = shlex.split(line)
        overrides = {}
        for pair in pairs:
            if "=" not in pair:
                raise ConfigError(str(path), f"expected key=value in {raw!r}")
            key, value = pair.split("=", 1)
            overrides[key] = value
        runs.append((name, overrides))
    names = [n for n, _ in runs]
    if len(set(names)) != len(names):
        raise ConfigError(str(path), "sweep run names must be unique")
    return runs


def _run_one(values: dict) -> str:
    result = scenario.run(scenario.build_config(values))
    return f"{result.config.output_dir}: {result.summary()}"


def cmd_run(args) -> int:
    values = _values(args)
    if args.sweep is None:
        result = scenario.run(scenario.build_config(values))
        print(result.summary())
        return EXIT_OK
    base_out = Path(values.pop("output_dir", "out"))
    jobs = []
    for name, overrides in read_sweep(args.sweep):
        merged = dict(values, **overrides, output_dir=base_out / name)
        scenario.build_config(merged)  # validate every run before starting any
        jobs.append(merged)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            lines = list(pool.map(_run_one, jobs))
    else:
        lines = [_run_one(v) for v in jobs]
    print("\n".join(lines))
    return EXIT_OK


def cmd_compare(args) -> int:
    config = scenario.build_config(_values(args))
    report = scenario.compare_oracle(config)
    print("\n".join(report.lines()))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return cmd_run(args) if args.command == "run" else cmd_compare(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalGuardError as exc:
        print(f"numerical guard tripped: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
