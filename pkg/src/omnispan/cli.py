"""Command-line entry points.

    omnispan run     --script NAME --config FILE --out FILE.csv [--seed N] [--mode M]
    omnispan metrics --in FILE.csv
    omnispan verify  [--skip-service] [--only NAME]
    omnispan sweep   --script NAME --config FILE --param KEY --values V ... --out-dir DIR
    omnispan serve   --config FILE --course FILE --port N --rate 200

Exit code 0 on success; on failure a machine-readable JSON error line is
written to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import json
import logging
import sys

from .config import config_from_mapping, load_config
from .errors import OmnispanError
from .scripts import BUILTIN_NAMES, builtin_script, compute_metrics, run_script
from .sim import SimConfig
from .trajlog import export_log, import_log


def _load_or_default(path: str | None) -> SimConfig:
    return load_config(path) if path else SimConfig()


def _apply_overrides(config: SimConfig, args) -> SimConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "mode", None) is not None:
        overrides["mode"] = args.mode
    return dataclasses.replace(config, **overrides) if overrides else config


def _metrics_json(metrics) -> str:
    return json.dumps(dataclasses.asdict(metrics))


def cmd_run(args) -> int:
    config = _apply_overrides(_load_or_default(args.config), args)
    script = builtin_script(
        args.script,
        d_min=config.geometry.d_min,
        d_max=config.geometry.d_max,
    )
    log = run_script(script, config)
    export_log(log, args.out)
    print(_metrics_json(compute_metrics(log)))
    return 0


def cmd_metrics(args) -> int:
    print(_metrics_json(compute_metrics(import_log(args.infile))))
    return 0


def cmd_verify(args) -> int:
    from .acceptance import run_all

    results = run_all(only=args.only, skip_service=args.skip_service)
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name}  [{result.seconds:.2f}s]  {result.detail}")
        failed += 0 if result.passed else 1
    if failed:
        print(f"{failed} of {len(results)} criteria failed", file=sys.stderr)
    return 1 if failed else 0


def cmd_sweep(args) -> int:
    import yaml

    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            base = yaml.safe_load(handle) or {}
    else:
        base = {}
    import os

    os.makedirs(args.out_dir, exist_ok=True)
    for value in args.values:
        try:
            parsed = float(value)
        except ValueError:
            parsed = value
        mapping = dict(base)
        mapping[args.param] = parsed
        config = config_from_mapping(mapping)
        script = builtin_script(
            args.script, d_min=config.geometry.d_min, d_max=config.geometry.d_max
        )
        log = run_script(script, config)
        out = os.path.join(args.out_dir, f"{args.script}_{args.param}={value}.csv")
        export_log(log, out)
        record = {"param": args.param, "value": parsed, "out": out}
        record.update(dataclasses.asdict(compute_metrics(log)))
        print(json.dumps(record))
    return 0


def cmd_serve(args) -> int:
    from .service import EMPTY_COURSE, load_course, serve

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    config = _apply_overrides(_load_or_default(args.config), args)
    course = load_course(args.course) if args.course else EMPTY_COURSE
    try:
        asyncio.run(
            serve(
                config,
                course,
                host=args.host,
                port=args.port,
                tcp_port=args.tcp_port,
                rate=args.rate,
                ui_dir=args.ui,
            )
        )
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omnispan")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a built-in script and export the log")
    run.add_argument("--script", required=True, choices=BUILTIN_NAMES)
    run.add_argument("--config", default=None, help="flat YAML config file")
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--mode", choices=("caster", "balance"), default=None)
    run.set_defaults(func=cmd_run)

    metrics = sub.add_parser("metrics", help="compute metrics of a trajectory CSV")
    metrics.add_argument("--in", dest="infile", required=True)
    metrics.set_defaults(func=cmd_metrics)

    verify = sub.add_parser("verify", help="run the acceptance property suite")
    verify.add_argument("--only", default=None, help="run a single criterion by name")
    verify.add_argument(
        "--skip-service",
        action="store_true",
        help="skip the slow real-time service criterion",
    )
    verify.set_defaults(func=cmd_verify)

    sweep = sub.add_parser("sweep", help="run a script across config values")
    sweep.add_argument("--script", required=True, choices=BUILTIN_NAMES)
    sweep.add_argument("--config", default=None)
    sweep.add_argument("--param", required=True, help="flat config key to vary")
    sweep.add_argument("--values", nargs="+", required=True)
    sweep.add_argument("--out-dir", required=True)
    sweep.set_defaults(func=cmd_sweep)

    serve = sub.add_parser("serve", help="run the real-time teleop service")
    serve.add_argument("--config", default=None)
    serve.add_argument("--course", default=None)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8700)
    serve.add_argument("--tcp-port", type=int, default=None, help="default: port + 1")
    serve.add_argument("--rate", type=int, default=200, help="simulation steps per second")
    serve.add_argument("--ui", default=None, help="directory with the built browser client")
    serve.add_argument("--seed", type=int, default=None)
    serve.add_argument("--mode", choices=("caster", "balance"), default=None)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OmnispanError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
