"""Command-line front end: run scenarios, self-check, inspect snapshots.

Exit codes: 0 success, 1 failed self-check, 2 bad configuration or input
file, 3 no contraction on any workable horizon, 4 iteration budget
exhausted, 5 numerical abort inside the propagator.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .errors import ConfigError, HorizonTooLarge, IterationLimitExceeded, NumericalAbort
from .fields import snapshot_header
from .runner import run_scenario
from .verify import format_report, run_checks

__all__ = ["main", "bundled_scenarios", "resolve_config_path"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NO_CONTRACTION = 3
EXIT_ITERATION_LIMIT = 4
EXIT_NUMERICAL = 5


def bundled_scenarios() -> dict[str, str]:
    """Names of installed scenario files mapped to their paths."""
    package = resources.files("msfield") / "scenarios"
    found = {}
    for entry in sorted(package.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            found[entry.name[: -len(".yaml")]] = str(entry)
    return found


def resolve_config_path(spec: str) -> str:
    """A config argument is a YAML path or the bare name of a bundled scenario."""
    if spec.endswith((".yaml", ".yml")) or "/" in spec:
        return spec
    names = bundled_scenarios()
    if spec in names:
        return names[spec]
    raise ConfigError(
        [f"'{spec}' is neither a YAML file nor a bundled scenario (have: {', '.join(names)})"]
    )


def _cmd_run(args) -> int:
    try:
        path = resolve_config_path(args.config)
        result = run_scenario(path, out_dir=args.out, seed=args.seed)
    except ConfigError as err:
        print(err, file=sys.stderr)
        return EXIT_CONFIG
    except HorizonTooLarge as err:
        print(f"no contraction: {err}", file=sys.stderr)
        return EXIT_NO_CONTRACTION
    except IterationLimitExceeded as err:
        print(f"iteration limit: {err}", file=sys.stderr)
        return EXIT_ITERATION_LIMIT
    except NumericalAbort as err:
        print(f"numerical abort: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(result.summary())
    return EXIT_OK


def _cmd_verify(args) -> int:
    subset = args.subset if args.subset is not None else None
    try:
        results = run_checks(subset)
    except ValueError as err:
        print(err, file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def _cmd_info(args) -> int:
    try:
        header = snapshot_header(args.snapshot)
    except (OSError, ValueError) as err:
        print(err, file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(header, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msfield",
        description="Coupled matter-field simulator: fixed-point runs, self-checks, snapshot inspection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a configured scenario")
    run_p.add_argument("config", help="YAML config path or bundled scenario name")
    run_p.add_argument("--out", default=None, help="output directory (overrides the config)")
    run_p.add_argument("--seed", type=int, default=None, help="random seed (overrides the config)")
    run_p.set_defaults(func=_cmd_run)

    verify_p = sub.add_parser("verify", help="run fast per-module self-checks")
    verify_p.add_argument(
        "--subset",
        nargs="*",
        default=None,
        help="restrict to these check modules (empty list runs nothing)",
    )
    verify_p.set_defaults(func=_cmd_verify)

    info_p = sub.add_parser("info", help="print a snapshot file header")
    info_p.add_argument("snapshot", help="snapshot file path")
    info_p.set_defaults(func=_cmd_info)
    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
