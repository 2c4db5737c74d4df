"""
Command-line entry point.

    fringewire <scenario> [--config FILE] [--output PATH] [--format csv|json]
               [--seed N] [--counterfactual-readable-wire] [--<key> VALUE ...]

Any configuration key can be given as `--key value` (or `--key=value`);
dashes and underscores are interchangeable. Flags override the config file.
Exit status: 0 ok, 1 invalid input, 2 a physical check failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any

from .config import SCENARIOS, normalize_key, read_config_file
from .errors import ConfigError
from .graph import graph
from .nodes import EXIT_INVALID, EXIT_OK

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Usage errors are invalid input (exit 1), not argparse's default 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fringewire",
        description="Crossed-beam fringe, wire diffraction and photon which-way simulator",
    )
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", default=None, help="key=value configuration file")
    parser.add_argument("--output", default=None, help="output path, '-' for stdout")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument(
        "--counterfactual-readable-wire",
        action="store_true",
        help="also report the excluded readable-wire case",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
    )
    return parser


def parse_overrides(extra: list[str]) -> dict[str, str]:
    """Turn leftover `--key value` / `--key=value` tokens into config keys.

    A flag followed by another flag (or by nothing) is read as `true`.
    """
    values: dict[str, str] = {}
    i = 0
    while i < len(extra):
        token = extra[i]
        if not token.startswith("--") or token == "--":
            raise ConfigError(f"unexpected argument {token!r}")
        if "=" in token:
            key, value = token.split("=", 1)
            i += 1
        elif i + 1 < len(extra) and not extra[i + 1].startswith("--"):
            key, value = token, extra[i + 1]
            i += 2
        else:
            key, value = token, "true"
            i += 1
        values[normalize_key(key)] = value
    return values


def collect_values(args: argparse.Namespace, extra: list[str]) -> dict[str, Any]:
    values: dict[str, Any] = {}
    if args.config:
        values.update(read_config_file(args.config))
    values.update(parse_overrides(extra))
    if args.output is not None:
        values["output_path"] = args.output
    if args.format is not None:
        values["output_format"] = args.format
    if args.seed is not None:
        values["seed"] = args.seed
    if args.counterfactual_readable_wire:
        values["counterfactual_readable_wire"] = True
    return values


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        format="[%(module)s] %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        args, extra = build_parser().parse_known_args(argv)
        configure_logging(args.log_level)
        values = collect_values(args, extra)
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    final = graph.invoke({"scenario": args.scenario, "raw_config": values, "exit_code": EXIT_OK})
    if final.get("error"):
        print(f"error: {final['error']}", file=sys.stderr)
    return int(final.get("exit_code", EXIT_OK))


if __name__ == "__main__":
    raise SystemExit(main())
