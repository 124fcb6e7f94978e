"""Command line front end.

    zenolab run CONFIG      configured checks
    zenolab verify CONFIG   full suite; exit 0 pass, 1 fail, 2 config/IO, 3 numerical failure
    zenolab oracle CONFIG   closed-form validation only
    zenolab version
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, parse_config
from .numerics import NumericalFailure
from .runner import CHECKS, EXIT_CONFIG, EXIT_NUMERICAL, run_checks
from .standard_form import NotFaithfulError

log = logging.getLogger("zenolab")


def _tolerance(text: str) -> tuple:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VAL, got {text!r}")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {key!r} needs a number") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zenolab", description="Zeno dynamics laboratory")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, help_text in (("run", "run the configured checks"),
                            ("verify", "run the full verification suite"),
                            ("oracle", "validate the closed-form limit only")):
        p = sub.add_parser(verb, help=help_text)
        p.add_argument("config", type=Path)
        p.add_argument("--out-dir", type=Path, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--tolerance", type=_tolerance, action="append", default=[], metavar="KEY=VAL")
        p.add_argument("-v", "--verbose", action="store_true")
    sub.add_parser("version", help="print the tool version")
    return parser


def _load(args):
    cfg = parse_config(args.config)
    if args.tolerance:
        try:
            cfg = dataclasses.replace(cfg, tolerances=cfg.tolerances.with_overrides(dict(args.tolerance)))
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc).strip("'\""), "--tolerance") from exc
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits", "--seed")
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.jobs < 1:
        raise ConfigError("must be at least 1", "--jobs")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "version":
        print(f"zenolab {__version__}")
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load(args)
        checks = {"run": None, "verify": CHECKS, "oracle": ()}[args.verb]
        outcome = run_checks(cfg, checks, args.out_dir, args.jobs, oracle_only=args.verb == "oracle")
    except (ConfigError, NotFaithfulError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # invalid instance data (e.g. a non-projection read from a matrix file)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        out = Path(args.out_dir or "zeno_out")
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps({"overall": "numerical failure", "error": str(exc),
                                                      "exit_code": EXIT_NUMERICAL}, indent=2) + "\n")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    rep = outcome.report
    print(f"{rep.instance['id']}: d={rep.instance['d']} k={rep.instance['k']} "
          f"r={rep.instance['r']:.6g} commuting={rep.instance['commuting']}")
    for res in outcome.results:
        print(f"  {res.name:<12} {res.status:<40} rows={len(res.rows):<5} {res.seconds:7.2f}s")
        for row in res.failures()[:5]:
            print(f"      failing: {','.join(row.cells())}")
    print(f"{rep.overall} (exit {outcome.exit_code}); outputs in {outcome.out_dir}")
    return outcome.exit_code
