"""Command-line driver: parameter scans, witness budget, verification.

Exit codes: 0 success, 1 verification failure (or numerical failure),
2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import config as config_mod
from . import oracles, scans
from .quadrature import QuadratureError

ENV_CONFIG = "EOS_HARVEST_CONFIG"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="eos-harvest",
        description="Two-beam EOS probe-state engine: correlation, negativity "
                    "and Bell scans, witness budgets and the verification suite.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sweep=False):
        p.add_argument("--config", default=os.environ.get(ENV_CONFIG),
                       help=f"config file path (default: ${ENV_CONFIG})")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry (repeatable), e.g. "
                            "--set temperature_k=4")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--threads", type=int, default=1,
                       help="concurrent grid points (default 1)")
        if sweep:
            p.add_argument("--sweep", required=True,
                           metavar="NAME:START:STOP:COUNT[:log]",
                           help="swept parameter (delta_r um, delta_t fs, T K, "
                                "omega_min THz, omega_d THz)")

    common(sub.add_parser("scan-correlation",
                          help="G/C vs the swept parameter (thermal field)"),
           sweep=True)
    common(sub.add_parser("scan-negativity",
                          help="negativity vs the swept parameter"), sweep=True)
    common(sub.add_parser("scan-bell",
                          help="optimized Bell value vs the swept parameter"),
           sweep=True)
    common(sub.add_parser("witness", help="witness measurement budget (one row)"))
    verify = sub.add_parser("verify", help="run the oracle verification suite")
    common(verify)
    verify.add_argument("--budget", choices=("full", "smoke"), default="full",
                        help="oracle resolution (smoke is for quick checks)")
    return parser


def _load(args):
    if not args.config:
        raise config_mod.ConfigParseError(
            f"no config file: pass --config or set ${ENV_CONFIG}")
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            import yaml

            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise config_mod.ConfigParseError(str(exc)) from exc
    raw = config_mod.apply_overrides(raw or {}, args.set)
    base = os.path.dirname(os.path.abspath(args.config))
    return config_mod.config_from_dict(raw, base_dir=base)


def _parse_sweep(text):
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise config_mod.ConfigParseError(
            "--sweep must be NAME:START:STOP:COUNT[:log]")
    spacing = "linear"
    if len(parts) == 5:
        if parts[4] not in ("log", "linear"):
            raise config_mod.ConfigParseError("sweep spacing must be log or linear")
        spacing = parts[4]
    try:
        return scans.ScanSpec(parameter=parts[0], start=float(parts[1]),
                              stop=float(parts[2]), count=int(parts[3]),
                              spacing=spacing)
    except ValueError as exc:
        if isinstance(exc, config_mod.ConfigError):
            raise
        raise config_mod.ConfigParseError(f"bad sweep '{text}': {exc}") from exc


def _emit(table, out):
    if out:
        table.write(out)
        print(f"wrote {out} (+ {out}.plot.py)")
    else:
        sys.stdout.write(table.to_csv_text())


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "verify":
            reports = oracles.run_verification_suite(cfg, budget=args.budget)
            failures = 0
            for rep in reports:
                print(rep.line())
                failures += 0 if rep.passed else 1
            print(f"{len(reports) - failures}/{len(reports)} oracle checks passed")
            return 0 if failures == 0 else 1
        if args.command == "witness":
            _emit(scans.witness_table(cfg), args.out)
            return 0
        spec = _parse_sweep(args.sweep)
        runner = {"scan-correlation": scans.scan_correlation,
                  "scan-negativity": scans.scan_negativity,
                  "scan-bell": scans.scan_bell}[args.command]
        _emit(runner(cfg, spec, threads=max(1, args.threads)), args.out)
        return 0
    except config_mod.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, ValueError, RuntimeError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
