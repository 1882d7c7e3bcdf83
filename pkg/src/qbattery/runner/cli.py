"""``qb`` command-line interface.

Exit codes: 0 success, 1 configuration error, 2 numerical failure
(accuracy or truncation tolerance exceeded, or failed sweep cells).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from ..bessel import MAX_ZERO_INDEX, bessel_j0_zero
from ..errors import AccuracyError, ConfigError, UnsupportedConfigurationError
from ..model import ModulationParams
from ..noise import LorentzianSpectrum, bare_rate, effective_rate
from . import io
from .config import load_config
from .experiments import run
from .sweep import sweep2d

log = logging.getLogger("qbattery")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML experiment config")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--csv", help="CSV output path (overrides output.csv)")
    p.add_argument("--json", help="JSON summary path (overrides output.json)")
    p.add_argument("--plot", action="store_true", help="also write an SVG next to the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qb", description="Modulated collective quantum battery simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("charge", "charging run (noisy when channel.kind = dissipation)"),
                       ("store", "storage run under a dephasing or dissipation channel"),
                       ("sweep", "2-D sweep defined by the [sweep] section")):
        p = sub.add_parser(name, help=text)
        _add_config_args(p)
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1, help="parallel worker processes")

    p = sub.add_parser("rate", help="modulation-engineered dissipation rate")
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--spectrum", choices=["lorentz"], default="lorentz")
    p.add_argument("--Omega", type=float, required=True)
    p.add_argument("--lambda", dest="lambda_w", type=float, required=True)
    p.add_argument("--omega-a", dest="omega_a", type=float, required=True)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--cutoff", type=int, default=None, help="sidebands kept on each side")

    p = sub.add_parser("bessel-zeros", help="positive zeros of J0")
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    return parser


def _outputs(args, cfg):
    csv = args.csv or cfg.output.csv or f"{args.command}.csv"
    js = args.json or cfg.output.json or f"{args.command}.json"
    return csv, js, args.plot or cfg.output.plot


def _svg_path(csv_path: str) -> str:
    return (csv_path[:-4] if csv_path.endswith(".csv") else csv_path) + ".svg"


def _cmd_trajectory(args) -> int:
    cfg = load_config(args.config, args.overrides)
    record = run(args.command, cfg)
    csv, js, plot = _outputs(args, cfg)
    io.write_trajectory_csv(record, csv, cfg.output.log_base)
    summary = {"command": args.command, "config_echo": cfg.raw, **record.summary()}
    io.write_json(summary, js)
    if plot:
        io.plot_trajectory(record, _svg_path(csv))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config, args.overrides)
    if cfg.sweep is None:
        raise ConfigError("qb sweep needs a [sweep] section (axis1, axis2, observable)")
    result = sweep2d(cfg, workers=args.workers)
    csv, js, plot = _outputs(args, cfg)
    io.write_sweep_csv(result, csv)
    g = result.grid
    summary = {
        "command": "sweep",
        "config_echo": cfg.raw,
        "observable": g.observable,
        "axis1": {"name": g.axis1.name, "values": g.axis1.values.tolist()},
        "axis2": {"name": g.axis2.name, "values": g.axis2.values.tolist()},
        "argmax_axis1": result.argmax_axis1().tolist() if result.n_failed < result.values.size else None,
        "failed_cells": [{"row": i, "col": j, "error": msg} for (i, j), msg in sorted(result.errors.items())],
    }
    io.write_json(summary, js)
    if plot:
        io.plot_sweep(result, _svg_path(csv))
    print(f"sweep {g.observable}: {result.values.size - result.n_failed}/{result.values.size} cells ok")
    for (i, j), msg in sorted(result.errors.items()):
        print(f"  cell ({i}, {j}) failed: {msg}", file=sys.stderr)
    return EXIT_NUMERIC if result.n_failed else EXIT_OK


def _cmd_rate(args) -> int:
    try:
        spectrum = LorentzianSpectrum(args.Omega, args.lambda_w, args.omega_a)
        m = ModulationParams(args.xi, args.nu)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    gamma = effective_rate(m, spectrum, args.omega0, args.cutoff)
    gamma0 = bare_rate(spectrum, args.omega0)
    print(f"Gamma  = {gamma:.12g}")
    print(f"Gamma0 = {gamma0:.12g}")
    print(f"ratio  = {gamma / gamma0 if gamma0 else float('nan'):.12g}")
    return EXIT_OK


def _cmd_zeros(args) -> int:
    if args.order != 0:
        raise ConfigError("only zeros of J0 are available (--order 0)")
    if not 1 <= args.count <= MAX_ZERO_INDEX:
        raise ConfigError(f"--count must lie in 1..{MAX_ZERO_INDEX}")
    for k in range(1, args.count + 1):
        print(f"{bessel_j0_zero(k):.15g}")
    return EXIT_OK


_COMMANDS = {"charge": _cmd_trajectory, "store": _cmd_trajectory, "sweep": _cmd_sweep,
             "rate": _cmd_rate, "bessel-zeros": _cmd_zeros}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, UnsupportedConfigurationError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except AccuracyError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
