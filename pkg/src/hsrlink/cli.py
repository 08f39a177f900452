"""Command-line interface: simulate sweeps, evaluate the signal-to-ICI
ratio for a configuration, and print estimator complexity counts."""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .channel import TapState, max_dfo, sir_db, tap_dfos_at, tap_powers_at
from .config import DEFAULT_CONFIG_TOML, ConfigError, load_config
from .dfo import multiplication_count
from .harness import default_config, find_p3db, sweep, write_csv


def _parse_snr_spec(spec: str) -> tuple[float, ...]:
    """"a:b:step" for an inclusive range, or a comma-separated list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("range must be a:b:step")
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise argparse.ArgumentTypeError("need b >= a and step > 0")
        count = int(round((b - a) / step)) + 1
        return tuple(a + i * step for i in range(count) if a + i * step <= b + 1e-9)
    return tuple(float(p) for p in spec.split(","))


def _parse_position(value: str):
    if value in ("p3db", "sweep"):
        return value
    try:
        return float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            "position must be a number, 'p3db' or 'sweep'"
        ) from exc


def _load_or_default(path):
    if path is None:
        return default_config()
    return load_config(path)


def _apply_overrides(config, args):
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.drops is not None:
        updates["drops"] = args.drops
    if args.snr is not None:
        updates["snr_db"] = args.snr
    if args.position is not None:
        updates["position"] = args.position
    if args.estimators is not None:
        updates["estimators"] = tuple(args.estimators.split(","))
    if args.dfo is not None:
        updates["dfo_method"] = args.dfo
    if not updates:
        return config
    return dataclasses.replace(config, **updates)


def _cmd_simulate(args) -> int:
    config = _apply_overrides(_load_or_default(args.config), args)
    records = sweep(config)
    write_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_sir(args) -> int:
    config = _load_or_default(args.config)
    geometry = config.geometry
    position = args.position if args.position is not None else config.position
    if position == "p3db":
        x = find_p3db(geometry, config.pathloss_exponent)
    elif position == "sweep":
        x = geometry.ds / 2.0
    else:
        x = float(position)
    dfos = tap_dfos_at(x, geometry)
    powers = tap_powers_at(x, geometry, config.pathloss_exponent)
    taps = [
        TapState(complex(np.sqrt(p)), 0.0, f) for p, f in zip(powers, dfos)
    ]
    gamma = sir_db(taps, config.grid)
    print(f"position: {x:.3f} m of {geometry.ds:.1f} m")
    print(f"max DFO: {max_dfo(geometry):.1f} Hz")
    print(f"tap DFOs: {dfos[0]:+.1f} Hz, {dfos[1]:+.1f} Hz")
    print(f"tap powers: {powers[0]:.4f}, {powers[1]:.4f}")
    print(f"signal-to-ICI ratio: {gamma:.2f} dB")
    return 0


def _cmd_complexity(args) -> int:
    proposed = multiplication_count("proposed", args.m, args.n)
    es = multiplication_count("es", args.m, args.n, args.f_max, args.step)
    print(f"proposed (10*m*n): {proposed}")
    print(f"exhaustive search (m*f_max*(8n+6)/step): {es}")
    print(f"reduction factor: {es / proposed:.1f}x")
    return 0


def _cmd_print_config(args) -> int:
    print(DEFAULT_CONFIG_TOML, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsrlink",
        description="Link-level OFDM simulator for the two-tap high-speed-rail channel",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo sweep and write CSV")
    sim.add_argument("--config", help="TOML configuration file")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument("--seed", type=int, help="master seed override")
    sim.add_argument("--drops", type=int, help="drops per cell override")
    sim.add_argument(
        "--snr", type=_parse_snr_spec, help='SNR override, "a:b:step" or "v1,v2,..."'
    )
    sim.add_argument(
        "--position", type=_parse_position, help="track position (m), 'p3db' or 'sweep'"
    )
    sim.add_argument("--estimators", help="comma-separated estimator subset")
    sim.add_argument("--dfo", choices=("proposed", "es"), help="DFO method override")
    sim.set_defaults(func=_cmd_simulate)

    sir = sub.add_parser("sir", help="evaluate the signal-to-ICI ratio")
    sir.add_argument("--config", help="TOML configuration file")
    sir.add_argument(
        "--position", type=_parse_position, help="track position (m) or 'p3db'"
    )
    sir.set_defaults(func=_cmd_sir)

    comp = sub.add_parser("complexity", help="print DFO estimator multiply counts")
    comp.add_argument("--m", type=int, default=2, help="pilot subcarriers per block")
    comp.add_argument("--n", type=int, default=4, help="pilot OFDM symbols")
    comp.add_argument("--f-max", type=float, default=900.0, dest="f_max")
    comp.add_argument("--step", type=float, default=2.0)
    comp.set_defaults(func=_cmd_complexity)

    cfg = sub.add_parser("print-config", help="print the default TOML configuration")
    cfg.set_defaults(func=_cmd_print_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
