"""Command-line front end: ``aai trajectory | phase | sweep``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 physics-domain error.  CSV floats use the shortest round-trip form.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import RunConfig, read_config
from .errors import ConfigError, NumericalError, PhysicsDomainError
from .interferometer import METHODS, oracle_amplitude, run_sequence
from .oracle import GridSpec
from .oracle.grid import DEFAULT_DX, DEFAULT_MARGIN, DEFAULT_STENCIL_ORDER
from .trajectories import COLUMNS, resolve_columns, trajectory_table

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_DOMAIN = 0, 2, 3, 4
ORACLE_AMPLITUDE_LIMIT = 40.0  # oscillator lengths

TRAJECTORY_HEADER = ("t",) + COLUMNS
SWEEP_HEADER = ("param", "theta_sca", "theta_quantum1", "theta_oracle", "population", "visibility")
PHASE_HEADER = ("method", "theta_total", "theta0", "theta1", "propagation", "laser",
                "separation", "gap", "population", "visibility")
SWEEP_PARAMS = ("beta", "amplitude", "t")


class OracleRefused(ConfigError):
    """The grid oracle was requested beyond its practical amplitude range."""


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    value = float(value)
    return "" if math.isnan(value) else repr(value)


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def thread_count(config: RunConfig) -> int:
    """Config value or logical cores, capped by ``AAI_THREADS``."""
    count = config["threads"] or os.cpu_count() or 1
    cap = os.environ.get("AAI_THREADS")
    if cap:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"AAI_THREADS must be an integer, got {cap!r}") from None
    return count


def oracle_grid(config: RunConfig, reach: float):
    """GridSpec from the config overrides, or None for the automatic grid.

    ``reach`` is the largest excursion in oscillator lengths.
    """
    keys = ("grid_dx", "grid_dt", "grid_padding", "stencil_order")
    if all(config[k] is None for k in keys):
        return None
    trap = config.trap
    dx = DEFAULT_DX if config["grid_dx"] is None else config["grid_dx"] / trap.ell
    margin = DEFAULT_MARGIN if config["grid_padding"] is None else config["grid_padding"] / trap.ell
    dt = None if config["grid_dt"] is None else config["grid_dt"] * trap.omega
    order = DEFAULT_STENCIL_ORDER if config["stencil_order"] is None else config["stencil_order"]
    return GridSpec.default(reach, dx, margin, dt=dt, stencil_order=order)


def _check_oracle(reach: float, force: bool):
    if reach > ORACLE_AMPLITUDE_LIMIT and not force:
        raise OracleRefused(
            f"oracle amplitude {reach:.3g} ell exceeds {ORACLE_AMPLITUDE_LIMIT:g} ell; "
            "pass --force-oracle to run it anyway")


def _sequence_reach(config: RunConfig) -> float:
    s = config.sequence().dimensionless(config.trap)
    return oracle_amplitude(s) + abs(s.initial.x)


# ---------------------------------------------------------------------------
# commands

def cmd_trajectory(config: RunConfig, methods=None, force_oracle: bool = False) -> str:
    columns = resolve_columns(methods or config["methods"] or COLUMNS)
    trap = config.trap
    start = config.trajectory_start()
    grid = None
    if "x_oracle" in columns:
        reach = math.hypot(start.x / trap.ell, start.v / trap.velocity_scale)
        _check_oracle(reach, force_oracle)
        grid = oracle_grid(config, reach)
    oracle_dt = grid.dt / trap.omega if grid is not None and grid.dt is not None else None
    table = trajectory_table(start, config.perturbation, trap, config["t"], config["steps"],
                             columns, grid=grid, oracle_dt=oracle_dt,
                             classical_dt=config["classical_dt"],
                             quad_order=config["quad_order"], fock_dim=config["fock_dim"])
    n = len(table["t"])
    rows = [[table[c][i] if c in table else None for c in TRAJECTORY_HEADER] for i in range(n)]
    return render_csv(TRAJECTORY_HEADER, rows)


def _phase_methods(methods, default):
    chosen = tuple(methods or default)
    for m in chosen:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {', '.join(METHODS)}")
    return chosen


def cmd_phase(config: RunConfig, methods=None, force_oracle: bool = False) -> str:
    chosen = _phase_methods(methods or config["methods"], ("sca-perturbative", "quantum-first-order"))
    reach = _sequence_reach(config)
    if "oracle" in chosen:
        _check_oracle(reach, force_oracle)
    rows = []
    for m in chosen:
        report = run_sequence(config.sequence(), config.perturbation, config.trap, m,
                              grid=oracle_grid(config, reach) if m == "oracle" else None,
                              dt=config["classical_dt"], threads=min(2, thread_count(config)))
        row = report.as_row()
        rows.append([row[k] for k in PHASE_HEADER])
    return render_csv(PHASE_HEADER, rows)


def _sweep_point(config: RunConfig, with_oracle: bool):
    seq, pert, trap = config.sequence(), config.perturbation, config.trap
    sca = run_sequence(seq, pert, trap, "sca-perturbative")
    quantum = run_sequence(seq, pert, trap, "quantum-first-order")
    oracle = None
    if with_oracle:
        oracle = run_sequence(seq, pert, trap, "oracle",
                              grid=oracle_grid(config, _sequence_reach(config)), threads=1)
    best = oracle if oracle is not None else quantum
    return (sca.theta_total, quantum.theta_total,
            None if oracle is None else oracle.theta_total, best.population, best.visibility)


def cmd_sweep(config: RunConfig, param: str, start: float, stop: float, steps: int,
              methods=None, force_oracle: bool = False) -> str:
    """One row per point of ``linspace(start, stop, steps)``.

    ``population`` and ``visibility`` come from the oracle when it runs and
    from the first-order quantum result otherwise.
    """
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep parameter must be one of {', '.join(SWEEP_PARAMS)}, got {param!r}")
    if steps < 2:
        raise ConfigError("a sweep needs at least 2 steps")
    chosen = _phase_methods(methods or config["methods"],
                            ("sca-perturbative", "quantum-first-order"))
    with_oracle = "oracle" in chosen
    values = np.linspace(start, stop, steps)
    configs = [config.replace(**{param: float(v)}) for v in values]
    if with_oracle:
        for c in configs:
            _check_oracle(_sequence_reach(c), force_oracle)
    workers = min(thread_count(config), len(configs)) if with_oracle else 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda c: _sweep_point(c, with_oracle), configs))
    rows = [[float(v), *res] for v, res in zip(values, results)]
    return render_csv(SWEEP_HEADER, rows)


# ---------------------------------------------------------------------------
# entry point

def _method_list(text):
    return tuple(item.strip() for item in text.split(",") if item.strip()) if text else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aai", description="Anharmonic atom interferometer phases.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("trajectory", "packet position versus time"),
                       ("phase", "interferometer phase by method"),
                       ("sweep", "phase versus one parameter")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="key = value configuration file")
        p.add_argument("--method", help="comma-separated methods (or trajectory columns)")
        p.add_argument("--out", help="output CSV path (default: config 'out', else stdout)")
        p.add_argument("--force-oracle", action="store_true",
                       help=f"allow the grid oracle above {ORACLE_AMPLITUDE_LIMIT:g} ell")
        if name == "sweep":
            p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
            p.add_argument("--from", dest="start", type=float, required=True)
            p.add_argument("--to", dest="stop", type=float, required=True)
            p.add_argument("--steps", type=int, required=True)
    return parser


def _run(args):
    config = read_config(args.config)
    methods = _method_list(args.method)
    if args.command == "trajectory":
        return config, cmd_trajectory(config, methods, args.force_oracle)
    if args.command == "phase":
        return config, cmd_phase(config, methods, args.force_oracle)
    return config, cmd_sweep(config, args.param, args.start, args.stop, args.steps,
                             methods, args.force_oracle)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            config, text = _run(args)
        for message in dict.fromkeys(str(w.message) for w in caught):
            print(f"warning: {message}", file=sys.stderr)
        out = args.out or config["out"]
        if out:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PhysicsDomainError as exc:
        print(f"out of domain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
