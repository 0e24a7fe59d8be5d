#!/usr/bin/env python

"""
Command-line interface: ``dst-tomo <command> [options]``.

Results go to stdout (JSON or CSV), log messages to stderr. Exit codes:
0 success, 2 invalid input, 3 numerical failure, 4 I/O or database failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import read_options
from .crb import CrbMethod, crb_closed, crb_numeric
from .errors import InvalidConfig, NumericalError
from .experiment import empirical_mse
from .model import (
    MeasurementStrength,
    biorthogonal_states,
    effective_states,
    probabilities,
    reconstruct,
)
from .qubit import bloch_vectors, eigenvalues
from .sampling import Ensemble, RandomStream, sample_matrices
from .sic import sic_crb
from .state_files import load_probabilities, load_state, state_document, write_json
from .sweep import (
    CSV_COLUMNS,
    SweepConfig,
    find_crossover,
    find_mixed_crossover,
    format_value,
    parse_grid,
    run_sweep,
    sic_ensemble_average,
)

logger = logging.getLogger("dst_tomo.cli")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

LOG_FORMAT = '%(asctime)s %(levelname)-8s [%(name)s] %(message)s'

DEFAULTS = {
    "samples": 100000,
    "seed": 0,
    "ensemble": "pure",
    "workers": 1,
    "shots": 10000,
    "runs": 1000,
}


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _option(args, options: dict, name: str):
    ''' Command-line value, else option-file value, else built-in default. '''
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in options:
        return options[name]
    return DEFAULTS.get(name)


def _emit_json(document, path=None):
    if path:
        write_json(document, path)
        logger.info(f"Wrote {path}")
        return
    json.dump(document, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _strength(args) -> MeasurementStrength:
    return MeasurementStrength.from_lambda(args.lam)


def _seed(value) -> int:
    seed = int(value)
    RandomStream(seed)
    return seed


def _basis_rows(basis):
    return [
        {"t": t, "k": k, "re": np.real(basis[t, k].amplitudes).tolist(), "im": np.imag(basis[t, k].amplitudes).tolist()}
        for t in range(3)
        for k in range(2)
    ]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def command_bases(args, options) -> int:
    strength = _strength(args)
    effective = effective_states(strength)
    dual = biorthogonal_states(strength)
    if args.json:
        _emit_json(
            {
                "lambda": strength.lam,
                "theta": strength.theta,
                "effective": _basis_rows(effective),
                "biorthogonal": _basis_rows(dual),
            }
        )
        return EXIT_OK
    print(f"lambda = {strength.lam:.17g}, theta = {strength.theta:.17g}")
    for name, basis in (("effective", effective), ("biorthogonal", dual)):
        print(f"{name} states:")
        for t in range(3):
            for k in range(2):
                a0, a1 = basis[t, k].amplitudes
                print(f"  t={t} k={k}: ({a0.real:+.12f}{a0.imag:+.12f}j, {a1.real:+.12f}{a1.imag:+.12f}j)")
    return EXIT_OK


def command_probabilities(args, options) -> int:
    probs = probabilities(load_state(args.state), _strength(args))
    _emit_json(probs.as_dict(), args.out)
    return EXIT_OK


def command_reconstruct(args, options) -> int:
    probs = load_probabilities(args.probs)
    lam = probs.lam if args.lam is None else args.lam
    rho = reconstruct(probs, MeasurementStrength.from_lambda(lam))
    document = state_document(rho)
    document["minimum_eigenvalue"] = float(eigenvalues(rho.matrix)[0])
    _emit_json(document, args.out)
    return EXIT_OK


def command_crb(args, options) -> int:
    strength = _strength(args)
    probs = probabilities(load_state(args.state), strength)
    method = CrbMethod(args.method)
    report = crb_closed(probs, strength) if method is CrbMethod.CLOSED_FORM else crb_numeric(probs, strength)
    document = report.as_dict()
    document["lambda"] = strength.lam
    _emit_json(document)
    return EXIT_OK


def command_sic(args, options) -> int:
    if args.state:
        bound = sic_crb(load_state(args.state))
        _emit_json({"bound": bound, "e_min": math.sqrt(bound)})
        return EXIT_OK
    ensemble = Ensemble.from_name(_option(args, options, "ensemble"))
    samples = int(_option(args, options, "samples"))
    seed = _seed(_option(args, options, "seed"))
    workers = int(_option(args, options, "workers"))
    mean, stderr = sic_ensemble_average(ensemble, samples, RandomStream(seed), workers)
    _emit_json(
        {"ensemble": ensemble.value, "samples": samples, "seed": seed, "mean": mean, "stderr": stderr, "e_min": math.sqrt(mean)}
    )
    return EXIT_OK


def command_sample(args, options) -> int:
    ensemble = Ensemble.from_name(_option(args, options, "ensemble"))
    seed = _seed(_option(args, options, "seed"))
    matrices = sample_matrices(ensemble, RandomStream(seed), args.count)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("index", "bx", "by", "bz", "purity"))
    for index, bloch in enumerate(bloch_vectors(matrices)):
        purity = 0.5 * (1.0 + float(bloch @ bloch))
        writer.writerow([index] + [format_value(value) for value in bloch] + [format_value(purity)])
    return EXIT_OK


def command_simulate(args, options) -> int:
    strength = _strength(args)
    rho = load_state(args.state)
    shots = int(_option(args, options, "shots"))
    runs = int(_option(args, options, "runs"))
    seed = _seed(_option(args, options, "seed"))
    result = empirical_mse(rho, strength, shots, runs, RandomStream(seed))
    bound = crb_closed(probabilities(rho, strength), strength).bound
    _emit_json(
        {
            "lambda": strength.lam,
            "shots": shots,
            "runs": runs,
            "seed": seed,
            "mean_e2": result.mean_e2,
            "stderr": result.stderr,
            "scaled_mse": result.scaled,
            "scaled_stderr": result.scaled_stderr,
            "crb_closed": bound,
            "efficiency": bound / result.scaled if result.scaled > 0 else None,
        }
    )
    return EXIT_OK


def command_sweep(args, options) -> int:
    grid_text = args.grid or options.get("grid")
    if not grid_text:
        raise InvalidConfig("A lambda grid is required: --grid A:B:STEPS or 'grid' in the option file.")
    svg = args.svg or options.get("svg")
    config = SweepConfig(
        lambda_grid=parse_grid(grid_text),
        ensemble=Ensemble.from_name(_option(args, options, "ensemble")),
        samples=int(_option(args, options, "samples")),
        seed=_seed(_option(args, options, "seed")),
        output_path=args.out,
        emit_svg=bool(svg),
        svg_path=svg or None,
        workers=int(_option(args, options, "workers")),
        database=args.db or options.get("database"),
    )
    run_sweep(config)
    return EXIT_OK


def command_crossover(args, options) -> int:
    root = find_crossover(args.tol)
    document = {"pure": root, "tolerance": args.tol}
    if args.samples is not None or "samples" in options:
        ensemble = Ensemble.from_name(args.ensemble or options.get("ensemble", "bures"))
        estimate = find_mixed_crossover(
            int(_option(args, options, "samples")),
            args.tol,
            RandomStream(_seed(_option(args, options, "seed"))),
            ensemble,
            int(_option(args, options, "workers")),
        )
        document[ensemble.value] = {"lambda": estimate.lam, "stderr": estimate.stderr, "sic_mean": estimate.target}
    _emit_json(document)
    return EXIT_OK


def command_results(args, options) -> int:
    from .ResultsDatabase import ResultsDatabase

    url = args.db or options.get("database")
    if not url:
        raise InvalidConfig("A database URL is required: --db URL or 'database' in the option file.")
    db = ResultsDatabase(url)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    if args.run is None:
        writer.writerow(("run", "created", "ensemble", "samples", "seed", "points", "output"))
        for run in db.runs():
            writer.writerow(
                (run.id, run.created.isoformat(), run.ensemble, run.samples, run.seed, len(run.grid), run.output_path or "")
            )
    else:
        writer.writerow(CSV_COLUMNS)
        for row in db.rows(args.run):
            writer.writerow([format_value(value) for value in row.values()])
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _lambda_argument(parser, required=True):
    parser.add_argument("--lambda", dest="lam", type=float, required=required, help="measurement strength in [0, 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dst-tomo",
        description="Direct state tomography of a qubit: bases, reconstruction, Cramer-Rao bounds and sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="option file (default ~/.dst_tomo.cfg)")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    bases = commands.add_parser("bases", help="print the effective and biorthogonal states")
    _lambda_argument(bases)
    bases.add_argument("--json", action="store_true", help="JSON output")
    bases.set_defaults(handler=command_bases)

    probs = commands.add_parser("probabilities", help="outcome probabilities of a state")
    probs.add_argument("--state", required=True, help="state JSON file")
    _lambda_argument(probs)
    probs.add_argument("--out", help="write the JSON here instead of stdout")
    probs.set_defaults(handler=command_probabilities)

    rec = commands.add_parser("reconstruct", help="reconstruct a state from a probability file")
    rec.add_argument("--probs", required=True, help="probability JSON file")
    _lambda_argument(rec, required=False)
    rec.add_argument("--out", help="write the JSON here instead of stdout")
    rec.set_defaults(handler=command_reconstruct)

    crb = commands.add_parser("crb", help="Cramer-Rao bound of one state")
    crb.add_argument("--state", required=True, help="state JSON file")
    _lambda_argument(crb)
    crb.add_argument("--method", choices=[m.value for m in CrbMethod], default=CrbMethod.CLOSED_FORM.value)
    crb.set_defaults(handler=command_crb)

    sic = commands.add_parser("sic", help="SIC-POVM bound of a state or an ensemble")
    sic.add_argument("--state", help="state JSON file")
    sic.add_argument("--ensemble", choices=Ensemble.choices())
    sic.add_argument("--samples", type=int)
    sic.add_argument("--seed", type=int)
    sic.add_argument("--workers", type=int)
    sic.set_defaults(handler=command_sic)

    sample = commands.add_parser("sample", help="draw random states (CSV of Bloch vectors)")
    sample.add_argument("--ensemble", choices=Ensemble.choices())
    sample.add_argument("--count", type=int, required=True)
    sample.add_argument("--seed", type=int)
    sample.set_defaults(handler=command_sample)

    simulate = commands.add_parser("simulate", help="finite-shot experiment and empirical MSE")
    simulate.add_argument("--state", required=True, help="state JSON file")
    _lambda_argument(simulate)
    simulate.add_argument("--shots", type=int)
    simulate.add_argument("--runs", type=int)
    simulate.add_argument("--seed", type=int)
    simulate.set_defaults(handler=command_simulate)

    sweep = commands.add_parser("sweep", help="ensemble-averaged bounds over a lambda grid")
    sweep.add_argument("--grid", help="A:B:STEPS or a comma-separated list")
    sweep.add_argument("--ensemble", choices=Ensemble.choices())
    sweep.add_argument("--samples", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.add_argument("--svg", help="also write an SVG chart here")
    sweep.add_argument("--db", help="also store the rows in this SQLAlchemy database URL")
    sweep.set_defaults(handler=command_sweep)

    crossover = commands.add_parser("crossover", help="lambda where DST and SIC bounds cross")
    crossover.add_argument("--tol", type=float, default=1e-6)
    crossover.add_argument("--samples", type=int, help="also estimate a mixed-ensemble crossover")
    crossover.add_argument("--ensemble", choices=Ensemble.choices())
    crossover.add_argument("--seed", type=int)
    crossover.add_argument("--workers", type=int)
    crossover.set_defaults(handler=command_crossover)

    results = commands.add_parser("results", help="list stored sweep runs, or the rows of one run")
    results.add_argument("--db", help="SQLAlchemy database URL")
    results.add_argument("--run", type=int, help="run id")
    results.set_defaults(handler=command_results)

    return parser


def configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args)
    try:
        options = read_options(section=args.command, config_path=args.config)
        return args.handler(args, options)
    except NumericalError as e:
        logger.error(str(e))
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.error(str(e))
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(str(e))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
