#!/usr/bin/env python
"""
Reproduce the E_min versus lambda comparison of DST and SIC-POVM tomography.

This script runs the whole pipeline end to end:
1. Sweep the Haar pure-state ensemble over a lambda grid (CSV + SVG).
2. Sweep the Bures mixed-state ensemble over the same grid.
3. Check the Monte-Carlo averages against the analytic references.
4. Locate the pure-state and the Bures-ensemble crossovers.

Usage:
    python reproduce_figure.py [--samples N] [--seed S] [--workers W] [--outdir DIR]

Results are written to DIR (default: ./figure): pure.csv, pure.svg, bures.csv, bures.svg.
"""

import argparse
import logging
import math
import os
import sys

from dst_tomo import (
    Ensemble,
    MeasurementStrength,
    RandomStream,
    SweepConfig,
    find_crossover,
    find_mixed_crossover,
    pure_average,
    run_sweep,
)
from dst_tomo.crb import mub_mixed_average
from dst_tomo.sic import sic_mixed_average
from dst_tomo.sweep import parse_grid

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

GRID = "0:0.95:20"


def banner(title):
    print("=" * 70)
    print(title)
    print("=" * 70)


def check(label, value, expected, stderr):
    tolerance = max(3 * stderr, 1e-9)
    ok = abs(value - expected) <= tolerance
    mark = "✓" if ok else "✗"
    print(f"    {mark} {label}: {value:.6f} (expected {expected:.6f}, tolerance {tolerance:.2g})")
    return ok


def sweep_ensemble(step, ensemble, args):
    """
    Run one sweep and print the resulting curve.
    """
    banner(f"STEP {step}: {ensemble.value} states")
    config = SweepConfig(
        lambda_grid=parse_grid(GRID),
        ensemble=ensemble,
        samples=args.samples,
        seed=args.seed,
        output_path=os.path.join(args.outdir, f"{ensemble.value}.csv"),
        emit_svg=True,
        workers=args.workers,
    )
    print(f"\n[{step}.1] Averaging over {args.samples} states at {len(config.lambda_grid)} lambda values...")
    rows = run_sweep(config)
    print(f"    ✓ Wrote {config.output_path} and {config.chart_path}")

    print(f"\n[{step}.2] E_min per lambda:")
    for row in rows:
        print(f"    lambda = {row.lam:5.3f}   E_min = {row.e_min_mc:.4f} +- {row.e2_mc_stderr / (2 * row.e_min_mc):.1g}")
    return rows


def check_references(pure_rows, bures_rows):
    """
    Compare the Monte-Carlo averages with the exact values.
    """
    banner("STEP 3: Analytic references")
    results = []

    print("\n[3.1] Pure states, closed form at every lambda:")
    for row in pure_rows:
        expected = pure_average(MeasurementStrength.from_lambda(row.lam))
        results.append(check(f"lambda = {row.lam:5.3f}", row.e2_mc, expected, row.e2_mc_stderr))

    print("\n[3.2] Bures states at lambda = 0:")
    first = bures_rows[0]
    results.append(check("<E^2> DST", first.e2_mc, mub_mixed_average(), first.e2_mc_stderr))
    print(f"    E_min(SIC, mixed) = {first.e_sic_mixed:.4f} (exact {math.sqrt(sic_mixed_average()):.4f})")
    return all(results)


def locate_crossovers(args):
    banner("STEP 4: Crossovers")
    print("\n[4.1] Pure states (closed form)...")
    root = find_crossover()
    print(f"    ✓ lambda = {root:.6f}")

    print("\n[4.2] Bures states (Monte Carlo)...")
    estimate = find_mixed_crossover(args.samples, 1e-4, RandomStream(args.seed), Ensemble.BURES_MIXED, args.workers)
    print(f"    ✓ lambda = {estimate.lam:.4f} +- {estimate.stderr:.1g} (SIC mean {estimate.target:.4f})")


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[1])
    parser.add_argument("--samples", type=int, default=100000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--outdir", default="figure")
    args = parser.parse_args()

    os.makedirs(args.outdir, exist_ok=True)

    pure_rows = sweep_ensemble(1, Ensemble.PURE_HAAR, args)
    print()
    bures_rows = sweep_ensemble(2, Ensemble.BURES_MIXED, args)
    print()
    ok = check_references(pure_rows, bures_rows)
    print()
    locate_crossovers(args)

    print()
    banner("SUMMARY")
    if ok:
        print("✓ All Monte-Carlo averages agree with the analytic references.")
    else:
        print("✗ Some averages are outside three standard errors; try a larger --samples.")
    print(f"\nFigure data in {os.path.abspath(args.outdir)}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
