#!/usr/bin/env python

"""
Ensemble averages of the error bounds over lambda grids, the DST/SIC
crossover, and the sweep that produces the figure data.

Samples are generated in fixed-size chunks; chunk ``i`` always draws from
counter ``stream.counter + i``, whatever the number of worker processes. Each
chunk is reduced to (count, mean, M2) moments which are merged in chunk order,
so every result is a pure function of the seed. All lambda values of a sweep
use the same sampled states.
"""

from __future__ import annotations

import csv
import logging
import math
import multiprocessing
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .crb import closed_bound, pure_average
from .errors import NoCrossover, SingularFisher, ValidationError
from .model import MeasurementStrength, outcome_probabilities
from .qubit import bloch_vectors
from .sampling import Ensemble, RandomStream, sample_matrices
from .sic import sic_bound_table, sic_mixed_average, sic_probability_table

logger = logging.getLogger("dst_tomo.sweep")

CHUNK_SIZE = 8192
CROSSOVER_BRACKET = (0.5, 0.95)
SIC_PURE_E_MIN = 2.0
SIC_PURE_BOUND = 4.0

CSV_COLUMNS = (
    "lambda",
    "e2_closed",
    "e2_mc",
    "e2_mc_stderr",
    "e_min_mc",
    "e_sic_pure",
    "e_sic_mixed",
    "samples",
    "seed",
)


# ---------------------------------------------------------------------------
# Configuration and results
# ---------------------------------------------------------------------------

def parse_grid(text: str) -> Tuple[float, ...]:
    '''
    Parse ``A:B:STEPS`` (STEPS evenly spaced points from A to B inclusive), or a
    comma-separated list of values.
    '''
    text = text.strip()
    try:
        if ":" in text:
            start, stop, steps = text.split(":")
            steps = int(steps)
            if steps < 1:
                raise ValidationError(f"Grid '{text}' must have at least one step.")
            grid = np.linspace(float(start), float(stop), steps)
        else:
            grid = np.array([float(value) for value in text.split(",") if value.strip()])
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"Could not parse lambda grid '{text}'; expected 'A:B:STEPS' or 'l1,l2,...'.") from e
    return tuple(float(value) for value in grid)


@dataclass(frozen=True)
class SweepConfig:
    '''
    Everything a sweep depends on. The CSV written for a given config is
    bitwise reproducible.

    :param lambda_grid: strictly increasing values in [0, 1)
    :param ensemble: which random states to average over
    :param samples: number of states drawn (shared by all lambda)
    :param seed: 64-bit seed of the random stream
    :param output_path: CSV destination
    :param emit_svg: also write a chart
    :param svg_path: chart destination; defaults to the CSV path with ``.svg``
    :param workers: processes evaluating sample chunks
    :param database: optional SQLAlchemy URL the rows are also stored in
    '''
    lambda_grid: Tuple[float, ...]
    ensemble: Ensemble = Ensemble.PURE_HAAR
    samples: int = 100000
    seed: int = 0
    output_path: str = "sweep.csv"
    emit_svg: bool = False
    svg_path: Optional[str] = None
    workers: int = 1
    database: Optional[str] = None
    chunk_size: int = CHUNK_SIZE

    def __post_init__(self):
        grid = tuple(float(value) for value in self.lambda_grid)
        if len(grid) == 0:
            raise ValidationError("The lambda grid is empty.")
        if any(not (0.0 <= value < 1.0) for value in grid):
            raise ValidationError(f"Every lambda must lie in [0, 1); received {list(grid)}.")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError(f"The lambda grid must be strictly increasing; received {list(grid)}.")
        if int(self.samples) < 1:
            raise ValidationError(f"samples must be at least 1, received {self.samples}.")
        if int(self.workers) < 1 or int(self.chunk_size) < 1:
            raise ValidationError(f"workers and chunk_size must be positive: {self.workers}, {self.chunk_size}.")
        RandomStream(self.seed)
        object.__setattr__(self, "lambda_grid", grid)

    @property
    def stream(self) -> RandomStream:
        return RandomStream(int(self.seed))

    @property
    def chart_path(self) -> str:
        if self.svg_path:
            return self.svg_path
        stem = self.output_path[:-4] if self.output_path.lower().endswith(".csv") else self.output_path
        return stem + ".svg"


@dataclass(frozen=True)
class SweepRow:
    ''' One lambda of a sweep. ``e2_closed`` is only defined for the pure ensemble. '''
    lam: float
    e2_closed: Optional[float]
    e2_mc: float
    e2_mc_stderr: float
    e_sic_pure: float
    e_sic_mixed: float
    samples: int
    seed: int

    def __post_init__(self):
        if not self.e2_mc > 0.0 or self.e2_mc_stderr < 0.0:
            raise ValueError(f"Invalid Monte-Carlo estimate in sweep row: {self}.")

    @property
    def e_min_mc(self) -> float:
        return math.sqrt(self.e2_mc)

    def values(self) -> tuple:
        return (
            self.lam,
            self.e2_closed,
            self.e2_mc,
            self.e2_mc_stderr,
            self.e_min_mc,
            self.e_sic_pure,
            self.e_sic_mixed,
            self.samples,
            self.seed,
        )

    def as_dict(self) -> dict:
        return dict(zip(CSV_COLUMNS, self.values()))


@dataclass(frozen=True)
class CrossoverEstimate:
    ''' Monte-Carlo crossover and its (delta-method) standard error. '''
    lam: float
    stderr: float
    target: float


# ---------------------------------------------------------------------------
# Moments and chunked evaluation
# ---------------------------------------------------------------------------

@dataclass
class Moments:
    ''' Count, mean and sum of squared deviations; mergeable in a fixed order. '''
    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        values = np.asarray(values, dtype=float)
        if values.shape[0] == 0:
            zeros = np.zeros(values.shape[1:])
            return cls(0, zeros, zeros.copy())
        mean = np.mean(values, axis=0)
        return cls(values.shape[0], mean, np.sum((values - mean) ** 2, axis=0))

    def merge(self, other: "Moments") -> "Moments":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return Moments(count, mean, m2)

    @property
    def stderr(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


@dataclass
class ChunkSummary:
    dst: Moments
    sic: Moments
    difference: Moments
    excluded: int = 0


@dataclass
class EnsembleSummary:
    ''' Moments of the DST bound per lambda, of the SIC bound, and of their difference. '''
    grid: Tuple[float, ...]
    dst: Moments
    sic: Moments
    difference: Moments
    excluded: int = 0
    samples: int = field(default=0)


def _evaluate_chunk(task) -> ChunkSummary:
    ensemble_name, seed, counter, count, grid = task
    matrices = sample_matrices(Ensemble(ensemble_name), RandomStream(seed, counter), count)
    dst = np.stack(
        [closed_bound(outcome_probabilities(matrices, strength), strength) for strength in map(MeasurementStrength.from_lambda, grid)],
        axis=-1,
    )
    sic = sic_bound_table(sic_probability_table(bloch_vectors(matrices)))
    valid = np.isfinite(sic)
    return ChunkSummary(
        dst=Moments.of(dst),
        sic=Moments.of(sic[valid]),
        difference=Moments.of(dst[valid] - sic[valid, None]),
        excluded=int(count - np.count_nonzero(valid)),
    )


def summarise_ensemble(
    grid: Sequence[float],
    ensemble: Ensemble,
    samples: int,
    stream: RandomStream,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> EnsembleSummary:
    '''
    Evaluate the closed-form DST bound at every lambda of ``grid`` and the SIC
    bound on the same ``samples`` states.
    '''
    grid = tuple(float(value) for value in grid)
    for lam in grid:
        MeasurementStrength.from_lambda(lam).require_complete()
    if samples < 1:
        raise ValidationError(f"samples must be at least 1, received {samples}.")

    tasks = []
    for index, start in enumerate(range(0, samples, chunk_size)):
        counter = stream.advance(index).counter
        tasks.append((ensemble.value, stream.seed, counter, min(chunk_size, samples - start), grid))
    logger.debug(f"{len(tasks)} chunk(s) of up to {chunk_size} {ensemble.value} states on {workers} worker(s)")

    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
            chunks = pool.map(_evaluate_chunk, tasks)
    else:
        chunks = [_evaluate_chunk(task) for task in tasks]

    total = chunks[0]
    dst, sic, difference, excluded = total.dst, total.sic, total.difference, total.excluded
    for chunk in chunks[1:]:
        dst = dst.merge(chunk.dst)
        sic = sic.merge(chunk.sic)
        difference = difference.merge(chunk.difference)
        excluded += chunk.excluded
    return EnsembleSummary(grid=grid, dst=dst, sic=sic, difference=difference, excluded=excluded, samples=samples)


def _report_exclusions(summary: EnsembleSummary):
    if summary.excluded:
        logger.warning(
            f"{summary.excluded} of {summary.samples} states ({100.0 * summary.excluded / summary.samples:.3g}%) "
            f"were excluded from the SIC average: singular Fisher matrix."
        )


# ---------------------------------------------------------------------------
# Averages
# ---------------------------------------------------------------------------

def ensemble_average(
    strength: MeasurementStrength, ensemble: Ensemble, samples: int, stream: RandomStream, workers: int = 1
) -> Tuple[float, float]:
    '''
    Mean of the closed-form bound over random states, with its standard error.
    Boundary states are included; the closed form needs no inversion.

    :raises DegenerateStrength: for lambda >= 1 - 1e-12
    '''
    strength.require_complete()
    if samples < 2:
        raise ValidationError(f"An ensemble average needs at least 2 samples, received {samples}.")
    summary = summarise_ensemble((strength.lam,), ensemble, samples, stream, workers)
    return float(summary.dst.mean[0]), float(summary.dst.stderr[0])


def sic_ensemble_average(ensemble: Ensemble, samples: int, stream: RandomStream, workers: int = 1) -> Tuple[float, float]:
    '''
    Mean of the SIC bound over random states. Draws with a singular Fisher
    matrix are excluded and reported.
    '''
    if samples < 2:
        raise ValidationError(f"An ensemble average needs at least 2 samples, received {samples}.")
    summary = summarise_ensemble((0.0,), ensemble, samples, stream, workers)
    _report_exclusions(summary)
    if summary.sic.count < 2:
        raise SingularFisher("Fewer than two states had a regular SIC Fisher matrix.")
    return float(summary.sic.mean), float(summary.sic.stderr)


# ---------------------------------------------------------------------------
# Crossover
# ---------------------------------------------------------------------------

def _bisect(function, lo: float, hi: float, tol: float, label: str) -> float:
    f_lo, f_hi = function(lo), function(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoCrossover(
            f"No {label} crossover in [{lo}, {hi}]: the difference has the same sign at both ends "
            f"({f_lo:.6g}, {f_hi:.6g})."
        )
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = function(mid)
        iterations += 1
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    logger.debug(f"{label} crossover bracketed to [{lo:.9f}, {hi:.9f}] after {iterations} bisection steps")
    return 0.5 * (lo + hi)


def find_crossover(tol: float = 1e-6, samples: Optional[int] = None, stream: Optional[RandomStream] = None) -> float:
    '''
    Strength below which DST beats SIC tomography on average over pure states:
    the root of ``pure_average(lambda) - 4`` on [0.5, 0.95], by bisection.

    When ``samples`` and ``stream`` are given the Bures-ensemble crossover is
    estimated as well and logged.

    :raises NoCrossover: if the bracket does not change sign
    '''
    if not tol >= 1e-6:
        raise ValidationError(f"Crossover tolerance must be at least 1e-6, received {tol!r}.")
    root = _bisect(
        lambda lam: pure_average(MeasurementStrength.from_lambda(lam)) - SIC_PURE_BOUND, *CROSSOVER_BRACKET, tol, "pure"
    )
    logger.info(f"Pure-state crossover: lambda = {root:.6f}")
    if samples is not None and stream is not None:
        mixed = find_mixed_crossover(samples, tol, stream)
        logger.info(f"Bures-ensemble crossover: lambda = {mixed.lam:.6f} +- {mixed.stderr:.2g}")
    return root


def find_mixed_crossover(
    samples: int,
    tol: float,
    stream: RandomStream,
    ensemble: Ensemble = Ensemble.BURES_MIXED,
    workers: int = 1,
) -> CrossoverEstimate:
    '''
    Where the ensemble mean of the DST bound reaches the SIC mean of the same
    states. The same states are used at every lambda, so the Monte-Carlo
    difference is smooth in lambda and can be bisected; the uncertainty is
    the standard error of the difference divided by its slope at the root.
    '''
    if not tol >= 1e-6:
        raise ValidationError(f"Crossover tolerance must be at least 1e-6, received {tol!r}.")
    if samples < 2:
        raise ValidationError(f"The crossover estimate needs at least 2 samples, received {samples}.")

    def difference(lam: float) -> float:
        return float(summarise_ensemble((lam,), ensemble, samples, stream, workers).difference.mean[0])

    root = _bisect(difference, *CROSSOVER_BRACKET, tol, ensemble.value)
    step = 1e-3
    around = summarise_ensemble((root - step, root, root + step), ensemble, samples, stream, workers)
    slope = (around.difference.mean[2] - around.difference.mean[0]) / (2.0 * step)
    stderr = float(around.difference.stderr[1] / abs(slope)) if slope != 0.0 else math.inf
    return CrossoverEstimate(lam=root, stderr=stderr, target=float(around.sic.mean))


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(rows: Sequence[SweepRow], path: str):
    '''
    :raises OSError: if the file cannot be written
    '''
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow([format_value(value) for value in row.values()])
    except OSError as e:
        raise OSError(f"Could not write the sweep table to '{path}': {e}") from e


def run_sweep(config: SweepConfig) -> List[SweepRow]:
    '''
    Average the bounds over ``config.samples`` states at every lambda of the grid,
    write the CSV (and the SVG chart and database rows when configured) and
    return the rows.
    '''
    logger.info(
        f"Sweep over {len(config.lambda_grid)} lambda value(s), {config.samples} {config.ensemble.value} states, "
        f"seed {config.seed}"
    )
    summary = summarise_ensemble(
        config.lambda_grid, config.ensemble, config.samples, config.stream, config.workers, config.chunk_size
    )
    _report_exclusions(summary)

    if config.ensemble.mixed and summary.sic.count:
        e_sic_mixed = math.sqrt(float(summary.sic.mean))
    else:
        e_sic_mixed = math.sqrt(sic_mixed_average())

    rows = []
    stderr = summary.dst.stderr
    for index, lam in enumerate(config.lambda_grid):
        e2_closed = None
        if config.ensemble is Ensemble.PURE_HAAR:
            e2_closed = pure_average(MeasurementStrength.from_lambda(lam))
        row = SweepRow(
            lam=lam,
            e2_closed=e2_closed,
            e2_mc=float(summary.dst.mean[index]),
            e2_mc_stderr=float(stderr[index]),
            e_sic_pure=SIC_PURE_E_MIN,
            e_sic_mixed=e_sic_mixed,
            samples=config.samples,
            seed=config.seed,
        )
        logger.info(f"lambda = {lam:.6g}: <E^2> = {row.e2_mc:.6g} +- {row.e2_mc_stderr:.2g}, E_min = {row.e_min_mc:.6g}")
        rows.append(row)

    write_csv(rows, config.output_path)
    logger.info(f"Wrote {len(rows)} row(s) to {config.output_path}")

    if config.emit_svg:
        from .svg_chart import write_sweep_chart

        write_sweep_chart(rows, config.chart_path, config.ensemble, find_crossover())
        logger.info(f"Wrote chart to {config.chart_path}")

    if config.database:
        from .ResultsDatabase import ResultsDatabase

        run_id = ResultsDatabase(config.database).store_sweep(config, rows)
        logger.info(f"Stored sweep as run {run_id} in {ResultsDatabase.redacted(config.database)}")

    return rows


__all__ = [
    "CSV_COLUMNS",
    "parse_grid",
    "SweepConfig",
    "SweepRow",
    "CrossoverEstimate",
    "Moments",
    "summarise_ensemble",
    "ensemble_average",
    "sic_ensemble_average",
    "find_crossover",
    "find_mixed_crossover",
    "write_csv",
    "run_sweep",
]
