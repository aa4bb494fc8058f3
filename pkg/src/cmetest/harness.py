"""Monte Carlo experiments: type I calibration, parameter grids, consistency.

Every trial or grid cell draws its randomness from a child of the master
seed indexed by its position, so results do not depend on the number of
worker processes.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .datagen import MixtureParams, MixtureRegression, candidate, sample_dataset
from .resampling import TestConfig, child_seed, run_test

# Child indices used under each trial seed.
_DATA_STREAM = 0
_TEST_STREAM = 1


@dataclass(frozen=True)
class GridSpec:
    p_range: tuple[float, float] = (0.2, 0.8)
    lam_range: tuple[float, float] = (0.5, 1.5)
    step: float = 0.01

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        for name, (lo, hi) in (("p", self.p_range), ("lambda", self.lam_range)):
            if not lo < hi:
                raise ValueError(f"{name} range needs lo < hi, got [{lo}, {hi}]")

    def p_values(self) -> np.ndarray:
        return grid_values(*self.p_range, self.step)

    def lam_values(self) -> np.ndarray:
        return grid_values(*self.lam_range, self.step)

    def points(self) -> list[tuple[float, float]]:
        return [(p, lam) for p in self.p_values() for lam in self.lam_values()]


def grid_values(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid ``lo, lo + step, ..., hi`` (``hi`` kept if within rounding)."""
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


@dataclass(frozen=True)
class CalibrationReport:
    trials: int
    p_lo: int
    q_hi: int
    accepted: int
    rank_histogram: np.ndarray

    @property
    def m(self) -> int:
        return self.rank_histogram.shape[0]

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.trials

    @property
    def expected_acceptance(self) -> float:
        return (self.q_hi - self.p_lo + 1) / self.m

    @property
    def chi_square_stat(self) -> float:
        expected = self.trials / self.m
        return float(np.sum((self.rank_histogram - expected) ** 2) / expected)

    @property
    def chi_square_pvalue(self) -> float:
        return float(stats.chi2.sf(self.chi_square_stat, self.m - 1))


def _map(fn, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _null_trial(index: int, config: TestConfig, params: MixtureParams, n: int) -> int:
    trial = child_seed(config.seed, index)
    rng = np.random.default_rng(child_seed(trial, _DATA_STREAM))
    sample = sample_dataset(params, n, rng)
    return run_test(sample, MixtureRegression(params), config, seed=child_seed(trial, _TEST_STREAM)).rank


def calibrate_type1(
    config: TestConfig, params: MixtureParams, n: int, trials: int, workers: int = 1
) -> CalibrationReport:
    """Run ``trials`` tests of the true regression function on fresh data."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    ranks = np.array(_map(partial(_null_trial, config=config, params=params, n=n), range(trials), workers))
    hist = np.bincount(ranks - 1, minlength=config.m)
    accepted = int(np.count_nonzero((ranks >= config.p_lo) & (ranks <= config.q_hi)))
    return CalibrationReport(trials, config.p_lo, config.q_hi, accepted, hist)


def _grid_cell(args, config: TestConfig, params: MixtureParams, n: int, shared) -> tuple:
    index, (p, lam) = args
    cell = child_seed(config.seed, index + 1)
    if shared is None:
        rng = np.random.default_rng(child_seed(cell, _DATA_STREAM))
        sample = sample_dataset(params, n, rng)
    else:
        sample = shared
    outcome = run_test(sample, candidate(p, lam, params.mu1, params.mu2), config, seed=child_seed(cell, _TEST_STREAM))
    return (p, lam, outcome.rank, outcome.normalized_rank)


def grid_experiment(
    gridspec: GridSpec,
    config: TestConfig,
    params: MixtureParams,
    n: int,
    shared_data: bool = True,
    workers: int = 1,
) -> list[tuple[float, float, int, float]]:
    """Rank of the true-data sample for every ``(p, lambda)`` candidate.

    By default a single dataset (drawn from child 0 of the master seed) is
    tested against every candidate; with ``shared_data=False`` each cell
    draws its own.
    """
    shared = None
    if shared_data:
        shared = sample_dataset(params, n, np.random.default_rng(child_seed(config.seed, 0)))
    fn = partial(_grid_cell, config=config, params=params, n=n, shared=shared)
    return _map(fn, list(enumerate(gridspec.points())), workers)


def _consistency_trial(args, config: TestConfig, params: MixtureParams, cand: tuple[float, float]) -> int:
    size_index, n, r = args
    trial = child_seed(child_seed(config.seed, size_index), r)
    sample = sample_dataset(params, n, np.random.default_rng(child_seed(trial, _DATA_STREAM)))
    f = candidate(cand[0], cand[1], params.mu1, params.mu2)
    return run_test(sample, f, config, seed=child_seed(trial, _TEST_STREAM)).rank


def consistency_ranks(
    cand: tuple[float, float],
    config: TestConfig,
    params: MixtureParams,
    sizes: Iterable[int],
    repeats: int,
    workers: int = 1,
) -> np.ndarray:
    """Ranks of the original sample, shape ``(len(sizes), repeats)``.

    Each repeat draws a fresh dataset of the given size from the true model
    and tests the candidate ``(p, lambda)`` on it.
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if repeats < 1:
        raise ValueError(f"repeats must be positive, got {repeats}")
    jobs = [(i, n, r) for i, n in enumerate(sizes) for r in range(repeats)]
    ranks = _map(partial(_consistency_trial, config=config, params=params, cand=cand), jobs, workers)
    return np.array(ranks).reshape(len(sizes), repeats)


def consistency_curve(
    cand: tuple[float, float],
    config: TestConfig,
    params: MixtureParams,
    sizes: Iterable[int],
    repeats: int,
    workers: int = 1,
) -> list[tuple[int, float, float]]:
    """Rows ``(n, mean_rank, mean_normalized_rank)``, one per sample size."""
    sizes = list(sizes)
    means = consistency_ranks(cand, config, params, sizes, repeats, workers).mean(axis=1)
    return [(n, float(mu), float(mu) / config.m) for n, mu in zip(sizes, means)]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()
