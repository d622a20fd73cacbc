"""
Monte-Carlo experiments: every trial is a pure function of the config, the
sample size, the instance role and the trial index, so the same trials can
run serially or in a process pool and land in the same report.
"""
from concurrent.futures import ProcessPoolExecutor
from functools import partial
import logging
import math
import time

import numpy as np

from ..distributions import random_theta
from ..enums import MechanismKind, TestKind
from ..exceptions import ConfigError
from ..mechanisms import PrivacyBudget, PrivatizedBatch, PublicCoin, simulate_rappor_counts
from ..testers import (
    RapporCounts,
    Verdict,
    binary_independence_test,
    binary_uniformity_test,
    hr_independence_test,
    hr_uniformity_test,
    learning_samples,
    rappor_uniformity_test,
    raptor_independence_test,
    raptor_uniformity_test,
    required_bias_samples,
)
from ..utils import as_symbols, make_rng, mix_seed
from .config import ExperimentConfig
from .report import ExperimentPoint, ExperimentReport

logger = logging.getLogger(__name__)

# stream words separating the two instances and the pinned Paninski signs
NULL_STREAM = 0
ALTERNATIVE_STREAM = 1
THETA_STREAM = 0x7468657461

# (exponent of eps, exponent of k) in n = C k^b / (gamma^2 eps^a)
SAMPLE_SCALING = {
    TestKind.HadamardUniformity: (2, 1.5),
    TestKind.RaptorUniformity: (2, 1),
    TestKind.HadamardIndependence: (4, 3),
    TestKind.RaptorIndependence: (2, 2),
}


def _repetitions(config: ExperimentConfig) -> int | None:
    match config.test:
        case TestKind.RaptorUniformity if not config.section['parallel']:
            return int(config.section['repetitions'])
        case TestKind.RaptorIndependence:
            return int(config.section['repetitions'])
    return None


def default_sample_size(config: ExperimentConfig) -> int:
    """
    Calibrated n for the config's test, rounded up to a multiple of the
    repetition count for the RAPTOR tests.
    """
    budget = PrivacyBudget(config.epsilon)
    k, gamma = config.k, config.gamma
    match config.test:
        case TestKind.RapporUniformity:
            n = config.section['sample_constant'] * k ** 1.5 / (budget.alpha_r ** 2 * gamma ** 2)
        case TestKind.BinaryUniformity:
            n = required_bias_samples(budget, gamma, 1 / 3)
        case TestKind.BinaryIndependence:
            # three estimates, each within gamma/16 with probability 8/9
            n = required_bias_samples(budget.split(3), gamma / 4, 1 / 9)
        case TestKind.HadamardIndependence:
            section = config.section
            learning = learning_samples(k, budget, gamma, section['learn_constant'])
            # the learning half must fit in learn_fraction of the users
            n = max(
                section['sample_constant'] * k ** 3 / (gamma ** 2 * config.epsilon ** 4),
                learning / section['learn_fraction'],
            )
        case test:
            eps_power, k_power = SAMPLE_SCALING[test]
            n = config.section['sample_constant'] * k ** k_power / (
                gamma ** 2 * config.epsilon ** eps_power
            )
    n = math.ceil(n)
    if repetitions := _repetitions(config):
        n = repetitions * math.ceil(n / repetitions)
    return n


def run_test(test: TestKind, samples: np.ndarray, k: int, budget: PrivacyBudget,
             gamma: float, rng: np.random.Generator, calibration: dict) -> Verdict:
    """Privatize raw user samples with the mechanism of `test` and run it"""
    test = TestKind(test)
    samples = np.asarray(samples, dtype=np.int64)
    if test.is_independence:
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise ConfigError(f'{test} needs symbol pairs')
        as_symbols(samples, k)
    else:
        samples = as_symbols(samples, k)
    match test:
        case TestKind.RapporUniformity:
            counts = simulate_rappor_counts(np.bincount(samples, minlength=k), budget, rng)
            return rappor_uniformity_test(RapporCounts(counts, samples.size), budget, gamma)
        case TestKind.HadamardUniformity:
            batch = PrivatizedBatch.from_samples(MechanismKind.HR, samples, k, budget, rng)
            return hr_uniformity_test(
                batch, budget, gamma, rng, calibration['l2_closeness']['poisson_fraction'],
            )
        case TestKind.RaptorUniformity:
            section = calibration['raptor_uniformity']
            repetitions = int(section['repetitions'])
            if not section['parallel']:
                samples = _whole_rounds(samples, repetitions)
            return raptor_uniformity_test(
                samples, k, budget, gamma, rng,
                subset_constant=section['subset_constant'],
                repetitions=repetitions,
                parallel=section['parallel'],
                majority_batches=section['majority_batches'],
            )
        case TestKind.BinaryUniformity:
            batch = PrivatizedBatch.from_samples(MechanismKind.RR, samples, k, budget, rng)
            return binary_uniformity_test(batch, gamma)
        case TestKind.HadamardIndependence:
            section = calibration['hr_independence']
            batch = PrivatizedBatch.from_samples(MechanismKind.HRPair, samples, k, budget, rng)
            return hr_independence_test(
                batch, budget, gamma, rng,
                learn_constant=section['learn_constant'],
                learn_fraction=section['learn_fraction'],
                marginal_floor=section['marginal_floor'],
                poisson_fraction=calibration['l2_closeness']['poisson_fraction'],
            )
        case TestKind.RaptorIndependence:
            section = calibration['raptor_independence']
            repetitions = int(section['repetitions'])
            return raptor_independence_test(
                _whole_rounds(samples, repetitions), k, budget, gamma, rng,
                threshold=section['threshold'],
                dependent_fraction=section['dependent_fraction'],
                repetitions=repetitions,
            )
        case TestKind.BinaryIndependence:
            coin = PublicCoin.from_members([[1], [1]], 2)
            batch = PrivatizedBatch.from_samples(MechanismKind.RAPTOR2, samples, 2, budget, rng, coin)
            return binary_independence_test(batch, budget, gamma)
    raise ConfigError(f'{test} is a building block, not an end-to-end test')


def _whole_rounds(samples: np.ndarray, repetitions: int) -> np.ndarray:
    usable = samples.shape[0] - samples.shape[0] % repetitions
    if not usable:
        raise ConfigError(f'{samples.shape[0]} samples cannot fill {repetitions} repetitions')
    return samples[:usable]


def trial_seed(config: ExperimentConfig, index: int, n: int, alternative: bool) -> int:
    """64-bit seed of one trial: splitmix64 folded over (base seed, index, n, instance)"""
    return mix_seed(config.seed, index, n, ALTERNATIVE_STREAM if alternative else NULL_STREAM)


def _instance(config: ExperimentConfig, alternative: bool):
    spec = config.alternative if alternative else config.null
    if config.fixed_theta and spec.is_random:
        spec = spec.pinned(random_theta(config.k, make_rng(config.seed, THETA_STREAM)))
    return spec


def run_trial(config: ExperimentConfig, index: int, n: int | None = None,
              alternative: bool = False) -> Verdict:
    """
    One trial, deterministic given (config, index, n, instance). n defaults
    to the first grid point, or the calibrated size when the grid is empty.
    """
    n = n or (config.n_grid[0] if config.n_grid else default_sample_size(config))
    seed = trial_seed(config, index, n, alternative)
    rng = np.random.default_rng(seed)
    samples = _instance(config, alternative).draw(config.k, config.gamma, n, rng)
    verdict = run_test(config.test, samples, config.k, PrivacyBudget(config.epsilon),
                       config.gamma, rng, config.calibration)
    verdict.seed = seed
    return verdict


def _run_trials(config: ExperimentConfig, n: int, alternative: bool,
                workers: int) -> list[Verdict]:
    trial = partial(run_trial, config, n=n, alternative=alternative)
    indices = range(config.trials)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map yields in index order whatever the completion order
            return list(pool.map(trial, indices, chunksize=max(1, config.trials // (4 * workers))))
    return [trial(i) for i in indices]


def evaluate_point(config: ExperimentConfig, n: int, workers: int = 1) -> ExperimentPoint:
    null = _run_trials(config, n, False, workers)
    alternative = _run_trials(config, n, True, workers)
    insufficient = sum(v.insufficient_samples for v in null + alternative)
    if insufficient:
        logger.warning('%s of %s trials at n=%s ran below their guaranteed sample size',
                       insufficient, 2 * config.trials, n)
    point = ExperimentPoint(
        n, config.trials,
        type1_errors=sum(v.rejects for v in null),
        type2_errors=sum(not v.rejects for v in alternative),
        null_seeds=[v.seed for v in null],
        alternative_seeds=[v.seed for v in alternative],
        insufficient=insufficient,
    )
    logger.info('%s k=%s n=%s: type1=%.3f type2=%.3f', config.test, config.k, n,
                point.type1, point.type2)
    return point


def _grid(config: ExperimentConfig) -> tuple[int, ...]:
    return config.n_grid or (default_sample_size(config),)


def _minimal(points, target: float) -> int | None:
    meeting = [p.n for p in points if p.meets(target)]
    return min(meeting) if meeting else None


def error_rates(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """Type-I and type-II rates at every point of the n grid"""
    start = time.perf_counter()
    points = [evaluate_point(config, n, workers) for n in _grid(config)]
    minimal = _minimal(points, config.target_error)
    return ExperimentReport(
        config.to_json(), points, minimal, saturated=minimal is None,
        wall_clock=time.perf_counter() - start,
    )


def sample_complexity_curve(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """
    Binary search of the n grid for the smallest n whose error rates both
    meet the target, assuming they are non-increasing in n. Every evaluated
    point is kept as a curve point.
    """
    start = time.perf_counter()
    grid = _grid(config)
    evaluated: dict[int, ExperimentPoint] = {}
    low, high = 0, len(grid) - 1
    best = None
    while low <= high:
        middle = (low + high) // 2
        n = grid[middle]
        if n not in evaluated:
            evaluated[n] = evaluate_point(config, n, workers)
        if evaluated[n].meets(config.target_error):
            best = n
            high = middle - 1
        else:
            low = middle + 1
    if best is None:
        logger.warning('%s k=%s: target error %s not reached on the grid up to n=%s',
                       config.test, config.k, config.target_error, grid[-1])
    return ExperimentReport(
        config.to_json(), evaluated.values(), best, saturated=best is None,
        wall_clock=time.perf_counter() - start,
    )


def scaling_slope(points) -> float:
    """
    Least-squares slope of log n against log k over (k, n) pairs.

    >>> round(scaling_slope([(16, 100), (64, 400), (256, 1600)]), 6)
    1.0
    """
    pairs = np.asarray(list(points), dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[0] < 2:
        raise ConfigError('slope needs at least two (k, n) points')
    slope, _ = np.polyfit(np.log(pairs[:, 0]), np.log(pairs[:, 1]), 1)
    return float(slope)


def sample_constant(config: ExperimentConfig, n: int) -> float:
    """
    Invert the sample-size formula of the config's test at a measured n. For
    hr-independence this is the C_I term; the learning floor is ignored.
    """
    k, gamma = config.k, config.gamma
    if config.test == TestKind.RapporUniformity:
        return n * PrivacyBudget(config.epsilon).alpha_r ** 2 * gamma ** 2 / k ** 1.5
    if config.test not in SAMPLE_SCALING:
        raise ConfigError(f'{config.test} has no calibrated sample constant')
    eps_power, k_power = SAMPLE_SCALING[config.test]
    return n * gamma ** 2 * config.epsilon ** eps_power / k ** k_power


__all__ = (
    'default_sample_size',
    'error_rates',
    'evaluate_point',
    'run_test',
    'run_trial',
    'sample_complexity_curve',
    'sample_constant',
    'scaling_slope',
    'trial_seed',
)
