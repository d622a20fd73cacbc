import logging
import math

import numpy as np

from ..enums import Decision, MechanismKind, TestKind
from ..exceptions import ConfigError, DistributionError
from ..hadamard import hadamard_code, q_star
from ..mechanisms import (
    PrivacyBudget,
    PrivatizedBatch,
    PublicCoin,
    raptor_encode_batch,
    raptor_encode_parallel,
)
from ..utils import as_symbols
from .binary import bias_test
from .closeness import l2_closeness_test
from .verdict import RapporCounts, Verdict

logger = logging.getLogger(__name__)


# ------------------------------------------------------------------
# RAPPOR
# ------------------------------------------------------------------
def rappor_counts(batch: PrivatizedBatch) -> RapporCounts:
    batch.expect(MechanismKind.RAPPOR)
    return RapporCounts(batch.messages.sum(axis=0), batch.n)


def rappor_statistic(counts: RapporCounts, budget: PrivacyBudget) -> float:
    """
    T = sum_x [(N_x - (n-1) lambda)^2 - N_x] + k (n-1) lambda^2 with
    lambda = alpha_R/k + beta_R; E[T] = n(n-1) alpha_R^2 ||p - u||^2.
    """
    n, k = counts.n, counts.k
    if n < 2:
        raise DistributionError(f'RAPPOR statistic needs n >= 2, got {n}')
    lam = budget.alpha_r / k + budget.beta_r
    centered = counts.counts - (n - 1) * lam
    return float((centered * centered - counts.counts).sum() + k * (n - 1) * lam * lam)


def rappor_uniformity_test(data: PrivatizedBatch | RapporCounts, budget: PrivacyBudget,
                           gamma: float) -> Verdict:
    """uniform iff T < n(n-1) alpha_R^2 gamma^2 / k"""
    counts = rappor_counts(data) if isinstance(data, PrivatizedBatch) else data
    n, k = counts.n, counts.k
    statistic = rappor_statistic(counts, budget)
    threshold = n * (n - 1) * budget.alpha_r ** 2 * gamma ** 2 / k
    return Verdict(
        test=TestKind.RapporUniformity,
        decision=Decision.Uniform if statistic < threshold else Decision.NotUniform,
        statistic=statistic,
        threshold=threshold,
        n=n,
        k=k,
        epsilon=budget.epsilon,
        gamma=gamma,
    )


# ------------------------------------------------------------------
# Hadamard Response
# ------------------------------------------------------------------
def hr_gap(k: int, budget: PrivacyBudget, gamma: float) -> float:
    """l2 distance between the HR output and q* whenever TV(p, u) > gamma: 2 alpha_H gamma / sqrt(kK)"""
    K = hadamard_code(k).K
    return 2 * budget.alpha_h * gamma / math.sqrt(k * K)


def hr_uniformity_test(batch: PrivatizedBatch, budget: PrivacyBudget, gamma: float,
                       rng: np.random.Generator, poisson_fraction: float = 0.9) -> Verdict:
    """
    Compare the HR reports against as many synthetic draws from q* with
    the l2 closeness test; close means uniform.
    """
    batch.expect(MechanismKind.HR)
    code = hadamard_code(batch.k)
    reference = q_star(batch.k, budget.epsilon, code).sample(batch.n, rng)
    closeness = l2_closeness_test(
        batch.messages, reference, hr_gap(batch.k, budget, gamma), rng,
        size=code.K, poisson_fraction=poisson_fraction,
    )
    return Verdict(
        test=TestKind.HadamardUniformity,
        decision=Decision.Uniform if closeness.decision == Decision.Close else Decision.NotUniform,
        statistic=closeness.statistic,
        threshold=closeness.threshold,
        n=batch.n,
        k=batch.k,
        epsilon=budget.epsilon,
        gamma=gamma,
    )


# ------------------------------------------------------------------
# RAPTOR
# ------------------------------------------------------------------
def raptor_constants(k: int, gamma: float, subset_constant: float) -> tuple[float, float]:
    """(delta, gamma') = (c / (2(1 + c)), gamma / sqrt(5k))"""
    return subset_constant / (2 * (1 + subset_constant)), gamma / math.sqrt(5 * k)


def raptor_uniformity_test(samples, k: int, budget: PrivacyBudget, gamma: float,
                           rng: np.random.Generator, subset_constant: float = 0.05,
                           repetitions: int = 48, parallel: bool = False,
                           majority_batches: int | None = None) -> Verdict:
    """
    T repetitions, each with a fresh public coin S_t. By default repetition t
    privatizes its own disjoint mini-batch of n/T users at the full eps;
    with parallel=True every user answers all T coins at eps/T. Each
    repetition runs bias_test at (gamma', delta), and the samples are
    declared uniform iff the fraction tau of unbiased repetitions exceeds
    1 - (delta + c/4).
    """
    symbols = as_symbols(samples, k)
    n = symbols.size
    if repetitions < 1:
        raise ConfigError('repetitions must be at least 1')
    if not parallel and n % repetitions:
        raise ConfigError(f'sample count {n} is not divisible by {repetitions} repetitions')
    if not n:
        raise DistributionError('RAPTOR test needs at least one sample')

    delta, gamma_prime = raptor_constants(k, gamma, subset_constant)
    coin = PublicCoin.draw(k, rng, count=repetitions)
    if parallel:
        reports = raptor_encode_parallel(symbols, coin, budget, rng)
        round_budget = budget.split(repetitions)
        rounds = [reports[:, t] for t in range(repetitions)]
    else:
        round_budget = budget
        rounds = [
            raptor_encode_batch(batch, coin, budget, rng, index=t)
            for t, batch in enumerate(np.split(symbols, repetitions))
        ]

    unbiased = 0
    insufficient = False
    for t, bits in enumerate(rounds):
        verdict = bias_test(bits, round_budget, gamma_prime, delta, majority_batches)
        logger.debug('repetition %s: %s', t, verdict)
        unbiased += verdict.decision == Decision.Unbiased
        insufficient |= verdict.insufficient_samples

    tau = unbiased / repetitions
    threshold = 1 - (delta + subset_constant / 4)
    return Verdict(
        test=TestKind.RaptorUniformity,
        decision=Decision.Uniform if tau > threshold else Decision.NotUniform,
        statistic=tau,
        threshold=threshold,
        n=n,
        k=k,
        epsilon=budget.epsilon,
        gamma=gamma,
        insufficient_samples=insufficient,
    )


__all__ = (
    'hr_gap',
    'hr_uniformity_test',
    'rappor_counts',
    'rappor_statistic',
    'rappor_uniformity_test',
    'raptor_constants',
    'raptor_uniformity_test',
)
