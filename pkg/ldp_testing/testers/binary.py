"""
Bias of a coin seen only through binary randomized response, the building
block of every RAPTOR test.
"""
import logging
import math

import numpy as np

from ..enums import Decision, MechanismKind, TestKind
from ..exceptions import AlphabetError, ConfigError, DistributionError
from ..mechanisms import PrivacyBudget, PrivatizedBatch
from .verdict import Verdict

logger = logging.getLogger(__name__)


def _bits(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).reshape(-1)
    if not bits.size:
        raise DistributionError('bias estimate needs at least one bit')
    return bits


def bias_estimate(bits, budget: PrivacyBudget) -> float:
    """
    Unbiased estimate of P(true bit = 1) from eps-RR bits:
    (mean - 1/(e^eps + 1)) (e^eps + 1)/(e^eps - 1). Not clamped to [0, 1].

    >>> round(bias_estimate([1, 0], PrivacyBudget(math.log(3))), 12)
    0.5
    """
    bits = _bits(bits)
    return float((bits.mean() - budget.flip_probability) * budget.inverse_signal)


def required_bias_samples(budget: PrivacyBudget, gamma_prime: float, delta: float) -> int:
    """
    Hoeffding bound for bias_test: with n >= 8 kappa^2 ln(2/delta) / gamma'^2,
    kappa = (e^eps + 1)/(e^eps - 1), the estimate is within gamma'/2 of the
    truth with probability at least 1 - delta.
    """
    return math.ceil(8 * budget.inverse_signal ** 2 * math.log(2 / delta) / gamma_prime ** 2)


def _check_delta(delta: float) -> None:
    if not 0 < delta < 0.5:
        raise ConfigError(f'delta must lie in (0, 1/2), got {delta}')


def bias_test(bits, budget: PrivacyBudget, gamma_prime: float, delta: float,
              majority_batches: int | None = None) -> Verdict:
    """
    biased iff |rho_hat - 1/2| > gamma'/2.

    With majority_batches set, the bits are cut into that many disjoint
    batches, each batch is thresholded on its own, and the verdict is the
    strict majority of the batch decisions.
    """
    _check_delta(delta)
    bits = _bits(bits)
    required = required_bias_samples(budget, gamma_prime, delta)
    threshold = gamma_prime / 2

    if majority_batches:
        if majority_batches > bits.size:
            raise ConfigError(f'cannot cut {bits.size} bits into {majority_batches} batches')
        votes = [
            abs(bias_estimate(chunk, budget) - 0.5) > threshold
            for chunk in np.array_split(bits, majority_batches)
        ]
        statistic = sum(votes) / len(votes)
        biased = statistic > 0.5
        threshold = 0.5
    else:
        statistic = abs(bias_estimate(bits, budget) - 0.5)
        biased = statistic > threshold

    insufficient = bits.size < required
    if insufficient:
        logger.debug('bias test on %s bits, %s required for delta=%s', bits.size, required, delta)
    return Verdict(
        test=TestKind.BiasTest,
        decision=Decision.Biased if biased else Decision.Unbiased,
        statistic=statistic,
        threshold=threshold,
        n=bits.size,
        k=2,
        epsilon=budget.epsilon,
        gamma=gamma_prime,
        insufficient_samples=insufficient,
    )


def binary_uniformity_test(batch: PrivatizedBatch, gamma: float) -> Verdict:
    """
    Uniformity over {0, 1} from k = 2 randomized response reports: a
    Bernoulli(rho) source is gamma-far from uniform iff |rho - 1/2| > gamma,
    so uniform iff |rho_hat - 1/2| <= gamma/2.
    """
    batch.expect(MechanismKind.RR)
    if batch.k != 2:
        raise AlphabetError(f'binary uniformity needs k = 2, got {batch.k}')
    statistic = abs(bias_estimate(batch.messages, batch.budget) - 0.5)
    threshold = gamma / 2
    return Verdict(
        test=TestKind.BinaryUniformity,
        decision=Decision.NotUniform if statistic > threshold else Decision.Uniform,
        statistic=statistic,
        threshold=threshold,
        n=batch.n,
        k=2,
        epsilon=batch.epsilon,
        gamma=gamma,
    )


__all__ = (
    'bias_estimate',
    'bias_test',
    'binary_uniformity_test',
    'required_bias_samples',
)
