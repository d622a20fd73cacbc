"""
Independence testers over [k] x [k].

The private-coin pipeline pairs up HR reports of different users to get
samples of the product of the output marginals, learns that product with
add-1 estimators, and checks the held-out pairs against it with a
Poissonized chi-square statistic. The public-coin test asks every user three
RAPTOR questions per repetition and looks for a product-rule violation.
"""
import json
import logging
import math

import numpy as np

from ..distributions import Distribution, JointDistribution, chi_square_div
from ..enums import Decision, MechanismKind, TestKind
from ..exceptions import AlphabetError, ConfigError, ContractViolation, DistributionError
from ..hadamard import hadamard_code
from ..mechanisms import PrivacyBudget, PrivatizedBatch, PublicCoin, raptor2_encode_batch
from ..utils import as_symbols
from .binary import bias_estimate
from .closeness import poissonized_size
from .verdict import Verdict

logger = logging.getLogger(__name__)


class LearnedProduct:
    """
    Estimated product q1 x q2 over [K] x [K]. target is the chi-square
    distance to the true product the estimate was sized for, if known.
    """

    __slots__ = ('q1', 'q2', 'floored', 'target')

    def __init__(self, q1: Distribution, q2: Distribution, floored: bool = False,
                 target: float | None = None) -> None:
        if q1.k != q2.k:
            raise AlphabetError(f'marginals live on different alphabets: {q1.k} != {q2.k}')
        self.q1 = q1
        self.q2 = q2
        self.floored = floored
        self.target = target

    @property
    def K(self) -> int:
        return self.q1.k

    @property
    def marginal_target(self) -> float | None:
        # (1 + t/3)^2 - 1 < t for t < 3
        return None if self.target is None else self.target / 3

    def joint(self) -> JointDistribution:
        return JointDistribution(np.outer(self.q1.pmf, self.q2.pmf))

    def min_mass(self) -> float:
        return float(self.q1.pmf.min() * self.q2.pmf.min())

    def chi_square_from(self, truth: JointDistribution) -> float:
        """chi^2(truth, q) against the learned product q"""
        return chi_square_div(truth, self.joint())

    def to_json(self) -> str:
        return json.dumps({
            'q1': self.q1.to_json(),
            'q2': self.q2.to_json(),
            'floored': self.floored,
            'target': self.target,
        })

    def __repr__(self) -> str:
        return f'LearnedProduct(K={self.K}, floored={self.floored}, target={self.target})'


def _pairs(data) -> np.ndarray:
    if isinstance(data, PrivatizedBatch):
        data = data.messages
    pairs = np.asarray(data, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise AlphabetError('expected an (n, 2) array of report pairs')
    return pairs


def pair_transform_samples(data, n1: int) -> tuple[np.ndarray, np.ndarray]:
    """
    (product samples, test samples). Product sample i pairs Z1 of user 2i
    with Z2 of user 2i + 1, which is a draw from the product of the two
    output marginals because the users are independent; the users after
    the first 2 n1 keep their own pair.
    """
    pairs = _pairs(data)
    if pairs.shape[0] < 2 * n1 + 1:
        raise ConfigError(f'{pairs.shape[0]} users cannot feed 2 * {n1} learning and 1 test sample')
    product = np.stack((pairs[0:2 * n1:2, 0], pairs[1:2 * n1:2, 1]), axis=1)
    return product, pairs[2 * n1:]


def add1_estimate(counts, n: int | None = None) -> Distribution:
    """
    Laplace estimator (count + 1) / (n + K).

    >>> add1_estimate([3, 1, 0]).pmf.round(6).tolist()
    [0.571429, 0.285714, 0.142857]
    """
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if n is not None and n != total:
        raise DistributionError(f'counts sum to {total}, not n={n}')
    return Distribution((counts + 1) / (total + counts.size))


def _floored(q: Distribution, floor: float) -> tuple[Distribution, bool]:
    if q.pmf.min() >= floor:
        return q, False
    raised = np.maximum(q.pmf, floor)
    return Distribution(raised / raised.sum()), True


def learning_target(k: int, budget: PrivacyBudget, gamma: float) -> float:
    """alpha_H^4 gamma^2 / k^2, with alpha_H at the per-coordinate budget eps/2"""
    return budget.split(2).alpha_h ** 4 * gamma ** 2 / k ** 2


def learning_samples(k: int, budget: PrivacyBudget, gamma: float, learn_constant: float) -> int:
    """n1 = C_L k^3 / (alpha_H^4 gamma^2) product samples"""
    return math.ceil(learn_constant * k / learning_target(k, budget, gamma))


def learn_product(product_samples, budget: PrivacyBudget, gamma: float, k: int,
                  marginal_floor: float = 0.2) -> LearnedProduct:
    """
    Add-1 estimate of each coordinate's marginal of T(p1 x p2), aiming at
    chi^2 <= learning_target / 3 per marginal, floored at marginal_floor / K
    and renormalized.
    """
    K = hadamard_code(k).K
    samples = as_symbols(_pairs(product_samples), K).reshape(-1, 2)
    floor = marginal_floor / K
    q1, low1 = _floored(add1_estimate(np.bincount(samples[:, 0], minlength=K)), floor)
    q2, low2 = _floored(add1_estimate(np.bincount(samples[:, 1], minlength=K)), floor)
    learned = LearnedProduct(q1, q2, floored=low1 or low2,
                             target=learning_target(k, budget, gamma))
    if learned.min_mass() < 1 / (50 * K * K):
        raise ContractViolation(f'learned product minimum {learned.min_mass()} < 1/(50K^2)')
    if learned.floored:
        logger.debug('learned marginals hit the floor %s', floor)
    return learned


def adk_chi2_test(test_samples, learned: LearnedProduct, gamma_prime_sq: float,
                  rng: np.random.Generator | None, poisson_fraction: float = 0.9) -> Verdict:
    """
    S = sum_z [(N_z - m q(z))^2 - N_z] / (m q(z)) on a Poissonized sample of
    mean size m; E[S] = m chi^2(p, q). far iff S > (3/4) m gamma'^2.
    """
    K = learned.K
    if learned.min_mass() < 1 / (50 * K * K):
        raise ContractViolation('chi-square test needs min q >= 1/(50K^2)')
    pairs = as_symbols(_pairs(test_samples), K).reshape(-1, 2)
    if not pairs.shape[0]:
        raise DistributionError('chi-square test needs at least one sample')

    m = max(1, int(poisson_fraction * pairs.shape[0]))
    pairs = pairs[:poissonized_size(pairs.shape[0], m, rng)]
    counts = np.bincount(pairs[:, 0] * K + pairs[:, 1], minlength=K * K)
    expected = m * learned.joint().pmf.reshape(-1)
    statistic = float((((counts - expected) ** 2 - counts) / expected).sum())
    threshold = 0.75 * m * gamma_prime_sq
    return Verdict(
        test=TestKind.ChiSquare,
        decision=Decision.Far if statistic > threshold else Decision.Close,
        statistic=statistic,
        threshold=threshold,
        n=m,
        k=K,
    )


def hr_independence_test(batch: PrivatizedBatch, budget: PrivacyBudget, gamma: float,
                         rng: np.random.Generator | None, n1: int | None = None,
                         learn_constant: float | None = None, learn_fraction: float = 0.25,
                         marginal_floor: float = 0.2, poisson_fraction: float = 0.9) -> Verdict:
    """
    Private-coin independence test on HR pair reports. alpha_H is taken at
    the per-coordinate budget eps/2; the learning target is
    alpha_H^4 gamma^2 / k^2 and the chi-square gap 2 alpha_H^4 gamma^2 / k^2.

    Without an explicit n1 the learning half gets learning_samples(C_L)
    product samples when learn_constant is given, never more than
    learn_fraction * n.
    """
    batch.expect(MechanismKind.HRPair)
    k = batch.k
    if n1 is None:
        n1 = int(learn_fraction * batch.n)
        if learn_constant is not None:
            wanted = learning_samples(k, budget, gamma, learn_constant)
            if wanted > n1:
                logger.debug('learning wants n1=%s, capped at %s of n=%s', wanted, n1, batch.n)
            n1 = min(n1, wanted)
    product, held_out = pair_transform_samples(batch, n1)
    learned = learn_product(product, budget, gamma, k, marginal_floor)

    gamma_prime_sq = 2 * learning_target(k, budget, gamma)
    chi2 = adk_chi2_test(held_out, learned, gamma_prime_sq, rng, poisson_fraction)
    return Verdict(
        test=TestKind.HadamardIndependence,
        decision=Decision.NotIndependent if chi2.decision == Decision.Far else Decision.Independent,
        statistic=chi2.statistic,
        threshold=chi2.threshold,
        n=batch.n,
        k=k,
        epsilon=budget.epsilon,
        gamma=gamma,
    )


def binary_independence_estimate(batch: PrivatizedBatch,
                                 budget: PrivacyBudget) -> tuple[float, float, float]:
    """(p(S1 x S2), p1(S1), p2(S2)) estimated at eps/3 from every user's three bits"""
    batch.expect(MechanismKind.RAPTOR2)
    third = budget.split(3)
    bits = batch.messages
    return (
        bias_estimate(bits[:, 2], third),
        bias_estimate(bits[:, 0], third),
        bias_estimate(bits[:, 1], third),
    )


def binary_independence_test(batch: PrivatizedBatch, budget: PrivacyBudget,
                             gamma: float) -> Verdict:
    """
    Independence over {0, 1}^2 with coins S1 = S2 = {1}: not_independent iff
    |p~(1,1) - p~1(1) p~2(1)| > gamma/4.
    """
    batch.expect(MechanismKind.RAPTOR2)
    if batch.k != 2 or batch.coin.to_json() != [[1], [1]]:
        raise AlphabetError('binary independence needs k = 2 and coins S1 = S2 = {1}')
    joint, first, second = binary_independence_estimate(batch, budget)
    statistic = abs(joint - first * second)
    threshold = gamma / 4
    return Verdict(
        test=TestKind.BinaryIndependence,
        decision=Decision.NotIndependent if statistic > threshold else Decision.Independent,
        statistic=statistic,
        threshold=threshold,
        n=batch.n,
        k=2,
        epsilon=budget.epsilon,
        gamma=gamma,
    )


def raptor_independence_test(pairs, k: int, budget: PrivacyBudget, gamma: float,
                             rng: np.random.Generator, threshold: float = 0.5,
                             dependent_fraction: float = 0.05,
                             repetitions: int = 64) -> Verdict:
    """
    T repetitions on disjoint mini-batches, each with fresh coins (S1, S2).
    A repetition is flagged when |p~ - p~1 p~2| > threshold * gamma / k;
    not_independent iff the flagged fraction exceeds dependent_fraction.
    """
    pairs = as_symbols(_pairs(pairs), k).reshape(-1, 2)
    n = pairs.shape[0]
    if repetitions < 1:
        raise ConfigError('repetitions must be at least 1')
    if n % repetitions:
        raise ConfigError(f'sample count {n} is not divisible by {repetitions} repetitions')
    if not n:
        raise DistributionError('independence test needs at least one sample')

    cutoff = threshold * gamma / k
    flagged = 0
    for t, chunk in enumerate(np.split(pairs, repetitions)):
        coin = PublicCoin.draw(k, rng, count=2)
        batch = PrivatizedBatch(
            MechanismKind.RAPTOR2, k, budget.epsilon,
            raptor2_encode_batch(chunk, coin, budget, rng), coin,
        )
        joint, first, second = binary_independence_estimate(batch, budget)
        gap = abs(joint - first * second)
        logger.debug('repetition %s: |p~ - p~1 p~2| = %.5f, cutoff %.5f', t, gap, cutoff)
        flagged += gap > cutoff

    fraction = flagged / repetitions
    return Verdict(
        test=TestKind.RaptorIndependence,
        decision=Decision.NotIndependent if fraction > dependent_fraction else Decision.Independent,
        statistic=fraction,
        threshold=dependent_fraction,
        n=n,
        k=k,
        epsilon=budget.epsilon,
        gamma=gamma,
    )


__all__ = (
    'LearnedProduct',
    'adk_chi2_test',
    'add1_estimate',
    'binary_independence_estimate',
    'binary_independence_test',
    'hr_independence_test',
    'learn_product',
    'learning_samples',
    'learning_target',
    'pair_transform_samples',
    'raptor_independence_test',
)
