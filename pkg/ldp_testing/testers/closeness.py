import logging

import numpy as np

from ..enums import Decision, TestKind
from ..exceptions import ConfigError, DistributionError
from ..utils import as_symbols
from .verdict import Verdict

logger = logging.getLogger(__name__)


def poissonized_size(available: int, m: int, rng: np.random.Generator | None) -> int:
    """Poisson(m) draws, clipped to what is available; exactly m without a stream"""
    if rng is None:
        return min(m, available)
    return min(int(rng.poisson(m)), available)


def collision_difference(counts_a: np.ndarray, counts_b: np.ndarray) -> float:
    """
    sum_i (N_i - M_i)^2 - N_i - M_i; with Poissonized counts its mean is
    m^2 ||p_a - p_b||^2.
    """
    diff = counts_a - counts_b
    return float((diff * diff - counts_a - counts_b).sum())


def l2_closeness_test(samples_a, samples_b, gamma_l2: float, rng: np.random.Generator | None,
                      size: int | None = None, poisson_fraction: float = 0.9,
                      poissonize: bool = True) -> Verdict:
    """
    Two-sample l2 closeness over [size].

    m = floor(poisson_fraction * min(len_a, len_b)); each side keeps its
    first Poisson(m) samples (exactly m when poissonize is False), and the
    samples are declared close iff the collision-difference statistic is
    below m^2 gamma_l2^2 / 2.
    """
    a = as_symbols(samples_a)
    b = as_symbols(samples_b)
    if not a.size or not b.size:
        raise DistributionError('closeness test needs samples on both sides')
    if gamma_l2 <= 0:
        raise ConfigError(f'gamma_l2 must be positive, got {gamma_l2}')
    if size is None:
        size = int(max(a.max(), b.max())) + 1
    a = as_symbols(a, size)
    b = as_symbols(b, size)

    m = max(1, int(poisson_fraction * min(a.size, b.size)))
    stream = rng if poissonize else None
    a = a[:poissonized_size(a.size, m, stream)]
    b = b[:poissonized_size(b.size, m, stream)]

    statistic = collision_difference(
        np.bincount(a, minlength=size),
        np.bincount(b, minlength=size),
    )
    threshold = m * m * gamma_l2 * gamma_l2 / 2
    logger.debug('l2 closeness: m=%s Z=%s threshold=%s', m, statistic, threshold)
    return Verdict(
        test=TestKind.L2Closeness,
        decision=Decision.Close if statistic < threshold else Decision.Far,
        statistic=statistic,
        threshold=threshold,
        n=m,
        k=size,
        gamma=gamma_l2,
    )


__all__ = (
    'collision_difference',
    'l2_closeness_test',
    'poissonized_size',
)
