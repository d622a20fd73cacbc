"""
Exact (and, past the enumeration cutoffs, Monte-Carlo) laws of the
perturbations Z = sum_i delta_i X_i and Z = sum_ij delta_ij X_i Y_j when X and
Y are indicator vectors of uniformly random half-size subsets of [k].
"""
from itertools import combinations
import logging
import math

import numpy as np
from scipy.special import comb

from ..distributions import Distribution, tv_distance, uniform
from ..exceptions import AlphabetError, ConfigError, DistributionError
from ..settings import (
    LTCache,
    MAX_PAIR_ENUMERATION_K,
    MAX_SUBSET_ENUMERATION_K,
    MONTE_CARLO_CHUNK,
    MONTE_CARLO_DRAWS,
    SUBSET_COROLLARY_CONSTANT,
)
from .reports import ClaimResult, MomentReport

logger = logging.getLogger(__name__)

EXACT_TOLERANCE = 1e-10
# Monte-Carlo moment checks allow this many standard errors
MONTE_CARLO_SIGMAS = 5


def half_subsets(k: int) -> np.ndarray:
    """All C(k, k/2) half-size subsets of [k] as a boolean mask, lexicographic order"""
    if k < 2 or k % 2:
        raise AlphabetError('alphabet must be even')
    cache = LTCache['subsets']
    if (mask := cache.get(k)) is None:
        total = int(comb(k, k // 2, exact=True))
        logger.debug('enumerating %s half-size subsets of [%s]', total, k)
        mask = np.zeros((total, k), dtype=bool)
        for row, members in enumerate(combinations(range(k), k // 2)):
            mask[row, list(members)] = True
        mask.setflags(write=False)
        cache[k] = mask
    return mask


def random_half_subsets(k: int, draws: int, rng: np.random.Generator) -> np.ndarray:
    """draws independent uniform half-size subsets as a boolean mask"""
    mask = np.zeros((draws, k), dtype=bool)
    rows = np.arange(draws)[:, None]
    for start in range(0, draws, MONTE_CARLO_CHUNK):
        stop = min(start + MONTE_CARLO_CHUNK, draws)
        chosen = rng.random((stop - start, k)).argsort(axis=1)[:, :k // 2]
        mask[rows[start:stop], chosen] = True
    return mask


def subset_moments(k: int) -> tuple[float, float, float]:
    """
    (E[X1^2], E[X1 X2], E[X1^4]) for the indicator of a uniform half-size subset.

    >>> subset_moments(4)
    (0.5, 0.16666666666666666, 0.5)
    """
    if k < 2 or k % 2:
        raise AlphabetError('alphabet must be even')
    return 0.5, (k - 2) / (4 * (k - 1)), 0.5


def _zero_sum(values: np.ndarray, axis=None) -> bool:
    return bool(np.all(np.abs(values.sum(axis=axis)) <= 1e-9))


def _need_stream(rng: np.random.Generator | None, what: str) -> np.random.Generator:
    if rng is None:
        raise ConfigError(f'{what} beyond the enumeration cutoff needs a random stream')
    return rng


def _subset_sums(delta: np.ndarray, rng: np.random.Generator | None) -> tuple[np.ndarray, bool]:
    k = delta.size
    if k <= MAX_SUBSET_ENUMERATION_K:
        return half_subsets(k).astype(np.float64) @ delta, True
    logger.debug('k=%s beyond enumeration cutoff, drawing %s subsets', k, MONTE_CARLO_DRAWS)
    rng = _need_stream(rng, 'subset moments')
    return random_half_subsets(k, MONTE_CARLO_DRAWS, rng).astype(np.float64) @ delta, False


def _pair_sums(delta: np.ndarray, rng: np.random.Generator | None) -> tuple[np.ndarray, bool]:
    k = delta.shape[0]
    if k <= MAX_PAIR_ENUMERATION_K:
        subsets = half_subsets(k).astype(np.float64)
        return (subsets @ delta @ subsets.T).reshape(-1), True
    logger.debug('k=%s beyond pair enumeration cutoff, drawing %s pairs', k, MONTE_CARLO_DRAWS)
    rng = _need_stream(rng, 'subset-pair moments')
    z = np.empty(MONTE_CARLO_DRAWS)
    for start in range(0, MONTE_CARLO_DRAWS, MONTE_CARLO_CHUNK):
        stop = min(start + MONTE_CARLO_CHUNK, MONTE_CARLO_DRAWS)
        x = random_half_subsets(k, stop - start, rng).astype(np.float64)
        y = random_half_subsets(k, stop - start, rng).astype(np.float64)
        z[start:stop] = np.einsum('ni,ij,nj->n', x, delta, y)
    return z, False


def _second_moment_claim(name: str, z: np.ndarray, predicted: float, exact: bool) -> ClaimResult:
    observed = float(np.mean(z * z))
    if exact:
        return ClaimResult.close(name, observed, predicted, EXACT_TOLERANCE)
    spread = float(np.std(z * z)) / math.sqrt(z.size)
    return ClaimResult(
        name, abs(observed - predicted) <= MONTE_CARLO_SIGMAS * spread + 1e-12,
        observed, predicted, detail=f'{z.size} draws, standard error {spread:.3g}',
    )


def _exceedance(z: np.ndarray, thresholds) -> dict[float, float]:
    return {float(t): float(np.mean(np.abs(z) > t)) for t in thresholds}


def subset_Z_moments(delta, rng: np.random.Generator | None = None,
                     alpha: float = SUBSET_COROLLARY_CONSTANT, thresholds=()) -> MomentReport:
    """
    Law of Z = sum_i delta_i X_i over the half-size subsets of [k], checked
    against E[Z^2] = (E[X1^2] - E[X1 X2]) ||delta||^2,
    E[Z^4] <= 19 E[X1^4] ||delta||^4, and the Paley-Zygmund lower tail
    P(Z^2 / ||delta||^2 >= lower) >= alpha for alpha in (0, 1/4). The mass of
    the two-sided bracket [lower, upper] is reported but not asserted: at
    k = 4, delta = (1, -1, -1, 1) / 8 puts Z^2 / ||delta||^2 in {0, 1} only.
    """
    delta = np.asarray(delta, dtype=np.float64).reshape(-1)
    if not _zero_sum(delta):
        raise DistributionError('delta must sum to zero')
    if not 0 < alpha < 0.25:
        raise ConfigError(f'alpha must lie in (0, 1/4), got {alpha}')
    k = delta.size
    m11, m12, m1111 = subset_moments(k)
    z, exact = _subset_sums(delta, rng)

    norm_sq = float(delta @ delta)
    second = float(np.mean(z ** 2))
    fourth = float(np.mean(z ** 4))
    lower = (m11 - m12) - math.sqrt(38 * alpha * m1111 / (1 - 2 * alpha))
    upper = (m11 - m12) / (1 - 2 * alpha)
    squared = z * z
    above = float(np.mean(squared >= lower * norm_sq))
    inside = float(np.mean((lower * norm_sq <= squared) & (squared <= upper * norm_sq)))

    predictions = {
        'second_moment': (m11 - m12) * norm_sq,
        'fourth_moment_bound': 19 * m1111 * norm_sq ** 2,
        'lower': lower,
        'upper': upper,
        'bracket_mass': inside,
    }
    claims = [
        _second_moment_claim('second moment', z, predictions['second_moment'], exact),
        ClaimResult.at_most('fourth moment bound', fourth, predictions['fourth_moment_bound']),
        ClaimResult.at_least('lower tail', above, alpha),
        ClaimResult.at_least('fourth moment dominates squared second', fourth, second ** 2),
    ]
    return MomentReport(
        second, fourth, _exceedance(z, thresholds), predictions, claims,
        exact=exact, draws=None if exact else z.size,
    )


def corollary_exceedance(p: Distribution, gamma: float | None = None,
                         rng: np.random.Generator | None = None) -> float:
    """
    P(|p(S) - 1/2| > gamma / sqrt(5k)) over uniform half-size subsets S;
    gamma defaults to TV(p, u).
    """
    if gamma is None:
        gamma = tv_distance(p, uniform(p.k))
    z, _ = _subset_sums(p.pmf - 1 / p.k, rng)
    return float(np.mean(np.abs(z) > gamma / math.sqrt(5 * p.k)))


def _check_joint_delta(delta) -> np.ndarray:
    delta = np.asarray(delta, dtype=np.float64)
    if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
        raise AlphabetError('delta must be a square matrix')
    if not (_zero_sum(delta, axis=0) and _zero_sum(delta, axis=1)):
        raise DistributionError('every row and column of delta must sum to zero')
    return delta


def joint_Z_moments(delta, rng: np.random.Generator | None = None, thresholds=()) -> MomentReport:
    """
    Law of Z = sum_ij delta_ij X_i Y_j for independent half-size subsets,
    checked against E[Z^2] = (1/4) E[(X1 - X2)^2]^2 ||delta||_F^2 and the
    bracket ||delta||_F^2 / 16 <= E[Z^2] <= ||delta||_F^2 / 4.
    """
    delta = _check_joint_delta(delta)
    m11, m12, _ = subset_moments(delta.shape[0])
    z, exact = _pair_sums(delta, rng)

    norm_sq = float((delta ** 2).sum())
    spread = 2 * (m11 - m12)
    second = float(np.mean(z ** 2))
    predictions = {
        'second_moment': spread * spread / 4 * norm_sq,
        'bracket_low': norm_sq / 16,
        'bracket_high': norm_sq / 4,
    }
    claims = [
        _second_moment_claim('second moment', z, predictions['second_moment'], exact),
        ClaimResult.at_least('bracket low', second, predictions['bracket_low']),
        ClaimResult.at_most('bracket high', second, predictions['bracket_high']),
    ]
    return MomentReport(
        second, float(np.mean(z ** 4)), _exceedance(z, thresholds), predictions, claims,
        exact=exact, draws=None if exact else z.size,
    )


def subset_pair_exceedance(delta, gamma: float, rng: np.random.Generator | None = None,
                           quantiles=(0.25, 0.5, 0.75)) -> dict:
    """
    Distribution of k |Z| / gamma over subset pairs: its atoms with their
    probabilities (exact up to the enumeration cutoff, empirical beyond)
    and the requested quantiles.
    """
    delta = _check_joint_delta(delta)
    k = delta.shape[0]
    z, exact = _pair_sums(delta, rng)
    scaled = np.round(k * np.abs(z) / gamma, 10)
    values, counts = np.unique(scaled, return_counts=True)
    return {
        'k': k,
        'gamma': gamma,
        'exact': exact,
        'values': values.tolist(),
        'probabilities': (counts / scaled.size).tolist(),
        'quantiles': {q: float(np.quantile(scaled, q, method='inverted_cdf')) for q in quantiles},
    }


def level_with_mass(table: dict, mass: float) -> float:
    """Largest atom v of a subset_pair_exceedance table with P(k|Z|/gamma >= v) >= mass"""
    tail = np.cumsum(table['probabilities'][::-1])[::-1]
    eligible = [v for v, t in zip(table['values'], tail) if t >= mass]
    return float(max(eligible)) if eligible else 0.0


__all__ = (
    'corollary_exceedance',
    'half_subsets',
    'joint_Z_moments',
    'level_with_mass',
    'random_half_subsets',
    'subset_Z_moments',
    'subset_moments',
    'subset_pair_exceedance',
)
