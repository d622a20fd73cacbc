"""
Exact discrete distributions over [k] and [k]x[k], the distances used by the
testers, alias-table sampling, and the hard instances (Paninski perturbations)
that the experiments run against.
"""
import json
import logging
from pathlib import Path
from typing import Iterable, Self

import numpy as np

from .exceptions import AlphabetError, ConfigError, DistributionError
from .lazy_regex import LazyPattern
from .settings import SUM_TOLERANCE
from .utils import as_symbols

logger = logging.getLogger(__name__)

# one symbol, or a pair separated by a comma and/or whitespace
SAMPLE_LINE = LazyPattern(r'^\s*(\d+)\s*(?:[,\s]\s*(\d+))?\s*$')


def _frozen_pmf(pmf, ndim: int) -> np.ndarray:
    values = np.array(pmf, dtype=np.float64)
    if values.ndim != ndim:
        raise DistributionError(f'pmf must be {ndim}-dimensional, got shape {values.shape}')
    if values.size == 0:
        raise AlphabetError('alphabet must be non-empty')
    if ndim == 2 and values.shape[0] != values.shape[1]:
        raise AlphabetError(f'joint pmf must be square, got shape {values.shape}')
    if not np.isfinite(values).all():
        raise DistributionError('probabilities must be finite')
    if (values < 0).any():
        raise DistributionError('probabilities must be non-negative')
    total = values.sum()
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise DistributionError(f'probabilities sum to {total!r}, not 1')
    values.setflags(write=False)
    return values


def _alias_table(pmf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Vose's alias method: column i keeps its own symbol with probability
    accept[i] and otherwise yields alias[i].
    """
    k = pmf.size
    scaled = pmf * k
    accept = np.ones(k)
    alias = np.arange(k)
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        low, high = small.pop(), large.pop()
        accept[low] = scaled[low]
        alias[low] = high
        scaled[high] -= 1.0 - scaled[low]
        (small if scaled[high] < 1.0 else large).append(high)
    # leftovers are 1 up to rounding
    for i in small + large:
        accept[i] = 1.0
    return accept, alias


class Distribution:
    """
    Probability mass function over [k]. The pmf array is read-only; the
    alias table is built on the first call to sample().
    """

    __slots__ = ('pmf', 'k', '_alias')

    def __init__(self, pmf: Iterable[float] | np.ndarray) -> None:
        self.pmf = _frozen_pmf(pmf, ndim=1)
        self.k = self.pmf.size
        self._alias: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def from_samples(cls, symbols, k: int) -> Self:
        """Empirical distribution of a non-empty symbol sequence"""
        symbols = as_symbols(symbols, k)
        if not symbols.size:
            raise DistributionError('empirical distribution needs at least one sample')
        return cls(np.bincount(symbols, minlength=k) / symbols.size)

    @classmethod
    def from_json(cls, data: str | list) -> Self:
        return cls(json.loads(data) if isinstance(data, str) else data)

    def to_json(self) -> list[float]:
        return self.pmf.tolist()

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. symbols drawn through the alias table"""
        if n < 0:
            raise ValueError('sample size must be non-negative')
        if self._alias is None:
            self._alias = _alias_table(self.pmf)
        accept, alias = self._alias
        columns = rng.integers(0, self.k, size=n)
        keep = rng.random(n) < accept[columns]
        return np.where(keep, columns, alias[columns])

    def allclose(self, other: 'Distribution', atol: float = 1e-12) -> bool:
        return self.k == other.k and bool(np.allclose(self.pmf, other.pmf, rtol=0, atol=atol))

    def __len__(self) -> int:
        return self.k

    def __repr__(self) -> str:
        return f'Distribution(k={self.k}, pmf={np.array2string(self.pmf, precision=4)})'


class JointDistribution:
    """Probability mass function over [k]x[k], rows indexed by the first coordinate"""

    __slots__ = ('pmf', 'k', '_flat')

    def __init__(self, pmf) -> None:
        self.pmf = _frozen_pmf(pmf, ndim=2)
        self.k = self.pmf.shape[0]
        self._flat: Distribution | None = None

    @classmethod
    def from_json(cls, data: str | list) -> Self:
        """Row-major nested list, or a JSON string holding one"""
        return cls(json.loads(data) if isinstance(data, str) else data)

    def to_json(self) -> list[list[float]]:
        return self.pmf.tolist()

    def flat(self) -> Distribution:
        """The same law viewed as a distribution over k*k symbols, row-major"""
        if self._flat is None:
            self._flat = Distribution(self.pmf.reshape(-1))
        return self._flat

    def marginals(self) -> tuple[Distribution, Distribution]:
        return Distribution(self.pmf.sum(axis=1)), Distribution(self.pmf.sum(axis=0))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """(n, 2) array of symbol pairs"""
        first, second = np.divmod(self.flat().sample(n, rng), self.k)
        return np.stack((first, second), axis=1)

    def allclose(self, other: 'JointDistribution', atol: float = 1e-12) -> bool:
        return self.k == other.k and bool(np.allclose(self.pmf, other.pmf, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return f'JointDistribution(k={self.k})'


# ------------------------------------------------------------------
# Constructors
# ------------------------------------------------------------------
def _check_gamma(gamma: float) -> None:
    if not 0.0 <= gamma <= 0.5:
        raise DistributionError(f'gamma must lie in [0, 1/2], got {gamma}')


def _check_even(k: int) -> None:
    if k < 2 or k % 2:
        raise AlphabetError('alphabet must be even')


def uniform(k: int) -> Distribution:
    """
    >>> uniform(4).pmf.tolist()
    [0.25, 0.25, 0.25, 0.25]
    """
    if k < 1:
        raise AlphabetError('alphabet must be non-empty')
    return Distribution(np.full(k, 1.0 / k))


def uniform_joint(k: int) -> JointDistribution:
    if k < 1:
        raise AlphabetError('alphabet must be non-empty')
    return JointDistribution(np.full((k, k), 1.0 / (k * k)))


def random_theta(k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sign vector of length k/2"""
    _check_even(k)
    return rng.choice(np.array([-1, 1]), size=k // 2)


def paninski(k: int, gamma: float, theta) -> Distribution:
    """
    Pairwise +-2*gamma/k perturbation of uniform: symbols (2i, 2i+1) get
    (1 + 2 theta_i gamma)/k and (1 - 2 theta_i gamma)/k. Exactly gamma-far
    from uniform in total variation.

    >>> paninski(4, 0.25, (1, -1)).pmf.tolist()
    [0.375, 0.125, 0.125, 0.375]
    """
    _check_even(k)
    _check_gamma(gamma)
    signs = np.asarray(theta, dtype=np.int64).reshape(-1)
    if signs.size != k // 2 or not np.isin(signs, (-1, 1)).all():
        raise DistributionError(f'theta must be {k // 2} signs in {{-1, +1}}')
    pmf = np.empty(k)
    pmf[0::2] = (1 + 2 * signs * gamma) / k
    pmf[1::2] = (1 - 2 * signs * gamma) / k
    return Distribution(pmf)


def product(p1: Distribution, p2: Distribution) -> JointDistribution:
    if p1.k != p2.k:
        raise AlphabetError(f'marginals live on different alphabets: {p1.k} != {p2.k}')
    return JointDistribution(np.outer(p1.pmf, p2.pmf))


product_joint = product


def marginals(joint: JointDistribution) -> tuple[Distribution, Distribution]:
    return joint.marginals()


def balanced_paninski_joint(k: int, gamma: float) -> JointDistribution:
    """
    Perturbation of the uniform joint with both marginals exactly uniform
    and total variation gamma to its own product of marginals.

    Columns are paired (2j, 2j+1); rows in the first half get sign +1 and
    the rest -1, so p(i, 2j) = (1 + 2 s_i gamma)/k^2 and
    p(i, 2j+1) = (1 - 2 s_i gamma)/k^2.
    """
    _check_even(k)
    _check_gamma(gamma)
    row_signs = np.where(np.arange(k) < k // 2, 1.0, -1.0)
    column_signs = np.where(np.arange(k) % 2 == 0, 1.0, -1.0)
    pmf = (1 + 2 * gamma * np.outer(row_signs, column_signs)) / (k * k)
    return JointDistribution(pmf)


# ------------------------------------------------------------------
# Distances
# ------------------------------------------------------------------
def _paired(p, q) -> tuple[np.ndarray, np.ndarray]:
    if p.pmf.shape != q.pmf.shape:
        raise AlphabetError(f'alphabet mismatch: {p.pmf.shape} != {q.pmf.shape}')
    return p.pmf, q.pmf


def tv_distance(p, q) -> float:
    """
    Total variation distance, half the l1 distance.

    >>> tv_distance(Distribution([1, 0]), Distribution([0, 1]))
    1.0
    """
    a, b = _paired(p, q)
    return float(0.5 * np.abs(a - b).sum())


def l2_distance_sq(p, q) -> float:
    a, b = _paired(p, q)
    return float(((a - b) ** 2).sum())


def chi_square_div(p, q) -> float:
    """sum (p - q)^2 / q; q must be strictly positive"""
    a, b = _paired(p, q)
    if (b <= 0).any():
        raise DistributionError('chi-square divergence needs a strictly positive reference')
    return float(((a - b) ** 2 / b).sum())


def tv_to_own_product(joint: JointDistribution) -> float:
    p1, p2 = joint.marginals()
    return tv_distance(joint, product(p1, p2))


def sample(p: Distribution | JointDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    return p.sample(n, rng)


# ------------------------------------------------------------------
# Sample files
# ------------------------------------------------------------------
def read_samples(path: str | Path) -> np.ndarray:
    """
    Newline-delimited 0-indexed symbols, or symbol pairs separated by a
    comma or whitespace. Blank lines and lines starting with '#' are skipped.
    Returns an (n,) array for symbols and an (n, 2) array for pairs.
    """
    rows = []
    with open(path, 'r', encoding='utf-8') as sf:
        for number, line in enumerate(sf, start=1):
            if not line.strip() or line.lstrip().startswith('#'):
                continue
            if not (matched := SAMPLE_LINE.match(line)):
                raise ConfigError(f'{path}:{number}: not a symbol or symbol pair: {line.strip()!r}')
            rows.append(tuple(int(g) for g in matched.groups() if g is not None))

    widths = {len(row) for row in rows}
    if len(widths) > 1:
        raise ConfigError(f'{path}: mixes single symbols and symbol pairs')
    if not rows:
        return np.zeros(0, dtype=np.int64)
    samples = np.array(rows, dtype=np.int64)
    logger.debug('read %s samples from %s', len(rows), path)
    return samples[:, 0] if widths == {1} else samples


def write_samples(path: str | Path, samples) -> None:
    samples = np.asarray(samples, dtype=np.int64)
    with open(path, 'w', encoding='utf-8') as sf:
        if samples.ndim == 1:
            sf.writelines(f'{s}\n' for s in samples.tolist())
        else:
            sf.writelines(f'{a} {b}\n' for a, b in samples.tolist())
    logger.debug('wrote %s samples to %s', samples.shape[0], path)


__all__ = (
    'Distribution',
    'JointDistribution',
    'balanced_paninski_joint',
    'chi_square_div',
    'l2_distance_sq',
    'marginals',
    'paninski',
    'product',
    'product_joint',
    'random_theta',
    'read_samples',
    'sample',
    'tv_distance',
    'tv_to_own_product',
    'uniform',
    'uniform_joint',
    'write_samples',
)
