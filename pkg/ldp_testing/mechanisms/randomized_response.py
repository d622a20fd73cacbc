import numpy as np

from ..enums import MechanismKind
from ..exceptions import AlphabetError
from ..utils import as_symbols
from .base import ChannelMatrix, PrivacyBudget, register_encoder


def rr_bits(truth, budget: PrivacyBudget, rng: np.random.Generator) -> np.ndarray:
    """Binary randomized response: each bit is flipped with probability 1/(e^eps + 1)"""
    truth = np.asarray(truth, dtype=np.int64)
    flips = rng.random(truth.shape) < budget.flip_probability
    return truth ^ flips


def rr_encode_batch(symbols, k: int, budget: PrivacyBudget, rng: np.random.Generator) -> np.ndarray:
    """
    k-ary randomized response: keep each symbol with probability
    e^eps / (e^eps + k - 1), otherwise report one of the other k - 1
    symbols uniformly.
    """
    if k < 1:
        raise AlphabetError('alphabet must be non-empty')
    symbols = as_symbols(symbols, k)
    keep = rng.random(symbols.size) < budget.keep_probability(k)
    if k == 1:
        return symbols
    other = (symbols + 1 + rng.integers(0, k - 1, size=symbols.size)) % k
    return np.where(keep, symbols, other)


def rr_encode(k: int, budget: PrivacyBudget, x: int, rng: np.random.Generator) -> int:
    return int(rr_encode_batch([x], k, budget, rng)[0])


def rr_channel(k: int, budget: PrivacyBudget) -> ChannelMatrix:
    keep = budget.keep_probability(k)
    other = (1 - keep) / (k - 1) if k > 1 else 0.0
    matrix = np.full((k, k), other)
    np.fill_diagonal(matrix, keep)
    return ChannelMatrix(matrix, MechanismKind.RR, budget.epsilon)


@register_encoder(MechanismKind.RR)
def _privatize_rr(samples, k, budget, rng, coin):
    return rr_encode_batch(samples, k, budget, rng), None


__all__ = (
    'rr_bits',
    'rr_channel',
    'rr_encode',
    'rr_encode_batch',
)
