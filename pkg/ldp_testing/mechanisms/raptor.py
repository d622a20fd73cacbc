"""
RAPTOR: a public-coin mechanism where every user answers a single question,
"is my symbol in the shared half-size subset S?", through binary randomized
response. The bivariate form answers three such questions at eps/3 each.
"""
import numpy as np

from ..enums import MechanismKind
from ..exceptions import AlphabetError
from ..utils import as_symbols
from .base import ChannelMatrix, PrivacyBudget, PublicCoin, register_encoder
from .randomized_response import rr_bits

# bivariate truth classes (1{x1 in S1}, 1{x2 in S2}), in channel row order
TRUTH_CLASSES = ((0, 0), (0, 1), (1, 0), (1, 1))


def _check_coin(coin: PublicCoin, k: int, count: int = 1) -> None:
    if coin.k != k:
        raise AlphabetError(f'coin alphabet {coin.k} != alphabet {k}')
    if coin.count < count:
        raise AlphabetError(f'coin holds {coin.count} subsets, {count} needed')


def raptor_encode_batch(symbols, coin: PublicCoin, budget: PrivacyBudget,
                        rng: np.random.Generator, index: int = 0) -> np.ndarray:
    """RR_eps(1{x in S_index}) for every user"""
    symbols = as_symbols(symbols, coin.k)
    return rr_bits(coin.contains(symbols, index), budget, rng)


def raptor_encode(x: int, coin: PublicCoin, budget: PrivacyBudget,
                  rng: np.random.Generator) -> int:
    return int(raptor_encode_batch([x], coin, budget, rng)[0])


def raptor_encode_parallel(symbols, coin: PublicCoin, budget: PrivacyBudget,
                           rng: np.random.Generator) -> np.ndarray:
    """Every user answers all coin.count subsets at eps / count each: an (n, T) report"""
    symbols = as_symbols(symbols, coin.k)
    share = budget.split(coin.count)
    truth = coin.mask[:, symbols].T
    return rr_bits(truth, share, rng)


def raptor2_encode_batch(pairs, coin: PublicCoin, budget: PrivacyBudget,
                         rng: np.random.Generator) -> np.ndarray:
    """
    Bits 1{x1 in S1}, 1{x2 in S2} and 1{(x1, x2) in S1 x S2}, each through
    randomized response at eps/3. Returns an (n, 3) report.
    """
    _check_coin(coin, coin.k, count=2)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    as_symbols(pairs, coin.k)
    first = coin.contains(pairs[:, 0], 0)
    second = coin.contains(pairs[:, 1], 1)
    truth = np.stack((first, second, first & second), axis=1)
    return rr_bits(truth, budget.split(3), rng)


def raptor2_encode(pair, coins: PublicCoin, budget: PrivacyBudget,
                   rng: np.random.Generator) -> np.ndarray:
    return raptor2_encode_batch([pair], coins, budget, rng)[0]


def raptor_channel(k: int, budget: PrivacyBudget, coin: PublicCoin | None = None) -> ChannelMatrix:
    """
    k x 2 channel for one coin; without a coin the subset is the first k/2
    symbols, which gives the same channel up to relabeling.
    """
    if k < 2 or k % 2:
        raise AlphabetError('alphabet must be even')
    coin = coin or PublicCoin(np.arange(k) < k // 2)
    _check_coin(coin, k)
    flip = budget.flip_probability
    ones = np.where(coin.mask[0], 1 - flip, flip)
    return ChannelMatrix(np.stack((1 - ones, ones), axis=1), MechanismKind.RAPTOR, budget.epsilon)


def raptor2_channel(budget: PrivacyBudget) -> ChannelMatrix:
    """
    4 x 8 channel from the truth class of (x1, x2) to the reported bits
    (b1, b2, b3), output index 4 b1 + 2 b2 + b3.
    """
    flip = budget.split(3).flip_probability
    outputs = np.arange(8)
    reported = np.stack(((outputs >> 2) & 1, (outputs >> 1) & 1, outputs & 1), axis=1)
    rows = []
    for t1, t2 in TRUTH_CLASSES:
        truth = np.array((t1, t2, t1 & t2))
        agree = reported == truth
        rows.append(np.where(agree, 1 - flip, flip).prod(axis=1))
    return ChannelMatrix(np.array(rows), MechanismKind.RAPTOR2, budget.epsilon)


@register_encoder(MechanismKind.RAPTOR)
def _privatize_raptor(samples, k, budget, rng, coin):
    coin = coin or PublicCoin.draw(k, rng)
    _check_coin(coin, k)
    if coin.count == 1:
        return raptor_encode_batch(samples, coin, budget, rng), coin
    return raptor_encode_parallel(samples, coin, budget, rng), coin


@register_encoder(MechanismKind.RAPTOR2)
def _privatize_raptor2(samples, k, budget, rng, coin):
    coin = coin or PublicCoin.draw(k, rng, count=2)
    _check_coin(coin, k, count=2)
    return raptor2_encode_batch(samples, coin, budget, rng), coin


__all__ = (
    'TRUTH_CLASSES',
    'raptor2_channel',
    'raptor2_encode',
    'raptor2_encode_batch',
    'raptor_channel',
    'raptor_encode',
    'raptor_encode_batch',
    'raptor_encode_parallel',
)
