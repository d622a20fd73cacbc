import numpy as np

from ..enums import MechanismKind
from ..exceptions import AlphabetError
from ..hadamard import HadamardCode, hadamard_code
from ..utils import as_symbols, parity
from .base import ChannelMatrix, PrivacyBudget, register_encoder


def hr_encode_batch(symbols, code: HadamardCode, budget: PrivacyBudget,
                    rng: np.random.Generator) -> np.ndarray:
    """
    Report a uniform element of C_x with probability e^eps / (e^eps + 1),
    otherwise a uniform element of its complement.

    A uniform z lands in either parity class with probability 1/2; toggling
    the lowest set bit of phi(x) in z swaps the classes bijectively, so
    fixing the parity keeps z uniform within the chosen class.
    """
    symbols = as_symbols(symbols, code.k)
    rows = code.phi(symbols)
    z = rng.integers(0, code.K, size=symbols.size)
    want_inside = rng.random(symbols.size) >= budget.flip_probability
    inside = parity(z & rows) == 0
    lowest = rows & -rows
    return np.where(inside == want_inside, z, z ^ lowest)


def hr_encode(code: HadamardCode, budget: PrivacyBudget, x: int, rng: np.random.Generator) -> int:
    return int(hr_encode_batch([x], code, budget, rng)[0])


def hr_pair_encode_batch(pairs, code: HadamardCode, budget: PrivacyBudget,
                         rng: np.random.Generator) -> np.ndarray:
    """Each coordinate of (x1, x2) through its own HR at eps/2: an (n, 2) report"""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    half = budget.split(2)
    first = hr_encode_batch(pairs[:, 0], code, half, rng)
    second = hr_encode_batch(pairs[:, 1], code, half, rng)
    return np.stack((first, second), axis=1)


def hr_channel(code: HadamardCode, budget: PrivacyBudget) -> ChannelMatrix:
    return ChannelMatrix(code.channel(budget.epsilon), MechanismKind.HR, budget.epsilon)


def hr_pair_channel(code: HadamardCode, budget: PrivacyBudget) -> ChannelMatrix:
    """k^2 x K^2 channel of the pair report; input (x1, x2) is row x1 * k + x2"""
    single = code.channel(budget.split(2).epsilon)
    return ChannelMatrix(np.kron(single, single), MechanismKind.HRPair, budget.epsilon)


@register_encoder(MechanismKind.HR)
def _privatize_hr(samples, k, budget, rng, coin):
    return hr_encode_batch(samples, hadamard_code(k), budget, rng), None


@register_encoder(MechanismKind.HRPair)
def _privatize_hr_pair(samples, k, budget, rng, coin):
    pairs = np.asarray(samples, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise AlphabetError('hr-pair input must be an (n, 2) array of symbol pairs')
    as_symbols(pairs, k)
    return hr_pair_encode_batch(pairs, hadamard_code(k), budget, rng), None


__all__ = (
    'hr_channel',
    'hr_encode',
    'hr_encode_batch',
    'hr_pair_channel',
    'hr_pair_encode_batch',
)
