import logging

import numpy as np

from ..enums import MechanismKind
from ..exceptions import AlphabetError, OutputSpaceTooLarge
from ..settings import MAX_RAPPOR_AUDIT_K
from ..utils import as_symbols
from .base import ChannelMatrix, PrivacyBudget, register_encoder

logger = logging.getLogger(__name__)


def rappor_encode_batch(symbols, k: int, budget: PrivacyBudget,
                        rng: np.random.Generator) -> np.ndarray:
    """
    One-hot encode each symbol, then flip every bit independently with
    probability beta_R. Returns an (n, k) array of bits.
    """
    symbols = as_symbols(symbols, k)
    bits = (rng.random((symbols.size, k)) < budget.beta_r).astype(np.int64)
    bits[np.arange(symbols.size), symbols] ^= 1
    return bits


def rappor_encode(k: int, budget: PrivacyBudget, x: int, rng: np.random.Generator) -> np.ndarray:
    return rappor_encode_batch([x], k, budget, rng)[0]


def simulate_rappor_counts(symbol_counts, budget: PrivacyBudget,
                           rng: np.random.Generator) -> np.ndarray:
    """
    Column sums N_x of a RAPPOR batch whose inputs have histogram
    symbol_counts, without materializing the n x k bits: bit x of a user
    holding x is 1 w.p. 1 - beta_R, of any other user w.p. beta_R.
    """
    symbol_counts = np.asarray(symbol_counts, dtype=np.int64)
    n = int(symbol_counts.sum())
    beta = budget.beta_r
    return rng.binomial(symbol_counts, 1 - beta) + rng.binomial(n - symbol_counts, beta)


def rappor_channel(k: int, budget: PrivacyBudget) -> ChannelMatrix:
    """
    Explicit k x 2^k channel. Output m encodes the bit-vector with bit i in
    position i; W(m|x) = beta^d (1 - beta)^(k - d) with d the Hamming distance
    between m and the one-hot vector of x.
    """
    if k < 1:
        raise AlphabetError('alphabet must be non-empty')
    if k > MAX_RAPPOR_AUDIT_K:
        raise OutputSpaceTooLarge(
            f'RAPPOR output space 2^{k} too large; use per-bit audit (k <= {MAX_RAPPOR_AUDIT_K})'
        )
    logger.debug('enumerating %s RAPPOR outputs', 1 << k)
    outputs = np.arange(1 << k, dtype=np.int64)
    bits = (outputs[None, :] >> np.arange(k)[:, None]) & 1
    weight = bits.sum(axis=0)
    # distance from one-hot(x): every set bit except bit x, plus bit x when clear
    distance = weight[None, :] + 1 - 2 * bits
    beta = budget.beta_r
    matrix = beta ** distance * (1 - beta) ** (k - distance)
    return ChannelMatrix(matrix, MechanismKind.RAPPOR, budget.epsilon)


@register_encoder(MechanismKind.RAPPOR)
def _privatize_rappor(samples, k, budget, rng, coin):
    return rappor_encode_batch(samples, k, budget, rng), None


__all__ = (
    'rappor_channel',
    'rappor_encode',
    'rappor_encode_batch',
    'simulate_rappor_counts',
)
