import logging

import numpy as np

from ..enums import MechanismKind
from ..hadamard import hadamard_code
from ..settings import AUDIT_SLACK
from .base import ChannelMatrix, PrivacyBudget, PublicCoin
from .hadamard_response import hr_channel, hr_pair_channel
from .rappor import rappor_channel
from .randomized_response import rr_channel
from .raptor import raptor2_channel, raptor_channel

logger = logging.getLogger(__name__)


def channel_matrix(kind: MechanismKind, k: int, budget: PrivacyBudget,
                   coin: PublicCoin | None = None) -> ChannelMatrix:
    """
    Explicit channel of a mechanism. Bivariate RAPTOR is indexed by the
    four truth classes of (x1, x2) rather than by [k] x [k].
    """
    match MechanismKind(kind):
        case MechanismKind.RR:
            return rr_channel(k, budget)
        case MechanismKind.RAPPOR:
            return rappor_channel(k, budget)
        case MechanismKind.HR:
            return hr_channel(hadamard_code(k), budget)
        case MechanismKind.HRPair:
            return hr_pair_channel(hadamard_code(k), budget)
        case MechanismKind.RAPTOR:
            return raptor_channel(k, budget, coin)
        case MechanismKind.RAPTOR2:
            return raptor2_channel(budget)


def audit_ldp(channel: ChannelMatrix) -> float:
    """
    max over outputs z and inputs x, x' of W(z|x') / W(z|x), taking 0/0 as 1
    and c/0 as infinity. For each column this is its max over its min.
    """
    matrix = channel.matrix
    high = matrix.max(axis=0)
    low = matrix.min(axis=0)
    positive = low > 0
    ratios = np.where(positive, high / np.where(positive, low, 1.0), np.where(high > 0, np.inf, 1.0))
    ratio = float(ratios.max())
    logger.debug('audit of %r: max ratio %s', channel, ratio)
    return ratio


def audit_passes(ratio: float, budget: PrivacyBudget) -> bool:
    return ratio <= np.exp(budget.epsilon) * (1 + AUDIT_SLACK)


def rappor_bit_audit(budget: PrivacyBudget) -> float:
    """
    Worst-case ratio of RAPPOR for any k: two one-hot encodings differ in
    exactly two bits, each a binary flip channel at eps/2, and the other
    bits cancel.
    """
    beta = budget.beta_r
    per_bit = audit_ldp(ChannelMatrix(
        [[1 - beta, beta], [beta, 1 - beta]], MechanismKind.RAPPOR, budget.epsilon / 2,
    ))
    return per_bit * per_bit


__all__ = (
    'audit_ldp',
    'audit_passes',
    'channel_matrix',
    'rappor_bit_audit',
)
