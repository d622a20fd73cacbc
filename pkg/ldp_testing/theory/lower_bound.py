"""
Pair-perturbation matrices of the lower-bound argument, computed from the
explicit channels. Perturbing p along the input pairs (2i, 2i + 1) moves the
output law by D_i(m) = W(m|2i) - W(m|2i + 1); H collects the chi-square
inner products of these directions against the output law of u.
"""
import logging
import math

import numpy as np

from ..enums import MechanismKind
from ..exceptions import AlphabetError, OutputSpaceTooLarge
from ..hadamard import hadamard_code
from ..mechanisms import PrivacyBudget, rappor_channel
from ..settings import MAX_HADAMARD_LB_K, MAX_RAPPOR_LB_K
from .reports import ClaimResult, LBMatrix

logger = logging.getLogger(__name__)

OFF_DIAGONAL_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-12


def perturbation_matrix(channel) -> np.ndarray:
    """
    H(i1, i2) = k sum_m D_i1(m) D_i2(m) / sum_x W(m|x) for a k x M channel.
    The factor k turns sum_x W(m|x) into k times the output law of u.
    """
    channel = np.asarray(channel, dtype=np.float64)
    k = channel.shape[0]
    if k % 2:
        raise AlphabetError('alphabet must be even')
    directions = channel[0::2] - channel[1::2]
    return k * (directions / channel.sum(axis=0)) @ directions.T


def hr_lb_constant(epsilon: float, k: int, K: int) -> float:
    """c(eps, k, K) = ((e^eps - 1) K + 2k) / (k (e^eps + 1)), in [1, 2] when k <= K <= 2k"""
    grow = math.exp(epsilon)
    return ((grow - 1) * K + 2 * k) / (k * (grow + 1))


def _structure_claims(lb: LBMatrix) -> list[ClaimResult]:
    return [
        ClaimResult.at_most('symmetry', lb.asymmetry, SYMMETRY_TOLERANCE, slack=0.0),
        ClaimResult.at_most('off-diagonal', lb.off_diagonal_max, OFF_DIAGONAL_TOLERANCE, slack=0.0),
    ]


def _rappor_lb(k: int, budget: PrivacyBudget) -> LBMatrix:
    if k > MAX_RAPPOR_LB_K:
        raise OutputSpaceTooLarge(f'RAPPOR lower-bound matrix needs k <= {MAX_RAPPOR_LB_K}, got {k}')
    lb = LBMatrix(perturbation_matrix(rappor_channel(k, budget).matrix),
                  MechanismKind.RAPPOR, budget.epsilon, k)
    eps = budget.epsilon
    bound = (math.exp(2 * eps) - 1) ** 2 / math.exp(eps)
    lb.claims = _structure_claims(lb) + [
        ClaimResult.at_most('diagonal bound', float(lb.diagonal.max()), bound),
    ]
    return lb


def _hr_lb(k: int, budget: PrivacyBudget) -> LBMatrix:
    if k > MAX_HADAMARD_LB_K:
        raise OutputSpaceTooLarge(f'HR lower-bound matrix needs k <= {MAX_HADAMARD_LB_K}, got {k}')
    # pair-aligned rows: 2i + 2 and 2i + 3 differ in the lowest bit only
    code = hadamard_code(k, offset=2)
    channel = code.channel(budget.epsilon)
    lb = LBMatrix(perturbation_matrix(channel), MechanismKind.HR, budget.epsilon, k)

    diagonal = lb.diagonal
    # the directions live on odd outputs, where K sum_x W(m|x) / k is constant
    c_eff = float((code.K * channel[:, 1::2].sum(axis=0) / k).mean())
    c_closed = hr_lb_constant(budget.epsilon, k, code.K)
    lb.claims = _structure_claims(lb) + [
        ClaimResult.at_most('constant diagonal', float(np.ptp(diagonal)), OFF_DIAGONAL_TOLERANCE,
                            slack=0.0),
        ClaimResult.close('diagonal closed form', float(diagonal.mean()), 2 * budget.alpha_h ** 2,
                          OFF_DIAGONAL_TOLERANCE),
        ClaimResult('effective constant in [1, 2]', 1 - 1e-12 <= c_eff <= 2 + 1e-12, c_eff,
                    detail=f'K={code.K}'),
        ClaimResult('closed-form constant in [1, 2]', 1 - 1e-12 <= c_closed <= 2 + 1e-12, c_closed,
                    detail=f'K={code.K}'),
    ]
    return lb


def lb_matrix(kind: MechanismKind, k: int, epsilon: float) -> LBMatrix:
    """(k/2) x (k/2) perturbation matrix of RAPPOR or HR with its structural claims"""
    if k < 2 or k % 2:
        raise AlphabetError('alphabet must be even')
    budget = PrivacyBudget(epsilon)
    match MechanismKind(kind):
        case MechanismKind.RAPPOR:
            lb = _rappor_lb(k, budget)
        case MechanismKind.HR:
            lb = _hr_lb(k, budget)
        case other:
            raise AlphabetError(f'no lower-bound matrix for mechanism {other}')
    logger.debug('%r: off-diagonal max %.3g', lb, lb.off_diagonal_max)
    return lb


__all__ = (
    'hr_lb_constant',
    'lb_matrix',
    'perturbation_matrix',
)
