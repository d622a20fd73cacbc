"""
Parseval identities of Hadamard Response and the structural facts behind
the private-coin independence test, evaluated on explicit distributions.
"""
import math

import numpy as np

from ..distributions import (
    Distribution,
    JointDistribution,
    chi_square_div,
    l2_distance_sq,
    tv_distance,
    uniform,
)
from ..exceptions import AlphabetError
from ..hadamard import hadamard_code, hr_alpha, pushforward_T, pushforward_hr, q_star
from .reports import ClaimResult

EXACT_TOLERANCE = 1e-10


def hr_parseval_check(p: Distribution, epsilon: float) -> ClaimResult:
    """||pushforward(p) - q*||^2 = (alpha_H^2 / K) ||p - u||^2"""
    code = hadamard_code(p.k)
    observed = l2_distance_sq(pushforward_hr(p, epsilon, code), q_star(p.k, epsilon, code))
    expected = hr_alpha(epsilon) ** 2 / code.K * l2_distance_sq(p, uniform(p.k))
    return ClaimResult.close('hr parseval', observed, expected, EXACT_TOLERANCE,
                             detail=f'k={p.k}, epsilon={epsilon:.4g}')


def _check_pair(p: JointDistribution, q: JointDistribution) -> None:
    if p.k != q.k:
        raise AlphabetError(f'joint distributions live on different alphabets: {p.k} != {q.k}')


def parseval_general_check(p: JointDistribution, q: JointDistribution,
                           epsilon: float) -> ClaimResult:
    """
    ||T(p) - T(q)||^2 = (alpha_H^4 / K^2) ||p - q||^2
                      + (alpha_H^2 / K^2) (||p1 - q1||^2 + ||p2 - q2||^2)
    """
    _check_pair(p, q)
    K = hadamard_code(p.k).K
    alpha = hr_alpha(epsilon)
    observed = l2_distance_sq(pushforward_T(p, epsilon), pushforward_T(q, epsilon))
    (p1, p2), (q1, q2) = p.marginals(), q.marginals()
    expected = (
        alpha ** 4 / K ** 2 * l2_distance_sq(p, q)
        + alpha ** 2 / K ** 2 * (l2_distance_sq(p1, q1) + l2_distance_sq(p2, q2))
    )
    return ClaimResult.close('general parseval', observed, expected, EXACT_TOLERANCE,
                             detail=f'k={p.k}, epsilon={epsilon:.4g}')


def structural_check(p: JointDistribution, q: JointDistribution,
                     epsilon: float) -> list[ClaimResult]:
    """
    Facts used to turn an l2 gap between T(p) and T(q) into a chi-square gap:
    entries of T lie in [(1 - alpha_H)^2, (1 + alpha_H)^2] / K^2, so
    chi^2(T(p), T(q)) >= ||T(p) - T(q)||^2 / ||T(q)||_inf, and
    ||T(p) - T(q)|| >= 2 alpha_H^2 TV(p, q) / (K k). The 2/K^2 sup bound
    only holds while (1 + alpha_H)^2 <= 2 and is checked in that regime.
    """
    _check_pair(p, q)
    k = p.k
    K = hadamard_code(k).K
    alpha = hr_alpha(epsilon)
    tp, tq = pushforward_T(p, epsilon), pushforward_T(q, epsilon)
    low, high = (1 - alpha) ** 2 / K ** 2, (1 + alpha) ** 2 / K ** 2
    sup = float(tq.pmf.max())
    gap = l2_distance_sq(tp, tq)

    claims = [
        ClaimResult.at_least('entries above floor', float(tp.pmf.min()), low),
        ClaimResult.at_most('entries below ceiling', float(tp.pmf.max()), high),
        ClaimResult.at_most('sup norm', sup, high),
        ClaimResult.at_least('chi-square above scaled l2', chi_square_div(tp, tq), gap / sup),
        ClaimResult.at_least('l2 separation', math.sqrt(gap),
                             2 * alpha ** 2 * tv_distance(p, q) / (K * k)),
    ]
    if (1 + alpha) ** 2 <= 2:
        claims.append(ClaimResult.at_most('sup norm at most 2/K^2', sup, 2 / K ** 2))
    return claims


def random_joint(k: int, rng: np.random.Generator) -> JointDistribution:
    """Dirichlet(1, ..., 1) draw over [k] x [k]"""
    return JointDistribution(rng.dirichlet(np.ones(k * k)).reshape(k, k))


__all__ = (
    'hr_parseval_check',
    'parseval_general_check',
    'random_joint',
    'structural_check',
)
