"""
Moments of the RAPPOR uniformity statistic T, by brute force over every
outcome of a small batch and by two independent closed forms.

Throughout, lambda_x = alpha_R p(x) + beta_R is the probability that bit x
of one report is set, lambda = alpha_R / k + beta_R its value under the
uniform distribution, and f(t) = t^2 - (2(n-1) lambda + 1) t is T's
per-symbol term up to a constant.
"""
import logging

import numpy as np

from ..distributions import Distribution, l2_distance_sq, uniform
from ..exceptions import AlphabetError, OutputSpaceTooLarge
from ..mechanisms import PrivacyBudget, rappor_channel
from ..settings import MAX_RAPPOR_OUTCOMES
from .reports import ClaimResult, MomentReport

logger = logging.getLogger(__name__)

EXACT_TOLERANCE = 1e-10


def rappor_expected_T(n: int, budget: PrivacyBudget, p: Distribution) -> float:
    """n(n-1) alpha_R^2 ||p - u||^2"""
    return n * (n - 1) * budget.alpha_r ** 2 * l2_distance_sq(p, uniform(p.k))


def enumerate_rappor_T(n: int, budget: PrivacyBudget, p: Distribution) -> tuple[float, float]:
    """Exact (E[T], Var[T]) summed over all (2^k)^n outcomes of a batch of n users"""
    k = p.k
    outputs = 1 << k
    if outputs ** n > MAX_RAPPOR_OUTCOMES:
        raise OutputSpaceTooLarge(
            f'(2^{k})^{n} RAPPOR outcomes exceed the enumeration limit {MAX_RAPPOR_OUTCOMES}'
        )
    logger.debug('enumerating %s RAPPOR outcomes', outputs ** n)
    report_pmf = rappor_channel(k, budget).pushforward(p.pmf)
    report_bits = (np.arange(outputs)[:, None] >> np.arange(k)[None, :]) & 1

    reports = np.stack(np.unravel_index(np.arange(outputs ** n), (outputs,) * n), axis=1)
    probability = report_pmf[reports].prod(axis=1)
    counts = report_bits[reports].sum(axis=1)

    lam = budget.alpha_r / k + budget.beta_r
    centered = counts - (n - 1) * lam
    statistics = (centered * centered - counts).sum(axis=1) + k * (n - 1) * lam * lam
    mean = float(probability @ statistics)
    variance = float(probability @ (statistics - mean) ** 2)
    return mean, variance


def _rates(k: int, budget: PrivacyBudget, p: Distribution) -> tuple[np.ndarray, float]:
    return budget.alpha_r * p.pmf + budget.beta_r, budget.alpha_r / k + budget.beta_r


def rappor_variance_closed_form(n: int, budget: PrivacyBudget, p: Distribution) -> float:
    """
    Var[T] = sum_x [2 n m s_x^2 + 4 n m^2 s_x (lambda_x - lambda)^2]
           + sum_{x != y} 2 n m alpha_R^4 [p_x^2 p_y^2 - 2 m p_x p_y (p_x - 1/k)(p_y - 1/k)]
    with m = n - 1 and s_x = lambda_x (1 - lambda_x).
    """
    k, m = p.k, n - 1
    rates, lam = _rates(k, budget, p)
    spread = rates * (1 - rates)
    own = (2 * n * m * spread ** 2 + 4 * n * m * m * spread * (rates - lam) ** 2).sum()

    pmf = p.pmf
    shifted = pmf - 1 / k
    cross = 2 * n * m * budget.alpha_r ** 4 * (
        np.outer(pmf ** 2, pmf ** 2) - 2 * m * np.outer(pmf * shifted, pmf * shifted)
    )
    np.fill_diagonal(cross, 0.0)
    return float(own + cross.sum())


def _binomial_raw_moments(n: int, rate: float) -> tuple[float, float, float, float]:
    """E[N], E[N^2], E[N^3], E[N^4] for N ~ Bin(n, rate), through Stirling numbers"""
    falling = [1.0]
    for i in range(4):
        falling.append(falling[-1] * (n - i))
    term = [falling[i] * rate ** i for i in range(5)]
    return (
        term[1],
        term[1] + term[2],
        term[1] + 3 * term[2] + term[3],
        term[1] + 7 * term[2] + 6 * term[3] + term[4],
    )


def rappor_variance_from_moments(n: int, budget: PrivacyBudget, p: Distribution) -> float:
    """
    Var[T] assembled from raw moments: binomial moments of each N_x, and the
    joint moments E[N_x N_y], E[N_x^2 N_y], E[N_x^2 N_y^2] obtained by
    splitting the index tuples of the sums over users into equality patterns.
    """
    k, m = p.k, n - 1
    rates, lam = _rates(k, budget, p)
    r = 2 * m * lam + 1
    alpha = budget.alpha_r
    moments = [_binomial_raw_moments(n, rate) for rate in rates]

    total = 0.0
    for x in range(k):
        e1, e2, e3, e4 = moments[x]
        total += (e4 - e2 * e2) - 2 * r * (e3 - e2 * e1) + r * r * (e2 - e1 * e1)

    for x in range(k):
        for y in range(k):
            if x == y:
                continue
            lx, ly = rates[x], rates[y]
            # P(bits x and y both set) in one report
            d = lx * ly - alpha * alpha * p.pmf[x] * p.pmf[y]
            e_xy = n * d + n * m * lx * ly
            e_xxy = n * d + n * m * lx * ly + 2 * n * m * lx * d + n * m * (m - 1) * lx * lx * ly
            e_xyy = n * d + n * m * lx * ly + 2 * n * m * ly * d + n * m * (m - 1) * lx * ly * ly
            e_xxyy = (
                n * d
                + n * m * (lx * ly + 2 * d * d + 2 * lx * d + 2 * ly * d)
                + n * m * (m - 1) * (lx * ly * ly + lx * lx * ly + 4 * d * lx * ly)
                + n * m * (m - 1) * (m - 2) * lx * lx * ly * ly
            )
            ex1, ex2 = moments[x][0], moments[x][1]
            ey1, ey2 = moments[y][0], moments[y][1]
            total += (
                (e_xxyy - ex2 * ey2)
                - r * (e_xxy - ex2 * ey1)
                - r * (e_xyy - ex1 * ey2)
                + r * r * (e_xy - ex1 * ey1)
            )
    return float(total)


def rappor_T_moment_check(k: int, n: int, epsilon: float, p: Distribution) -> MomentReport:
    """
    Exhaustive check of E[T] = n(n-1) alpha_R^2 ||p - u||^2, of
    Var[T] <= 4 k n^2 + 8 n E[T], and of both variance closed forms.
    second_moment and fourth_moment carry E[T] and Var[T].
    """
    if p.k != k:
        raise AlphabetError(f'distribution lives on {p.k} symbols, not k={k}')
    budget = PrivacyBudget(epsilon)
    mean, variance = enumerate_rappor_T(n, budget, p)
    expected = rappor_expected_T(n, budget, p)
    closed = rappor_variance_closed_form(n, budget, p)
    assembled = rappor_variance_from_moments(n, budget, p)
    bound = 4 * k * n * n + 8 * n * expected
    claims = [
        ClaimResult.close('expectation', mean, expected, EXACT_TOLERANCE),
        ClaimResult.at_most('variance bound', variance, bound),
        ClaimResult.close('variance closed form', closed, variance, EXACT_TOLERANCE),
        ClaimResult.close('variance from raw moments', assembled, variance, EXACT_TOLERANCE),
    ]
    return MomentReport(
        mean, variance,
        predictions={
            'expectation': expected,
            'variance_bound': bound,
            'variance_closed_form': closed,
            'variance_from_moments': assembled,
        },
        claims=claims,
    )


__all__ = (
    'enumerate_rappor_T',
    'rappor_T_moment_check',
    'rappor_expected_T',
    'rappor_variance_closed_form',
    'rappor_variance_from_moments',
)
