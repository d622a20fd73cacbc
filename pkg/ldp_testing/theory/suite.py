import logging

import numpy as np

from ..distributions import Distribution, paninski, product, random_theta, uniform_joint
from ..enums import MechanismKind
from ..settings import SUBSET_COROLLARY_CONSTANT
from .lower_bound import lb_matrix
from .rappor_moments import rappor_T_moment_check
from .reports import ClaimResult
from .structural import hr_parseval_check, parseval_general_check, random_joint, structural_check
from .subsets import corollary_exceedance, joint_Z_moments, subset_Z_moments

logger = logging.getLogger(__name__)


def _tagged(group: str, claims) -> list[ClaimResult]:
    return [
        ClaimResult(f'{group}: {c.name}', c.passed, c.observed, c.expected, c.detail)
        for c in claims
    ]


def _epsilon(rng: np.random.Generator) -> float:
    return float(rng.uniform(0.1, 2.0))


def _zero_sum(k: int, rng: np.random.Generator) -> np.ndarray:
    delta = rng.normal(size=k)
    return delta - delta.mean()


def _doubly_zero_sum(k: int, rng: np.random.Generator) -> np.ndarray:
    delta = rng.normal(size=(k, k))
    return delta - delta.mean(axis=0) - delta.mean(axis=1)[:, None] + delta.mean()


def identity_claims(rng: np.random.Generator) -> list[ClaimResult]:
    claims = []
    for _ in range(200):
        k = int(rng.integers(2, 65))
        p = Distribution(rng.dirichlet(np.ones(k)))
        claims.append(hr_parseval_check(p, _epsilon(rng)))
    for _ in range(100):
        claims.append(parseval_general_check(random_joint(4, rng), random_joint(4, rng), _epsilon(rng)))
    return claims


def rappor_claims(rng: np.random.Generator) -> list[ClaimResult]:
    claims = []
    for epsilon in (0.5, 1.0):
        for k in (2, 3):
            for n in (2, 3):
                p = Distribution(rng.dirichlet(np.ones(k)))
                report = rappor_T_moment_check(k, n, epsilon, p)
                claims += _tagged(f'rappor T k={k} n={n} eps={epsilon}', report.claims)
    return claims


def subset_claims(rng: np.random.Generator) -> list[ClaimResult]:
    claims = []
    for _ in range(50):
        k = int(rng.choice((4, 6, 8, 10, 12)))
        report = subset_Z_moments(_zero_sum(k, rng))
        claims += _tagged(f'subset Z k={k}', report.claims)
    for gamma in (0.3, 0.4, 0.5):
        for _ in range(20):
            p = paninski(10, gamma, random_theta(10, rng))
            claims.append(ClaimResult.at_least(
                f'corollary exceedance gamma={gamma}', corollary_exceedance(p),
                SUBSET_COROLLARY_CONSTANT, slack=0.0,
            ))
    for k in (4, 6, 8):
        report = joint_Z_moments(_doubly_zero_sum(k, rng))
        claims += _tagged(f'joint Z k={k}', report.claims)
    return claims


def lower_bound_claims() -> list[ClaimResult]:
    claims = []
    for epsilon in (0.25, 0.5, 1.0):
        for k in (4, 8):
            claims += _tagged(f'rappor H k={k} eps={epsilon}',
                              lb_matrix(MechanismKind.RAPPOR, k, epsilon).claims)
        for k in (4, 16, 64):
            claims += _tagged(f'hr H k={k} eps={epsilon}',
                              lb_matrix(MechanismKind.HR, k, epsilon).claims)
    return claims


def structural_claims(rng: np.random.Generator) -> list[ClaimResult]:
    claims = []
    for _ in range(20):
        p = random_joint(4, rng)
        q = product(*p.marginals())
        claims += _tagged('structural k=4', structural_check(p, q, _epsilon(rng)))
    claims += _tagged('structural uniform', structural_check(uniform_joint(4), uniform_joint(4), 1.0))
    return claims


def verify_appendix(rng: np.random.Generator) -> list[ClaimResult]:
    """Every oracle of the theory package on a fixed menu of instances"""
    claims = []
    for name, group in (
        ('identities', lambda: identity_claims(rng)),
        ('rappor moments', lambda: rappor_claims(rng)),
        ('subset perturbations', lambda: subset_claims(rng)),
        ('lower-bound matrices', lower_bound_claims),
        ('structural', lambda: structural_claims(rng)),
    ):
        results = group()
        failed = sum(not c for c in results)
        logger.info('%s: %s claims, %s failed', name, len(results), failed)
        claims += results
    return claims


__all__ = (
    'identity_claims',
    'lower_bound_claims',
    'rappor_claims',
    'structural_claims',
    'subset_claims',
    'verify_appendix',
)
