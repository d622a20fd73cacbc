import json

import numpy as np

from ..enums import MechanismKind


class ClaimResult:
    """One checked statement: what was observed against what was predicted"""

    __slots__ = ('name', 'passed', 'observed', 'expected', 'detail')

    def __init__(self, name: str, passed: bool, observed: float | None = None,
                 expected: float | None = None, detail: str = '') -> None:
        self.name = name
        self.passed = bool(passed)
        self.observed = None if observed is None else float(observed)
        self.expected = None if expected is None else float(expected)
        self.detail = detail

    @classmethod
    def close(cls, name: str, observed: float, expected: float, tolerance: float,
              detail: str = '') -> 'ClaimResult':
        """passes iff |observed - expected| <= tolerance * max(1, |expected|)"""
        scale = max(1.0, abs(expected))
        return cls(name, abs(observed - expected) <= tolerance * scale, observed, expected, detail)

    @classmethod
    def at_most(cls, name: str, observed: float, bound: float, slack: float = 1e-12,
                detail: str = '') -> 'ClaimResult':
        return cls(name, observed <= bound + slack * max(1.0, abs(bound)), observed, bound, detail)

    @classmethod
    def at_least(cls, name: str, observed: float, bound: float, slack: float = 1e-12,
                 detail: str = '') -> 'ClaimResult':
        return cls(name, observed >= bound - slack * max(1.0, abs(bound)), observed, bound, detail)

    def to_json(self) -> dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'observed': self.observed,
            'expected': self.expected,
            'detail': self.detail,
        }

    def __bool__(self) -> bool:
        return self.passed

    def __repr__(self) -> str:
        status = 'ok' if self.passed else 'FAILED'
        return f'ClaimResult({self.name}: {status}, observed={self.observed}, expected={self.expected})'


class MomentReport:
    """
    Moments of a perturbation statistic Z together with the claims checked
    against them. exact is False when the moments come from Monte-Carlo
    draws, in which case draws holds their number.
    """

    __slots__ = ('second_moment', 'fourth_moment', 'exceedance', 'predictions', 'claims',
                 'exact', 'draws')

    def __init__(self, second_moment: float, fourth_moment: float,
                 exceedance: dict[float, float] | None = None,
                 predictions: dict[str, float] | None = None,
                 claims: list[ClaimResult] | None = None,
                 exact: bool = True, draws: int | None = None) -> None:
        self.second_moment = float(second_moment)
        self.fourth_moment = float(fourth_moment)
        self.exceedance = dict(exceedance or {})
        self.predictions = dict(predictions or {})
        self.claims = list(claims or [])
        self.exact = exact
        self.draws = draws

    @property
    def passed(self) -> bool:
        return all(self.claims)

    def claim(self, name: str) -> ClaimResult:
        for result in self.claims:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps({
            'second_moment': self.second_moment,
            'fourth_moment': self.fourth_moment,
            'exceedance': {str(t): p for t, p in self.exceedance.items()},
            'predictions': self.predictions,
            'claims': [c.to_json() for c in self.claims],
            'exact': self.exact,
            'draws': self.draws,
        })

    def __repr__(self) -> str:
        return (
            f'MomentReport(E[Z^2]={self.second_moment:.6g}, E[Z^4]={self.fourth_moment:.6g}, '
            f'passed={self.passed})'
        )


class LBMatrix:
    """
    (k/2) x (k/2) matrix H(i1, i2) = k sum_m D_i1(m) D_i2(m) / sum_x W(m|x),
    D_i(m) = W(m|2i) - W(m|2i + 1), of the pair-perturbation lower-bound argument.
    """

    __slots__ = ('matrix', 'kind', 'epsilon', 'k', 'claims')

    def __init__(self, matrix, kind: MechanismKind, epsilon: float, k: int,
                 claims: list[ClaimResult] | None = None) -> None:
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.kind = MechanismKind(kind)
        self.epsilon = float(epsilon)
        self.k = int(k)
        self.claims = list(claims or [])

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    @property
    def off_diagonal_max(self) -> float:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return float(np.abs(off).max()) if off.size else 0.0

    @property
    def frobenius_sq(self) -> float:
        return float((self.matrix ** 2).sum())

    @property
    def asymmetry(self) -> float:
        return float(np.abs(self.matrix - self.matrix.T).max())

    @property
    def passed(self) -> bool:
        return all(self.claims)

    def to_json(self) -> str:
        return json.dumps({
            'kind': str(self.kind),
            'epsilon': self.epsilon,
            'k': self.k,
            'matrix': self.matrix.tolist(),
            'frobenius_sq': self.frobenius_sq,
            'claims': [c.to_json() for c in self.claims],
        })

    def __repr__(self) -> str:
        return f'LBMatrix({self.kind}, k={self.k}, epsilon={self.epsilon}, passed={self.passed})'


__all__ = (
    'ClaimResult',
    'LBMatrix',
    'MomentReport',
)
