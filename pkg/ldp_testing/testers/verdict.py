import json
from typing import Self

import numpy as np

from ..enums import Decision, TestKind
from ..exceptions import DistributionError


class Verdict:
    """
    Outcome of one test run: the decision and the statistic/threshold pair
    it was read from. insufficient_samples is set when a test ran below the
    sample size its guarantee needs; the decision is still reported.
    """

    __slots__ = (
        'test', 'decision', 'statistic', 'threshold', 'n', 'k', 'epsilon', 'gamma',
        'seed', 'insufficient_samples',
    )

    def __init__(self, test: TestKind, decision: Decision, statistic: float, threshold: float,
                 n: int, k: int, epsilon: float | None = None, gamma: float | None = None,
                 seed: int | None = None, insufficient_samples: bool = False) -> None:
        self.test = TestKind(test)
        self.decision = Decision(decision)
        self.statistic = float(statistic)
        self.threshold = float(threshold)
        self.n = int(n)
        self.k = int(k)
        self.epsilon = epsilon
        self.gamma = gamma
        self.seed = seed
        self.insufficient_samples = bool(insufficient_samples)

    @property
    def rejects(self) -> bool:
        return self.decision.rejects

    def to_json(self) -> dict:
        return {
            'test': str(self.test),
            'decision': str(self.decision),
            'statistic': self.statistic,
            'threshold': self.threshold,
            'n': self.n,
            'k': self.k,
            'epsilon': self.epsilon,
            'gamma': self.gamma,
            'seed': self.seed,
        }

    @classmethod
    def from_json(cls, data: str | dict) -> Self:
        record = json.loads(data) if isinstance(data, str) else dict(data)
        return cls(**record)

    def __eq__(self, other) -> bool:
        return isinstance(other, Verdict) and self.to_json() == other.to_json()

    def __repr__(self) -> str:
        return (
            f'Verdict({self.test}: {self.decision}, statistic={self.statistic:.6g}, '
            f'threshold={self.threshold:.6g}, n={self.n})'
        )


class RapporCounts:
    """N_x = number of users whose reported bit x is set"""

    __slots__ = ('counts', 'n')

    def __init__(self, counts, n: int) -> None:
        counts = np.array(counts, dtype=np.int64).reshape(-1)
        if (counts < 0).any() or (counts > n).any():
            raise DistributionError(f'bit counts must lie in [0, n={n}]')
        counts.setflags(write=False)
        self.counts = counts
        self.n = int(n)

    @property
    def k(self) -> int:
        return self.counts.size

    def __repr__(self) -> str:
        return f'RapporCounts(k={self.k}, n={self.n})'


__all__ = (
    'RapporCounts',
    'Verdict',
)
