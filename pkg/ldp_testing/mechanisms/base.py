import json
import logging
from typing import Callable, Self

import numpy as np

from ..enums import MechanismKind
from ..exceptions import AlphabetError, DistributionError, MechanismMismatch
from ..hadamard import hadamard_code
from ..settings import SUM_TOLERANCE
from ..utils import check_epsilon

logger = logging.getLogger(__name__)

# MechanismKind -> fn(samples, k, budget, rng, coin) -> (messages, coin)
BATCH_ENCODERS: dict[MechanismKind, Callable] = {}


def register_encoder(kind: MechanismKind) -> Callable:
    def decorator(encoder: Callable) -> Callable:
        BATCH_ENCODERS[kind] = encoder
        return encoder
    return decorator


class PrivacyBudget:
    """
    The local privacy parameter and the constants derived from it.

    >>> round(PrivacyBudget(1).alpha_r, 7), round(PrivacyBudget(1).beta_r, 7)
    (0.2449187, 0.3775407)
    """

    __slots__ = ('epsilon',)

    def __init__(self, epsilon: float) -> None:
        self.epsilon = check_epsilon(epsilon)

    @property
    def alpha_r(self) -> float:
        """RAPPOR signal, (e^(eps/2) - 1) / (e^(eps/2) + 1)"""
        return float(np.tanh(self.epsilon / 4))

    @property
    def beta_r(self) -> float:
        """RAPPOR per-bit flip probability, 1 / (e^(eps/2) + 1)"""
        return float(1 / (np.exp(self.epsilon / 2) + 1))

    @property
    def alpha_h(self) -> float:
        """(e^eps - 1) / (e^eps + 1)"""
        return float(np.tanh(self.epsilon / 2))

    @property
    def flip_probability(self) -> float:
        """Binary randomized response: P(report != truth) = 1 / (e^eps + 1)"""
        return float(1 / (np.exp(self.epsilon) + 1))

    @property
    def inverse_signal(self) -> float:
        """(e^eps + 1) / (e^eps - 1), the debiasing factor of a randomized response bit"""
        return 1 / self.alpha_h

    def keep_probability(self, k: int) -> float:
        """k-ary randomized response: P(report == truth) = e^eps / (e^eps + k - 1)"""
        if k < 1:
            raise AlphabetError('alphabet must be non-empty')
        # e^eps / (e^eps + k - 1) written to stay finite for large eps
        return float(1 / (1 + (k - 1) * np.exp(-self.epsilon)))

    def split(self, parts: int) -> 'PrivacyBudget':
        """Budget of each of `parts` composed reports"""
        return PrivacyBudget(self.epsilon / parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrivacyBudget) and self.epsilon == other.epsilon

    def __hash__(self) -> int:
        return hash(self.epsilon)

    def __repr__(self) -> str:
        return f'PrivacyBudget(epsilon={self.epsilon})'


class ChannelMatrix:
    """Row-stochastic matrix W[x, z] = P(report z | input x)"""

    __slots__ = ('matrix', 'kind', 'epsilon')

    def __init__(self, matrix, kind: MechanismKind, epsilon: float) -> None:
        values = np.array(matrix, dtype=np.float64)
        if values.ndim != 2 or not values.size:
            raise DistributionError('channel must be a non-empty 2-d array')
        if (values < 0).any():
            raise DistributionError('channel probabilities must be non-negative')
        sums = values.sum(axis=1)
        if np.abs(sums - 1).max() > SUM_TOLERANCE:
            raise DistributionError('every channel row must sum to 1')
        values.setflags(write=False)
        self.matrix = values
        self.kind = MechanismKind(kind)
        self.epsilon = float(epsilon)

    @property
    def inputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def outputs(self) -> int:
        return self.matrix.shape[1]

    def pushforward(self, pmf) -> np.ndarray:
        """Output pmf for an input pmf"""
        pmf = np.asarray(pmf, dtype=np.float64)
        if pmf.shape != (self.inputs,):
            raise AlphabetError(f'input pmf must have {self.inputs} entries')
        return pmf @ self.matrix

    def __repr__(self) -> str:
        return f'ChannelMatrix({self.kind}, {self.inputs}x{self.outputs}, epsilon={self.epsilon})'


class PublicCoin:
    """
    Shared randomness of the public-coin mechanisms: a stack of subsets of
    [k], each of size exactly k/2, stored as a boolean (count, k) mask.
    Bivariate RAPTOR uses a stack of two, (S1, S2).
    """

    __slots__ = ('mask',)

    def __init__(self, mask) -> None:
        mask = np.array(mask, dtype=bool)
        if mask.ndim == 1:
            mask = mask[None, :]
        if mask.ndim != 2 or not mask.shape[0] or not mask.shape[1]:
            raise AlphabetError('public coin needs at least one subset of a non-empty alphabet')
        k = mask.shape[1]
        if k % 2 or (mask.sum(axis=1) != k // 2).any():
            raise AlphabetError('public coin subsets must hold exactly k/2 symbols')
        mask.setflags(write=False)
        self.mask = mask

    @classmethod
    def draw(cls, k: int, rng: np.random.Generator, count: int = 1) -> Self:
        """
        count independent uniform half-size subsets; each is the head of a
        partial Fisher-Yates shuffle of [k].
        """
        if k < 2 or k % 2:
            raise AlphabetError('alphabet must be even')
        mask = np.zeros((count, k), dtype=bool)
        for row in range(count):
            order = np.arange(k)
            for i in range(k // 2):
                j = int(rng.integers(i, k))
                order[i], order[j] = order[j], order[i]
            mask[row, order[:k // 2]] = True
        return cls(mask)

    @classmethod
    def from_members(cls, members: list[list[int]], k: int) -> Self:
        mask = np.zeros((len(members), k), dtype=bool)
        for row, subset in enumerate(members):
            if any(not 0 <= s < k for s in subset):
                raise AlphabetError(f'coin members must lie in [0, {k})')
            mask[row, list(subset)] = True
        return cls(mask)

    @property
    def k(self) -> int:
        return self.mask.shape[1]

    @property
    def count(self) -> int:
        return self.mask.shape[0]

    def members(self, index: int = 0) -> list[int]:
        return np.flatnonzero(self.mask[index]).tolist()

    def contains(self, symbols, index: int = 0) -> np.ndarray:
        """1{x in S_index} for each symbol"""
        return self.mask[index][np.asarray(symbols, dtype=np.int64)]

    def mass(self, pmf, index: int = 0) -> float:
        """p(S_index)"""
        return float(np.asarray(pmf, dtype=np.float64)[self.mask[index]].sum())

    def to_json(self) -> list[list[int]]:
        return [self.members(i) for i in range(self.count)]

    def __eq__(self, other) -> bool:
        return isinstance(other, PublicCoin) and np.array_equal(self.mask, other.mask)

    def __repr__(self) -> str:
        return f'PublicCoin(k={self.k}, count={self.count})'


def _message_shape_error(kind: MechanismKind, shape) -> MechanismMismatch:
    return MechanismMismatch(f'messages of shape {shape} do not fit mechanism {kind}')


class PrivatizedBatch:
    """
    What the curator receives: one message per user plus the public coin,
    if the mechanism has one.

    Message layout per mechanism:
        rr      (n,)    symbols in [k]
        rappor  (n, k)  bits
        hr      (n,)    symbols in [K]
        hr-pair (n, 2)  symbols in [K]
        raptor  (n,) or (n, T) bits, one column per coin
        raptor2 (n, 3)  bits for S1, S2 and S1 x S2
    """

    __slots__ = ('kind', 'k', 'epsilon', 'messages', 'coin')

    def __init__(self, kind: MechanismKind, k: int, epsilon: float, messages,
                 coin: PublicCoin | None = None) -> None:
        self.kind = MechanismKind(kind)
        self.k = int(k)
        self.epsilon = check_epsilon(epsilon)
        self.messages = np.asarray(messages, dtype=np.int64)
        self.coin = coin
        self._validate()

    def _validate(self) -> None:
        shape = self.messages.shape
        match self.kind:
            case MechanismKind.RR | MechanismKind.HR:
                valid = len(shape) == 1
            case MechanismKind.RAPPOR:
                valid = len(shape) == 2 and shape[1] == self.k
            case MechanismKind.HRPair:
                valid = len(shape) == 2 and shape[1] == 2
            case MechanismKind.RAPTOR:
                valid = len(shape) == 1 or len(shape) == 2 and self.coin is not None \
                    and shape[1] == self.coin.count
            case MechanismKind.RAPTOR2:
                valid = len(shape) == 2 and shape[1] == 3
        if not valid:
            raise _message_shape_error(self.kind, shape)

        if self.kind in (MechanismKind.RAPTOR, MechanismKind.RAPTOR2):
            if self.coin is None:
                raise MechanismMismatch(f'{self.kind} batches carry their public coin')
            if self.coin.k != self.k:
                raise AlphabetError(f'coin alphabet {self.coin.k} != batch alphabet {self.k}')

        if self.kind in (MechanismKind.RAPPOR, MechanismKind.RAPTOR, MechanismKind.RAPTOR2):
            upper = 2
        elif self.kind == MechanismKind.RR:
            upper = self.k
        else:
            upper = hadamard_code(self.k).K
        if self.messages.size and (self.messages.min() < 0 or self.messages.max() >= upper):
            raise AlphabetError(f'{self.kind} messages must lie in [0, {upper})')

    @classmethod
    def from_samples(cls, kind: MechanismKind, samples, k: int, budget: PrivacyBudget,
                     rng: np.random.Generator, coin: PublicCoin | None = None) -> Self:
        """Privatize raw user data with the registered encoder of `kind`"""
        kind = MechanismKind(kind)
        messages, coin = BATCH_ENCODERS[kind](samples, k, budget, rng, coin)
        return cls(kind, k, budget.epsilon, messages, coin)

    @property
    def n(self) -> int:
        return self.messages.shape[0]

    @property
    def budget(self) -> PrivacyBudget:
        return PrivacyBudget(self.epsilon)

    def expect(self, kind: MechanismKind) -> None:
        if self.kind != kind:
            raise MechanismMismatch(f'expected a {kind} batch, got {self.kind}')

    def to_json(self) -> str:
        return json.dumps({
            'mechanism': str(self.kind),
            'k': self.k,
            'epsilon': self.epsilon,
            'coin': self.coin.to_json() if self.coin is not None else None,
            'messages': self.messages.tolist(),
        })

    @classmethod
    def from_json(cls, data: str | dict) -> Self:
        record = json.loads(data) if isinstance(data, str) else data
        try:
            kind = record['mechanism']
            k = int(record['k'])
            epsilon, messages, coin = record['epsilon'], record['messages'], record.get('coin')
        except (KeyError, TypeError) as exc:
            raise MechanismMismatch(f'not a privatized batch record: {exc}') from None
        if kind not in MechanismKind.__members__.values():
            raise MechanismMismatch(f'unknown mechanism {kind!r}')
        return cls(
            kind=kind,
            k=k,
            epsilon=epsilon,
            messages=messages,
            coin=PublicCoin.from_members(coin, k) if coin else None,
        )

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f'PrivatizedBatch({self.kind}, k={self.k}, n={self.n}, epsilon={self.epsilon})'


__all__ = (
    'BATCH_ENCODERS',
    'ChannelMatrix',
    'PrivacyBudget',
    'PrivatizedBatch',
    'PublicCoin',
    'register_encoder',
)
