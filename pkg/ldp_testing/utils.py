import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .exceptions import AlphabetError, ConfigError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """
    One step of the splitmix64 generator: add the golden gamma, then run the
    avalanche finalizer. Every input bit flips each output bit with
    probability close to 1/2.

    >>> splitmix64(0)
    16294208416658607535
    """
    z = (value + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(*words: int) -> int:
    """
    Fold any number of integers (base seed, trial index, repetition index, ...)
    into one 64-bit seed. Order matters: mix_seed(1, 2) != mix_seed(2, 1).
    """
    state = 0
    for word in words:
        state = splitmix64(state ^ (int(word) & MASK64))
    return state


def make_rng(*words: int) -> np.random.Generator:
    """numpy Generator seeded by mix_seed(*words)"""
    return np.random.default_rng(mix_seed(*words))


def check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not epsilon > 0 or not np.isfinite(epsilon):
        raise ConfigError(f'epsilon must be a positive finite number, got {epsilon}')
    return epsilon


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def parity(values: np.ndarray | int) -> np.ndarray:
    """
    Elementwise parity of the set bits of non-negative integers.
    One pass per bit position, so the cost is O(log max(values)).
    """
    remaining = np.array(values, dtype=np.int64, copy=True)
    result = np.zeros_like(remaining)
    while remaining.any():
        result ^= remaining & 1
        remaining >>= 1
    return result


def wilson_interval(count: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    """
    Wilson score interval for a binomial proportion. trials == 0 yields
    the uninformative interval (0, 1).
    """
    if trials <= 0:
        return 0.0, 1.0
    low, high = proportion_confint(count, trials, alpha=alpha, method='wilson')
    return float(low), float(high)


def as_symbols(values, size: int | None = None) -> np.ndarray:
    """
    Coerce a sequence of symbols to a 1-d int64 array, checking
    0 <= symbol < size when size is given.
    """
    symbols = np.asarray(values, dtype=np.int64).reshape(-1)
    if size is not None and symbols.size and (symbols.min() < 0 or symbols.max() >= size):
        raise AlphabetError(f'symbols must lie in [0, {size})')
    return symbols


__all__ = (
    'as_symbols',
    'check_epsilon',
    'is_power_of_two',
    'make_rng',
    'mix_seed',
    'parity',
    'splitmix64',
    'wilson_interval',
)
