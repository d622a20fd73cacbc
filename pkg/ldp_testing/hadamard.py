"""
Sylvester-Hadamard arithmetic for Hadamard Response.

Entry (r, c) of the K x K Sylvester matrix is (-1)^popcount(r & c), so the
code set C_x of input x, the columns where row phi(x) is +1, is a parity test
and never needs the matrix itself.
"""
import logging

import numpy as np

from .distributions import Distribution, JointDistribution
from .exceptions import AlphabetError
from .settings import LTCache
from .utils import check_epsilon, is_power_of_two, parity

logger = logging.getLogger(__name__)

# rows x columns evaluated per block when scanning the code
SCAN_BLOCK = 1 << 22


def output_size(max_row: int) -> int:
    """
    Smallest power of two strictly greater than max_row.

    >>> output_size(3), output_size(4), output_size(7)
    (4, 8, 8)
    """
    return 1 << int(max_row).bit_length()


def hr_alpha(epsilon: float) -> float:
    """(e^eps - 1) / (e^eps + 1)"""
    return float(np.tanh(check_epsilon(epsilon) / 2))


def _check_order(K: int) -> None:
    if not is_power_of_two(K):
        raise AlphabetError(f'Hadamard order must be a power of two, got {K}')


def hadamard_entry(K: int, r: int, c: int) -> int:
    """
    >>> hadamard_entry(4, 3, 3), hadamard_entry(4, 2, 3)
    (1, -1)
    """
    _check_order(K)
    if not (0 <= r < K and 0 <= c < K):
        raise AlphabetError(f'row and column must lie in [0, {K})')
    return -1 if (r & c).bit_count() & 1 else 1


def hadamard_matrix(K: int) -> np.ndarray:
    """Full +-1 Sylvester matrix; only meant for small K"""
    _check_order(K)
    index = np.arange(K)
    return 1 - 2 * parity(np.bitwise_and.outer(index, index))


def fwht(values) -> np.ndarray:
    """
    Unnormalized Walsh-Hadamard transform in Sylvester order.
    Applying it twice multiplies by the length.

    >>> fwht([1, 0, 0, 0]).tolist()
    [1.0, 1.0, 1.0, 1.0]
    """
    out = np.array(values, dtype=np.float64).reshape(-1)
    _check_order(out.size)
    half = 1
    while half < out.size:
        blocks = out.reshape(-1, 2, half)
        upper = blocks[:, 0, :].copy()
        blocks[:, 0, :] += blocks[:, 1, :]
        blocks[:, 1, :] = upper - blocks[:, 1, :]
        half *= 2
    return out


class HadamardCode:
    """
    Code sets C_x = {z : popcount(z & phi(x)) even} over the output alphabet
    [K], with phi(x) = x + offset.

    offset 1 skips the all-ones row 0 and gives K = 2^ceil(log2(k + 1)).
    offset 2 aligns each input pair (2i, 2i + 1) to rows differing only in
    the lowest bit.
    """

    __slots__ = ('k', 'K', 'offset', 'dz')

    def __init__(self, k: int, offset: int = 1) -> None:
        if k < 1:
            raise AlphabetError('alphabet must be non-empty')
        if offset < 1:
            raise AlphabetError('phi must avoid row 0: offset must be at least 1')
        self.k = int(k)
        self.offset = int(offset)
        self.K = output_size(self.k + self.offset - 1)
        # |D_z| = #{x : z in C_x}
        dz = ((self.k + self.signed_sums(np.ones(self.k))) / 2).round().astype(np.int64)
        dz.setflags(write=False)
        self.dz = dz

    @property
    def rows(self) -> np.ndarray:
        """phi over the whole input alphabet"""
        return np.arange(self.k, dtype=np.int64) + self.offset

    def phi(self, x):
        return np.asarray(x, dtype=np.int64) + self.offset

    def _check_input(self, x) -> None:
        if np.any((np.asarray(x) < 0) | (np.asarray(x) >= self.k)):
            raise AlphabetError(f'input symbols must lie in [0, {self.k})')

    def _check_output(self, z) -> None:
        if np.any((np.asarray(z) < 0) | (np.asarray(z) >= self.K)):
            raise AlphabetError(f'output symbols must lie in [0, {self.K})')

    def signed_sums(self, weights) -> np.ndarray:
        """
        sum_x weights[x] * (-1)^popcount(z & phi(x)) for every z in [K],
        scanned in blocks of output symbols.
        """
        weights = np.asarray(weights, dtype=np.float64)
        rows = self.rows
        step = max(1, SCAN_BLOCK // self.k)
        out = np.empty(self.K)
        for start in range(0, self.K, step):
            z = np.arange(start, min(start + step, self.K), dtype=np.int64)
            signs = 1 - 2 * parity(np.bitwise_and.outer(z, rows))
            out[start:start + z.size] = signs @ weights
        return out

    def sign_matrix(self) -> np.ndarray:
        """k x K matrix of (-1)^popcount(z & phi(x))"""
        columns = np.arange(self.K, dtype=np.int64)
        return 1 - 2 * parity(np.bitwise_and.outer(self.rows, columns))

    def membership(self, z, x):
        """z in C_x, elementwise"""
        self._check_output(z)
        self._check_input(x)
        inside = parity(np.bitwise_and(np.asarray(z, dtype=np.int64), self.phi(x))) == 0
        return bool(inside) if inside.ndim == 0 else inside

    def dz_size(self, z: int) -> int:
        self._check_output(z)
        return int(self.dz[z])

    def channel(self, epsilon: float) -> np.ndarray:
        """W(z|x) = (1 + alpha_H chi_phi(x)(z)) / K as a k x K array"""
        return (1 + hr_alpha(epsilon) * self.sign_matrix()) / self.K

    def __repr__(self) -> str:
        return f'HadamardCode(k={self.k}, K={self.K}, offset={self.offset})'


def hadamard_code(k: int, offset: int = 1) -> HadamardCode:
    """Shared, memoized code for alphabet k"""
    codes = LTCache['hadamard_codes']
    if (code := codes.get((k, offset))) is None:
        logger.debug('building Hadamard code k=%s offset=%s', k, offset)
        code = HadamardCode(k, offset)
        codes[(k, offset)] = code
    return code


def membership(code: HadamardCode, z, x):
    return code.membership(z, x)


def dz_size(code: HadamardCode, z: int) -> int:
    return code.dz_size(z)


def q_star(k: int, epsilon: float, code: HadamardCode | None = None) -> Distribution:
    """
    HR output distribution when the input is uniform over [k]:
    q*(z) = 1/K + (alpha_H/K)(2|D_z|/k - 1).
    """
    code = code or hadamard_code(k)
    alpha = hr_alpha(epsilon)
    return Distribution(1 / code.K + alpha / code.K * (2 * code.dz / code.k - 1))


def pushforward_hr(p: Distribution, epsilon: float, code: HadamardCode | None = None) -> Distribution:
    """
    Exact HR output distribution for inputs drawn from p:
    q(z) = 1/K + (alpha_H/K)(2 p(D_z) - 1).
    """
    code = code or hadamard_code(p.k)
    if code.k != p.k:
        raise AlphabetError(f'code alphabet {code.k} != distribution alphabet {p.k}')
    alpha = hr_alpha(epsilon)
    # 2 p(D_z) - 1 = sum_x p(x) chi_phi(x)(z)
    return Distribution(1 / code.K + alpha / code.K * code.signed_sums(p.pmf))


def walsh_pushforward(p: Distribution, epsilon: float, code: HadamardCode | None = None) -> Distribution:
    """pushforward_hr evaluated through one fwht of p placed on the code rows"""
    code = code or hadamard_code(p.k)
    if code.k != p.k:
        raise AlphabetError(f'code alphabet {code.k} != distribution alphabet {p.k}')
    spread = np.zeros(code.K)
    spread[code.rows] = p.pmf
    return Distribution(1 / code.K + hr_alpha(epsilon) / code.K * fwht(spread))


def pushforward_T(p: JointDistribution, epsilon: float,
                  code: HadamardCode | None = None) -> JointDistribution:
    """
    Law of (Z1, Z2) when each coordinate of (X1, X2) ~ p goes through HR
    independently: W^T P W.
    """
    code = code or hadamard_code(p.k)
    if code.k != p.k:
        raise AlphabetError(f'code alphabet {code.k} != distribution alphabet {p.k}')
    channel = code.channel(epsilon)
    return JointDistribution(channel.T @ p.pmf @ channel)


__all__ = (
    'HadamardCode',
    'dz_size',
    'fwht',
    'hadamard_code',
    'hadamard_entry',
    'hadamard_matrix',
    'hr_alpha',
    'membership',
    'output_size',
    'pushforward_T',
    'pushforward_hr',
    'q_star',
    'walsh_pushforward',
)
