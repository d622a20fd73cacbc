import numpy as np

from ...exceptions import AlphabetError, ConfigError
from ...utils import (
    as_symbols,
    check_epsilon,
    is_power_of_two,
    make_rng,
    mix_seed,
    parity,
    splitmix64,
    wilson_interval,
)
from ..base import Base


class TestSeeds(Base):

    def test_splitmix64_reference(self):
        self.assertEqual(splitmix64(0), 16294208416658607535)

    def test_mix_seed_order_matters(self):
        self.assertNotEqual(mix_seed(1, 2), mix_seed(2, 1))
        self.assertEqual(mix_seed(7, 3, 1000, 0), mix_seed(7, 3, 1000, 0))
        self.assertLess(mix_seed(-1), 1 << 64)

    def test_make_rng_reproducible(self):
        first = make_rng(5, 1).integers(0, 1 << 30, size=10)
        second = make_rng(5, 1).integers(0, 1 << 30, size=10)
        other = make_rng(5, 2).integers(0, 1 << 30, size=10)
        np.testing.assert_array_equal(first, second)
        self.assertFalse((first == other).all())


# -----------------------------------------------------------------------


class TestHelpers(Base):

    def test_check_epsilon(self):
        self.assertEqual(check_epsilon(2), 2.0)
        for epsilon in (0, -1, float('inf'), float('nan')):
            with self.assertRaises(ConfigError, msg=f'epsilon={epsilon}'):
                check_epsilon(epsilon)

    def test_is_power_of_two(self):
        for value, expected in ((0, False), (1, True), (2, True), (6, False), (1024, True)):
            self.assertEqual(is_power_of_two(value), expected, msg=f'value={value}')

    def test_parity(self):
        values = np.arange(64)
        expected = [bin(v).count('1') % 2 for v in range(64)]
        self.assertEqual(parity(values).tolist(), expected)
        self.assertEqual(int(parity(7)), 1)

    def test_as_symbols(self):
        self.assertEqual(as_symbols([[1, 2], [3, 0]]).tolist(), [1, 2, 3, 0])
        self.assertEqual(as_symbols([], 3).size, 0)
        for values in ([0, 3], [-1, 0]):
            with self.assertRaises(AlphabetError, msg=f'{values}'):
                as_symbols(values, 3)


# -----------------------------------------------------------------------


class TestWilson(Base):

    def test_contains_estimate(self):
        for count, trials in ((0, 20), (5, 20), (20, 20), (37, 100)):
            low, high = wilson_interval(count, trials)
            self.assertLessEqual(low, count / trials, msg=f'{count}/{trials}')
            self.assertGreaterEqual(high, count / trials, msg=f'{count}/{trials}')
            self.assertGreaterEqual(low, -1e-12)
            self.assertLessEqual(high, 1.0 + 1e-12)

    def test_no_trials(self):
        self.assertEqual(wilson_interval(0, 0), (0.0, 1.0))

    def test_quadrupling_trials_halves_width(self):
        low, high = wilson_interval(10, 40)
        wide = high - low
        low, high = wilson_interval(40, 160)
        ratio = (high - low) / wide
        self.assertGreaterEqual(ratio, 0.45)
        self.assertLessEqual(ratio, 0.55)


__all__ = [
    'TestHelpers',
    'TestSeeds',
    'TestWilson',
]
