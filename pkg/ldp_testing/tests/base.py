import math
import unittest

import numpy as np
import yaml
try:
    from yaml import CSafeLoader as SafeLoader
except ImportError:
    from yaml import SafeLoader

from ..settings import LTCache, ROOT
from ..utils import make_rng


class Base(unittest.TestCase):
    """
    Shared helpers. Every test method gets a fresh package cache and its
    own random stream, seeded from the class seed and the method name so
    reordering the tests does not change what each one draws.
    """

    fixture_files = []
    seed = 20240601

    def setUp(self):
        LTCache.clear()
        self.rng = make_rng(self.seed, *self._testMethodName.encode())

    def stream(self, *words: int) -> np.random.Generator:
        return make_rng(self.seed, *words)

    def assertClose(self, observed, expected, tolerance=1e-10, msg=None):
        """|observed - expected| <= tolerance * max(1, |expected|)"""
        scale = max(1.0, abs(expected))
        if abs(observed - expected) > tolerance * scale:
            self.fail(msg or f'{observed!r} != {expected!r} within {tolerance} (scale {scale})')

    def assertWithinSigmas(self, observed, expected, sigma, sigmas=5, msg=None):
        if abs(observed - expected) > sigmas * sigma:
            self.fail(
                msg or f'{observed!r} is {abs(observed - expected) / sigma:.2f} sigma from {expected!r}'
            )

    def assertMeanNearZero(self, values, sigmas=5, msg=None):
        values = np.asarray(values, dtype=np.float64)
        spread = float(values.std(ddof=1)) / math.sqrt(values.size)
        self.assertWithinSigmas(float(values.mean()), 0.0, spread, sigmas, msg)

    def load_fixtures(self):
        fixtures = []
        for ffile in self.fixture_files:
            with open(f'{ROOT}/{ffile}', 'r') as r:
                fixtures.extend(yaml.load(r, SafeLoader))
        return fixtures


if __name__ == '__main__':
    unittest.main()
