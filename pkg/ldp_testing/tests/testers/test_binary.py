import math

import numpy as np

from ...enums import Decision, MechanismKind
from ...exceptions import AlphabetError, ConfigError, DistributionError, MechanismMismatch
from ...mechanisms import PrivacyBudget, PrivatizedBatch, rr_bits
from ...testers import bias_estimate, bias_test, binary_uniformity_test, required_bias_samples
from ..base import Base


class TestBiasEstimate(Base):

    def test_known_value(self):
        self.assertClose(bias_estimate([1, 0], PrivacyBudget(math.log(3))), 0.5)

    def test_not_clamped(self):
        budget = PrivacyBudget(math.log(3))
        self.assertClose(bias_estimate([1, 1, 1], budget), 1.5)
        self.assertClose(bias_estimate([0], budget), -0.5)

    def test_unbiased(self):
        budget = PrivacyBudget(1.0)
        n = 200_000
        truth = (self.rng.random(n) < 0.3).astype(np.int64)
        estimate = bias_estimate(rr_bits(truth, budget, self.rng), budget)
        self.assertWithinSigmas(estimate, 0.3, budget.inverse_signal * 0.5 / math.sqrt(n))

    def test_empty(self):
        with self.assertRaises(DistributionError):
            bias_estimate([], PrivacyBudget(1.0))

    def test_required_samples(self):
        self.assertEqual(required_bias_samples(PrivacyBudget(math.log(3)), 0.1, 0.05), 11805)


# -----------------------------------------------------------------------


class TestBiasTest(Base):

    budget = PrivacyBudget(1.0)

    def bits(self, rho, n):
        truth = (self.rng.random(n) < rho).astype(np.int64)
        return rr_bits(truth, self.budget, self.rng)

    def test_decisions(self):
        n = required_bias_samples(self.budget, 0.1, 0.01)
        for rho, decision in ((0.5, Decision.Unbiased), (0.6, Decision.Biased), (0.35, Decision.Biased)):
            verdict = bias_test(self.bits(rho, n), self.budget, 0.1, 0.01)
            self.assertEqual(verdict.decision, decision, msg=f'rho={rho}')
            self.assertFalse(verdict.insufficient_samples, msg=f'rho={rho}')
            self.assertEqual(verdict.threshold, 0.05)

    def test_majority_batches(self):
        n = required_bias_samples(self.budget, 0.1, 0.01)
        for rho, decision in ((0.5, Decision.Unbiased), (0.6, Decision.Biased)):
            verdict = bias_test(self.bits(rho, n), self.budget, 0.1, 0.01, majority_batches=5)
            self.assertEqual(verdict.decision, decision, msg=f'rho={rho}')
            self.assertEqual(verdict.threshold, 0.5)
            self.assertIn(verdict.statistic, (0.0, 0.2, 0.4, 0.6, 0.8, 1.0))

    def test_insufficient_flag(self):
        verdict = bias_test(self.bits(0.5, 100), self.budget, 0.1, 0.01)
        self.assertTrue(verdict.insufficient_samples)
        self.assertEqual(verdict.n, 100)

    def test_invalid(self):
        for delta in (0.0, 0.5, 0.7):
            with self.assertRaises(ConfigError, msg=f'delta={delta}'):
                bias_test([0, 1], self.budget, 0.1, delta)
        with self.assertRaises(ConfigError):
            bias_test([0, 1], self.budget, 0.1, 0.1, majority_batches=3)


# -----------------------------------------------------------------------


class TestBinaryUniformity(Base):

    def test_decisions(self):
        budget = PrivacyBudget(1.0)
        for rho, decision in ((0.5, Decision.Uniform), (0.8, Decision.NotUniform),
                              (0.15, Decision.NotUniform)):
            samples = (self.rng.random(5000) < rho).astype(np.int64)
            batch = PrivatizedBatch.from_samples(MechanismKind.RR, samples, 2, budget, self.rng)
            verdict = binary_uniformity_test(batch, 0.2)
            self.assertEqual(verdict.decision, decision, msg=f'rho={rho}')
            self.assertEqual(verdict.rejects, decision == Decision.NotUniform, msg=f'rho={rho}')

    def test_needs_binary_rr(self):
        with self.assertRaises(AlphabetError):
            binary_uniformity_test(PrivatizedBatch(MechanismKind.RR, 3, 1.0, [0, 2]), 0.2)
        with self.assertRaises(MechanismMismatch):
            binary_uniformity_test(PrivatizedBatch(MechanismKind.HR, 2, 1.0, [0, 3]), 0.2)


__all__ = [
    'TestBiasEstimate',
    'TestBiasTest',
    'TestBinaryUniformity',
]
