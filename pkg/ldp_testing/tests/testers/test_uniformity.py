import math

import numpy as np

from ...distributions import Distribution, paninski, random_theta, uniform
from ...enums import Decision, MechanismKind, TestKind
from ...exceptions import ConfigError, DistributionError, MechanismMismatch
from ...hadamard import hadamard_code, q_star
from ...mechanisms import PrivacyBudget, PrivatizedBatch, simulate_rappor_counts
from ...testers import (
    RapporCounts,
    Verdict,
    hr_gap,
    hr_uniformity_test,
    l2_closeness_test,
    rappor_counts,
    rappor_statistic,
    rappor_uniformity_test,
    raptor_constants,
    raptor_uniformity_test,
)
from ..base import Base


class TestVerdict(Base):

    def test_json(self):
        verdict = Verdict(TestKind.HadamardUniformity, Decision.Uniform, 1.5, 2.0, 100, 8,
                          epsilon=1.0, gamma=0.5, seed=3)
        record = verdict.to_json()
        self.assertEqual(list(record), ['test', 'decision', 'statistic', 'threshold', 'n', 'k',
                                        'epsilon', 'gamma', 'seed'])
        self.assertEqual(record['decision'], 'uniform')
        self.assertEqual(Verdict.from_json(record), verdict)
        self.assertFalse(verdict.rejects)

    def test_counts_range(self):
        with self.assertRaises(DistributionError):
            RapporCounts([0, 11], 10)
        with self.assertRaises(DistributionError):
            RapporCounts([-1, 0], 10)


# -----------------------------------------------------------------------


class TestRapporUniformity(Base):

    budget = PrivacyBudget(1.0)

    def test_counts_from_batch(self):
        batch = PrivatizedBatch(MechanismKind.RAPPOR, 3, 1.0, [[1, 0, 1], [1, 1, 0]])
        counts = rappor_counts(batch)
        self.assertEqual(counts.counts.tolist(), [2, 1, 1])
        self.assertEqual(counts.n, 2)
        with self.assertRaises(MechanismMismatch):
            rappor_counts(PrivatizedBatch(MechanismKind.HR, 3, 1.0, [0]))

    def test_needs_two_users(self):
        with self.assertRaises(DistributionError):
            rappor_statistic(RapporCounts([1, 0], 1), self.budget)

    def test_point_mass_rejected(self):
        verdict = rappor_uniformity_test(RapporCounts([100, 100, 100, 100], 100), self.budget, 0.5)
        self.assertEqual(verdict.decision, Decision.NotUniform)
        self.assertGreater(verdict.statistic, 100 * verdict.threshold)

    def test_expected_statistic(self):
        p = Distribution([0.4, 0.3, 0.2, 0.1])
        n = 2000
        values = [
            rappor_statistic(RapporCounts(
                simulate_rappor_counts(np.bincount(p.sample(n, self.rng), minlength=4),
                                       self.budget, self.rng), n), self.budget)
            for _ in range(400)
        ]
        expected = n * (n - 1) * self.budget.alpha_r ** 2 * ((p.pmf - 0.25) ** 2).sum()
        spread = np.std(values) / math.sqrt(len(values))
        self.assertWithinSigmas(np.mean(values), expected, spread)

    def test_end_to_end(self):
        k, gamma = 16, 0.5
        n = math.ceil(23 * k ** 1.5 / (self.budget.alpha_r ** 2 * gamma ** 2))
        for p, decision in (
            (uniform(k), Decision.Uniform),
            (paninski(k, gamma, random_theta(k, self.rng)), Decision.NotUniform),
        ):
            symbols = p.sample(n, self.rng)
            counts = simulate_rappor_counts(np.bincount(symbols, minlength=k), self.budget, self.rng)
            verdict = rappor_uniformity_test(RapporCounts(counts, n), self.budget, gamma)
            self.assertEqual(verdict.decision, decision, msg=repr(p))

    def test_batch_input(self):
        symbols = np.zeros(20_000, dtype=np.int64)
        batch = PrivatizedBatch.from_samples(MechanismKind.RAPPOR, symbols, 4, self.budget, self.rng)
        verdict = rappor_uniformity_test(batch, self.budget, 0.5)
        self.assertEqual(verdict.test, TestKind.RapporUniformity)
        self.assertEqual(verdict.decision, Decision.NotUniform)


# -----------------------------------------------------------------------


class TestHadamardUniformity(Base):

    def test_gap(self):
        budget = PrivacyBudget(1.0)
        self.assertClose(hr_gap(3, budget, 0.5), 2 * budget.alpha_h * 0.5 / math.sqrt(12))
        self.assertEqual(hadamard_code(16).K, 32)

    def test_end_to_end(self):
        k, gamma = 16, 0.5
        budget = PrivacyBudget(1.0)
        n = 4 * math.ceil(32 * k ** 1.5 / gamma ** 2)
        for p, decision in (
            (uniform(k), Decision.Uniform),
            (paninski(k, gamma, random_theta(k, self.rng)), Decision.NotUniform),
        ):
            batch = PrivatizedBatch.from_samples(MechanismKind.HR, p.sample(n, self.rng), k,
                                                 budget, self.rng)
            verdict = hr_uniformity_test(batch, budget, gamma, self.rng)
            self.assertEqual(verdict.decision, decision, msg=repr(p))
            self.assertEqual(verdict.n, n)

    def test_swapped_sides(self):
        k, gamma, n = 16, 0.5, 20_000
        budget = PrivacyBudget(1.0)
        code = hadamard_code(k)
        gap = hr_gap(k, budget, gamma)
        for p in (uniform(k), paninski(k, gamma, random_theta(k, self.rng))):
            batch = PrivatizedBatch.from_samples(MechanismKind.HR, p.sample(n, self.rng), k,
                                                 budget, self.rng)
            reference = q_star(k, budget.epsilon, code).sample(n, self.rng)
            verdict = l2_closeness_test(batch.messages, reference, gap, None, size=code.K,
                                        poissonize=False)
            swapped = l2_closeness_test(reference, batch.messages, gap, None, size=code.K,
                                        poissonize=False)
            self.assertEqual(swapped.statistic, verdict.statistic, msg=repr(p))
            self.assertEqual(swapped.decision, verdict.decision, msg=repr(p))

    def test_needs_hr_batch(self):
        with self.assertRaises(MechanismMismatch):
            hr_uniformity_test(PrivatizedBatch(MechanismKind.RR, 4, 1.0, [0, 1]),
                               PrivacyBudget(1.0), 0.5, self.rng)


# -----------------------------------------------------------------------


class TestRaptorUniformity(Base):

    def test_constants(self):
        delta, gamma_prime = raptor_constants(16, 0.5, 0.05)
        self.assertClose(delta, 0.05 / 2.1)
        self.assertClose(gamma_prime, 0.5 / math.sqrt(80))

    def test_end_to_end(self):
        k, gamma = 16, 0.5
        budget = PrivacyBudget(1.0)
        n = 48 * 37_500
        for p, decision in (
            (uniform(k), Decision.Uniform),
            (paninski(k, gamma, random_theta(k, self.rng)), Decision.NotUniform),
        ):
            verdict = raptor_uniformity_test(p.sample(n, self.rng), k, budget, gamma, self.rng)
            self.assertEqual(verdict.decision, decision, msg=repr(p))
            self.assertGreaterEqual(verdict.statistic, 0.0)
            self.assertLessEqual(verdict.statistic, 1.0)

    def test_parallel_point_mass(self):
        symbols = np.zeros(20_000, dtype=np.int64)
        verdict = raptor_uniformity_test(symbols, 4, PrivacyBudget(8.0), 0.5, self.rng,
                                         repetitions=4, parallel=True)
        self.assertEqual(verdict.decision, Decision.NotUniform)
        self.assertEqual(verdict.statistic, 0.0)

    def test_majority_point_mass(self):
        symbols = np.zeros(40_000, dtype=np.int64)
        verdict = raptor_uniformity_test(symbols, 4, PrivacyBudget(4.0), 0.5, self.rng,
                                         repetitions=4, majority_batches=3)
        self.assertEqual(verdict.decision, Decision.NotUniform)

    def test_invalid(self):
        budget = PrivacyBudget(1.0)
        with self.assertRaises(ConfigError):
            raptor_uniformity_test(np.zeros(10, dtype=np.int64), 4, budget, 0.5, self.rng, repetitions=3)
        with self.assertRaises(ConfigError):
            raptor_uniformity_test([0], 4, budget, 0.5, self.rng, repetitions=0)
        with self.assertRaises(DistributionError):
            raptor_uniformity_test([], 4, budget, 0.5, self.rng, repetitions=4)


__all__ = [
    'TestHadamardUniformity',
    'TestRapporUniformity',
    'TestRaptorUniformity',
    'TestVerdict',
]
