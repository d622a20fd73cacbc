import json

import numpy as np

from ...distributions import (
    Distribution,
    JointDistribution,
    balanced_paninski_joint,
    paninski,
    product,
    uniform,
    uniform_joint,
)
from ...enums import Decision, MechanismKind, TestKind
from ...exceptions import (
    AlphabetError,
    ConfigError,
    ContractViolation,
    DistributionError,
    MechanismMismatch,
)
from ...hadamard import pushforward_hr
from ...mechanisms import PrivacyBudget, PrivatizedBatch, PublicCoin
from ...testers import (
    LearnedProduct,
    add1_estimate,
    adk_chi2_test,
    binary_independence_estimate,
    binary_independence_test,
    hr_independence_test,
    learn_product,
    learning_samples,
    learning_target,
    pair_transform_samples,
    raptor_independence_test,
)
from ...utils import make_rng
from ...yaml_loader import default_calibration
from ..base import Base


def diagonal_joint(k):
    """X1 = X2, uniform"""
    return JointDistribution(np.eye(k) / k)


class TestLearning(Base):

    def test_pair_transform(self):
        pairs = np.array([[0, 1], [2, 3], [4, 5], [6, 7], [8, 9], [10, 11]])
        product, held_out = pair_transform_samples(pairs, 2)
        self.assertEqual(product.tolist(), [[0, 3], [4, 7]])
        self.assertEqual(held_out.tolist(), [[8, 9], [10, 11]])

    def test_pair_transform_too_few(self):
        with self.assertRaises(ConfigError):
            pair_transform_samples(np.zeros((4, 2)), 2)
        with self.assertRaises(AlphabetError):
            pair_transform_samples(np.zeros(6), 1)

    def test_add1(self):
        np.testing.assert_allclose(add1_estimate([3, 1, 0]).pmf, [4 / 7, 2 / 7, 1 / 7])
        np.testing.assert_allclose(add1_estimate([0, 0], n=0).pmf, [0.5, 0.5])
        with self.assertRaises(DistributionError):
            add1_estimate([3, 1], n=5)

    def test_floor(self):
        pairs = np.zeros((1000, 2), dtype=np.int64)
        learned = learn_product(pairs, PrivacyBudget(1.0), 0.5, 4)
        self.assertTrue(learned.floored)
        self.assertGreaterEqual(learned.min_mass(), 1 / (50 * 64))
        self.assertClose(learned.min_mass(), 0.000458, tolerance=1e-5)
        self.assertEqual(learned.K, 8)
        self.assertEqual(set(json.loads(learned.to_json())), {'q1', 'q2', 'floored', 'target'})

    def test_balanced_sample_not_floored(self):
        pairs = self.rng.integers(0, 8, size=(5000, 2))
        learned = learn_product(pairs, PrivacyBudget(1.0), 0.5, 4)
        self.assertFalse(learned.floored)
        np.testing.assert_allclose(learned.joint().pmf.sum(), 1.0)

    def test_targets(self):
        budget = PrivacyBudget(1.0)
        alpha = budget.split(2).alpha_h
        target = learning_target(4, budget, 0.4)
        self.assertClose(target, alpha ** 4 * 0.16 / 16)
        self.assertAlmostEqual(learning_samples(4, budget, 0.4, 6), 24 / target, delta=1)
        learned = learn_product(self.rng.integers(0, 8, size=(100, 2)), budget, 0.4, 4)
        self.assertClose(learned.target, target)
        self.assertClose(learned.marginal_target, target / 3)
        self.assertIsNone(LearnedProduct(uniform(2), uniform(2)).marginal_target)

    def test_learning_rate(self):
        k, gamma, runs = 4, 0.4, 20
        budget = PrivacyBudget(1.0)
        epsilon = budget.split(2).epsilon
        constant = default_calibration()['hr_independence']['learn_constant']
        n1 = learning_samples(k, budget, gamma, constant)
        first = pushforward_hr(paninski(k, gamma, (1, -1)), epsilon)
        second = pushforward_hr(uniform(k), epsilon)
        truth = product(first, second)
        hits = 0
        for _ in range(runs):
            pairs = np.stack((first.sample(n1, self.rng), second.sample(n1, self.rng)), axis=1)
            learned = learn_product(pairs, budget, gamma, k)
            hits += learned.chi_square_from(truth) <= learned.target
        self.assertGreaterEqual(hits, 0.8 * runs)


# -----------------------------------------------------------------------


class TestChiSquare(Base):

    def test_contract(self):
        skewed = Distribution([0.999] + [0.001 / 7] * 7)
        learned = LearnedProduct(skewed, skewed)
        with self.assertRaises(ContractViolation):
            adk_chi2_test(np.zeros((10, 2), dtype=np.int64), learned, 0.1, None)

    def test_point_mass_far(self):
        learned = LearnedProduct(Distribution([0.5, 0.5]), Distribution([0.5, 0.5]))
        verdict = adk_chi2_test(np.zeros((1000, 2), dtype=np.int64), learned, 1.0, None)
        self.assertEqual(verdict.test, TestKind.ChiSquare)
        self.assertEqual(verdict.n, 900)
        self.assertClose(verdict.statistic, (675 ** 2 - 900) / 225 + 675)
        self.assertEqual(verdict.decision, Decision.Far)

    def test_matching_product_close(self):
        learned = LearnedProduct(Distribution([0.5, 0.5]), Distribution([0.5, 0.5]))
        samples = self.rng.integers(0, 2, size=(1000, 2))
        verdict = adk_chi2_test(samples, learned, 0.5, self.rng)
        self.assertEqual(verdict.decision, Decision.Close)

    def test_empty(self):
        learned = LearnedProduct(Distribution([0.5, 0.5]), Distribution([0.5, 0.5]))
        with self.assertRaises(DistributionError):
            adk_chi2_test(np.zeros((0, 2), dtype=np.int64), learned, 0.5, None)

    def test_marginal_alphabets(self):
        with self.assertRaises(AlphabetError):
            LearnedProduct(Distribution([0.5, 0.5]), Distribution([1.0]))

    def test_relabeling_invariance(self):
        K = 8
        q1 = Distribution(0.5 * self.rng.dirichlet(np.ones(K)) + 0.5 / K)
        q2 = Distribution(0.5 * self.rng.dirichlet(np.ones(K)) + 0.5 / K)
        samples = self.rng.integers(0, K, size=(5000, 2))
        first, second = self.rng.permutation(K), self.rng.permutation(K)
        relabeled_q1, relabeled_q2 = np.empty(K), np.empty(K)
        relabeled_q1[first] = q1.pmf
        relabeled_q2[second] = q2.pmf
        relabeled = np.stack((first[samples[:, 0]], second[samples[:, 1]]), axis=1)

        verdict = adk_chi2_test(samples, LearnedProduct(q1, q2), 0.01, make_rng(5))
        moved = adk_chi2_test(relabeled,
                              LearnedProduct(Distribution(relabeled_q1), Distribution(relabeled_q2)),
                              0.01, make_rng(5))
        self.assertClose(moved.statistic, verdict.statistic, tolerance=1e-8)
        self.assertEqual(moved.decision, verdict.decision)
        self.assertEqual(moved.n, verdict.n)


# -----------------------------------------------------------------------


class TestHadamardIndependence(Base):

    def test_end_to_end(self):
        k, gamma, n = 4, 0.45, 200_000
        budget = PrivacyBudget(4.0)
        for joint, decision in (
            (uniform_joint(k), Decision.Independent),
            (balanced_paninski_joint(k, gamma), Decision.NotIndependent),
        ):
            batch = PrivatizedBatch.from_samples(MechanismKind.HRPair, joint.sample(n, self.rng), k,
                                                 budget, self.rng)
            verdict = hr_independence_test(batch, budget, gamma, self.rng)
            self.assertEqual(verdict.decision, decision, msg=repr(joint))
            self.assertEqual(verdict.test, TestKind.HadamardIndependence)

    def test_swapped_coordinates(self):
        k, gamma, n = 4, 0.45, 200_000
        budget = PrivacyBudget(4.0)
        for joint, decision in (
            (uniform_joint(k), Decision.Independent),
            (balanced_paninski_joint(k, gamma), Decision.NotIndependent),
        ):
            batch = PrivatizedBatch.from_samples(MechanismKind.HRPair, joint.sample(n, self.rng), k,
                                                 budget, self.rng)
            swapped = PrivatizedBatch(MechanismKind.HRPair, k, budget.epsilon,
                                      np.ascontiguousarray(batch.messages[:, ::-1]))
            for reports in (batch, swapped):
                verdict = hr_independence_test(reports, budget, gamma, self.rng)
                self.assertEqual(verdict.decision, decision, msg=repr(joint))

    def test_explicit_split(self):
        batch = PrivatizedBatch.from_samples(MechanismKind.HRPair, self.rng.integers(0, 4, (100, 2)),
                                             4, PrivacyBudget(1.0), self.rng)
        with self.assertRaises(ConfigError):
            hr_independence_test(batch, PrivacyBudget(1.0), 0.5, self.rng, n1=50)

    def test_needs_pair_batch(self):
        with self.assertRaises(MechanismMismatch):
            hr_independence_test(PrivatizedBatch(MechanismKind.HR, 4, 1.0, [0, 1]),
                                 PrivacyBudget(1.0), 0.5, self.rng)


# -----------------------------------------------------------------------


class TestBinaryIndependence(Base):

    budget = PrivacyBudget(3.0)
    coin = PublicCoin.from_members([[1], [1]], 2)

    def batch(self, pairs):
        return PrivatizedBatch.from_samples(MechanismKind.RAPTOR2, pairs, 2, self.budget,
                                            self.rng, self.coin)

    def test_estimates(self):
        x = self.rng.integers(0, 2, size=50_000)
        joint, first, second = binary_independence_estimate(self.batch(np.stack((x, x), axis=1)),
                                                            self.budget)
        sigma = self.budget.split(3).inverse_signal * 0.5 / np.sqrt(x.size)
        self.assertWithinSigmas(joint, 0.5, sigma)
        self.assertWithinSigmas(first, 0.5, sigma)
        self.assertWithinSigmas(second, 0.5, sigma)

    def test_decisions(self):
        x = self.rng.integers(0, 2, size=50_000)
        y = self.rng.integers(0, 2, size=50_000)
        for pairs, decision in (
            (np.stack((x, y), axis=1), Decision.Independent),
            (np.stack((x, x), axis=1), Decision.NotIndependent),
            (np.stack((x, 1 - x), axis=1), Decision.NotIndependent),
        ):
            verdict = binary_independence_test(self.batch(pairs), self.budget, 0.5)
            self.assertEqual(verdict.decision, decision)
            self.assertEqual(verdict.threshold, 0.125)

    def test_needs_singleton_coins(self):
        coin = PublicCoin.from_members([[0], [1]], 2)
        batch = PrivatizedBatch.from_samples(MechanismKind.RAPTOR2, [[0, 1]], 2, self.budget,
                                             self.rng, coin)
        with self.assertRaises(AlphabetError):
            binary_independence_test(batch, self.budget, 0.5)


# -----------------------------------------------------------------------


class TestRaptorIndependence(Base):

    def test_end_to_end(self):
        k, gamma = 4, 0.45
        budget = PrivacyBudget(3.0)
        n = 16 * 20_000
        for joint, decision in (
            (uniform_joint(k), Decision.Independent),
            (diagonal_joint(k), Decision.NotIndependent),
        ):
            verdict = raptor_independence_test(joint.sample(n, self.rng), k, budget, gamma,
                                               self.rng, repetitions=16)
            self.assertEqual(verdict.decision, decision, msg=repr(joint))
            self.assertEqual(verdict.threshold, 0.05)

    def test_invalid(self):
        budget = PrivacyBudget(1.0)
        with self.assertRaises(ConfigError):
            raptor_independence_test(np.zeros((10, 2), dtype=np.int64), 4, budget, 0.5, self.rng,
                                     repetitions=3)
        with self.assertRaises(DistributionError):
            raptor_independence_test(np.zeros((0, 2), dtype=np.int64), 4, budget, 0.5, self.rng)
        with self.assertRaises(AlphabetError):
            raptor_independence_test(np.full((4, 2), 4), 4, budget, 0.5, self.rng, repetitions=1)


__all__ = [
    'TestBinaryIndependence',
    'TestChiSquare',
    'TestHadamardIndependence',
    'TestLearning',
    'TestRaptorIndependence',
]
