import math

import numpy as np

from ...enums import TestKind
from ...exceptions import ConfigError
from ...harness import (
    ExperimentConfig,
    default_sample_size,
    error_rates,
    evaluate_point,
    run_test,
    run_trial,
    sample_complexity_curve,
    sample_constant,
    scaling_slope,
    trial_seed,
)
from ...harness.runner import _instance
from ...mechanisms import PrivacyBudget
from ...testers import learning_samples, required_bias_samples
from ..base import Base


def binary_config(**overrides):
    record = {'test': 'binary-uniformity', 'k': 2, 'epsilon': 1.0, 'gamma': 0.2,
              'n': [2000], 'trials': 6, 'seed': 11}
    record.update(overrides)
    return ExperimentConfig.from_json(record)


class TestSampleSizes(Base):

    def test_default_sample_size(self):
        for record, expected in (
            ({'test': 'hr-uniformity', 'k': 16, 'epsilon': 1, 'gamma': 0.5}, 8192),
            ({'test': 'raptor-independence', 'k': 4, 'epsilon': 1, 'gamma': 0.5}, 2048000),
            ({'test': 'hr-independence', 'k': 4, 'epsilon': 1, 'gamma': 0.5}, 2048000),
            ({'test': 'hr-independence', 'k': 4, 'epsilon': 2, 'gamma': 0.5},
             4 * learning_samples(4, PrivacyBudget(2), 0.5, 6)),
            ({'test': 'binary-uniformity', 'k': 2, 'epsilon': 1, 'gamma': 0.2},
             required_bias_samples(PrivacyBudget(1), 0.2, 1 / 3)),
        ):
            config = ExperimentConfig.from_json(record)
            self.assertEqual(default_sample_size(config), expected, msg=f'{record}')

    def test_whole_repetitions(self):
        config = ExperimentConfig.from_json({'test': 'raptor-uniformity', 'k': 16, 'epsilon': 1,
                                             'gamma': 0.5})
        n = default_sample_size(config)
        self.assertEqual(n % 48, 0)
        self.assertEqual(n, 48 * math.ceil(448000 / 48))

        parallel = ExperimentConfig.from_json({
            'test': 'raptor-uniformity', 'k': 16, 'epsilon': 1, 'gamma': 0.5,
            'calibration': {'raptor_uniformity': {'parallel': True}},
        })
        self.assertEqual(default_sample_size(parallel), 448000)

    def test_rappor(self):
        config = ExperimentConfig.from_json({'test': 'rappor-uniformity', 'k': 16, 'epsilon': 1,
                                             'gamma': 0.5})
        alpha = PrivacyBudget(1).alpha_r
        self.assertEqual(default_sample_size(config), math.ceil(23 * 64 / (alpha ** 2 * 0.25)))

    def test_sample_constant(self):
        for record in (
            {'test': 'hr-uniformity', 'k': 16, 'epsilon': 1, 'gamma': 0.5},
            {'test': 'hr-independence', 'k': 4, 'epsilon': 1, 'gamma': 0.5},
            {'test': 'raptor-independence', 'k': 4, 'epsilon': 1, 'gamma': 0.5},
        ):
            config = ExperimentConfig.from_json(record)
            self.assertClose(sample_constant(config, default_sample_size(config)),
                             config.section['sample_constant'], msg=f'{record}')
        with self.assertRaises(ConfigError):
            sample_constant(binary_config(), 1000)

    def test_scaling_slope(self):
        self.assertClose(scaling_slope([(16, 64), (64, 512), (256, 4096)]), 1.5)
        self.assertClose(scaling_slope([(4, 100), (8, 100)]), 0.0, tolerance=1e-9)
        with self.assertRaises(ConfigError):
            scaling_slope([(16, 100)])


# -----------------------------------------------------------------------


class TestTrials(Base):

    def test_run_test_rejects_building_blocks(self):
        with self.assertRaises(ConfigError):
            run_test(TestKind.BiasTest, [0, 1, 1], 2, PrivacyBudget(1), 0.2, self.rng, {})

    def test_run_test_needs_pairs(self):
        config = ExperimentConfig.from_json({'test': 'hr-independence', 'k': 4, 'epsilon': 1,
                                             'gamma': 0.5})
        with self.assertRaises(ConfigError):
            run_test(TestKind.HadamardIndependence, np.zeros(100, dtype=np.int64), 4,
                     PrivacyBudget(1), 0.5, self.rng, config.calibration)

    def test_trial_seed(self):
        config = binary_config()
        seeds = {trial_seed(config, index, n, alternative)
                 for index in range(5) for n in (100, 200) for alternative in (False, True)}
        self.assertEqual(len(seeds), 20)
        self.assertEqual(trial_seed(config, 3, 100, True), trial_seed(config, 3, 100, True))
        self.assertNotEqual(trial_seed(config, 3, 100, True),
                            trial_seed(binary_config(seed=12), 3, 100, True))

    def test_run_trial_deterministic(self):
        config = binary_config()
        for alternative in (False, True):
            first = run_trial(config, 4, alternative=alternative)
            self.assertEqual(first, run_trial(config, 4, alternative=alternative))
            self.assertEqual(first.seed, trial_seed(config, 4, 2000, alternative))
            self.assertEqual(first.n, 2000)

    def test_fixed_theta(self):
        config = ExperimentConfig.from_json({'test': 'hr-uniformity', 'k': 16, 'epsilon': 1,
                                             'gamma': 0.5, 'fixed_theta': True, 'seed': 5})
        pinned = _instance(config, True)
        self.assertFalse(pinned.is_random)
        self.assertEqual(len(pinned.theta), 8)
        self.assertEqual(pinned, _instance(config, True))
        self.assertEqual(str(_instance(config, False)), 'uniform')
        self.assertTrue(_instance(config.with_grid([100]), True) == pinned)


# -----------------------------------------------------------------------


class TestExperiments(Base):

    def test_evaluate_point(self):
        point = evaluate_point(binary_config(n=[20000]), 20000)
        self.assertEqual(point.trials, 6)
        self.assertEqual(point.type1_errors, 0)
        self.assertEqual(point.type2_errors, 0)
        self.assertEqual(len(point.null_seeds), 6)
        self.assertEqual(len(set(point.null_seeds) | set(point.alternative_seeds)), 12)

    def test_workers_agree(self):
        config = binary_config(n=[300], trials=8)
        self.assertEqual(evaluate_point(config, 300, workers=2), evaluate_point(config, 300))

    def test_error_rates(self):
        config = binary_config(n=[200, 20000], trials=5)
        report = error_rates(config)
        self.assertEqual([p.n for p in report.points], [200, 20000])
        self.assertEqual(report.config, config.to_json())
        self.assertIsNotNone(report.minimal_n)
        self.assertEqual(report, error_rates(config))

    def test_curve(self):
        config = binary_config(n=[50, 200, 5000, 20000], trials=10, target_error=0.2)
        report = sample_complexity_curve(config)
        self.assertFalse(report.saturated)
        self.assertIn(report.minimal_n, config.n_grid)
        self.assertLessEqual(len(report.points), 3)
        self.assertLessEqual(report.minimal_n, 5000)
        for point in report.points:
            self.assertEqual(point.meets(0.2), point.n >= report.minimal_n, msg=f'{point}')

    def test_saturated_curve(self):
        config = binary_config(n=[20, 40], trials=10, target_error=0.05)
        report = sample_complexity_curve(config)
        self.assertTrue(report.saturated)
        self.assertIsNone(report.minimal_n)
        self.assertEqual([p.n for p in report.points], [20, 40])

    def test_detection_grows_with_n(self):
        for config in (
            binary_config(trials=200).with_grid([100, 200, 400, 800]),
            binary_config(test='binary-independence', epsilon=3.0, gamma=0.4,
                          trials=200).with_grid([200, 400, 800, 1600]),
        ):
            detection = [1 - evaluate_point(config, n).type2 for n in config.n_grid]
            for smaller, larger in zip(detection, detection[1:]):
                self.assertGreaterEqual(larger, smaller - 0.02, msg=f'{config.test}: {detection}')
            self.assertGreater(detection[-1], 0.9, msg=f'{config.test}')


# -----------------------------------------------------------------------


class TestCalibratedSizes(Base):
    """Error rates at the calibrated sample size of the independence testers"""

    def test_hr_independence(self):
        self.check('hr-independence')

    def test_raptor_independence(self):
        self.check('raptor-independence')

    def check(self, test):
        config = ExperimentConfig.from_json({'test': test, 'k': 4, 'epsilon': 1,
                                             'gamma': 0.45, 'trials': 6, 'seed': 19})
        n = default_sample_size(config)
        self.assertGreaterEqual(n, 2_528_396)
        point = evaluate_point(config, n)
        self.assertLessEqual(point.type1, 1 / 3, msg=test)
        self.assertLessEqual(point.type2, 1 / 3, msg=test)


__all__ = [
    'TestCalibratedSizes',
    'TestExperiments',
    'TestSampleSizes',
    'TestTrials',
]
