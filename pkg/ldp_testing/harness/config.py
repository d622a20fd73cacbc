import json
import logging
from pathlib import Path
from typing import Self

from ..enums import InstanceKind, TestKind
from ..exceptions import ConfigError
from ..utils import check_epsilon
from ..yaml_loader import load_from_yaml, merge_calibration
from .instances import InstanceSpec, parse_instance

logger = logging.getLogger(__name__)

# tests the harness runs end to end; the primitives they are built from are not
EXPERIMENT_TESTS = (
    TestKind.RapporUniformity,
    TestKind.HadamardUniformity,
    TestKind.RaptorUniformity,
    TestKind.BinaryUniformity,
    TestKind.HadamardIndependence,
    TestKind.RaptorIndependence,
    TestKind.BinaryIndependence,
)

BINARY_TESTS = (TestKind.BinaryUniformity, TestKind.BinaryIndependence)

# section of calibration.yml holding each test's constants
CALIBRATION_SECTIONS = {
    TestKind.RapporUniformity: 'rappor_uniformity',
    TestKind.HadamardUniformity: 'hr_uniformity',
    TestKind.RaptorUniformity: 'raptor_uniformity',
    TestKind.HadamardIndependence: 'hr_independence',
    TestKind.RaptorIndependence: 'raptor_independence',
}

CONFIG_KEYS = frozenset({
    'test', 'k', 'epsilon', 'gamma', 'null', 'alternative', 'n', 'trials',
    'target_error', 'seed', 'calibration', 'fixed_theta',
})


def _dedupe(grid) -> tuple[int, ...]:
    seen = []
    for n in grid:
        n = int(n)
        if n not in seen:
            seen.append(n)
    return tuple(seen)


class ExperimentConfig:
    """
    One experiment: a test, its parameters, the null and alternative
    instances, the sample-size grid and the calibration constants.
    An empty n grid means "the calibrated sample size".
    """

    __slots__ = (
        'test', 'k', 'epsilon', 'gamma', 'null', 'alternative', 'n_grid', 'trials',
        'target_error', 'seed', 'calibration', 'fixed_theta',
    )

    def __init__(self, test: TestKind, k: int, epsilon: float, gamma: float,
                 null: str | InstanceSpec | None = None,
                 alternative: str | InstanceSpec | None = None,
                 n_grid=(), trials: int = 100, target_error: float = 1 / 3, seed: int = 0,
                 calibration: dict | None = None, fixed_theta: bool = False) -> None:
        try:
            self.test = TestKind(test)
        except ValueError:
            raise ConfigError(f'unknown test {test!r}') from None
        if self.test not in EXPERIMENT_TESTS:
            raise ConfigError(f'{self.test} is a building block, not an end-to-end test')
        self.k = int(k)
        self.epsilon = check_epsilon(epsilon)
        self.gamma = float(gamma)
        self.n_grid = _dedupe(n_grid)
        self.trials = int(trials)
        self.target_error = float(target_error)
        self.seed = int(seed)
        self.fixed_theta = bool(fixed_theta)
        self.calibration = merge_calibration(calibration)

        independence = self.test.is_independence
        self.null = parse_instance(null or ('uniform-joint' if independence else 'uniform'))
        self.alternative = parse_instance(
            alternative or ('balanced-paninski-joint' if independence else 'paninski{random}')
        )
        self._validate()

    def _validate(self) -> None:
        if self.test in BINARY_TESTS:
            if self.k != 2:
                raise ConfigError(f'{self.test} runs on k = 2, got k={self.k}')
        elif self.k < 2 or self.k % 2:
            raise ConfigError('alphabet must be even')
        if not 0 < self.gamma <= 0.5:
            raise ConfigError(f'gamma must lie in (0, 1/2], got {self.gamma}')
        if self.trials < 1:
            raise ConfigError('trials must be at least 1')
        if not 0 < self.target_error < 0.5:
            raise ConfigError(f'target error must lie in (0, 1/2), got {self.target_error}')
        if any(n < 1 for n in self.n_grid):
            raise ConfigError('sample sizes must be positive')
        if any(a >= b for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError(f'n grid must be strictly increasing, got {list(self.n_grid)}')
        for role, spec in (('null', self.null), ('alternative', self.alternative)):
            if spec.kind.is_joint != self.test.is_independence and spec.kind != InstanceKind.File:
                raise ConfigError(f'{role} instance {spec} does not fit test {self.test}')

    @classmethod
    def from_json(cls, data: str | dict) -> Self:
        record = json.loads(data) if isinstance(data, str) else dict(data)
        if unknown := set(record) - CONFIG_KEYS:
            raise ConfigError(f'unknown configuration keys: {", ".join(sorted(unknown))}')
        missing = {'test', 'k', 'epsilon', 'gamma'} - set(record)
        if missing:
            raise ConfigError(f'missing configuration keys: {", ".join(sorted(missing))}')
        grid = record.pop('n', ())
        if isinstance(grid, int):
            grid = (grid,)
        return cls(n_grid=grid, **record)

    @classmethod
    def load(cls, path: str | Path) -> Self:
        """JSON or YAML configuration file, chosen by suffix"""
        path = Path(path)
        if not path.exists():
            raise ConfigError(f'configuration file {path} does not exist')
        if path.suffix in ('.yml', '.yaml'):
            data = load_from_yaml(path.resolve())
        else:
            try:
                data = json.loads(path.read_text(encoding='utf-8'))
            except json.JSONDecodeError as exc:
                raise ConfigError(f'{path}: {exc}') from None
        if not isinstance(data, dict):
            raise ConfigError(f'{path} must hold a mapping')
        return cls.from_json(data)

    def with_grid(self, n_grid) -> 'ExperimentConfig':
        record = self.to_json()
        record['n'] = list(n_grid)
        return ExperimentConfig.from_json(record)

    @property
    def section(self) -> dict:
        """Calibration constants of this config's test"""
        return self.calibration.get(CALIBRATION_SECTIONS.get(self.test, ''), {})

    def to_json(self) -> dict:
        return {
            'test': str(self.test),
            'k': self.k,
            'epsilon': self.epsilon,
            'gamma': self.gamma,
            'null': str(self.null),
            'alternative': str(self.alternative),
            'n': list(self.n_grid),
            'trials': self.trials,
            'target_error': self.target_error,
            'seed': self.seed,
            'calibration': self.calibration,
            'fixed_theta': self.fixed_theta,
        }

    def __eq__(self, other) -> bool:
        return isinstance(other, ExperimentConfig) and self.to_json() == other.to_json()

    def __repr__(self) -> str:
        return (
            f'ExperimentConfig({self.test}, k={self.k}, epsilon={self.epsilon}, '
            f'gamma={self.gamma}, n={list(self.n_grid)})'
        )


__all__ = (
    'CALIBRATION_SECTIONS',
    'EXPERIMENT_TESTS',
    'ExperimentConfig',
)
