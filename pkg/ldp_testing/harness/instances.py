"""
Instance specifications: the textual names of the distributions an
experiment draws its users from.

    uniform                       u over [k]
    paninski                      Paninski instance with theta = (+1, ..., +1)
    paninski{random}              fresh random theta for every trial
    paninski{+1,-1,...}           explicit theta, k/2 signs
    uniform-joint                 u x u over [k] x [k]
    balanced-paninski-joint       joint with uniform marginals, gamma-far from product
    file:<path>                   the samples stored in a sample file
"""
import logging
from pathlib import Path

import numpy as np

from ..distributions import (
    balanced_paninski_joint,
    paninski,
    random_theta,
    read_samples,
    uniform,
    uniform_joint,
)
from ..enums import InstanceKind
from ..exceptions import ConfigError
from ..lazy_regex import LazyPattern

logger = logging.getLogger(__name__)

INSTANCE_SPEC = LazyPattern(r'^(?P<kind>[a-z-]+)(?:\{(?P<args>[^}]*)\})?$')
FILE_SPEC = LazyPattern(r'^file:(?P<path>.+)$')
SIGN = LazyPattern(r'^\s*(?P<sign>[+-]?1)\s*$')


class InstanceSpec:
    """
    Parsed instance specification. theta is None for a Paninski instance
    whose signs are redrawn per trial.
    """

    __slots__ = ('kind', 'theta', 'path')

    def __init__(self, kind: InstanceKind, theta: tuple[int, ...] | None = None,
                 path: str | None = None) -> None:
        self.kind = InstanceKind(kind)
        self.theta = None if theta is None else tuple(int(s) for s in theta)
        self.path = path

    @classmethod
    def parse(cls, spec: str) -> 'InstanceSpec':
        spec = spec.strip()
        if matched := FILE_SPEC.match(spec):
            return cls(InstanceKind.File, path=matched.group('path'))
        if not (matched := INSTANCE_SPEC.match(spec)):
            raise ConfigError(f'malformed instance spec {spec!r}')
        try:
            kind = InstanceKind(matched.group('kind'))
        except ValueError:
            raise ConfigError(f'unknown instance kind {matched.group("kind")!r}') from None
        args = matched.group('args')

        if kind != InstanceKind.Paninski:
            if args is not None:
                raise ConfigError(f'instance {kind} takes no arguments')
            return cls(kind)
        if args is None:
            return cls(kind, theta=())
        if args.strip() == 'random':
            return cls(kind)
        signs = []
        for item in args.split(','):
            if not (sign := SIGN.match(item)):
                raise ConfigError(f'theta entries must be +1 or -1, got {item.strip()!r}')
            signs.append(int(sign.group('sign')))
        return cls(kind, theta=tuple(signs))

    @property
    def is_joint(self) -> bool:
        return self.kind.is_joint

    @property
    def is_random(self) -> bool:
        return self.kind == InstanceKind.Paninski and self.theta is None

    def pinned(self, theta) -> 'InstanceSpec':
        """Same instance with the signs fixed to theta"""
        return InstanceSpec(self.kind, tuple(int(s) for s in theta), self.path)

    def _theta(self, k: int, rng: np.random.Generator) -> np.ndarray:
        if self.theta is None:
            return random_theta(k, rng)
        if not self.theta:
            return np.ones(k // 2, dtype=np.int64)
        return np.asarray(self.theta, dtype=np.int64)

    def distribution(self, k: int, gamma: float, rng: np.random.Generator | None = None):
        match self.kind:
            case InstanceKind.Uniform:
                return uniform(k)
            case InstanceKind.Paninski:
                if self.theta is None and rng is None:
                    raise ConfigError('a random Paninski instance needs a random stream')
                return paninski(k, gamma, self._theta(k, rng))
            case InstanceKind.UniformJoint:
                return uniform_joint(k)
            case InstanceKind.BalancedPaninskiJoint:
                return balanced_paninski_joint(k, gamma)
            case InstanceKind.File:
                raise ConfigError(f'{self} is data, not a distribution')

    def draw(self, k: int, gamma: float, n: int, rng: np.random.Generator) -> np.ndarray:
        """n user samples; a file instance yields its whole content and ignores n"""
        if self.kind == InstanceKind.File:
            if not Path(self.path).exists():
                raise ConfigError(f'sample file {self.path} does not exist')
            return read_samples(self.path)
        return self.distribution(k, gamma, rng).sample(n, rng)

    def __eq__(self, other) -> bool:
        return isinstance(other, InstanceSpec) and str(self) == str(other)

    def __hash__(self) -> int:
        return hash(str(self))

    def __str__(self) -> str:
        if self.kind == InstanceKind.File:
            return f'file:{self.path}'
        if self.kind != InstanceKind.Paninski or self.theta == ():
            return str(self.kind)
        if self.theta is None:
            return f'{self.kind}{{random}}'
        return f'{self.kind}{{{",".join(f"{s:+d}" for s in self.theta)}}}'

    def __repr__(self) -> str:
        return f'InstanceSpec({self})'


def parse_instance(spec: str | InstanceSpec) -> InstanceSpec:
    return spec if isinstance(spec, InstanceSpec) else InstanceSpec.parse(spec)


__all__ = (
    'InstanceSpec',
    'parse_instance',
)
