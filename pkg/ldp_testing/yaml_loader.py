from copy import deepcopy
import logging
from pathlib import Path

import yaml

try:
    from yaml import CSafeLoader as SafeLoader
except ImportError:
    from yaml import SafeLoader  # type: ignore[assignment]

import ldp_testing
from .exceptions import ConfigError
from .settings import LTCache, ROOT

logger = logging.getLogger(__name__)

CALIBRATION_FILE = 'defaults/calibration.yml'


def load_from_yaml(yfile: str | Path) -> dict | list:
    """
    Load yaml from an absolute path, a path relative to the package
    directory, or from the installed egg/zip.
    """
    path = Path(yfile)
    if not path.is_absolute():
        path = Path(ROOT) / path

    if path.exists():
        with open(path, 'r', encoding='utf-8') as yf:
            return yaml.load(yf, SafeLoader) or {}

    try:
        data = ldp_testing.__loader__.get_data(f'ldp_testing/{yfile}')  # type: ignore[union-attr]
    except (AttributeError, OSError):
        raise ConfigError(f'{yfile} does not exist') from None
    return yaml.load(data, SafeLoader) or {}


def dump_yaml(data: dict) -> str:
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


def default_calibration() -> dict:
    """
    Shipped calibration constants, loaded once per process.
    Returns a copy so callers may mutate it freely.
    """
    if not (calibration := LTCache['calibration']):
        logger.debug('loading %s', CALIBRATION_FILE)
        calibration = load_from_yaml(CALIBRATION_FILE)
        if not isinstance(calibration, dict):
            raise ConfigError(f'{CALIBRATION_FILE} must hold a mapping')
        LTCache['calibration'] = calibration
    return deepcopy(calibration)


def merge_calibration(overrides: dict | None) -> dict:
    """
    Overlay user-supplied constants on the shipped defaults, section by
    section. Unknown sections or keys are rejected so typos surface.

    >>> merge_calibration({'raptor_uniformity': {'repetitions': 12}})['raptor_uniformity']['repetitions']
    12
    """
    merged = default_calibration()
    for section, values in (overrides or {}).items():
        if section not in merged:
            raise ConfigError(f'unknown calibration section {section!r}')
        if not isinstance(values, dict):
            raise ConfigError(f'calibration section {section!r} must be a mapping')
        for key, value in values.items():
            if key not in merged[section]:
                raise ConfigError(f'unknown calibration key {section}.{key}')
            merged[section][key] = value
    return merged


__all__ = (
    'default_calibration',
    'dump_yaml',
    'load_from_yaml',
    'merge_calibration',
)
