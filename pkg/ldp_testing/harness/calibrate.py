"""
Sweeps that regenerate the shipped calibration constants. Each returns the
constants, shaped like calibration.yml so their YAML dump can be dropped
into the `calibration` section of an experiment configuration, and the
measurements they were read from.
"""
import logging

from ..distributions import balanced_paninski_joint, product
from ..exceptions import ConfigError
from ..theory import level_with_mass, subset_pair_exceedance
from .config import CALIBRATION_SECTIONS, ExperimentConfig
from .runner import sample_complexity_curve, sample_constant

logger = logging.getLogger(__name__)


def independence_thresholds(k: int = 6, gamma: float = 0.45, mass: float = 0.1) -> tuple[dict, dict]:
    """
    c_thr for the RAPTOR independence test from the exact law of
    k |p(S1 x S2) - p1(S1) p2(S2)| / gamma on the balanced Paninski joint:
    half the largest level exceeded with probability at least `mass`, so a
    far instance clears c_thr gamma / k with probability rho >= mass.
    """
    joint = balanced_paninski_joint(k, gamma)
    delta = joint.pmf - product(*joint.marginals()).pmf
    table = subset_pair_exceedance(delta, gamma)
    threshold = level_with_mass(table, mass) / 2
    rho = sum(p for v, p in zip(table['values'], table['probabilities']) if v > threshold)
    logger.info('k=%s gamma=%s: c_thr=%s, rho=%.4f, quantiles %s',
                k, gamma, threshold, rho, table['quantiles'])
    details = {
        'k': k,
        'gamma': gamma,
        'rho': rho,
        'values': table['values'],
        'probabilities': table['probabilities'],
        'quantiles': {str(q): v for q, v in table['quantiles'].items()},
    }
    return {'raptor_independence': {'threshold': threshold}}, details


def sample_constant_sweep(config: ExperimentConfig, workers: int = 1) -> tuple[dict, dict]:
    """
    Minimal n on the config's grid at its target error, turned back into
    the sample constant of the config's test. A saturated search yields
    the constant of the largest grid point, flagged as a lower bound.
    """
    if config.test not in CALIBRATION_SECTIONS:
        raise ConfigError(f'{config.test} has no sample constant to calibrate')
    report = sample_complexity_curve(config, workers)
    n = report.minimal_n if report.minimal_n is not None else max(p.n for p in report.points)
    constants = {CALIBRATION_SECTIONS[config.test]: {'sample_constant': sample_constant(config, n)}}
    details = {
        'minimal_n': report.minimal_n,
        'saturated': report.saturated,
        'points': [[p.n, p.type1, p.type2] for p in report.points],
    }
    return constants, details


__all__ = (
    'independence_thresholds',
    'sample_constant_sweep',
)
