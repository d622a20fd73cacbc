"""
ldp-testing command line.

    ldp-testing audit --mechanism hr --k 64 --epsilon 1
    ldp-testing test samples.txt --test rappor-uniformity --k 16 --epsilon 1 --gamma 0.5
    ldp-testing simulate --test raptor-uniformity --k 64 --epsilon 1 --gamma 0.5 --trials 200
    ldp-testing curve --config experiment.json --format json --out curve.json
    ldp-testing calibrate independence-thresholds --k 6 --gamma 0.45
    ldp-testing verify-appendix --seed 7

Exit codes: 0 success, 1 failed audit or verification, 2 bad input.
"""
import argparse
import json
import logging
import math
from pathlib import Path
import sys

from . import __version__
from .distributions import read_samples
from .enums import MechanismKind, ReportFormat, TestKind
from .exceptions import ConfigError, ContractViolation, LDPTestingError
from .harness import (
    ExperimentConfig,
    emit_report,
    error_rates,
    independence_thresholds,
    run_test,
    sample_complexity_curve,
    sample_constant_sweep,
)
from .mechanisms import (
    PrivacyBudget,
    PrivatizedBatch,
    audit_ldp,
    audit_passes,
    channel_matrix,
    rappor_bit_audit,
)
from .settings import MAX_RAPPOR_AUDIT_K
from .testers import (
    binary_independence_test,
    binary_uniformity_test,
    hr_independence_test,
    hr_uniformity_test,
    rappor_uniformity_test,
)
from .theory import verify_appendix
from .utils import make_rng
from .yaml_loader import default_calibration, dump_yaml

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2

SWEEPS = ('independence-thresholds', 'sample-constant')


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='more logging; repeat for debug output')
    common.add_argument('--quiet', action='store_true', help='only log errors')
    common.add_argument('--seed', type=int, help='base seed of every random stream')
    common.add_argument('--out', help='write the result to this file instead of stdout')
    common.add_argument('--format', choices=[str(f) for f in ReportFormat],
                        help='report format')

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument('--config', help='JSON or YAML experiment configuration')
    experiment.add_argument('--test', choices=[str(t) for t in TestKind])
    experiment.add_argument('--k', type=int, help='alphabet size')
    experiment.add_argument('--epsilon', type=float, help='privacy parameter')
    experiment.add_argument('--gamma', type=float, help='distance parameter')
    experiment.add_argument('--n', type=int, nargs='+', help='sample-size grid')
    experiment.add_argument('--trials', type=int, help='trials per grid point and instance')
    experiment.add_argument('--target', type=float, help='target error rate')
    experiment.add_argument('--null', help='null instance spec')
    experiment.add_argument('--alternative', help='alternative instance spec')
    experiment.add_argument('--fixed-theta', action='store_true', default=None,
                            help='draw the Paninski signs once instead of per trial')
    experiment.add_argument('--workers', type=int, default=1, help='trial processes')

    parser = argparse.ArgumentParser(prog='ldp-testing', description=__doc__.split('\n')[1])
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', required=True)

    audit = commands.add_parser('audit', parents=[common], help='check a mechanism is eps-LDP')
    audit.add_argument('--mechanism', required=True, choices=[str(m) for m in MechanismKind])
    audit.add_argument('--k', type=int, required=True)
    audit.add_argument('--epsilon', type=float, required=True)

    test = commands.add_parser('test', parents=[common],
                               help='run a test on a batch JSON or a raw sample file')
    test.add_argument('input', help='privatized batch (.json) or newline-delimited samples')
    test.add_argument('--test', choices=[str(t) for t in TestKind])
    test.add_argument('--k', type=int)
    test.add_argument('--epsilon', type=float)
    test.add_argument('--gamma', type=float, required=True)

    commands.add_parser('simulate', parents=[common, experiment], help='error rates on an n grid')
    commands.add_parser('curve', parents=[common, experiment], help='minimal n on an n grid')

    calibrate = commands.add_parser('calibrate', parents=[common, experiment],
                                    help='regenerate calibration constants')
    calibrate.add_argument('sweep', choices=SWEEPS)
    calibrate.add_argument('--mass', type=float, default=0.1,
                           help='exceedance mass for independence-thresholds')

    commands.add_parser('verify-appendix', parents=[common], help='run every theory oracle')
    return parser


def _configure_logging(args) -> None:
    level = logging.ERROR if args.quiet else max(logging.DEBUG, logging.WARNING - 10 * args.verbose)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')


def _experiment(args) -> ExperimentConfig:
    record = ExperimentConfig.load(args.config).to_json() if args.config else {}
    for key, value in (
        ('test', args.test), ('k', args.k), ('epsilon', args.epsilon), ('gamma', args.gamma),
        ('n', args.n), ('trials', args.trials), ('target_error', args.target),
        ('seed', args.seed), ('null', args.null), ('alternative', args.alternative),
        ('fixed_theta', args.fixed_theta),
    ):
        if value is not None:
            record[key] = value
    return ExperimentConfig.from_json(record)


def _audit(args) -> int:
    budget = PrivacyBudget(args.epsilon)
    kind = MechanismKind(args.mechanism)
    if kind == MechanismKind.RAPPOR and args.k > MAX_RAPPOR_AUDIT_K:
        ratio = rappor_bit_audit(budget)
    else:
        ratio = audit_ldp(channel_matrix(kind, args.k, budget))
    passed = audit_passes(ratio, budget)
    _emit(json.dumps({
        'mechanism': str(kind),
        'k': args.k,
        'epsilon': args.epsilon,
        'ratio': ratio,
        'bound': math.exp(args.epsilon),
        'passed': passed,
    }), args.out)
    return EXIT_OK if passed else EXIT_FAILED


def _batch_verdict(batch: PrivatizedBatch, gamma: float, rng, calibration: dict):
    budget = batch.budget
    match batch.kind:
        case MechanismKind.RAPPOR:
            return rappor_uniformity_test(batch, budget, gamma)
        case MechanismKind.HR:
            return hr_uniformity_test(batch, budget, gamma, rng,
                                      calibration['l2_closeness']['poisson_fraction'])
        case MechanismKind.RR:
            return binary_uniformity_test(batch, gamma)
        case MechanismKind.HRPair:
            section = calibration['hr_independence']
            return hr_independence_test(
                batch, budget, gamma, rng,
                learn_constant=section['learn_constant'],
                learn_fraction=section['learn_fraction'],
                marginal_floor=section['marginal_floor'],
                poisson_fraction=calibration['l2_closeness']['poisson_fraction'],
            )
        case MechanismKind.RAPTOR2 if batch.k == 2:
            return binary_independence_test(batch, budget, gamma)
    raise ConfigError(f'{batch.kind} tests draw fresh coins per repetition; pass raw samples')


def _test(args) -> int:
    rng = make_rng(args.seed or 0)
    calibration = default_calibration()
    if Path(args.input).suffix == '.json':
        try:
            record = json.loads(Path(args.input).read_text(encoding='utf-8'))
        except json.JSONDecodeError as exc:
            raise ConfigError(f'{args.input}: {exc}') from None
        verdict = _batch_verdict(PrivatizedBatch.from_json(record), args.gamma, rng, calibration)
    else:
        missing = [flag for flag, value in (('--test', args.test), ('--k', args.k),
                                            ('--epsilon', args.epsilon)) if value is None]
        if missing:
            raise ConfigError(f'raw samples need {", ".join(missing)}')
        verdict = run_test(TestKind(args.test), read_samples(args.input), args.k,
                           PrivacyBudget(args.epsilon), args.gamma, rng, calibration)
    verdict.seed = args.seed
    _emit(json.dumps(verdict.to_json()), args.out)
    return EXIT_OK


def _simulate(args) -> int:
    report = error_rates(_experiment(args), workers=args.workers)
    _emit(emit_report(report, args.format or ReportFormat.CSV), args.out)
    return EXIT_OK


def _curve(args) -> int:
    report = sample_complexity_curve(_experiment(args), workers=args.workers)
    _emit(emit_report(report, args.format or ReportFormat.CSV), args.out)
    return EXIT_OK


def _calibrate(args) -> int:
    if args.sweep == 'independence-thresholds':
        constants, details = independence_thresholds(args.k or 6, args.gamma or 0.45, args.mass)
    else:
        constants, details = sample_constant_sweep(_experiment(args), workers=args.workers)
    measured = ''.join(f'# {line}\n' for line in dump_yaml(details).splitlines())
    _emit(measured + dump_yaml(constants), args.out)
    return EXIT_OK


def _verify_appendix(args) -> int:
    claims = verify_appendix(make_rng(args.seed or 0))
    failed = [c for c in claims if not c]
    for claim in failed:
        logger.error('%r %s', claim, claim.detail)
    if args.format == ReportFormat.JSON or args.out:
        _emit(json.dumps([c.to_json() for c in claims], indent=2), args.out)
    else:
        _emit(f'{len(claims)} claims checked, {len(failed)} failed', None)
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    'audit': _audit,
    'test': _test,
    'simulate': _simulate,
    'curve': _curve,
    'calibrate': _calibrate,
    'verify-appendix': _verify_appendix,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    _configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except ContractViolation as exc:
        logger.error('%s', exc)
        return EXIT_FAILED
    except (LDPTestingError, OSError) as exc:
        logger.error('%s', exc)
        return EXIT_BAD_INPUT


__all__ = (
    'main',
)
