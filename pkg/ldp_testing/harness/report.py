import csv
import io
import json
import logging
from pathlib import Path
from typing import Self

from ..enums import ReportFormat
from ..exceptions import ConfigError
from ..utils import wilson_interval

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    'test', 'k', 'epsilon', 'gamma', 'n', 'trials',
    'type1', 'type1_lo', 'type1_hi', 'type2', 'type2_lo', 'type2_hi', 'seed',
)


class ExperimentPoint:
    """
    Outcome of `trials` runs at one sample size on the null and on the
    alternative instance. type1 counts rejections of the null, type2
    acceptances of the alternative.
    """

    __slots__ = ('n', 'trials', 'type1_errors', 'type2_errors', 'null_seeds',
                 'alternative_seeds', 'insufficient')

    def __init__(self, n: int, trials: int, type1_errors: int, type2_errors: int,
                 null_seeds=(), alternative_seeds=(), insufficient: int = 0) -> None:
        self.n = int(n)
        self.trials = int(trials)
        self.type1_errors = int(type1_errors)
        self.type2_errors = int(type2_errors)
        self.null_seeds = [int(s) for s in null_seeds]
        self.alternative_seeds = [int(s) for s in alternative_seeds]
        self.insufficient = int(insufficient)

    @property
    def type1(self) -> float:
        return self.type1_errors / self.trials

    @property
    def type2(self) -> float:
        return self.type2_errors / self.trials

    @property
    def type1_interval(self) -> tuple[float, float]:
        return wilson_interval(self.type1_errors, self.trials)

    @property
    def type2_interval(self) -> tuple[float, float]:
        return wilson_interval(self.type2_errors, self.trials)

    def meets(self, target: float) -> bool:
        return self.type1 <= target and self.type2 <= target

    def to_json(self) -> dict:
        return {
            'n': self.n,
            'trials': self.trials,
            'type1_errors': self.type1_errors,
            'type2_errors': self.type2_errors,
            'type1': self.type1,
            'type1_interval': list(self.type1_interval),
            'type2': self.type2,
            'type2_interval': list(self.type2_interval),
            'null_seeds': self.null_seeds,
            'alternative_seeds': self.alternative_seeds,
            'insufficient': self.insufficient,
        }

    @classmethod
    def from_json(cls, record: dict) -> Self:
        return cls(
            record['n'], record['trials'], record['type1_errors'], record['type2_errors'],
            record.get('null_seeds', ()), record.get('alternative_seeds', ()),
            record.get('insufficient', 0),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, ExperimentPoint) and self.to_json() == other.to_json()

    def __repr__(self) -> str:
        return f'ExperimentPoint(n={self.n}, type1={self.type1:.3f}, type2={self.type2:.3f})'


class ExperimentReport:
    """
    Error rates over an n grid. minimal_n is the smallest evaluated n whose
    error rates both meet the target; saturated is set when none does.
    """

    __slots__ = ('config', 'points', 'minimal_n', 'saturated', 'wall_clock')

    def __init__(self, config: dict, points=(), minimal_n: int | None = None,
                 saturated: bool = False, wall_clock: float = 0.0) -> None:
        self.config = dict(config)
        self.points = sorted(points, key=lambda p: p.n)
        self.minimal_n = minimal_n
        self.saturated = bool(saturated)
        self.wall_clock = float(wall_clock)

    def to_json(self) -> dict:
        return {
            'config': self.config,
            'points': [p.to_json() for p in self.points],
            'minimal_n': self.minimal_n,
            'saturated': self.saturated,
            'wall_clock': self.wall_clock,
        }

    @classmethod
    def from_json(cls, data: str | dict) -> Self:
        record = json.loads(data) if isinstance(data, str) else data
        return cls(
            record['config'],
            [ExperimentPoint.from_json(p) for p in record['points']],
            record.get('minimal_n'),
            record.get('saturated', False),
            record.get('wall_clock', 0.0),
        )

    def rows(self) -> list[dict]:
        config = self.config
        rows = []
        for point in self.points:
            type1_lo, type1_hi = point.type1_interval
            type2_lo, type2_hi = point.type2_interval
            rows.append({
                'test': config.get('test'),
                'k': config.get('k'),
                'epsilon': config.get('epsilon'),
                'gamma': config.get('gamma'),
                'n': point.n,
                'trials': point.trials,
                'type1': point.type1,
                'type1_lo': type1_lo,
                'type1_hi': type1_hi,
                'type2': point.type2,
                'type2_lo': type2_lo,
                'type2_hi': type2_hi,
                'seed': config.get('seed'),
            })
        return rows

    def __eq__(self, other) -> bool:
        # wall clock is the only field allowed to differ between identical runs
        if not isinstance(other, ExperimentReport):
            return False
        mine, theirs = self.to_json(), other.to_json()
        mine.pop('wall_clock')
        theirs.pop('wall_clock')
        return mine == theirs

    def __repr__(self) -> str:
        return (
            f'ExperimentReport({self.config.get("test")}, points={len(self.points)}, '
            f'minimal_n={self.minimal_n}, saturated={self.saturated})'
        )


def format_report(report: ExperimentReport, fmt: ReportFormat | str = ReportFormat.CSV) -> str:
    try:
        fmt = ReportFormat(fmt)
    except ValueError:
        raise ConfigError(f'unknown report format {fmt!r}') from None
    if fmt == ReportFormat.JSON:
        return json.dumps(report.to_json(), indent=2)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator='\n')
    writer.writeheader()
    writer.writerows(report.rows())
    return out.getvalue()


def emit_report(report: ExperimentReport, fmt: ReportFormat | str = ReportFormat.CSV,
                path: str | Path | None = None) -> str:
    """Render the report as CSV or JSON, writing it to path when one is given"""
    text = format_report(report, fmt)
    if path is not None:
        Path(path).write_text(text, encoding='utf-8')
        logger.info('wrote %s report to %s', fmt, path)
    return text


__all__ = (
    'CSV_COLUMNS',
    'ExperimentPoint',
    'ExperimentReport',
    'emit_report',
    'format_report',
)
