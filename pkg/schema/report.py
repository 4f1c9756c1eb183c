"""Check reports: JSON document, CSV and a plain-text table.

A report reads

    {"scenario": ..., "seed": ..., "version": ..., "timestamp": ...,
     "checks": [...], "summary": {"total": ..., "passed": ..., "failed": ...}}

with the timestamp left out for reproducible runs. Given the same scenario
and seed the JSON text is byte-identical.
"""
import csv
import dataclasses
import io
import json
import logging
import typing as t  # noqa: F401 ignore unused we use it for typing

from django.utils import timezone

from engine import __version__
from engine.battery import CheckRecord
from engine.constants import msg_code
from engine.utils import MalformedReportException

logger = logging.getLogger('finsleroid')  # type: logging.Logger

CSV_COLUMNS = ('name', 'reference', 'sample', 'residual', 'tolerance', 'tolerance_key', 'tolerance_source',
               'passed', 'note')
TABLE_COLUMNS = ('status', 'name', 'sample', 'residual', 'tolerance', 'source', 'reference')


@dataclasses.dataclass(eq=False)
class Report(object):
    scenario: str
    seed: t.Optional[int]
    checks: t.List[CheckRecord] = dataclasses.field(default_factory=list)
    version: str = __version__
    timestamp: t.Optional[str] = None

    @property
    def summary(self):
        # type: () -> t.Dict[str, int]
        passed = sum(1 for check in self.checks if check.passed)
        return {'total': len(self.checks), 'passed': passed, 'failed': len(self.checks) - passed}

    @property
    def failed(self):
        # type: () -> t.List[CheckRecord]
        return [check for check in self.checks if not check.passed]

    @property
    def ok(self):
        # type: () -> bool
        return not self.failed

    def stamp(self):
        # type: () -> Report
        self.timestamp = timezone.now().isoformat()
        return self

    def ordered(self):
        # type: () -> t.List[CheckRecord]
        """Failures first, each group in run order"""
        return self.failed + [check for check in self.checks if check.passed]

    def to_json(self):
        # type: () -> t.Dict[str, t.Any]
        document = {'scenario': self.scenario, 'seed': self.seed, 'version': self.version}
        if self.timestamp is not None:
            document['timestamp'] = self.timestamp
        document['checks'] = [check.to_json() for check in self.checks]
        document['summary'] = self.summary
        return document

    def dumps(self):
        # type: () -> str
        return json.dumps(self.to_json(), indent=2) + '\n'

    def to_csv(self):
        # type: () -> str
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for check in self.ordered():
            row = check.to_json()
            writer.writerow([_csv_cell(row[column]) for column in CSV_COLUMNS])
        return out.getvalue()

    def to_table(self):
        # type: () -> str
        rows = [[
            'PASS' if check.passed else 'FAIL', check.name,
            '-' if check.sample is None else str(check.sample),
            '%.3e' % check.residual, '%.1e' % check.tolerance, check.tolerance_source, check.reference,
        ] for check in self.ordered()]
        widths = [max([len(column)] + [len(row[i]) for row in rows]) for i, column in enumerate(TABLE_COLUMNS)]
        lines = ['  '.join(cell.ljust(width) for cell, width in zip(TABLE_COLUMNS, widths)).rstrip()]
        lines.extend('  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows)
        summary = self.summary
        lines.append('%s: %d checks, %d passed, %d failed' % (self.scenario, summary['total'], summary['passed'],
                                                              summary['failed']))
        return '\n'.join(lines) + '\n'


def _csv_cell(value):
    # type: (t.Any) -> t.Any
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return value


def record_from_json(row):
    # type: (t.Dict[str, t.Any]) -> CheckRecord
    """Rebuild a CheckRecord from its JSON form

    Raises:
        KeyError, TypeError, ValueError: the row is malformed
    """
    sample = row['sample']
    if not isinstance(row['passed'], bool):
        raise TypeError('passed is %r, expected true or false' % (row['passed'],))
    return CheckRecord(
        name=str(row['name']), reference=str(row['reference']),
        sample=None if sample is None else int(sample), residual=float(row['residual']),
        tolerance=float(row['tolerance']), tolerance_key=str(row['tolerance_key']),
        tolerance_source=str(row['tolerance_source']), passed=row['passed'], note=str(row.get('note', '')))


def report_from_json(document, name='report'):
    # type: (t.Any, str) -> Report
    """Rebuild a Report from a decoded JSON document

    Raises:
        MalformedReportException: a key is missing, a check row is malformed
            or the summary disagrees with the checks
    """
    try:
        if not isinstance(document, dict):
            raise TypeError('the report is not a JSON object')
        checks = [record_from_json(row) for row in document['checks']]
        report = Report(scenario=str(document['scenario']), seed=document.get('seed'), checks=checks,
                        version=str(document.get('version', __version__)), timestamp=document.get('timestamp'))
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedReportException(msg_code['MALFORMED_REPORT'] % (name, e))
    if 'summary' in document and document['summary'] != report.summary:
        raise MalformedReportException(msg_code['MALFORMED_REPORT'] % (name, 'the summary disagrees with the checks'))
    return report


def load_report(path):
    # type: (str) -> Report
    try:
        with open(path) as f:
            document = json.load(f)
    except ValueError as e:
        raise MalformedReportException(msg_code['MALFORMED_REPORT'] % (path, e))
    except (IOError, OSError) as e:
        raise MalformedReportException(msg_code['MALFORMED_REPORT'] % (path, e))
    return report_from_json(document, path)
