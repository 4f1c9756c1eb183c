import logging

from django.core.management.base import BaseCommand, CommandError

import verifier.tasks as tasks
from engine.constants import msg_code
from engine.utils import (
    FinsleroidException, LeftAdmissibleDomainException,
    MalformedReportException, ScenarioException)

logger = logging.getLogger('finsleroid')  # type: logging.Logger

TASKS = ('check', 'spray', 'geodesic', 'report')

# exit codes
CHECK_FAILED = 1
INPUT_ERROR = 2


def _floats(value):
    try:
        return [float(item) for item in value.split(',')]
    except ValueError:
        raise CommandError('expected comma-separated numbers, got %s' % value, returncode=INPUT_ERROR)


class Command(BaseCommand):
    help = 'Verify the closed forms of a Finsleroid-regular space'

    def add_arguments(self, parser):
        parser.add_argument('task', choices=TASKS)
        parser.add_argument('path', help='scenario file or name; the JSON report for the report task')
        parser.add_argument('--out', help='JSON report, or the trajectory CSV for geodesic')
        parser.add_argument('--csv', dest='csv_path', help='CSV copy of the report')
        parser.add_argument('--seed', type=int, help='replaces the seed of every random sample block')
        parser.add_argument('--tol-override', dest='overrides', action='append', default=[],
                            metavar='KEY=VALUE', help='tolerance override, repeatable')
        parser.add_argument('--no-timestamp', dest='timestamp', action='store_false',
                            help='leave the timestamp out of the report')
        parser.add_argument('--jobs', type=int, default=1, help='worker threads for the sample checks')
        parser.add_argument('--x', help='point for spray, comma separated')
        parser.add_argument('--y', help='vector for spray, comma separated')
        parser.add_argument('--x0', help='initial point for geodesic')
        parser.add_argument('--y0', help='initial velocity for geodesic')
        parser.add_argument('--t-end', dest='t_end', type=float, default=1.0)
        parser.add_argument('--step', type=float, default=1e-3)
        parser.add_argument('--format', dest='fmt', choices=tasks.REPORT_FORMATS, default='table')

    def handle(self, *args, **options):
        task_name = options['task']
        try:
            if task_name == 'check':
                self.check_scenario(options)
            elif task_name == 'spray':
                self.stdout.write(tasks.run_spray(
                    options['path'], x=_floats(options['x']) if options['x'] else None,
                    y=_floats(options['y']) if options['y'] else None, seed=options['seed']), ending='')
            elif task_name == 'geodesic':
                self.geodesic(options)
            else:
                _, text = tasks.run_report(options['path'], options['fmt'])
                self.stdout.write(text, ending='')
        except ScenarioException as e:
            logger.error('%s: %s', options['path'], e)
            for key, messages in sorted(e.errors.items()):
                for message in messages:
                    self.stderr.write('%s: %s' % (key, message))
            raise CommandError(str(e), returncode=INPUT_ERROR)
        except MalformedReportException as e:
            logger.error('%s', e)
            raise CommandError(str(e), returncode=INPUT_ERROR)
        except LeftAdmissibleDomainException as e:
            logger.error('%s', e)
            raise CommandError(str(e), returncode=CHECK_FAILED)
        except FinsleroidException as e:
            logger.exception('%s failed on %s', task_name, options['path'])
            raise CommandError(str(e), returncode=INPUT_ERROR)

    def check_scenario(self, options):
        if options['jobs'] < 1:
            raise CommandError('--jobs must be at least 1', returncode=INPUT_ERROR)
        report = tasks.run_check(options['path'], seed=options['seed'], overrides=options['overrides'],
                                 jobs=options['jobs'], timestamp=options['timestamp'], out=options['out'],
                                 csv_path=options['csv_path'])
        if not options['out']:
            self.stdout.write(report.to_table(), ending='')
        if not report.ok:
            summary = report.summary
            raise CommandError(msg_code['CHECKS_FAILED'] % (summary['failed'], summary['total']),
                               returncode=CHECK_FAILED)

    def geodesic(self, options):
        if not (options['x0'] and options['y0']):
            raise CommandError('geodesic needs --x0 and --y0', returncode=INPUT_ERROR)
        try:
            trajectory, text, tolerance = tasks.run_geodesic(
                options['path'], _floats(options['x0']), _floats(options['y0']), t_end=options['t_end'],
                step=options['step'], out=options['out'], overrides=options['overrides'])
        except LeftAdmissibleDomainException as e:
            if not options['out'] and e.trajectory is not None:
                self.stdout.write(tasks.trajectory_csv(e.trajectory), ending='')
            raise
        if not options['out']:
            self.stdout.write(text, ending='')
        if trajectory.drift > tolerance:
            raise CommandError('K drift %.3g exceeds %.3g' % (trajectory.drift, tolerance),
                               returncode=CHECK_FAILED)
