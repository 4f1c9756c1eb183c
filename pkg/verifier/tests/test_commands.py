import csv
import io
import json
import os
import shutil
import tempfile

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from engine.scenarios import BUILTIN

SMALL_FLAT = {
    'id': 'small-flat',
    'dimension': 3,
    'signature': 'pd',
    'fields': {
        'a': {'kind': 'constant', 'value': [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
        'b': {'kind': 'constant', 'value': [0.8, 0, 0]},
        'g': {'kind': 'constant', 'value': 0.5},
    },
    'samples': [
        {'x': [0, 0, 0], 'y': [1, 1, 1]},
        {'random': {'count': 9, 'seed': 1}},
    ],
}


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.scenario = self.path('small-flat.json')
        with open(self.scenario, 'w') as f:
            json.dump(SMALL_FLAT, f)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def call(self, *args, **options):
        out, err = io.StringIO(), io.StringIO()
        call_command('finsleroid', *args, stdout=out, stderr=err, **options)
        return out.getvalue()


class CheckCommandTests(CommandTestCase):

    def test_passing_scenario(self):
        report = self.path('report.json')
        report_csv = self.path('report.csv')
        output = self.call('check', self.scenario, out=report, csv_path=report_csv, timestamp=False)
        self.assertEqual(output, '')
        with open(report) as f:
            document = json.load(f)
        self.assertEqual(document['scenario'], 'small-flat')
        self.assertNotIn('timestamp', document)
        self.assertEqual(document['summary']['failed'], 0)
        with open(report_csv) as f:
            self.assertEqual(len(list(csv.reader(f))), document['summary']['total'] + 1)

    def test_every_builtin_scenario_passes(self):
        for name in sorted(BUILTIN):
            with self.subTest(scenario=name):
                report = self.path('%s.json' % name)
                self.call('check', name, out=report, timestamp=False)
                with open(report) as f:
                    summary = json.load(f)['summary']
                self.assertEqual(summary['failed'], 0)
                self.assertGreater(summary['total'], 0)

    def test_reports_are_reproducible(self):
        first, second = self.path('first.json'), self.path('second.json')
        self.call('check', self.scenario, out=first, timestamp=False)
        self.call('check', self.scenario, out=second, timestamp=False, jobs=3)
        with open(first) as f, open(second) as g:
            self.assertEqual(f.read(), g.read())

    def test_table_without_out(self):
        output = self.call('check', self.scenario, timestamp=False)
        self.assertTrue(output.startswith('status'))
        self.assertIn('small-flat:', output.splitlines()[-1])

    def test_failed_checks_exit_one(self):
        with self.assertRaises(CommandError) as raised:
            self.call('check', self.scenario, out=self.path('report.json'), overrides=['hessian=1e-30'])
        self.assertEqual(raised.exception.returncode, 1)

    def test_broken_scenario_exits_two(self):
        broken = os.path.join(settings.FINSLEROID_SCENARIO_DIR, 'broken.json')
        with self.assertRaises(CommandError) as raised:
            self.call('check', broken, out=self.path('report.json'))
        self.assertEqual(raised.exception.returncode, 2)
        self.assertFalse(os.path.exists(self.path('report.json')))

    def test_bad_override_exits_two(self):
        for override in ('hessian', 'algebriac=1e-8'):
            with self.subTest(override=override), self.assertRaises(CommandError) as raised:
                self.call('check', self.scenario, overrides=[override])
            self.assertEqual(raised.exception.returncode, 2)

    def test_missing_scenario_exits_two(self):
        with self.assertRaises(CommandError) as raised:
            self.call('check', self.path('missing.json'))
        self.assertEqual(raised.exception.returncode, 2)


class ReportCommandTests(CommandTestCase):

    def setUp(self):
        super(ReportCommandTests, self).setUp()
        self.report = self.path('report.json')
        self.call('check', self.scenario, out=self.report, timestamp=False)

    def test_formats(self):
        with open(self.report) as f:
            stored = f.read()
        self.assertEqual(self.call('report', self.report, fmt='json'), stored)
        self.assertTrue(self.call('report', self.report, fmt='csv').startswith('name,reference,sample'))
        self.assertTrue(self.call('report', self.report).startswith('status'))

    def test_malformed_report_exits_two(self):
        bad = self.path('bad.json')
        with open(bad, 'w') as f:
            f.write('{"checks": 3}')
        with self.assertRaises(CommandError) as raised:
            self.call('report', bad)
        self.assertEqual(raised.exception.returncode, 2)


class SprayCommandTests(CommandTestCase):

    def test_decomposition(self):
        output = self.call('spray', 'S2', x='0,1,0', y='1,1,1')
        for label in ('drift', 'torsion', 'E', 'riemann', 'G', 'oracle', 'rel err', 'radius along b'):
            self.assertIn(label, output)

    def test_first_sample_by_default(self):
        self.assertIn('y        [1, 1, 1]', self.call('spray', 'S1'))

    def test_time_space_exits_two(self):
        with self.assertRaises(CommandError) as raised:
            self.call('spray', 'S5')
        self.assertEqual(raised.exception.returncode, 2)

    def test_bad_vector_exits_two(self):
        with self.assertRaises(CommandError) as raised:
            self.call('spray', 'S1', x='0,0', y='1,1,1')
        self.assertEqual(raised.exception.returncode, 2)


class GeodesicCommandTests(CommandTestCase):

    def test_trajectory_csv(self):
        out = self.path('trajectory.csv')
        self.call('geodesic', 'S1', x0='0,0,0', y0='1,0.5,0', t_end=0.5, step=0.1, out=out)
        with open(out) as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ['t', 'x0', 'x1', 'x2', 'y0', 'y1', 'y2', 'K', 'residual'])
        self.assertEqual(len(rows), 7)
        self.assertAlmostEqual(float(rows[-1][1]), 0.5)

    def test_stdout_without_out(self):
        output = self.call('geodesic', 'S1', x0='0,0,0', y0='1,0,0', t_end=0.2, step=0.1)
        self.assertEqual(len(output.splitlines()), 4)

    def test_needs_initial_data(self):
        with self.assertRaises(CommandError) as raised:
            self.call('geodesic', 'S1', x0='0,0,0')
        self.assertEqual(raised.exception.returncode, 2)

    def test_leaving_the_domain_exits_one(self):
        out = self.path('trajectory.csv')
        with self.assertRaises(CommandError) as raised:
            self.call('geodesic', 'S2', x0='0,2.3,0', y0='0.2,1,0', t_end=2.0, step=0.01, out=out)
        self.assertEqual(raised.exception.returncode, 1)
        with open(out) as f:
            self.assertGreater(len(f.readlines()), 2)
