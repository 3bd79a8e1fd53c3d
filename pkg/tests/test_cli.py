#!/usr/bin/env python

import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest
from fractions import Fraction
from unittest import mock

from testing_utils import *

from lucasrep.classes import ArithError
from lucasrep.arith import MIN_BITS, CertifiedReal, ball_from_int, ball_sqrt
from lucasrep.reduction import ReductionInstance, Reducer
from lucasrep.contfrac import set_cache
from lucasrep.report import from_json
from lucasrep.cli import (
    EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_CERTIFICATION, RunConfig, UsageError, main,
)


ENVIRONMENT = ('LUCASREP_PRECISION_START', 'LUCASREP_PRECISION_CAP', 'LUCASREP_CACHE_DIR')


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self._environ = {name: os.environ.get(name) for name in ENVIRONMENT}

    def tearDown(self):
        set_cache(None)
        for name, value in self._environ.items():
            if value is None:
                os.environ.pop(name, None)
            else:
                os.environ[name] = value

    def run_cli(self, *argv):
        out = io.StringIO()
        err = io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            flags = [] if '--cache-dir' in argv else ['--no-cache']
            code = main(flags + list(argv))
        return code, out.getvalue(), err.getvalue()


class TestSeq(CliTestCase):
    def test_lucas(self):
        code, out, _ = self.run_cli('seq', '--k', '2', '--n-max', '12')
        self.assertEqual(EXIT_OK, code)
        lines = out.splitlines()
        self.assertEqual(12, len(lines))
        self.assertEqual('1 1', lines[0])
        self.assertEqual('11 199', lines[-2])
        self.assertEqual('12 322', lines[-1])

    def test_first_term(self):
        code, out, _ = self.run_cli('seq', '--k', '3', '--n-max', '1')
        self.assertEqual((EXIT_OK, '1 1\n'), (code, out))

    def test_formats(self):
        code, out, _ = self.run_cli('-f', 'json', 'seq', '--k', '3', '--n-max', '8')
        self.assertEqual([8, '118'], json.loads(out)[-1])
        code, out, _ = self.run_cli('-f', 'csv', 'seq', '--k', '3', '--n-max', '10')
        self.assertEqual('n,value', out.splitlines()[0])
        self.assertEqual('10,399', out.splitlines()[-1])

    def test_bad_order(self):
        code, _, err = self.run_cli('seq', '--k', '1', '--n-max', '5')
        self.assertEqual(EXIT_USAGE, code)
        self.assertIn('error', err)


class TestDigits(CliTestCase):
    def test_classification(self):
        code, out, _ = self.run_cli('digits', '766')
        self.assertEqual(EXIT_OK, code)
        self.assertEqual('766: almost repdigit\n  form (a=6, b=7, d1=3, d2=2)\n', out)
        self.assertEqual('999: repdigit\n  form (a=9, b=9, d1=3, d2=0)\n',
                         self.run_cli('digits', '999')[1])
        self.assertEqual('1234: not an almost repdigit\n', self.run_cli('digits', '1234')[1])

    def test_json(self):
        code, out, _ = self.run_cli('--format', 'json', 'digits', '100')
        data = json.loads(out)
        self.assertEqual('100', data['value'])
        self.assertTrue(data['almost_repdigit'])
        self.assertEqual([{'a': 0, 'b': 1, 'd1': 3, 'd2': 2}], data['forms'])

    def test_json_almost_repdigit(self):
        code, out, _ = self.run_cli('-f', 'json', 'digits', '766')
        self.assertEqual(EXIT_OK, code)
        data = json.loads(out)
        self.assertIs(True, data['almost_repdigit'])
        self.assertEqual([{'a': 6, 'b': 7, 'd1': 3, 'd2': 2}], data['forms'])
        data = json.loads(self.run_cli('-f', 'json', 'digits', '1234')[1])
        self.assertIs(False, data['almost_repdigit'])
        self.assertEqual([], data['forms'])

    def test_invalid(self):
        self.assertEqual(EXIT_USAGE, self.run_cli('digits', '0')[0])
        self.assertEqual(EXIT_USAGE, self.run_cli('digits', 'many')[0])


class TestReduce(CliTestCase):
    def test_synthetic(self):
        code, out, _ = self.run_cli('reduce', '--gamma', 'sqrt(2)', '--mu', '1/3',
                                    '--M', '1000', '--A', '1', '--B', '2')
        self.assertEqual(EXIT_OK, code)
        sqrt2 = CertifiedReal('sqrt(2)', lambda prec: ball_sqrt(ball_from_int(2, prec)))
        expected = Reducer().bound(ReductionInstance(sqrt2, Fraction(1, 3), 1, 2, 1000))
        self.assertEqual('%r\n' % expected, out)
        self.assertTrue(out.startswith('Reduced(q=33461'))

    def test_degenerate(self):
        code, out, _ = self.run_cli('-f', 'json', 'reduce', '--gamma', 'sqrt(2)',
                                    '--mu', '1 - sqrt(2)', '--M', '1000', '--A', '1',
                                    '--B', '2', '--max-advance', '2')
        self.assertEqual(EXIT_OK, code)
        data = json.loads(out)
        self.assertEqual('Degenerate', data['kind'])
        self.assertEqual([1, 1], data['relation'])
        self.assertIsNotNone(data['fallback_bound'])

    def test_bad_input(self):
        base = ['reduce', '--gamma', 'sqrt(2)', '--mu', '1/3', '--A', '1']
        self.assertEqual(EXIT_USAGE, self.run_cli(*base, '--M', '0', '--B', '2')[0])
        self.assertEqual(EXIT_USAGE, self.run_cli(*base, '--M', '10', '--B', '1')[0])
        self.assertEqual(EXIT_USAGE, self.run_cli(*base, '--M', 'x', '--B', '2')[0])
        code, _, err = self.run_cli('reduce', '--gamma', 'foo(', '--mu', '1/3', '--A', '1',
                                    '--M', '10', '--B', '2')
        self.assertEqual(EXIT_USAGE, code)
        self.assertIn('Not a number', err)


class TestVerify(CliTestCase):
    def setUp(self):
        super(TestVerify, self).setUp()
        self.directory = tempfile.mkdtemp(prefix='lucasrep-cli-')

    def tearDown(self):
        shutil.rmtree(self.directory)
        super(TestVerify, self).tearDown()

    def test_bound_only(self):
        path = os.path.join(self.directory, 'report.json')
        code, out, err = self.run_cli('verify', '--k-min', '2', '--k-max', '2',
                                      '--budget', '10', '-j', '1', '--report', path)
        self.assertEqual(EXIT_MISMATCH, code)
        self.assertIn('Status: BoundOnly', out)
        self.assertIn('k=2: BoundOnly, 0 solution(s) [1/1]', err)
        with open(path) as f:
            data = from_json(f.read())
        self.assertEqual('BoundOnly', data['status'])
        self.assertEqual([[2, 11, 199], [2, 12, 322]], data['missing'])
        self.assertEqual(['report.json'], os.listdir(self.directory))

    def test_complete(self):
        code, out, _ = self.run_cli('-f', 'csv', '--cache-dir', self.directory, 'verify',
                                    '--k-min', '3', '--k-max', '3', '-j', '1')
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(['3,8,118,1,8,3,0,Complete', '3,10,399,9,3,3,2,Complete'],
                         out.splitlines()[1:])

    def test_range(self):
        self.assertEqual(EXIT_USAGE, self.run_cli('verify', '--k-min', '5', '--k-max', '4')[0])
        self.assertEqual(EXIT_USAGE, self.run_cli('verify', '--budget', '3')[0])
        self.assertEqual(EXIT_USAGE, self.run_cli('verify', '-j', '0')[0])
        code, _, err = self.run_cli('--precision-start', '32', 'verify', '-j', '1')
        self.assertEqual(EXIT_USAGE, code)
        self.assertIn('at least 64 bits', err)

    def test_certification_failure(self):
        with mock.patch('lucasrep.cli.verify_theorem', side_effect=ArithError('undecided')):
            code, _, err = self.run_cli('verify', '--k-min', '2', '--k-max', '2', '-j', '1')
        self.assertEqual(EXIT_CERTIFICATION, code)
        self.assertIn('certification failed: undecided', err)

    def test_precision_cap(self):
        path = os.path.join(self.directory, 'report.json')
        code, out, err = self.run_cli('--precision-start', '64', '--precision-cap', '64',
                                      'verify', '--k-min', '2', '--k-max', '2', '-j', '1',
                                      '--report', path)
        self.assertEqual(EXIT_CERTIFICATION, code)
        self.assertIn('k=2: Failed', err)
        self.assertIn('[PrecisionError]', out)
        self.assertIn('Status: Failed', out)
        with open(path) as f:
            data = from_json(f.read())
        self.assertEqual({'type': 'PrecisionError', 'certification': True},
                         data['reports'][0]['error'])

    def test_interrupted(self):
        with mock.patch('lucasrep.cli.verify_theorem', side_effect=KeyboardInterrupt):
            code, out, _ = self.run_cli('-f', 'json', 'verify', '--k-min', '2', '--k-max', '3',
                                        '-j', '1')
        self.assertEqual(EXIT_MISMATCH, code)
        data = json.loads(out)
        self.assertTrue(data['interrupted'])
        self.assertEqual([], data['reports'])


class TestUsage(CliTestCase):
    def test_no_command(self):
        self.assertEqual(EXIT_USAGE, self.run_cli()[0])
        self.assertEqual(EXIT_USAGE, self.run_cli('frobnicate')[0])
        self.assertEqual(EXIT_USAGE, self.run_cli('-f', 'xml', 'digits', '5')[0])

    def test_run_config(self):
        config = RunConfig(k_min=2, k_max=9, precision_start=128, precision_cap=1024, jobs=2)
        self.assertEqual(128, config.precision_start)
        self.assertEqual('RunConfig(k=2..9, budget=1000, jobs=2, format=human)', repr(config))
        for kwargs in ({'k_min': 1}, {'k_min': 5, 'k_max': 4}, {'jobs': 0},
                       {'search_budget': 5}, {'max_advance': -1}, {'output_format': 'xml'},
                       {'precision_start': 2048, 'precision_cap': 1024},
                       {'precision_start': 32}, {'precision_start': MIN_BITS - 1}):
            with self.assertRaises(UsageError):
                RunConfig(**kwargs)

    def test_apply(self):
        RunConfig(precision_start=300, precision_cap=4096).apply()
        self.assertEqual('300', os.environ['LUCASREP_PRECISION_START'])
        self.assertEqual('4096', os.environ['LUCASREP_PRECISION_CAP'])
        self.assertEqual(300, RunConfig().precision_start)


if __name__ == '__main__':
    unittest.main()
