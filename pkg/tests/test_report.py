#!/usr/bin/env python

import csv
import io
import json
import unittest

from testing_utils import *

from lucasrep.arith import PrecisionSpec, ball_from_rational
from lucasrep.algebraic import BoundChain
from lucasrep.reduction import ReductionKind, ReductionResult
from lucasrep.pipeline import Status, SolutionRecord, PipelineReport, VerificationReport
from lucasrep.report import (
    ReportError, REPORT_KEYS, K_REPORT_KEYS, CSV_FIELDS, check_schema, to_json, from_json,
    to_csv, to_human, render, render_chain, render_reduction,
)


def k_report(k, status, keys, window=(6, 150), reason=None):
    report = PipelineReport(k)
    report.search_window = window
    report.add_case('brute_search', {'n_min': window[0], 'n_max': window[1]}, {})
    report.chain.add('n_bound', 'test bound', window[1])
    report.add_solutions([SolutionRecord(*key) for key in keys])
    report.finish(status, reason)
    return report


def verification(interrupted=False):
    reports = [
        k_report(2, Status.COMPLETE, [(2, 11, 199), (2, 12, 322)]),
        k_report(3, Status.COMPLETE, [(3, 8, 118), (3, 10, 399)]),
    ]
    return VerificationReport(2, 3, 1000, reports, interrupted=interrupted)


class TestJson(unittest.TestCase):
    def test_round_trip(self):
        report = verification()
        data = from_json(to_json(report))
        self.assertEqual(REPORT_KEYS, set(data))
        self.assertEqual(K_REPORT_KEYS, set(data['reports'][0]))
        self.assertEqual('Complete', data['status'])
        self.assertTrue(data['matches_expected'])
        self.assertEqual(['199', '322', '118', '399'], [s['value'] for s in data['solutions']])
        self.assertEqual([6, 150], data['reports'][0]['search_window'])
        self.assertEqual({'a': 9, 'b': 1, 'd1': 3, 'd2': 2},
                         data['solutions'][0]['forms'][0])

    def test_render(self):
        report = verification()
        self.assertEqual(json.loads(render(report, 'json')), json.loads(to_json(report)))
        with self.assertRaises(ReportError):
            render(report, 'xml')

    def test_schema_errors(self):
        data = json.loads(to_json(verification()))
        del data['created']
        with self.assertRaises(ReportError):
            check_schema(data)
        data = json.loads(to_json(verification()))
        data['reports'][0]['extra'] = 1
        with self.assertRaises(ReportError):
            check_schema(data)
        data = json.loads(to_json(verification()))
        data['solutions'][0]['value'] = 'many'
        with self.assertRaises(ReportError):
            check_schema(data)
        with self.assertRaises(ValueError):
            from_json('{not json')


class TestCsv(unittest.TestCase):
    def test_rows(self):
        rows = list(csv.DictReader(io.StringIO(to_csv(verification()))))
        self.assertEqual(4, len(rows))
        self.assertEqual(CSV_FIELDS, list(rows[0].keys()))
        self.assertEqual({'k': '2', 'n': '12', 'value': '322', 'a': '2', 'b': '3', 'd1': '3',
                          'd2': '2', 'status': 'Complete'}, rows[1])

    def test_empty(self):
        report = VerificationReport(4, 4, 1000, [k_report(4, Status.COMPLETE, [])])
        self.assertEqual(','.join(CSV_FIELDS) + '\n', render(report, 'csv'))


class TestHuman(unittest.TestCase):
    def test_text(self):
        text = to_human(verification())
        self.assertIn('k=2: Complete, searched n in 6..150, 2 solution(s)', text)
        self.assertIn('L_11^(2) = 199  (a=9, b=1, d1=3, d2=2)', text)
        self.assertIn('Status: Complete', text)
        self.assertIn('Solutions match the expected set for k in 2..3', text)

    def test_mismatch(self):
        reports = [k_report(2, Status.BOUND_ONLY, [(2, 11, 199)], reason='over budget')]
        text = to_human(VerificationReport(2, 2, 10, reports, interrupted=True))
        self.assertIn('(over budget)', text)
        self.assertIn('Status: BoundOnly', text)
        self.assertIn('Interrupted: partial report', text)
        self.assertIn('Missing: k=2 n=12 value=322', text)


class TestChain(unittest.TestCase):
    def setUp(self):
        self.chain = BoundChain(3)
        self.chain.add('n_bound', 'ceil(1.3e30 k^8 log^5 k)', 10 ** 40)
        self.chain.add('dgap_bound', 'max_a Gamma1 reduction', 31)

    def test_text(self):
        text = render_chain(self.chain, 'human')
        self.assertTrue(text.startswith('n_bound'))
        self.assertIn('Status: Complete', text)
        self.chain.fail('a_rounds', 'no contradiction')
        text = render_chain(self.chain, 'human')
        self.assertIn('[not certified]', text)
        self.assertIn('Status: Failed at a_rounds', text)

    def test_json(self):
        data = json.loads(render_chain(self.chain, 'json'))
        self.assertEqual('Complete', data['status'])
        # Too large for a double
        self.assertEqual(str(10 ** 40), data['steps'][0]['value'])
        self.assertEqual(31, data['steps'][1]['value'])

    def test_csv(self):
        rows = list(csv.DictReader(io.StringIO(render_chain(self.chain, 'csv'))))
        self.assertEqual(['n_bound', 'dgap_bound'], [r['step'] for r in rows])
        self.assertEqual('True', rows[0]['certified'])


class TestReduction(unittest.TestCase):
    def test_reduced(self):
        eps = ball_from_rational(1, 50, PrecisionSpec(128))
        result = ReductionResult(ReductionKind.REDUCED, 33461, eps, 22)
        self.assertEqual('Reduced(q=33461, eps>0.02, w<22)\n',
                         render_reduction(result, 'human'))
        data = json.loads(render_reduction(result, 'json'))
        self.assertEqual({'kind': 'Reduced', 'q_used': '33461', 'advances': 0,
                          'epsilon_lower': '0.02', 'w_bound': 22}, data)

    def test_degenerate(self):
        result = ReductionResult(ReductionKind.DEGENERATE, 13, note='relation r=1, m=1',
                                 relation=(1, 1), advances=3, fallback_bound=12)
        self.assertEqual('Degenerate(relation r=1, m=1)\n', render_reduction(result, 'human'))
        rows = list(csv.DictReader(io.StringIO(render_reduction(result, 'csv'))))
        self.assertEqual('12', rows[0]['fallback_bound'])
        self.assertEqual('Degenerate', rows[0]['kind'])


if __name__ == '__main__':
    unittest.main()
