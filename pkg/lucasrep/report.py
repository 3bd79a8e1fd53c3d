"""
Report module

Serialise verification reports, bound chains and reduction results as JSON,
CSV or human readable text.

JSON object model of a verification report:

    {
      "k_min": int, "k_max": int, "search_budget": int,
      "created": ISO 8601 UTC timestamp, "interrupted": bool,
      "status": "Complete" | "BoundOnly" | "Failed",
      "matches_expected": bool,
      "missing": [[k, n, value], ...], "unexpected": [[k, n, value], ...],
      "solutions": [solution, ...],
      "reports": [
        {
          "k": int, "status": str, "reason": str | null,
          "error": {"type": exception class, "certification": bool} | null,
          "search_window": [n_min, n_max] | null,
          "solutions": [solution, ...],
          "case_trace": [{"case": str, "inputs": {...}, "outputs": {...}}, ...],
          "bounds": [{"step": str, "formula": str, "value": ..., "certified": bool}, ...],
          "timings": {case: seconds}
        }, ...
      ]
    }

where a solution is {"k": int, "n": int, "value": decimal string,
"forms": [{"a": int, "b": int, "d1": int, "d2": int}, ...]}. Integers too large
for a double are written as decimal strings.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import csv
import io
import json

from .classes import LucasrepError


FORMATS = ('human', 'json', 'csv')
CSV_FIELDS = ['k', 'n', 'value', 'a', 'b', 'd1', 'd2', 'status']

REPORT_KEYS = frozenset([
    'k_min', 'k_max', 'search_budget', 'created', 'interrupted', 'status',
    'matches_expected', 'missing', 'unexpected', 'solutions', 'reports',
])
K_REPORT_KEYS = frozenset([
    'k', 'status', 'reason', 'error', 'search_window', 'solutions', 'case_trace', 'bounds',
    'timings',
])


class ReportError(LucasrepError):
    pass


def check_schema(data):
    """Validate a decoded JSON verification report against the object model"""
    if set(data) != REPORT_KEYS:
        raise ReportError('Report keys %s differ from %s' % (sorted(data), sorted(REPORT_KEYS)))
    for report in data['reports']:
        if set(report) != K_REPORT_KEYS:
            raise ReportError('Report for k=%s has keys %s' % (report.get('k'), sorted(report)))
    for solution in data['solutions']:
        if set(solution) != {'k', 'n', 'value', 'forms'}:
            raise ReportError('Malformed solution %s' % solution)
        try:
            int(solution['value'])
        except (TypeError, ValueError):
            raise ReportError('Solution value %r is not an integer' % solution['value'])
    return data


def to_json(report):
    return json.dumps(report.as_dict(), indent=2, sort_keys=True)


def from_json(text):
    return check_schema(json.loads(text))


def to_csv(report):
    """One row per digit form of every solution"""
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator='\n')
    writer.writeheader()
    status = {r.k: r.status.value if r.status else '' for r in report.reports}
    for solution in report.solutions():
        for form in solution.forms:
            writer.writerow({
                'k': solution.k, 'n': solution.n, 'value': solution.value,
                'a': form.a, 'b': form.b, 'd1': form.d1, 'd2': form.d2,
                'status': status.get(solution.k, ''),
            })
    return out.getvalue()


def _form_text(form):
    return '(a=%d, b=%d, d1=%d, d2=%d)' % (form.a, form.b, form.d1, form.d2)


def to_human(report):
    lines = []
    for r in report.reports:
        window = '%d..%d' % r.search_window if r.search_window else '-'
        line = 'k=%d: %s, searched n in %s, %d solution(s)' % (
            r.k, r.status.value if r.status else 'Pending', window, len(r.solutions))
        if r.reason:
            line += ' (%s)' % r.reason
        if r.error:
            line += ' [%s]' % r.error['type']
        lines.append(line)
    lines.append('')
    for s in report.solutions():
        lines.append('L_%d^(%d) = %d  %s' % (s.n, s.k, s.value,
                                            ' '.join(_form_text(f) for f in s.forms)))
    lines.append('Status: %s' % report.status.value)
    if report.interrupted:
        lines.append('Interrupted: partial report')
    if report.matches_expected():
        lines.append('Solutions match the expected set for k in %d..%d' %
                     (report.k_min, report.k_max))
    else:
        for key in report.missing():
            lines.append('Missing: k=%d n=%d value=%d' % key)
        for key in report.unexpected():
            lines.append('Unexpected: k=%d n=%d value=%d' % key)
    return '\n'.join(lines) + '\n'


def render(report, fmt):
    if fmt == 'json':
        return to_json(report) + '\n'
    if fmt == 'csv':
        return to_csv(report)
    if fmt == 'human':
        return to_human(report)
    raise ReportError('Unknown output format %s' % fmt)


def chain_text(chain):
    lines = []
    for step in chain.steps:
        mark = '' if step['certified'] else '  [not certified]'
        lines.append('%-22s %-60s %s%s' % (step['step'], step['formula'], step['value'], mark))
    status = 'Failed at %s' % chain.failure if chain.failed else 'Complete'
    lines.append('Status: %s' % status)
    return '\n'.join(lines) + '\n'


def render_chain(chain, fmt):
    data = chain.as_dict()
    if fmt == 'json':
        return json.dumps(data, indent=2) + '\n'
    if fmt == 'csv':
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=['step', 'formula', 'value', 'certified'],
                                lineterminator='\n')
        writer.writeheader()
        for step in data['steps']:
            writer.writerow(step)
        return out.getvalue()
    return chain_text(chain)


def render_reduction(result, fmt):
    data = result.as_dict()
    if fmt == 'json':
        return json.dumps(data, indent=2, sort_keys=True) + '\n'
    if fmt == 'csv':
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=sorted(data), lineterminator='\n')
        writer.writeheader()
        writer.writerow(data)
        return out.getvalue()
    return '%r\n' % result
