"""
Command line interface

Subcommands:

    seq     terms of the k-generalized Lucas sequence
    digits  almost repdigit classification of a number
    reduce  one run of the reduction lemma on a given linear form
    verify  per-k verification for a range of orders
    chain   constant chain ruling out orders above 470

Exit codes: 0 success, 1 verification mismatch or incomplete run, 2 usage
error, 3 certification failure.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import argparse
import csv
import io
import json
import logging
import os
import sys

from .classes import Object, LucasrepError, SequenceError, ReductionError, DomainError, \
    CERTIFICATION_ERRORS
from .data import get_cache_dir, get_precision_start, get_precision_cap
from .arith import MIN_BITS
from .sequences import lucas_stream
from .digits import decompose, is_almost_repdigit
from .contfrac import ExpansionCache, set_cache
from .reduction import DEFAULT_MAX_ADVANCE, ReductionInstance, Reducer
from .pipeline import DEFAULT_K_MAX, VerificationReport, verify_theorem, large_k_analysis
from .report import FORMATS, render, render_chain, render_reduction, to_json
from .utils import parse_real, parse_int


log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_CERTIFICATION = 3

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(name)s - %(message)s'


class UsageError(LucasrepError):
    pass


class RunConfig(Object):
    '''Settings of a run, from flags with the environment as fallback'''
    __slots__ = ['_k_min', '_k_max', '_precision_start', '_precision_cap', '_search_budget',
                 '_cache_dir', '_output_format', '_jobs', '_max_advance', '_report_path']

    def __init__(self, k_min=2, k_max=DEFAULT_K_MAX, precision_start=None, precision_cap=None,
                 search_budget=1000, cache_dir=None, output_format='human', jobs=None,
                 max_advance=DEFAULT_MAX_ADVANCE, report_path=None):
        super(RunConfig, self).__init__()
        self._k_min = k_min
        self._k_max = k_max
        self._precision_start = precision_start if precision_start is not None \
            else get_precision_start()
        self._precision_cap = precision_cap if precision_cap is not None \
            else get_precision_cap()
        self._search_budget = search_budget
        self._cache_dir = cache_dir
        self._output_format = output_format
        self._jobs = jobs if jobs is not None else os.cpu_count() or 1
        self._max_advance = max_advance
        self._report_path = report_path
        self.validate()

    def validate(self):
        if not 2 <= self._k_min <= self._k_max:
            raise UsageError('Need 2 <= k-min <= k-max, got %d, %d' %
                             (self._k_min, self._k_max))
        if self._precision_start < MIN_BITS:
            raise UsageError('Precision start must be at least %d bits, got %d' %
                             (MIN_BITS, self._precision_start))
        if self._precision_start > self._precision_cap:
            raise UsageError('Precision start %d exceeds cap %d' %
                             (self._precision_start, self._precision_cap))
        if self._search_budget < 6:
            raise UsageError('Search budget must be at least 6, got %d' % self._search_budget)
        if self._jobs < 1:
            raise UsageError('Need at least one job, got %d' % self._jobs)
        if self._max_advance < 0:
            raise UsageError('max-advance must be non-negative, got %d' % self._max_advance)
        if self._output_format not in FORMATS:
            raise UsageError('Unknown output format %s' % self._output_format)

    @classmethod
    def from_args(cls, args):
        return cls(k_min=getattr(args, 'k_min', 2),
                   k_max=getattr(args, 'k_max', DEFAULT_K_MAX),
                   precision_start=args.precision_start,
                   precision_cap=args.precision_cap,
                   search_budget=getattr(args, 'budget', 1000),
                   cache_dir=None if args.no_cache else args.cache_dir or get_cache_dir(),
                   output_format=args.format,
                   jobs=getattr(args, 'jobs', None),
                   max_advance=getattr(args, 'max_advance', DEFAULT_MAX_ADVANCE),
                   report_path=getattr(args, 'report', None))

    @property
    def k_min(self):
        return self._k_min

    @property
    def k_max(self):
        return self._k_max

    @property
    def precision_start(self):
        return self._precision_start

    @property
    def precision_cap(self):
        return self._precision_cap

    @property
    def search_budget(self):
        return self._search_budget

    @property
    def cache_dir(self):
        return self._cache_dir

    @property
    def output_format(self):
        return self._output_format

    @property
    def jobs(self):
        return self._jobs

    @property
    def max_advance(self):
        return self._max_advance

    @property
    def report_path(self):
        return self._report_path

    def apply(self):
        """Export precision and cache settings to this process and its workers"""
        os.environ['LUCASREP_PRECISION_START'] = str(self._precision_start)
        os.environ['LUCASREP_PRECISION_CAP'] = str(self._precision_cap)
        if self._cache_dir:
            os.environ['LUCASREP_CACHE_DIR'] = self._cache_dir
            set_cache(ExpansionCache(directory=self._cache_dir))
        else:
            set_cache(None)

    def __repr__(self):
        return 'RunConfig(k=%d..%d, budget=%d, jobs=%d, format=%s)' % (
            self._k_min, self._k_max, self._search_budget, self._jobs, self._output_format)


def _write(text):
    sys.stdout.write(text)
    sys.stdout.flush()


def _rows(fieldnames, rows):
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=fieldnames, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return out.getvalue()


def cmd_seq(k, n_max, fmt='human'):
    terms = lucas_stream(k, n_max)
    if fmt == 'json':
        _write(json.dumps([[n, str(value)] for n, value in terms]) + '\n')
    elif fmt == 'csv':
        _write(_rows(['n', 'value'], ({'n': n, 'value': value} for n, value in terms)))
    else:
        _write(''.join('%d %d\n' % term for term in terms))
    return EXIT_OK


def _classify(value, forms):
    if not forms:
        return 'not an almost repdigit'
    if len(forms) == 1 and forms[0].a == forms[0].b:
        return 'repdigit'
    return 'almost repdigit'


def cmd_digits(value, fmt='human'):
    if value < 1:
        raise UsageError('Expected a positive integer, got %d' % value)
    forms = decompose(value)
    kind = _classify(value, forms)
    if fmt == 'json':
        _write(json.dumps({
            'value': str(value), 'classification': kind,
            'almost_repdigit': is_almost_repdigit(value),
            'forms': [f.as_dict() for f in forms],
        }, indent=2) + '\n')
    elif fmt == 'csv':
        _write(_rows(['value', 'a', 'b', 'd1', 'd2'],
                     (dict(f.as_dict(), value=value) for f in forms)))
    else:
        lines = ['%d: %s' % (value, kind)]
        lines.extend('  form (a=%d, b=%d, d1=%d, d2=%d)' % f.key() for f in forms)
        _write('\n'.join(lines) + '\n')
    return EXIT_OK


def cmd_reduce(gamma, mu, M, A, B, max_advance=DEFAULT_MAX_ADVANCE, fmt='human'):
    try:
        inst = ReductionInstance(parse_real(gamma), parse_real(mu), parse_real(A),
                                 parse_real(B), parse_int(M))
    except (DomainError, ReductionError) as e:
        raise UsageError(str(e))
    result = Reducer(max_advance=max_advance).bound(inst)
    _write(render_reduction(result, fmt))
    return EXIT_OK


def _save(report, path):
    if not path:
        return
    tmp = path + '.tmp'
    with open(tmp, 'w') as f:
        f.write(to_json(report) + '\n')
    os.replace(tmp, path)
    log.info('Report written to %s', path)


def cmd_verify(config):
    config.apply()
    done = []

    def progress(report):
        done.append(report)
        sys.stderr.write('k=%d: %s, %d solution(s) [%d/%d]\n' % (
            report.k, report.status.value, len(report.solutions), len(done),
            config.k_max - config.k_min + 1))
        sys.stderr.flush()

    try:
        report = verify_theorem(config.k_min, config.k_max, config.search_budget,
                                jobs=config.jobs, max_advance=config.max_advance,
                                cache_dir=config.cache_dir, on_report=progress)
    except KeyboardInterrupt:
        log.warning('Interrupted after %d of %d orders', len(done),
                    config.k_max - config.k_min + 1)
        report = VerificationReport(config.k_min, config.k_max, config.search_budget, done,
                                    interrupted=True)
    _save(report, config.report_path)
    _write(render(report, config.output_format))
    if report.certification_failed():
        return EXIT_CERTIFICATION
    return EXIT_OK if report.verified() else EXIT_MISMATCH


def cmd_chain(config, max_rounds):
    config.apply()
    chain = large_k_analysis(report_only=True, max_advance=config.max_advance,
                             max_rounds=max_rounds)
    _write(render_chain(chain, config.output_format))
    return EXIT_MISMATCH if chain.failed else EXIT_OK


def _parser():
    parser = argparse.ArgumentParser(
        prog='lucasrep',
        description='Certified verification of almost repdigit k-generalized Lucas numbers')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('-f', '--format', choices=FORMATS, default='human',
                        help='Output format, Default: %(default)s')
    parser.add_argument('--precision-start', type=int,
                        help='Starting precision in bits, Default: $LUCASREP_PRECISION_START '
                        'or 256')
    parser.add_argument('--precision-cap', type=int,
                        help='Precision ceiling in bits, Default: $LUCASREP_PRECISION_CAP '
                        'or 2^20')
    parser.add_argument('--cache-dir',
                        help='Continued fraction cache, Default: $LUCASREP_CACHE_DIR or the '
                        'user cache directory')
    parser.add_argument('--no-cache', action='store_true', help='Do not use the disk cache')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Default: %(default)s')
    parser.add_argument('--log-file', help='Log to this file instead of stderr')
    commands = parser.add_subparsers(dest='command', required=True)

    seq = commands.add_parser('seq', help='Print L_n^(k) for 1 <= n <= n-max')
    seq.add_argument('--k', type=int, required=True, help='Order, at least 2')
    seq.add_argument('--n-max', type=int, required=True)

    digits = commands.add_parser('digits', help='Classify a number by its digits')
    digits.add_argument('number', type=int)

    reduce_ = commands.add_parser(
        'reduce', help='Bound w in 0 < |u gamma - v + mu| < A B^-w with u <= M',
        description='Expressions are sums of integer multiples of log(p)/log(q), '
        'log(p), c/log(q), sqrt(n), tau(k), alpha(k), log10, mu1(k,a), '
        'mu2(k,gap,a,b), mu3(a), mu4(a,b,gap) and rationals.')
    reduce_.add_argument('--gamma', required=True)
    reduce_.add_argument('--mu', required=True)
    reduce_.add_argument('--M', required=True, help='Bound on u, e.g. 1.8e291')
    reduce_.add_argument('--A', required=True)
    reduce_.add_argument('--B', required=True)
    reduce_.add_argument('--max-advance', type=int, default=DEFAULT_MAX_ADVANCE)

    verify = commands.add_parser('verify', help='Verify the solution set for a range of k')
    verify.add_argument('--k-min', type=int, default=2)
    verify.add_argument('--k-max', type=int, default=DEFAULT_K_MAX)
    verify.add_argument('--budget', type=int, default=1000,
                        help='Largest n searched per k, Default: %(default)s')
    verify.add_argument('-j', '--jobs', type=int,
                        help='Worker processes, Default: logical CPU count')
    verify.add_argument('--max-advance', type=int, default=DEFAULT_MAX_ADVANCE)
    verify.add_argument('--report', help='Write the JSON report to this file')

    chain = commands.add_parser('chain', help='Constant chain for k > 470')
    chain.add_argument('--max-advance', type=int, default=DEFAULT_MAX_ADVANCE)
    chain.add_argument('--max-rounds', type=int, default=6)
    return parser


def _setup_logging(args):
    logging.basicConfig(level=getattr(logging, args.log_level), filename=args.log_file,
                        format=LOG_FORMAT)


def _dispatch(args):
    if args.command == 'seq':
        return cmd_seq(args.k, args.n_max, args.format)
    if args.command == 'digits':
        return cmd_digits(args.number, args.format)
    config = RunConfig.from_args(args)
    if args.command == 'reduce':
        config.apply()
        return cmd_reduce(args.gamma, args.mu, args.M, args.A, args.B, args.max_advance,
                          args.format)
    if args.command == 'verify':
        return cmd_verify(config)
    return cmd_chain(config, args.max_rounds)


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    _setup_logging(args)
    try:
        return _dispatch(args)
    except (UsageError, SequenceError) as e:
        sys.stderr.write('%s: error: %s\n' % (parser.prog, e))
        return EXIT_USAGE
    except CERTIFICATION_ERRORS as e:
        log.error('Certification failed: %s', e)
        sys.stderr.write('%s: certification failed: %s\n' % (parser.prog, e))
        return EXIT_CERTIFICATION
