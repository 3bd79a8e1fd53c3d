"""
Pipeline module

Per-k verification that the only almost repdigit k-generalized Lucas numbers
with at least three digits are the six known ones: the small index case, the
bound chain, the reductions of the two linear forms, exhaustive searches below
the reduced bound and the case of numbers b 10^d2. For k > 470 the constant
chain that rules out further solutions is reproduced with certified arithmetic.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import enum
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from fractions import Fraction
from functools import lru_cache

from .classes import Object, Logable, LucasrepError, PipelineError, CERTIFICATION_ERRORS, \
    utcnow
from .arith import (
    CertifiedReal, PrecisionSpec, Order,
    ball_from_int, ball_from_rational, ball_log, ball_ceil, ball_compare, escalate, log_ratio,
)
from .sequences import lucas_term, iter_lucas, power_form_term
from .digits import is_almost_repdigit, decompose, in_digit_window
from .algebraic import (
    BOUND_BITS, BoundChain, MatveevInput,
    alpha_real, tau_real, log10_real, mu_gamma1, mu_gamma2, matveev_bound,
    bound_n_initial, bound_n_a0, bound_dgap_initial, matveev_dgap_bound,
)
from .reduction import (
    DEFAULT_MAX_ADVANCE, ReductionInstance, ReductionKind, Reducer,
)
from .contfrac import ExpansionCache, set_cache


log = logging.getLogger(__name__)

EXPECTED_SOLUTIONS = frozenset([
    (2, 11, 199), (2, 12, 322), (3, 8, 118), (3, 10, 399), (7, 10, 755), (9, 10, 766),
])
LARGE_K = 470
SMALL_N_LIMIT = 70
BRUTE_START = 6
DEFAULT_K_MAX = 100
MAX_ROUNDS = 6


class Status(enum.Enum):
    COMPLETE = 'Complete'
    BOUND_ONLY = 'BoundOnly'
    FAILED = 'Failed'


class SolutionRecord(Object):
    '''L_n^(k) = value, an almost repdigit with the given digit forms'''
    __slots__ = ['_k', '_n', '_value', '_forms']

    def __init__(self, k, n, value, forms=None):
        super(SolutionRecord, self).__init__()
        self._k = k
        self._n = n
        self._value = value
        self._forms = list(forms) if forms is not None else decompose(value)

    @property
    def k(self):
        return self._k

    @property
    def n(self):
        return self._n

    @property
    def value(self):
        return self._value

    @property
    def forms(self):
        return list(self._forms)

    def key(self):
        return (self._k, self._n, self._value)

    def validate(self):
        """Recompute the term and its digit forms; raise PipelineError on mismatch"""
        if lucas_term(self._k, self._n) != self._value:
            raise PipelineError('L_%d^(%d) is not %d' % (self._n, self._k, self._value))
        if self._value < 100:
            raise PipelineError('%d has fewer than three digits' % self._value)
        if not self._forms or self._forms != decompose(self._value):
            raise PipelineError('%d has inconsistent digit forms' % self._value)
        for form in self._forms:
            if not form.is_valid() or form.value != self._value:
                raise PipelineError('Invalid form %r for %d' % (form, self._value))
            if self._n > 5 and not in_digit_window(self._n, form.d1):
                raise PipelineError('%d digits outside the window for n=%d' %
                                    (form.d1, self._n))
        return True

    def as_dict(self):
        return {
            'k': self._k, 'n': self._n, 'value': str(self._value),
            'forms': [f.as_dict() for f in self._forms],
        }

    def __eq__(self, other):
        return isinstance(other, SolutionRecord) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return 'SolutionRecord(k=%d, n=%d, value=%d)' % self.key()


class PipelineReport(Object):
    '''Audit trail of the verification for one k'''
    __slots__ = ['_k', '_case_trace', '_search_window', '_solutions', '_status', '_reason',
                 '_error', '_chain', '_timings']

    def __init__(self, k):
        super(PipelineReport, self).__init__()
        self._k = k
        self._case_trace = []
        self._search_window = None
        self._solutions = []
        self._status = None
        self._reason = None
        self._error = None
        self._chain = BoundChain(k)
        self._timings = {}

    @property
    def k(self):
        return self._k

    @property
    def case_trace(self):
        return list(self._case_trace)

    @property
    def search_window(self):
        return self._search_window

    @search_window.setter
    def search_window(self, value):
        self._search_window = value

    @property
    def solutions(self):
        return sorted(self._solutions, key=lambda s: s.key())

    @property
    def status(self):
        return self._status

    @property
    def reason(self):
        return self._reason

    @property
    def error(self):
        return self._error

    @property
    def chain(self):
        return self._chain

    @property
    def timings(self):
        return dict(self._timings)

    def add_case(self, case, inputs, outputs, seconds=None):
        self._case_trace.append({'case': case, 'inputs': inputs, 'outputs': outputs})
        if seconds is not None:
            self._timings[case] = round(seconds, 3)

    def add_solutions(self, records):
        known = set(self._solutions)
        for record in records:
            if record not in known:
                self._solutions.append(record)
                known.add(record)

    def finish(self, status, reason=None, error=None):
        """Close the report; error is the exception that stopped the run, if any"""
        self._status = status
        self._reason = reason
        if error is not None:
            self._error = {'type': type(error).__name__,
                           'certification': isinstance(error, CERTIFICATION_ERRORS)}

    def certification_failed(self):
        return self._error is not None and self._error['certification']

    def as_dict(self):
        return {
            'k': self._k,
            'status': self._status.value if self._status else None,
            'reason': self._reason,
            'error': self._error,
            'search_window': list(self._search_window) if self._search_window else None,
            'solutions': [s.as_dict() for s in self.solutions],
            'case_trace': self._case_trace,
            'bounds': self._chain.as_dict()['steps'],
            'timings': self._timings,
        }


class VerificationReport(Object):
    '''Merged per-k reports of a verification run'''
    __slots__ = ['_k_min', '_k_max', '_search_budget', '_reports', '_created', '_interrupted']

    def __init__(self, k_min, k_max, search_budget, reports=(), interrupted=False):
        super(VerificationReport, self).__init__()
        self._k_min = k_min
        self._k_max = k_max
        self._search_budget = search_budget
        self._reports = sorted(reports, key=lambda r: r.k)
        self._created = utcnow()
        self._interrupted = interrupted

    @property
    def k_min(self):
        return self._k_min

    @property
    def k_max(self):
        return self._k_max

    @property
    def search_budget(self):
        return self._search_budget

    @property
    def reports(self):
        return list(self._reports)

    @property
    def created(self):
        return self._created

    @property
    def interrupted(self):
        return self._interrupted

    def solutions(self):
        return sorted((s for r in self._reports for s in r.solutions), key=lambda s: s.key())

    def solution_keys(self):
        return set(s.key() for s in self.solutions())

    def expected(self):
        return set(s for s in EXPECTED_SOLUTIONS if self._k_min <= s[0] <= self._k_max)

    def missing(self):
        return sorted(self.expected() - self.solution_keys())

    def unexpected(self):
        return sorted(self.solution_keys() - self.expected())

    def matches_expected(self):
        return not self.missing() and not self.unexpected()

    @property
    def status(self):
        statuses = set(r.status for r in self._reports)
        if self._interrupted or len(self._reports) < self._k_max - self._k_min + 1:
            return Status.FAILED if Status.FAILED in statuses else Status.BOUND_ONLY
        if Status.FAILED in statuses:
            return Status.FAILED
        if Status.BOUND_ONLY in statuses:
            return Status.BOUND_ONLY
        return Status.COMPLETE

    def certification_failed(self):
        return any(r.certification_failed() for r in self._reports)

    def verified(self):
        return self.status == Status.COMPLETE and self.matches_expected()

    def as_dict(self):
        return {
            'k_min': self._k_min,
            'k_max': self._k_max,
            'search_budget': self._search_budget,
            'created': self._created.isoformat(),
            'interrupted': self._interrupted,
            'status': self.status.value,
            'matches_expected': self.matches_expected(),
            'missing': [list(s) for s in self.missing()],
            'unexpected': [list(s) for s in self.unexpected()],
            'solutions': [s.as_dict() for s in self.solutions()],
            'reports': [r.as_dict() for r in self._reports],
        }


def _record(k, n, value):
    return SolutionRecord(k, n, value, decompose(value))


def case_small_n(k):
    """Almost repdigits 3 * 2^(n-2) with at least three digits for 2 <= n <= min(k, 69)"""
    if k < 2:
        raise PipelineError('Order k must be at least 2, got %d' % k)
    result = []
    for n in range(2, min(k, SMALL_N_LIMIT - 1) + 1):
        value = power_form_term(n)
        if value >= 100 and is_almost_repdigit(value):
            result.append(_record(k, n, value))
    return result


def brute_search(k, n_max, n_min=BRUTE_START):
    """All n in [n_min, n_max] with L_n^(k) >= 100 an almost repdigit"""
    if n_max < BRUTE_START:
        raise PipelineError('Search window must reach n=%d, got %d' % (BRUTE_START, n_max))
    result = []
    for n, value in iter_lucas(k, max(n_min, BRUTE_START), n_max):
        if value >= 100 and is_almost_repdigit(value):
            result.append(_record(k, n, value))
    return result


def _is_digit_power_of_ten(value):
    digits = str(value)
    return len(digits) >= 3 and digits[0] != '0' and digits[1:] == '0' * (len(digits) - 1)


def case_a0(k, n_max, sequence=None):
    """All n in the window with L_n = b 10^d2, b in 1..9 and d2 >= 2"""
    if n_max < BRUTE_START:
        raise PipelineError('Search window must reach n=%d, got %d' % (BRUTE_START, n_max))
    if sequence is None:
        sequence = iter_lucas(k, BRUTE_START, n_max)
    result = []
    for n, value in sequence:
        if n < BRUTE_START or n > n_max:
            continue
        if value > 0 and _is_digit_power_of_ten(value):
            log.warning('L_%d^(%d) = %d has the form b 10^d', n, k, value)
            result.append(_record(k, n, value))
    return result


def power_of_two_identity(n, a, b, d1, d2):
    """2^(n-2) = 10^d1 (a/9) + (b - a) 10^d2, in exact arithmetic"""
    if n < 2:
        return False
    return 9 * 2 ** (n - 2) == a * 10 ** d1 + 9 * (b - a) * 10 ** d2


def lambda4_nonzero(d1_limit=64):
    """
    No 2^(n-2) = 10^d1 + b - 9 for b in 0..9 and d1 >= 3: for d1 = 3 by
    inspection of 991..1000, for d1 >= 4 modulo 16, where 10^d1 vanishes, so
    2^(n-2) = b - 9 (mod 16) forces b = 9 and 2^(n-2) = 10^d1. The exact identity
    is also checked for every d1 up to d1_limit.
    """
    if any(power_of_two_identity(n, 9, b, 3, 0) for b in range(10) for n in range(2, 13)):
        return False
    # For n - 2 >= 4 both 2^(n-2) and 10^d1 vanish mod 16; smaller powers are below 10^4 - 9
    if [b for b in range(10) if (b - 9) % 16 == 0] != [9] or 2 ** 3 >= 10 ** 4 - 9:
        return False
    # b = 9 leaves 2^(n-2) = 10^d1, which 5 divides
    if any(pow(2, e, 5) == 0 for e in range(4)):
        return False
    for d1 in range(4, d1_limit + 1):
        for b in range(10):
            value = 10 ** d1 + b - 9
            if value & (value - 1) == 0:
                return False
    return True


@lru_cache(maxsize=None)
def _over_log10(c):
    return CertifiedReal('%d/log10' % c,
                         lambda prec: ball_from_int(c, prec) / log10_real().at(prec))


@lru_cache(maxsize=None)
def log2_over_log10():
    return log_ratio(2, 10)


def gamma1_instance(k, a, M):
    """(n-1) tau_k - d1 + mu1(k, a), |.| < 174 / (10^(d1-d2) log 10)"""
    return ReductionInstance(tau_real(k), mu_gamma1(k, a), _over_log10(174), 10, M,
                             label='Gamma1(k=%d,a=%d)' % (k, a))


def reduce_gamma1(k, a, M, max_advance=DEFAULT_MAX_ADVANCE):
    """(G, result) with d1 - d2 <= G for the digit a"""
    result = Reducer(max_advance=max_advance).bound(gamma1_instance(k, a, M))
    # The linear form is only small once d1 - d2 > 3
    return max(result.bound - 1, 3), result


def _gamma2_digits(gap, a, b):
    return Fraction(a, 9) + Fraction(b - a, 10 ** gap)


def gamma2_instances(k, dgap_max, M):
    """Distinct Gamma2 instances over d1 - d2, a and b, with the a = 0 cases"""
    seen = {}
    triples = [(gap, a, b) for gap in range(1, dgap_max + 1)
               for a in range(1, 10) for b in range(10)]
    triples.extend((1, 0, b) for b in range(1, 10))
    for gap, a, b in triples:
        digits = _gamma2_digits(gap, a, b)
        if digits <= 0 or digits in seen:
            continue
        seen[digits] = ReductionInstance(
            tau_real(k), mu_gamma2(k, gap, a, b), _over_log10(5), alpha_real(k), M,
            label='Gamma2(k=%d,gap=%d,a=%d,b=%d)' % (k, gap, a, b))
    return list(seen.values())


def _small_n_threshold(k):
    """n below which alpha^(n-1) > 5 may fail"""
    def compute(prec):
        ratio = ball_log(ball_from_int(5, prec)) / ball_log(alpha_real(k).at(prec))
        return ball_ceil(ratio) + 1
    return escalate(compute, PrecisionSpec(), 'alpha^(n-1) > 5 threshold')


def reduce_gamma2(k, dgap_max, M, max_advance=DEFAULT_MAX_ADVANCE):
    """(n_L, summary) with n <= n_L(k) from every Gamma2 instance"""
    reducer = Reducer(max_advance=max_advance)
    n_bound = _small_n_threshold(k)
    worst = None
    min_eps = None
    degenerate = []
    for inst in gamma2_instances(k, dgap_max, M):
        result = reducer.bound(inst)
        if result.kind == ReductionKind.DEGENERATE:
            degenerate.append(inst.label)
        elif min_eps is None or result.epsilon_lower() < min_eps[0]:
            min_eps = (result.epsilon_lower(), inst.label)
        # n - 1 < W
        if result.bound > n_bound:
            n_bound = result.bound
            worst = inst.label
    summary = {
        'n_bound': n_bound, 'worst': worst, 'degenerate': degenerate,
        'min_epsilon': '%.6g' % float(min_eps[0]) if min_eps else None,
        'min_epsilon_instance': min_eps[1] if min_eps else None,
    }
    return n_bound, summary


def _timed(func, *args, **kwargs):
    start = time.perf_counter()
    result = func(*args, **kwargs)
    return result, time.perf_counter() - start


class KVerifier(Logable):
    '''Runs every case of the proof for a single k <= 470'''

    def __init__(self, *args, **kwargs):
        super(KVerifier, self).__init__(*args, **kwargs)
        self._search_budget = kwargs.get('search_budget', 1000)
        self._max_advance = kwargs.get('max_advance', DEFAULT_MAX_ADVANCE)

    def verify(self, k):
        report = PipelineReport(k)
        try:
            self._run(k, report)
        except LucasrepError as e:
            self.log.warning('k=%d failed: %s', k, e)
            report.finish(Status.FAILED, str(e), e)
        return report

    def _run(self, k, report):
        if k < 2 or k > LARGE_K:
            raise PipelineError('k=%d outside the per-k range 2..%d' % (k, LARGE_K))
        chain = report.chain

        small, seconds = _timed(case_small_n, k)
        report.add_case('small_n', {'n_max': min(k, SMALL_N_LIMIT - 1)},
                        {'solutions': [s.as_dict() for s in small]}, seconds)
        report.add_solutions(small)

        M = chain.add('n_bound', 'ceil(1.3e30 k^8 log^5 k)', bound_n_initial(k))
        chain.add('dgap_initial', 'ceil(4.8e12 k^4 log^2 k log(M - 1))',
                  bound_dgap_initial(k, M))
        chain.add('dgap_matveev', 'Matveev on Lambda1 with B = M - 1', matveev_dgap_bound(k, M))

        gamma1, seconds = _timed(self._gamma1, k, M)
        G = chain.add('dgap_bound', 'max_a Gamma1 reduction', gamma1['dgap_bound'])
        report.add_case('gamma1', {'M': str(M)}, gamma1, seconds)
        self.log.info('k=%d: d1 - d2 <= %d', k, G)

        (n_bound, summary), seconds = _timed(reduce_gamma2, k, G, M, self._max_advance)
        chain.add('n_bound', 'max Gamma2 reduction', n_bound)
        report.add_case('gamma2', {'M': str(M), 'dgap_max': G}, summary, seconds)
        self.log.info('k=%d: n <= %d', k, n_bound)

        n_max = max(min(n_bound, self._search_budget), BRUTE_START)
        report.search_window = (BRUTE_START, n_max)
        found, seconds = _timed(brute_search, k, n_max)
        report.add_case('brute_search', {'n_min': BRUTE_START, 'n_max': n_max},
                        {'solutions': [s.as_dict() for s in found]}, seconds)
        report.add_solutions(found)

        a0, seconds = _timed(case_a0, k, n_max)
        report.add_case('a0', {'n_max': n_max}, {'solutions': [s.as_dict() for s in a0]},
                        seconds)
        report.add_solutions(a0)

        for record in report.solutions:
            record.validate()
        largest = max([s.n for s in report.solutions] or [0])
        if largest > n_bound:
            raise PipelineError('Solution at n=%d beyond certified bound %d' %
                                (largest, n_bound))

        if n_bound > self._search_budget:
            report.finish(Status.BOUND_ONLY, 'bound %d exceeds search budget %d' %
                          (n_bound, self._search_budget))
        else:
            report.finish(Status.COMPLETE)

    def _gamma1(self, k, M):
        bound = 3
        per_digit = {}
        for a in range(1, 10):
            G, result = reduce_gamma1(k, a, M, self._max_advance)
            per_digit[a] = result.as_dict()
            bound = max(bound, G)
        return {'dgap_bound': bound, 'per_digit': per_digit}


def verify_k(k, search_budget=1000, max_advance=DEFAULT_MAX_ADVANCE):
    return KVerifier(search_budget=search_budget, max_advance=max_advance).verify(k)


def _init_worker(cache_dir):
    if cache_dir:
        set_cache(ExpansionCache(directory=cache_dir))


def _verify_one(args):
    k, search_budget, max_advance = args
    return verify_k(k, search_budget, max_advance)


def verify_theorem(k_min, k_max, search_budget=1000, jobs=1, max_advance=DEFAULT_MAX_ADVANCE,
                   cache_dir=None, on_report=None):
    """
    Verify every k in [k_min, k_max]. Reports are passed to on_report as they
    complete, so callers can flush partial results, and merged by k.
    """
    if not 2 <= k_min <= k_max:
        raise PipelineError('Need 2 <= k_min <= k_max, got %d, %d' % (k_min, k_max))
    if jobs is None:
        jobs = os.cpu_count() or 1
    tasks = [(k, search_budget, max_advance) for k in range(k_min, k_max + 1)]
    reports = []

    def collect(report):
        log.info('k=%d: %s, %d solution(s)', report.k, report.status.value,
                 len(report.solutions))
        reports.append(report)
        if on_report is not None:
            on_report(report)

    if jobs <= 1 or len(tasks) == 1:
        _init_worker(cache_dir)
        for task in tasks:
            collect(_verify_one(task))
    else:
        executor = ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                       initargs=(cache_dir,))
        try:
            futures = [executor.submit(_verify_one, task) for task in tasks]
            for future in as_completed(futures):
                collect(future.result())
        except KeyboardInterrupt:
            executor.shutdown(wait=False, cancel_futures=True)
            raise
        executor.shutdown()
    return VerificationReport(k_min, k_max, search_budget, reports)


def largest_satisfying(holds, lo):
    """Largest integer k >= lo with holds(k), for predicates that hold up to a threshold"""
    if not holds(lo):
        return lo - 1
    hi = 2 * lo
    while holds(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _possibly_less(lhs, rhs):
    return ball_compare(lhs, rhs) != Order.GREATER


def _matveev_rhs(A, B, prec):
    """-log|Lambda| upper bound from Matveev over Q with three logarithms"""
    return -matveev_bound(MatveevInput(t=3, d_K=1, B=B, A=A, precision=prec))


def _lambda3_limit(k, prec):
    """lambda < -Matveev(2, 10, 27/a; B = M_k) / log 2"""
    log2 = ball_log(ball_from_int(2, prec))
    A = [log2, ball_log(ball_from_int(10, prec)), ball_log(ball_from_int(27, prec))]
    return _matveev_rhs(A, bound_n_initial(k), prec) / log2


def _dgap_limit(k, prec):
    """d1 - d2 < (lambda limit + 8) log 2 / log 10"""
    return (_lambda3_limit(k, prec) + 8) * log2_over_log10().at(prec)


class LargeKAnalysis(Logable):
    '''
    Constant chain for k > 470: Matveev bounds on k and n, then rounds of
    reductions of Gamma3 and Gamma4 until the k bound contradicts k > 470.
    The case a = 0 runs a separate chain on Gamma4'.
    '''

    def __init__(self, *args, **kwargs):
        super(LargeKAnalysis, self).__init__(*args, **kwargs)
        self._reducer = Reducer(max_advance=kwargs.get('max_advance', DEFAULT_MAX_ADVANCE))
        self._max_rounds = kwargs.get('max_rounds', MAX_ROUNDS)
        self._prec = PrecisionSpec(BOUND_BITS)

    def run(self):
        chain = BoundChain()
        try:
            self._hypotheses(chain)
            k_bound = self._matveev_k_bound(chain)
            self._rounds(chain, k_bound, 'a', bound_n_initial, self._round_a)
            k0 = self._matveev_k_bound_a0(chain)
            self._rounds(chain, k0, 'a0', bound_n_a0, self._round_a0)
        except LucasrepError as e:
            self.log.warning('Large k chain failed: %s', e)
            chain.fail('error', str(e))
        return chain

    def _hypotheses(self, chain):
        k = LARGE_K + 1
        M = bound_n_initial(k)
        chain.add('n_below_2^(k/2)', 'M_471 < 2^235', M, certified=M < 2 ** (k // 2))
        chain.add('lambda4_nonzero', '2^(n-2) = 10^d1 + b - 9 has no solution', True,
                  certified=lambda4_nonzero())
        prec = self._prec
        log_n = ball_log(ball_from_int(M, prec))
        fifty = ball_log(ball_from_int(k, prec)) * 50
        chain.add('log_n_below_50_log_k', 'log M_471 < 50 log 471', True,
                  certified=ball_compare(log_n, fifty) == Order.LESS)

    def _matveev_k_bound(self, chain):
        prec = self._prec
        log2 = ball_log(ball_from_int(2, prec))
        log10 = ball_log(ball_from_int(10, prec))
        # lambda < C (1 + log n) <= 2 C log n
        log27 = ball_log(ball_from_int(27, prec))
        C = -matveev_bound(MatveevInput(t=3, d_K=1, B=1, precision=prec,
                                        A=[log2, log10, log27])) / log2
        chain.add('lambda3_coefficient', 'lambda < c log n, c = 2.8 30^6 3^4.5 log 10 log 27',
                  _sci(C * 2))

        def lambda_branch(k):
            return _possibly_less(ball_from_int(k, prec) / 2 - 5, _lambda3_limit(k, prec))
        k_lambda = largest_satisfying(lambda_branch, LARGE_K + 1) + 1
        chain.add('k_bound_lambda', 'k/2 - 5 < lambda limit', k_lambda)

        k_start = LARGE_K + 1
        coefficient = _dgap_limit(k_start, prec) / ball_log(ball_from_int(k_start, prec))
        chain.add('dgap_coefficient', 'd1 - d2 < c log k at k = 471', _sci(coefficient))

        def gap_branch(k):
            A3 = ball_log(ball_from_int(432, prec)) + _dgap_limit(k, prec) * log10
            lhs = (ball_from_int(k, prec) / 2 - 1) * log2
            rhs = _matveev_rhs([log2, log10, A3], bound_n_initial(k), prec)
            return _possibly_less(lhs, rhs)
        k_gap = largest_satisfying(gap_branch, LARGE_K + 1) + 1
        chain.add('k_bound_lambda4', '(k/2 - 1) log 2 < Matveev on Lambda4', k_gap)
        k_bound = max(k_lambda, k_gap)
        chain.add('k_bound', 'Matveev', k_bound)
        chain.add('n_bound', 'M_k at the k bound', bound_n_initial(k_bound))
        return k_bound

    def _matveev_k_bound_a0(self, chain):
        prec = self._prec
        log2 = ball_log(ball_from_int(2, prec))
        A = [log2, ball_log(ball_from_int(10, prec)), ball_log(ball_from_int(9, prec))]

        def holds(k):
            lhs = ball_from_int(k, prec) / 2 * log2
            return _possibly_less(lhs, _matveev_rhs(A, bound_n_a0(k), prec))
        k0 = largest_satisfying(holds, LARGE_K + 1) + 1
        chain.add('a0_k_bound', 'k/2 log 2 < Matveev on Lambda4\'', k0)
        chain.add('a0_n_bound', 'ceil(2.1e17 k^4 log^4 k) at the k bound', bound_n_a0(k0))
        return k0

    def _rounds(self, chain, k_bound, prefix, n_bound, round_func):
        for number in range(1, self._max_rounds + 1):
            M = n_bound(k_bound)
            chain.add('n_bound' if prefix == 'a' else 'a0_n_bound',
                      '%s round %d: n bound at k < %d' % (prefix, number, k_bound), M)
            new_bound = round_func(chain, number, M)
            self.log.info('%s round %d: M=%.3e, k < %d', prefix, number, float(M), new_bound)
            step = 'k_bound' if prefix == 'a' else 'a0_k_bound'
            chain.add(step, '%s round %d' % (prefix, number), new_bound)
            if new_bound <= LARGE_K + 1:
                chain.add('%s_contradiction' % prefix, 'k < %d contradicts k > %d' %
                          (new_bound, LARGE_K), True)
                return new_bound
            if new_bound >= k_bound:
                chain.fail('%s_round_%d' % (prefix, number),
                           'k bound %d did not improve on %d' % (new_bound, k_bound))
                return new_bound
            k_bound = new_bound
        chain.fail('%s_rounds' % prefix, 'no contradiction after %d rounds' % self._max_rounds)
        return k_bound

    def _round_a(self, chain, number, M):
        gamma = log2_over_log10()
        W3 = 0
        eps3 = None
        for a in range(1, 10):
            result = self._reducer.bound(gamma3_instance(a, M))
            W3 = max(W3, result.bound)
            if result.kind == ReductionKind.REDUCED:
                eps = result.epsilon_lower()
                eps3 = eps if eps3 is None else min(eps3, eps)
        chain.add('lambda_bound', 'round %d Gamma3, min eps %.6g' %
                  (number, float(eps3) if eps3 is not None else 0), W3)
        k_lambda = 2 * W3 + 10

        def compute(prec):
            return ball_ceil((ball_from_int(W3, prec) + 8) * gamma.at(prec))
        G = escalate(compute, PrecisionSpec(), 'd1 - d2 bound')
        chain.add('dgap_bound', 'round %d: d1 - d2 < (lambda + 8) log 2 / log 10' % number, G)

        W4 = 0
        eps4 = None
        degenerate = 0
        for inst in gamma4_instances(G - 1, M):
            result = self._reducer.bound(inst)
            if result.kind == ReductionKind.DEGENERATE:
                degenerate += 1
                self._degenerate(chain, 'gamma4_degenerate', number, inst, result)
            elif eps4 is None or result.epsilon_lower() < eps4[0]:
                eps4 = (result.epsilon_lower(), inst.label)
            W4 = max(W4, result.bound)
        chain.add('gamma4_bound', 'round %d Gamma4, min eps %.6g at %s, %d degenerate' %
                  (number, float(eps4[0]) if eps4 else 0, eps4[1] if eps4 else None,
                   degenerate), W4)
        return max(k_lambda, 2 * W4)

    def _round_a0(self, chain, number, M):
        W = 0
        for b in range(1, 10):
            inst = gamma4_a0_instance(b, M)
            result = self._reducer.bound(inst)
            if result.kind == ReductionKind.DEGENERATE:
                self._degenerate(chain, 'a0_degenerate', number, inst, result)
            W = max(W, result.bound)
        chain.add('a0_lambda_bound', 'round %d Gamma4\'' % number, W)
        return 2 * W

    def _degenerate(self, chain, step, number, inst, result):
        """Record an instance bounded by the Legendre criterion instead of the reduction"""
        self.log.info('round %d: %s degenerate, %s', number, inst.label, result.note)
        chain.add(step, '%s round %d: %s' % (inst.label, number, result.note), result.bound)


def _sci(ball):
    return '%.4e' % float(ball.mid)


def mu_gamma3(a):
    """log(27/a) / log 10"""
    return CertifiedReal('log(27/%d)/log10' % a,
                         lambda prec: ball_log(ball_from_rational(27, a, prec)) /
                         log10_real().at(prec))


def gamma3_instance(a, M):
    """(n-2) log2/log10 - d1 + log(27/a)/log10, |.| < 2 / (2^lambda log 10)"""
    return ReductionInstance(log2_over_log10(), mu_gamma3(a), _over_log10(2), 2, M,
                             label='Gamma3(a=%d)' % a)


def _gamma4_mu(digits):
    value = digits / 3
    return CertifiedReal(
        '-log(%s)/log10' % value,
        lambda prec: -ball_log(ball_from_rational(value.numerator, value.denominator, prec)) /
        log10_real().at(prec))


def mu_gamma4(a, b, gap):
    """-log((a/9 + (b - a) 10^-gap) / 3) / log 10"""
    return _gamma4_mu(_gamma2_digits(gap, a, b))


def gamma4_instances(dgap_max, M):
    """Distinct Gamma4 instances, |.| < 4 / (2^(k/2) log 10)"""
    seen = {}
    for gap in range(1, dgap_max + 1):
        for a in range(1, 10):
            for b in range(10):
                digits = _gamma2_digits(gap, a, b)
                if digits in seen:
                    continue
                seen[digits] = ReductionInstance(
                    log2_over_log10(), _gamma4_mu(digits), _over_log10(4), 2, M,
                    label='Gamma4(a=%d,b=%d,gap=%d)' % (a, b, gap))
    return list(seen.values())


def gamma4_a0_instance(b, M):
    """(n-2) log2/log10 - d2 - log(b/3)/log10, |.| < 2 / (2^(k/2) log 10)"""
    return ReductionInstance(log2_over_log10(), _gamma4_mu(Fraction(b)), _over_log10(2), 2, M,
                             label='Gamma4a0(b=%d)' % b)


def large_k_analysis(report_only=True, max_advance=DEFAULT_MAX_ADVANCE, max_rounds=MAX_ROUNDS):
    """Certified constant chain for k > 470; raises on failure unless report_only"""
    chain = LargeKAnalysis(max_advance=max_advance, max_rounds=max_rounds).run()
    if chain.failed and not report_only:
        raise PipelineError('Large k chain failed at %s' % chain.failure)
    return chain
