"""
Reduction module

Baker-Davenport reduction in the form of Dujella and Petho: given
0 < |u gamma - v + mu| < A B^-w with u <= M, a convergent denominator q > 6M
of gamma and eps = ||mu q|| - M ||gamma q|| > 0 give w < log(A q / eps) / log B.
When mu is an integer combination of 1 and gamma the form collapses to a
rational approximation of gamma and the Legendre criterion bounds w instead.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import enum
from functools import lru_cache

import gmpy2 as gmp

from .classes import Object, Logable, ReductionError, UndecidableError, PrecisionError, \
    DomainError
from .arith import (
    Ball, CertifiedReal, PrecisionSpec, Order,
    ball_from_int, ball_from_interval, ball_log, ball_ceil, ball_compare,
    ball_nearest_int_distance, nearest_integer, escalate,
)
from .contfrac import first_q_exceeding, next_convergent, max_quotient_below


DEFAULT_MAX_ADVANCE = 10
RELATION_LIMIT = 16
RELATION_BITS = 512
# Doublings tried on one convergent before moving to the next
EPSILON_DOUBLINGS = 3


def _certified(value):
    if isinstance(value, Ball):
        return CertifiedReal('ball(%s, %s)' % (gmp.mpq(value.mid), gmp.mpq(value.rad)),
                             lambda prec: value)
    return CertifiedReal.of(value)


def _ball(value, prec):
    if isinstance(value, Ball):
        return value
    return _certified(value).at(prec)


class ReductionKind(enum.Enum):
    REDUCED = 'Reduced'
    DEGENERATE = 'Degenerate'


class ReductionInstance(Object):
    '''0 < |u gamma - v + mu| < A B^-w for integers 0 < u <= M'''
    __slots__ = ['_gamma', '_mu', '_a', '_b', '_m', '_label']

    def __init__(self, gamma, mu, A, B, M, label=None):
        super(ReductionInstance, self).__init__()
        self._gamma = _certified(gamma)
        self._mu = _certified(mu)
        self._a = _certified(A)
        self._b = _certified(B)
        self._m = int(M)
        self._label = label
        if self._m < 1:
            raise ReductionError('M must be at least 1, got %d' % self._m)
        prec = PrecisionSpec()
        if ball_compare(self._a.at(prec), ball_from_int(0, prec)) != Order.GREATER:
            raise ReductionError('A must be positive, got %s' % self._a.at(prec))
        if ball_compare(self._b.at(prec), ball_from_int(1, prec)) != Order.GREATER:
            raise ReductionError('B must exceed 1, got %s' % self._b.at(prec))

    @property
    def gamma(self):
        return self._gamma

    @property
    def mu(self):
        return self._mu

    @property
    def A(self):
        return self._a

    @property
    def B(self):
        return self._b

    @property
    def M(self):
        return self._m

    @property
    def label(self):
        return self._label or self._mu.value_id

    def shifted(self, r):
        """The instance for u' = u - r once r gamma + mu is an integer"""
        return ReductionInstance(self._gamma, 0, self._a, self._b, self._m + abs(r),
                                 label='%s shifted by %d' % (self.label, r))

    def __repr__(self):
        return 'ReductionInstance(%s, M=%d)' % (self.label, self._m)


class ReductionResult(Object):
    __slots__ = ['_kind', '_q_used', '_epsilon', '_w_bound', '_note', '_relation',
                 '_advances', '_fallback_bound']

    def __init__(self, kind, q_used, epsilon=None, w_bound=None, note='', relation=None,
                 advances=0, fallback_bound=None):
        super(ReductionResult, self).__init__()
        self._kind = kind
        self._q_used = q_used
        self._epsilon = epsilon
        self._w_bound = w_bound
        self._note = note
        self._relation = relation
        self._advances = advances
        self._fallback_bound = fallback_bound

    @property
    def kind(self):
        return self._kind

    @property
    def q_used(self):
        return self._q_used

    @property
    def epsilon(self):
        return self._epsilon

    @property
    def w_bound(self):
        return self._w_bound

    @property
    def note(self):
        return self._note

    @property
    def relation(self):
        """(r, m) with r gamma + mu = m, for degenerate results"""
        return self._relation

    @property
    def advances(self):
        return self._advances

    @property
    def fallback_bound(self):
        return self._fallback_bound

    @property
    def bound(self):
        """w < bound, from the lemma or from the Legendre fallback"""
        if self._kind == ReductionKind.REDUCED:
            return self._w_bound
        return self._fallback_bound

    def with_fallback(self, bound):
        return ReductionResult(self._kind, self._q_used, self._epsilon, self._w_bound,
                               self._note, self._relation, self._advances, bound)

    def epsilon_lower(self):
        if self._epsilon is None:
            return None
        return self._epsilon.exact_bounds()[0]

    def as_dict(self):
        result = {
            'kind': self._kind.value,
            'q_used': str(self._q_used) if self._q_used is not None else None,
            'advances': self._advances,
        }
        if self._kind == ReductionKind.REDUCED:
            result['epsilon_lower'] = '%.6g' % float(self.epsilon_lower())
            result['w_bound'] = self._w_bound
        else:
            result['note'] = self._note
            result['relation'] = list(self._relation) if self._relation else None
            result['fallback_bound'] = self._fallback_bound
        return result

    def __repr__(self):
        if self._kind == ReductionKind.REDUCED:
            return 'Reduced(q=%d, eps>%.6g, w<%d)' % (self._q_used, float(self.epsilon_lower()),
                                                      self._w_bound)
        return 'Degenerate(%s)' % self._note


@lru_cache(maxsize=4096)
def _scaled_distance(real, q, bits):
    """||q x|| for a certified real x at the given precision"""
    return ball_nearest_int_distance(real.at(PrecisionSpec(bits)) * q)


def epsilon(inst, q, prec):
    """eps = ||mu q|| - M ||gamma q|| as a ball"""
    return _scaled_distance(inst.mu, q, prec.bits) - \
        _scaled_distance(inst.gamma, q, prec.bits) * inst.M


def start_precision(q, M):
    return PrecisionSpec().at_least(int(q).bit_length() + int(M).bit_length() + 64)


def w_from_epsilon(inst, q, eps):
    """ceil(log(A q / eps_lower) / log B) with outward rounding"""
    lower = eps.exact_bounds()[0]

    def compute(prec):
        eps_low = ball_from_interval(lower, lower, prec)
        value = inst.A.at(prec) * q / eps_low
        return ball_ceil(ball_log(value) / ball_log(inst.B.at(prec)))
    return escalate(compute, PrecisionSpec(), 'reduction bound')


def find_relation(gamma, mu, limit=RELATION_LIMIT, bits=RELATION_BITS):
    """(r, m) with |r| <= limit and r gamma + mu within the ball of the integer m"""
    prec = PrecisionSpec().at_least(bits)
    g = _certified(gamma).at(prec)
    x = _certified(mu).at(prec)
    for step in range(2 * limit + 1):
        r = (step + 1) // 2 * (1 if step % 2 else -1)
        value = x + g * r
        m = int(nearest_integer(gmp.mpq(value.mid)))
        if value.contains(m):
            return r, m
    return None


class Reducer(Logable):
    '''Runs the reduction lemma, advancing convergents when eps is not positive'''

    def __init__(self, *args, **kwargs):
        super(Reducer, self).__init__(*args, **kwargs)
        self._max_advance = kwargs.get('max_advance', DEFAULT_MAX_ADVANCE)
        if self._max_advance < 0:
            raise ReductionError('max_advance must be non-negative, got %d' % self._max_advance)

    @property
    def max_advance(self):
        return self._max_advance

    def _certify_epsilon(self, inst, q):
        prec = start_precision(q, inst.M)
        for _ in range(EPSILON_DOUBLINGS + 1):
            try:
                eps = epsilon(inst, q, prec)
                if eps.is_positive():
                    return eps
                if eps.upper <= 0:
                    self.log.debug('%s: eps <= 0 at q=%d', inst.label, q)
                    return None
            except UndecidableError as e:
                self.log.debug('%s undecided at %d bits: %s', inst.label, prec.bits, e)
            try:
                prec = prec.escalate()
            except PrecisionError:
                break
        self.log.debug('%s: eps undecided at q=%d', inst.label, q)
        return None

    def reduce(self, inst):
        conv = first_q_exceeding(inst.gamma, 6 * inst.M)
        tried = []
        for advance in range(self._max_advance + 1):
            eps = self._certify_epsilon(inst, conv.q)
            if eps is not None:
                w = w_from_epsilon(inst, conv.q, eps)
                self.log.debug('%s: q_%d eps>%.6g w<%d', inst.label, conv.index,
                               float(eps.exact_bounds()[0]), w)
                return ReductionResult(ReductionKind.REDUCED, conv.q, eps, w, advances=advance)
            tried.append(conv.q)
            conv = next_convergent(inst.gamma, conv)
        relation = find_relation(inst.gamma, inst.mu)
        if relation is not None:
            r, m = relation
            note = '%d*gamma + mu = %d' % (r, m)
            self.log.info('%s degenerate: %s', inst.label, note)
            return ReductionResult(ReductionKind.DEGENERATE, tried[0], note=note,
                                   relation=relation, advances=len(tried) - 1)
        self.log.warning('%s: no positive eps in %d convergents', inst.label, len(tried))
        raise ReductionError('No convergent with positive eps for %s within %d advances' %
                             (inst.label, self._max_advance))

    def bound(self, inst):
        """Reduce, falling back to the Legendre criterion on degenerate shifts"""
        result = self.reduce(inst)
        if result.kind == ReductionKind.DEGENERATE:
            shifted = inst.shifted(result.relation[0])
            result = result.with_fallback(
                legendre_bound(shifted.gamma, shifted.M, shifted.A, shifted.B))
        return result


def dp_reduce(inst, max_advance=DEFAULT_MAX_ADVANCE):
    return Reducer(max_advance=max_advance).reduce(inst)


def reduce_bound(inst, max_advance=DEFAULT_MAX_ADVANCE):
    return Reducer(max_advance=max_advance).bound(inst)


def legendre_bound(gamma, M, A, B):
    """
    Bound W with w < W for 0 < |gamma - p/q| < (A/q) B^-w and q <= M. A solution
    with B^w > 2A q makes p/q a convergent p_i/q_i, and then
    1/((a_{i+1} + 2) q_i^2) < |gamma - p_i/q_i| gives B^w < A (a_max + 2) M.
    """
    M = int(M)
    if M < 1:
        raise ReductionError('M must be at least 1, got %d' % M)
    gamma = _certified(gamma)
    a_max = max_quotient_below(gamma, M)

    def compute(prec):
        value = _ball(A, prec) * (max(a_max, 0) + 2) * M
        log_b = ball_log(_ball(B, prec))
        if not log_b.is_positive():
            raise UndecidableError('log B not certified positive: %s' % log_b)
        return ball_ceil(ball_log(value) / log_b)
    try:
        return escalate(compute, PrecisionSpec(), 'Legendre bound')
    except DomainError as e:
        raise ReductionError('Legendre bound undefined: %s' % e)


