"""
Algebraic module

The dominant root alpha(k) of x^k - x^(k-1) - ... - 1, the coefficient
f_k(alpha)(2 alpha - 1) of the Binet-like formula, logarithmic heights and the
chain of explicit upper bounds derived from Matveev's theorem and Guzman's lemma.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import logging
import math
from fractions import Fraction
from functools import lru_cache

import gmpy2 as gmp

from .classes import Object, BoundError, UndecidableError
from .arith import (
    PrecisionSpec, Ball, CertifiedReal, Order,
    ball_from_rational, ball_from_int, ball_from_interval, ball_log, ball_sqrt,
    ball_ceil, ball_compare, escalate,
)


log = logging.getLogger(__name__)

NEWTON_EXTRA_BITS = 32
BOUND_BITS = 128


def psi_eval(k, x):
    """Psi_k(x) = x^k - x^(k-1) - ... - x - 1 as a ball"""
    one = x - 1
    if one.contains_zero():
        result = ball_from_int(1, x.precision)
        for _ in range(k):
            result = result * x - 1
        return result
    power = x ** k
    return power - (power - 1) / one


def _psi_sign(k, q):
    """Exact sign of Psi_k at a rational q > 1, via (q^(k+1) - 2q^k + 1)/(q - 1)"""
    q = gmp.mpq(q)
    p, d = q.numerator, q.denominator
    pk = p ** k
    value = pk * p - 2 * pk * d + d ** (k + 1)
    return (value > 0) - (value < 0)


class DominantRoot(Object):
    __slots__ = ['_k', '_alpha', '_precision']

    def __init__(self, k, alpha, precision):
        super(DominantRoot, self).__init__()
        self._k = k
        self._alpha = alpha
        self._precision = precision

    @property
    def k(self):
        return self._k

    @property
    def alpha(self):
        return self._alpha

    @property
    def precision(self):
        return self._precision

    def __repr__(self):
        return 'DominantRoot(k=%d, alpha=%r)' % (self._k, self._alpha)


def _newton(k, x0, bits):
    prec = PrecisionSpec(bits + NEWTON_EXTRA_BITS, max(bits + NEWTON_EXTRA_BITS,
                                                       PrecisionSpec().cap))
    x = Ball(gmp.mpfr(x0, prec.bits), precision=prec)
    for _ in range(int(math.log2(bits)) + 8):
        xk1 = x ** (k - 1)
        g = xk1 * x * (x - 2) + 1
        dg = xk1 * ((k + 1) * x - 2 * k)
        x = Ball((x - Ball((g / dg).mid, precision=prec)).mid, precision=prec)
    return gmp.mpq(x.mid)


@lru_cache(maxsize=None)
def _root_bracket(k, bits):
    lo = 2 - gmp.mpq(1, 2 ** (k - 1))
    hi = gmp.mpq(2)
    width = gmp.mpq(1, 2 ** (bits - 4))
    guess = _newton(k, 2 - gmp.mpq(1, 2 ** k), bits)
    if lo < guess - width and guess + width < hi and \
            _psi_sign(k, guess - width) < 0 < _psi_sign(k, guess + width):
        return guess - width, guess + width
    log.warning('Newton did not certify alpha(%d) at %d bits, bisecting', k, bits)
    while hi - lo > 2 * width:
        mid = (lo + hi) / 2
        if _psi_sign(k, mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def dominant_root(k, prec=None):
    """Certified enclosure of the real root alpha(k) in (2(1 - 2^-k), 2)"""
    if prec is None:
        prec = PrecisionSpec()
    if k < 2:
        raise BoundError('Order k must be at least 2, got %d' % k)
    lo, hi = _root_bracket(k, prec.bits)
    return DominantRoot(k, ball_from_interval(lo, hi, prec), prec)


def fk_at_alpha(k, root):
    """f_k(alpha) = (alpha - 1)/(2 + (k + 1)(alpha - 2)), certified in (1/2, 3/4)"""
    alpha = root.alpha
    value = (alpha - 1) / ((alpha - 2) * (k + 1) + 2)
    prec = alpha.precision
    if ball_compare(value, ball_from_rational(1, 2, prec)) != Order.GREATER or \
            ball_compare(value, ball_from_rational(3, 4, prec)) != Order.LESS:
        raise UndecidableError('f_%d(alpha) = %s not certified in (1/2, 3/4)' % (k, value))
    return value


@lru_cache(maxsize=1024)
def dominant_coefficient(k, prec):
    """f_k(alpha)(2 alpha - 1), the coefficient of alpha^(n-1) in L_n^(k)"""
    root = dominant_root(k, prec)
    return fk_at_alpha(k, root) * (root.alpha * 2 - 1)


@lru_cache(maxsize=None)
def alpha_real(k):
    return CertifiedReal('alpha(k=%d)' % k, lambda prec: dominant_root(k, prec).alpha)


@lru_cache(maxsize=None)
def log10_real():
    return CertifiedReal.log_of(10)


@lru_cache(maxsize=None)
def tau_real(k):
    """log alpha(k) / log 10"""
    return CertifiedReal(
        'tau(k=%d)' % k,
        lambda prec: ball_log(dominant_root(k, prec).alpha) / log10_real().at(prec),
    )


def mu_gamma1(k, a):
    """log(f_k(alpha)(2 alpha - 1) 9/a) / log 10"""
    return CertifiedReal(
        'mu1(k=%d,a=%d)' % (k, a),
        lambda prec: ball_log(dominant_coefficient(k, prec) * Fraction(9, a))
        / log10_real().at(prec),
    )


def mu_gamma2(k, gap, a, b):
    """-log((a/9 + (b - a)10^-gap) / (f_k(alpha)(2 alpha - 1))) / log 10"""
    digits = Fraction(a, 9) + Fraction(b - a, 10 ** gap)
    return CertifiedReal(
        'mu2(k=%d,gap=%d,a=%d,b=%d)' % (k, gap, a, b),
        lambda prec: ball_log(dominant_coefficient(k, prec) / digits) / log10_real().at(prec),
    )


def height_rational(p, q=1, prec=None):
    """h(p/q) = log max(|p|, q) for p/q in lowest terms"""
    if prec is None:
        prec = PrecisionSpec()
    if q <= 0 or math.gcd(p, q) != 1:
        raise BoundError('Height needs a reduced fraction with q > 0, got %d/%d' % (p, q))
    return ball_log(ball_from_int(max(abs(p), q), prec))


def height_eta3_gamma1(k, a, prec=None):
    """Upper bound h(9/a) + h(f_k(alpha)) + h(2 alpha - 1) < h(9/a) + 3 log k + log 3"""
    if prec is None:
        prec = PrecisionSpec()
    ratio = Fraction(9, a)
    log_k = ball_log(ball_from_int(k, prec))
    return height_rational(ratio.numerator, ratio.denominator, prec) + log_k * 3 + \
        ball_log(ball_from_int(3, prec))


def height_eta3_gamma2(k, gap, prec=None):
    """Upper bound 3 log k + log 3 + log 144 + gap log 10"""
    if prec is None:
        prec = PrecisionSpec()
    return ball_log(ball_from_int(k, prec)) * 3 + ball_log(ball_from_int(3 * 144, prec)) + \
        ball_log(ball_from_int(10, prec)) * gap


def _as_ball(value, prec):
    if isinstance(value, Ball):
        return value.with_precision(prec)
    if isinstance(value, CertifiedReal):
        return value.at(prec)
    value = Fraction(value)
    return ball_from_rational(value.numerator, value.denominator, prec)


class MatveevInput(Object):
    '''Parameters (t, d_K, B, A_1..A_t) of Matveev's lower bound'''
    __slots__ = ['_t', '_d_k', '_b', '_a', '_precision']

    def __init__(self, *args, **kwargs):
        super(MatveevInput, self).__init__()
        self._precision = kwargs.get('precision') or PrecisionSpec(BOUND_BITS)
        self._a = [_as_ball(a, self._precision) for a in kwargs['A']]
        self._t = kwargs.get('t', len(self._a))
        self._d_k = kwargs['d_K']
        self._b = _as_ball(kwargs['B'], self._precision)
        clamp = ball_from_rational(16, 100, self._precision)
        if self._t < 1 or self._t != len(self._a):
            raise BoundError('Expected t = %d height values, got %d' % (self._t, len(self._a)))
        if self._d_k < 1:
            raise BoundError('Field degree must be positive, got %d' % self._d_k)
        if ball_compare(self._b, ball_from_int(1, self._precision)) == Order.LESS:
            raise BoundError('B must be at least 1, got %s' % self._b)
        for a in self._a:
            if ball_compare(a, clamp) == Order.LESS:
                raise BoundError('A_i must be at least 0.16, got %s' % a)

    @classmethod
    def clamped(cls, **kwargs):
        """Build an input with each A_i raised to at least 0.16"""
        prec = kwargs.get('precision') or PrecisionSpec(BOUND_BITS)
        clamp = ball_from_rational(16, 100, prec)
        values = []
        for a in kwargs['A']:
            a = _as_ball(a, prec)
            values.append(clamp if ball_compare(a, clamp) != Order.GREATER else a)
        kwargs = dict(kwargs, A=values, precision=prec)
        return cls(**kwargs)

    @property
    def t(self):
        return self._t

    @property
    def d_K(self):
        return self._d_k

    @property
    def B(self):
        return self._b

    @property
    def A(self):
        return list(self._a)

    @property
    def precision(self):
        return self._precision


def matveev_constant(t, prec):
    """K(t) = -1.4 * 30^(t+3) * t^4.5"""
    t_ball = ball_from_int(t, prec)
    return -(ball_from_rational(14, 10, prec) * 30 ** (t + 3) * t_ball ** 4 * ball_sqrt(t_ball))


def matveev_bound(inp):
    """Lower bound K(t) d^2 (1 + log d)(1 + log B) A_1...A_t for log|Lambda|"""
    prec = inp.precision
    d = ball_from_int(inp.d_K, prec)
    result = matveev_constant(inp.t, prec) * d * d * (ball_log(d) + 1) * (ball_log(inp.B) + 1)
    for a in inp.A:
        result = result * a
    return result


def guzman_bound(m, T, prec=None):
    """2^m T (log T)^m, valid when T > (4m^2)^m"""
    if prec is None:
        prec = PrecisionSpec(BOUND_BITS)
    T = _as_ball(T, prec)
    if ball_compare(T, ball_from_int((4 * m * m) ** m, prec)) != Order.GREATER:
        raise BoundError('Guzman bound needs T > (4m^2)^m = %d, got %s' % ((4 * m * m) ** m, T))
    return T * 2 ** m * ball_log(T) ** m


def _scientific(mantissa, exponent, prec):
    """mantissa * 10^exponent for a decimal mantissa given as string"""
    value = Fraction(mantissa) * Fraction(10) ** exponent
    return ball_from_rational(value.numerator, value.denominator, prec)


def _log_int(n, prec):
    return ball_log(ball_from_int(n, prec))


def bound_dgap_initial(k, n):
    """ceil(4.8e12 k^4 (log k)^2 log(n - 1))"""
    def compute(prec):
        log_k = _log_int(k, prec)
        return ball_ceil(_scientific('4.8', 12, prec) * k ** 4 * log_k * log_k *
                         _log_int(n - 1, prec))
    return escalate(compute, PrecisionSpec(BOUND_BITS), 'd1 - d2 bound')


def bound_n_initial(k):
    """M_k = ceil(1.3e30 k^8 (log k)^5)"""
    def compute(prec):
        return ball_ceil(_scientific('1.3', 30, prec) * k ** 8 * _log_int(k, prec) ** 5)
    return escalate(compute, PrecisionSpec(BOUND_BITS), 'n bound')


def bound_n_a0(k):
    """ceil(2.1e17 k^4 (log k)^4), the n bound when a = 0"""
    def compute(prec):
        return ball_ceil(_scientific('2.1', 17, prec) * k ** 4 * _log_int(k, prec) ** 4)
    return escalate(compute, PrecisionSpec(BOUND_BITS), 'a = 0 n bound')


def matveev_dgap_bound(k, n, prec=None):
    """
    d1 - d2 bound from Matveev applied to Lambda_1 with t = 3, d_K = k,
    A = (0.7, k log 10, 8 k log k) and B = n - 1, without the rounding of the
    printed coefficient 4.8e12
    """
    if prec is None:
        prec = PrecisionSpec(BOUND_BITS)
    log_10 = _log_int(10, prec)
    log_k = _log_int(k, prec)
    inp = MatveevInput.clamped(
        t=3, d_K=k, B=max(n - 1, 1), precision=prec,
        A=[Fraction(7, 10), log_10 * k, log_k * (8 * k)],
    )
    lower = matveev_bound(inp)
    return ball_ceil((_log_int(87, prec) - lower) / log_10)


class BoundChain(Object):
    '''Audit trail of derived bounds; n_bound and dgap_bound are the final entries'''
    __slots__ = ['_k', '_steps', '_failure']

    def __init__(self, k=None):
        super(BoundChain, self).__init__()
        self._k = k
        self._steps = []
        self._failure = None

    @property
    def k(self):
        return self._k

    @property
    def steps(self):
        return list(self._steps)

    def add(self, step, formula, value, certified=True):
        self._steps.append({
            'step': step, 'formula': formula, 'value': value, 'certified': bool(certified),
        })
        if not certified and self._failure is None:
            self._failure = step
        return value

    def latest(self, step):
        for entry in reversed(self._steps):
            if entry['step'] == step:
                return entry['value']
        raise KeyError(step)

    @property
    def n_bound(self):
        return self.latest('n_bound')

    @property
    def dgap_bound(self):
        return self.latest('dgap_bound')

    @property
    def failed(self):
        return self._failure is not None

    @property
    def failure(self):
        return self._failure

    def fail(self, step, reason):
        self.add(step, reason, None, certified=False)

    def as_dict(self):
        return {
            'k': self._k,
            'status': 'Failed' if self.failed else 'Complete',
            'failure': self._failure,
            'steps': [dict(s, value=_jsonable(s['value'])) for s in self._steps],
        }


def _jsonable(value):
    if isinstance(value, Ball):
        return {'mid': str(value.mid), 'rad': str(value.rad)}
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int) and abs(value) > 2 ** 53:
        return str(value)
    return value
