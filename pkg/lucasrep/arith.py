"""
Arith module

Certified multiprecision real arithmetic. A Ball is a midpoint with an absolute
error radius; every operation returns a ball that encloses the exact result for
all values in the operand balls. Midpoints are rounded to nearest at the working
precision, radii are always rounded up.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import enum
import logging
import threading
from fractions import Fraction

import gmpy2 as gmp

from .classes import Object, DomainError, PrecisionError, UndecidableError
from .data import DEFAULT_PRECISION_START, get_precision_cap, get_precision_start


log = logging.getLogger(__name__)

MIN_BITS = 64
DEFAULT_BITS = DEFAULT_PRECISION_START
RADIUS_BITS = 64

_contexts = {}
_contexts_lock = threading.Lock()


def _context(bits, rounding):
    key = (bits, rounding)
    try:
        return _contexts[key]
    except KeyError:
        ctx = gmp.context(
            precision=bits,
            round=rounding,
            emin=gmp.get_emin_min(),
            emax=gmp.get_emax_max(),
        )
        with _contexts_lock:
            _contexts.setdefault(key, ctx)
        return _contexts[key]


def _near(bits):
    return _context(bits, gmp.RoundToNearest)


def _up():
    return _context(RADIUS_BITS, gmp.RoundUp)


def _down():
    return _context(RADIUS_BITS, gmp.RoundDown)


_zero = gmp.mpfr(0)


class PrecisionSpec(Object):
    '''Working precision in bits with a hard ceiling for escalation'''
    __slots__ = ['_bits', '_cap']

    def __init__(self, bits=None, cap=None):
        super(PrecisionSpec, self).__init__()
        if bits is None:
            bits = get_precision_start()
        if cap is None:
            cap = get_precision_cap()
        if bits < MIN_BITS:
            raise DomainError('Precision must be at least %d bits, got %d' % (MIN_BITS, bits))
        if bits > cap:
            raise PrecisionError('Precision %d exceeds ceiling %d' % (bits, cap))
        self._bits = int(bits)
        self._cap = int(cap)

    @property
    def bits(self):
        return self._bits

    @property
    def cap(self):
        return self._cap

    def escalate(self):
        """Return the doubled precision, or raise when the ceiling is reached"""
        if self._bits >= self._cap:
            raise PrecisionError('Precision ceiling of %d bits reached' % self._cap)
        bits = min(2 * self._bits, self._cap)
        log.debug('Escalating precision %d -> %d bits', self._bits, bits)
        return PrecisionSpec(bits, self._cap)

    def at_least(self, bits):
        """Return a precision with at least the given number of bits (capped)"""
        if bits <= self._bits:
            return self
        return PrecisionSpec(min(max(bits, MIN_BITS), self._cap), self._cap)

    def __eq__(self, other):
        return isinstance(other, PrecisionSpec) and \
            (self._bits, self._cap) == (other._bits, other._cap)

    def __hash__(self):
        return hash((self._bits, self._cap))

    def __repr__(self):
        return 'PrecisionSpec(bits=%d, cap=%d)' % (self._bits, self._cap)


def _exact_context(x):
    # Sign changes are exact at the operand's own precision
    return _near(max(x.precision, MIN_BITS))


def _negated(x):
    return _exact_context(x).minus(x)


def _magnitude(x):
    return _exact_context(x).abs(x)


def _rounding_error(mid, bits):
    # Round to nearest is within 2^-bits relative of the exact value
    return _up().mul(_magnitude(mid), gmp.exp2(-bits))


class Ball(Object):
    '''Certified real: exact value x satisfies |x - mid| <= rad'''
    __slots__ = ['_mid', '_rad', '_precision']

    def __init__(self, mid, rad=_zero, precision=None):
        super(Ball, self).__init__()
        if precision is None:
            precision = PrecisionSpec()
        if rad < 0 or not gmp.is_finite(rad):
            raise DomainError('Ball radius must be finite and non-negative: %s' % rad)
        self._mid = mid
        self._rad = rad
        self._precision = precision

    @property
    def mid(self):
        return self._mid

    @property
    def rad(self):
        return self._rad

    @property
    def precision(self):
        return self._precision

    @property
    def bits(self):
        return self._precision.bits

    @property
    def lower(self):
        return _down().sub(self._mid, self._rad)

    @property
    def upper(self):
        return _up().add(self._mid, self._rad)

    def exact_bounds(self):
        """Interval endpoints as exact rationals"""
        m = gmp.mpq(self._mid)
        r = gmp.mpq(self._rad)
        return m - r, m + r

    def contains(self, value):
        lo, hi = self.exact_bounds()
        v = gmp.mpq(value)
        return lo <= v <= hi

    def contains_zero(self):
        return _magnitude(self._mid) <= self._rad

    def is_positive(self):
        return self._mid > self._rad

    def is_negative(self):
        return _negated(self._mid) > self._rad

    def _coerce(self, other):
        if isinstance(other, Ball):
            return other
        if hasattr(other, 'denominator'):
            return ball_from_rational(other.numerator, other.denominator, self._precision)
        return ball_from_rational(other, 1, self._precision)

    def _result(self, mid, rad):
        return Ball(mid, _up().add(rad, _rounding_error(mid, self.bits)), self._precision)

    def __neg__(self):
        return Ball(_negated(self._mid), self._rad, self._precision)

    def __abs__(self):
        if self._mid < 0:
            return -self
        return self

    def __add__(self, other):
        other = self._coerce(other)
        mid = _near(self.bits).add(self._mid, other._mid)
        return self._result(mid, _up().add(self._rad, other._rad))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        mid = _near(self.bits).sub(self._mid, other._mid)
        return self._result(mid, _up().add(self._rad, other._rad))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        up = _up()
        mid = _near(self.bits).mul(self._mid, other._mid)
        x, y = _magnitude(self._mid), _magnitude(other._mid)
        rad = up.add(
            up.add(up.mul(x, other._rad), up.mul(y, self._rad)),
            up.mul(self._rad, other._rad),
        )
        return self._result(mid, rad)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        up = _up()
        x, y = _magnitude(self._mid), _magnitude(other._mid)
        margin = _down().sub(y, other._rad)
        if margin <= 0:
            if other._mid == 0 and other._rad == 0:
                raise DomainError('Division by an exact zero')
            raise UndecidableError('Divisor ball contains zero')
        mid = _near(self.bits).div(self._mid, other._mid)
        num = up.add(up.mul(x, other._rad), up.mul(y, self._rad))
        den = _down().mul(y, margin)
        return self._result(mid, up.div(num, den))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            raise DomainError('Only integer powers of balls are supported')
        if exponent < 0:
            return 1 / (self ** -exponent)
        result = ball_from_rational(1, 1, self._precision)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def with_precision(self, precision):
        """Same enclosure, carried at another working precision"""
        return Ball(self._mid, self._rad, precision)

    def __repr__(self):
        return 'Ball(%s +/- %s, %d bits)' % (
            self._mid.__format__('.20g'), self._rad.__format__('.3g'), self.bits)

    def __str__(self):
        return '[%s +/- %s]' % (self._mid.__format__('.15g'), self._rad.__format__('.3g'))


def ball_from_mpq(q, prec):
    q = gmp.mpq(q)
    return ball_from_rational(q.numerator, q.denominator, prec)


def _exact(n):
    """Integer as an mpfr without rounding"""
    n = gmp.mpz(n)
    return gmp.mpfr(n, max(n.bit_length(), 2))


def _rational_up(q):
    """Smallest radius-precision float >= the non-negative rational q"""
    if not q:
        return _zero
    return _up().div(_exact(q.numerator), _exact(q.denominator))


def ball_from_rational(p, q, prec):
    """Enclose p/q with radius at most 2^(1-bits)|p/q|"""
    if q == 0:
        raise DomainError('Zero denominator')
    mid = _near(prec.bits).div(_exact(p), _exact(q))
    if gmp.mpq(mid) == gmp.mpq(p, q):
        rad = _zero
    else:
        rad = _rounding_error(mid, prec.bits)
    return Ball(mid, rad, prec)


def ball_from_int(n, prec):
    return ball_from_rational(n, 1, prec)


def ball_from_interval(lo, hi, prec):
    """Ball containing the rational interval [lo, hi]"""
    lo = gmp.mpq(lo)
    hi = gmp.mpq(hi)
    if hi < lo:
        raise DomainError('Empty interval [%s, %s]' % (lo, hi))
    centre = (lo + hi) / 2
    mid = _near(prec.bits).div(_exact(centre.numerator), _exact(centre.denominator))
    mq = gmp.mpq(mid)
    return Ball(mid, _rational_up(max(hi - mq, mq - lo)), prec)


def ball_log(x):
    """Natural logarithm, enclosing log(v) for every v in x"""
    if x.upper <= 0:
        raise DomainError('Logarithm of a non-positive ball: %s' % x)
    lower = x.lower
    if lower <= 0:
        raise UndecidableError('Logarithm of a ball straddling zero: %s' % x)
    mid = _near(x.bits).log(x.mid)
    # log is 1/lower-Lipschitz on [lower, upper]
    rad = _up().div(x.rad, lower) if x.rad else _zero
    return Ball(mid, _up().add(rad, _rounding_error(mid, x.bits)), x.precision)


def ball_sqrt(x):
    if x.upper < 0:
        raise DomainError('Square root of a negative ball: %s' % x)
    lower = x.lower
    if lower <= 0:
        raise UndecidableError('Square root of a ball touching zero: %s' % x)
    mid = _near(x.bits).sqrt(x.mid)
    # |sqrt(v) - sqrt(m)| <= r / sqrt(m)
    rad = _up().div(x.rad, _down().sqrt(x.mid)) if x.rad else _zero
    return Ball(mid, _up().add(rad, _rounding_error(mid, x.bits)), x.precision)


def ball_ceil(x):
    """Smallest integer certainly >= every value in x"""
    hi = x.exact_bounds()[1]
    return int(-((-hi.numerator) // hi.denominator))


def ball_floor(x):
    """Largest integer certainly <= every value in x"""
    lo = x.exact_bounds()[0]
    return int(lo.numerator // lo.denominator)


class Order(enum.Enum):
    LESS = -1
    UNDECIDABLE = 0
    GREATER = 1


def ball_compare(x, y):
    """Order of two balls; UNDECIDABLE when their intervals overlap"""
    x_lo, x_hi = x.exact_bounds()
    y_lo, y_hi = y.exact_bounds()
    if x_hi < y_lo:
        return Order.LESS
    if y_hi < x_lo:
        return Order.GREATER
    return Order.UNDECIDABLE


def ball_nearest_int_distance(x):
    """Enclosure of ||x||, the distance from x to the nearest integer"""
    if x.rad >= gmp.mpfr(0.25):
        raise UndecidableError('Radius %s too large for a nearest integer distance' % x.rad)
    m = gmp.mpq(x.mid)
    r = gmp.mpq(x.rad)
    d = abs(m - nearest_integer(m))
    # ||.|| is 1-Lipschitz, so the enclosure is [d - r, d + r] clipped to [0, 1/2]
    lo = max(gmp.mpq(0), d - r)
    hi = min(gmp.mpq(1, 2), d + r)
    return ball_from_interval(lo, hi, x.precision)


def nearest_integer(q):
    """Nearest integer to an exact rational, halves rounded up"""
    q = gmp.mpq(q)
    return (2 * q.numerator + q.denominator) // (2 * q.denominator)


def certified_floor(x):
    """floor(v) if it is the same for every v in x, else None"""
    lo, hi = x.exact_bounds()
    f_lo = lo.numerator // lo.denominator
    f_hi = hi.numerator // hi.denominator
    if f_lo == f_hi:
        return int(f_lo)
    return None


def escalate(compute, precision, what='computation'):
    """Run compute(precision), doubling precision while it is undecidable"""
    while True:
        try:
            return compute(precision)
        except UndecidableError as e:
            log.debug('%s undecided at %d bits: %s', what, precision.bits, e)
            precision = precision.escalate()


class CertifiedReal(Object):
    '''
    A real number that can be enclosed at any requested precision. The
    evaluator is called with a PrecisionSpec and returns a Ball; results
    are memoised per precision.
    '''
    __slots__ = ['_value_id', '_evaluate', '_memo', '_lock']

    def __init__(self, value_id, evaluate):
        super(CertifiedReal, self).__init__()
        self._value_id = value_id
        self._evaluate = evaluate
        self._memo = {}
        self._lock = threading.Lock()

    @property
    def value_id(self):
        return self._value_id

    def at(self, precision):
        try:
            return self._memo[precision.bits]
        except KeyError:
            ball = self._evaluate(precision)
            with self._lock:
                self._memo.setdefault(precision.bits, ball)
            return ball

    def __eq__(self, other):
        return isinstance(other, CertifiedReal) and other._value_id == self._value_id

    def __hash__(self):
        return hash(self._value_id)

    def __repr__(self):
        return 'CertifiedReal(%r)' % self._value_id

    @classmethod
    def rational(cls, p, q=1):
        value = Fraction(p, q)
        return cls('%s' % value,
                   lambda prec: ball_from_rational(value.numerator, value.denominator, prec))

    @classmethod
    def log_of(cls, p, q=1):
        value = Fraction(p, q)
        return cls('log(%s)' % value,
                   lambda prec: ball_log(ball_from_rational(value.numerator, value.denominator,
                                                            prec)))

    @classmethod
    def of(cls, value):
        """Wrap ints, Fractions and CertifiedReals uniformly"""
        if isinstance(value, CertifiedReal):
            return value
        if isinstance(value, (int, Fraction)) or isinstance(value, type(gmp.mpz(0))):
            return cls.rational(value)
        raise DomainError('Cannot certify a value of type %s' % type(value))


def log_ratio(p, q):
    """log(p)/log(q) as a certified real, e.g. log 2/log 10"""
    return CertifiedReal(
        'log%s/log%s' % (p, q),
        lambda prec: ball_log(ball_from_int(p, prec)) / ball_log(ball_from_int(q, prec)),
    )
