"""
Continued fraction module

Certified continued fraction expansions. The ball of a real is turned into an
exact rational interval and both endpoints are expanded in lockstep; a partial
quotient is accepted only while the endpoints agree on it, so every accepted
quotient is correct for every value in the ball.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import os
import re
import tempfile
import threading

import gmpy2 as gmp

from .classes import Object, Logable, ContFracError, CacheError, PrecisionError
from .arith import MIN_BITS, Ball, PrecisionSpec


# Bits needed per certified quotient, a little over 2 log2 of Levy's constant
BITS_PER_QUOTIENT = 4


class Convergent(Object):
    __slots__ = ['_index', '_p', '_q']

    def __init__(self, index, p, q):
        super(Convergent, self).__init__()
        self._index = index
        self._p = p
        self._q = q

    @property
    def index(self):
        return self._index

    @property
    def p(self):
        return self._p

    @property
    def q(self):
        return self._q

    def __eq__(self, other):
        return isinstance(other, Convergent) and \
            (self._index, self._p, self._q) == (other._index, other._p, other._q)

    def __hash__(self):
        return hash((self._index, self._p, self._q))

    def __repr__(self):
        return 'Convergent(%d, %d/%d)' % (self._index, self._p, self._q)


class CFExpansion(Object):
    '''Certified prefix a_0, a_1, ... of the continued fraction of a real'''
    __slots__ = ['_value_id', '_quotients', '_certified_count', '_precision_bits',
                 '_convergents']

    def __init__(self, value_id, quotients, certified_count=None, precision_bits=0):
        super(CFExpansion, self).__init__()
        if certified_count is None:
            certified_count = len(quotients)
        if certified_count > len(quotients):
            raise ContFracError('Certified count %d exceeds %d quotients' %
                                (certified_count, len(quotients)))
        if any(a < 1 for a in quotients[1:]):
            raise ContFracError('Partial quotients after a_0 must be positive')
        self._value_id = value_id
        self._quotients = [int(a) for a in quotients]
        self._certified_count = certified_count
        self._precision_bits = precision_bits
        self._convergents = None

    @property
    def value_id(self):
        return self._value_id

    @property
    def quotients(self):
        return list(self._quotients)

    @property
    def certified_count(self):
        return self._certified_count

    @property
    def precision_bits(self):
        return self._precision_bits

    def convergents(self):
        """All convergents of the certified prefix, index 0 from a_0"""
        if self._convergents is None:
            result = []
            p0, q0, p1, q1 = 1, 0, 0, 1
            for i, a in enumerate(self._quotients[:self._certified_count]):
                p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
                result.append(Convergent(i, p0, q0))
            self._convergents = result
        return self._convergents

    def extends(self, other):
        """True when this expansion agrees with the certified prefix of other"""
        n = min(self._certified_count, other.certified_count)
        return self._quotients[:n] == other._quotients[:n]


def _floor(q):
    return q.numerator // q.denominator


def sandwich(lo, hi, limit):
    """Common continued fraction prefix of every rational in [lo, hi]"""
    lo = gmp.mpq(lo)
    hi = gmp.mpq(hi)
    quotients = []
    while len(quotients) < limit:
        a = _floor(lo)
        if _floor(hi) != a:
            break
        quotients.append(int(a))
        f_lo = lo - a
        f_hi = hi - a
        if not f_lo or not f_hi:
            break
        lo, hi = 1 / f_hi, 1 / f_lo
    return quotients


def expand_ball(x, want, value_id=None):
    """Certified expansion of a single ball; no escalation is possible"""
    lo, hi = x.exact_bounds()
    quotients = sandwich(lo, hi, want)
    if not quotients:
        raise ContFracError('Ball %s too wide to certify a single quotient' % x)
    return CFExpansion(value_id or repr(x), quotients, len(quotients), x.bits)


class Expander(Logable):
    '''
    Expands certified reals, escalating precision until enough quotients are
    certified. Keeps the longest expansion per value in memory and, when a
    cache is configured, on disk.
    '''

    def __init__(self, *args, **kwargs):
        super(Expander, self).__init__(*args, **kwargs)
        self._cache = kwargs.get('cache')
        self._precision = kwargs.get('precision')
        self._memory = {}
        self._lock = threading.Lock()

    @property
    def cache(self):
        return self._cache

    @cache.setter
    def cache(self, value):
        self._cache = value

    def _known(self, real):
        cf = self._memory.get(real.value_id)
        if cf is None and self._cache is not None:
            cf = self._cache.load(real)
            if cf is not None:
                self._remember(cf)
        return cf

    def _remember(self, cf):
        with self._lock:
            known = self._memory.get(cf.value_id)
            if known is None or known.certified_count < cf.certified_count:
                self._memory[cf.value_id] = cf

    def expand(self, real, want):
        known = self._known(real)
        if known is not None and known.certified_count >= want:
            return known
        prec = (self._precision or PrecisionSpec()).at_least(BITS_PER_QUOTIENT * want + 64)
        if known is not None:
            prec = prec.at_least(known.precision_bits)
        while True:
            x = real.at(prec)
            lo, hi = x.exact_bounds()
            quotients = sandwich(lo, hi, want)
            if len(quotients) >= want:
                break
            self.log.debug('%s: %d of %d quotients certified at %d bits',
                           real.value_id, len(quotients), want, prec.bits)
            try:
                prec = prec.escalate()
            except PrecisionError as e:
                raise ContFracError('Could not certify %d quotients of %s: %s' %
                                    (want, real.value_id, e))
        cf = CFExpansion(real.value_id, quotients, len(quotients), prec.bits)
        if known is not None and not cf.extends(known):
            raise ContFracError('Expansion of %s contradicts its certified prefix' %
                                real.value_id)
        self._remember(cf)
        if self._cache is not None:
            self._cache.store(cf)
        return cf


_expander = Expander()


def get_expander():
    return _expander


def set_cache(cache):
    _expander.cache = cache


def expand(x, want):
    """Certified expansion with at least `want` quotients of a Ball or CertifiedReal"""
    if isinstance(x, Ball):
        cf = expand_ball(x, want)
        if cf.certified_count < want:
            raise ContFracError('Only %d of %d quotients certified at %d bits' %
                                (cf.certified_count, want, x.bits))
        return cf
    return _expander.expand(x, want)


def convergent(cf, i):
    if i < 0 or i >= cf.certified_count:
        raise ContFracError('Convergent %d beyond certified prefix of %d quotients' %
                            (i, cf.certified_count))
    return cf.convergents()[i]


def iter_convergents(x, start_count=64):
    """Convergents of x in order, extending the expansion on demand"""
    want = start_count
    i = 0
    while True:
        cf = expand(x, want)
        convs = cf.convergents()
        while i < len(convs):
            yield convs[i]
            i += 1
        want *= 2


def first_q_exceeding(x, bound):
    """Least-index convergent of x with denominator > bound"""
    if bound < 1:
        raise ContFracError('Bound must be at least 1, got %d' % bound)
    # Typical denominators grow by a factor of about 3.28 per quotient
    start = int(0.6 * int(bound).bit_length()) + 16
    for conv in iter_convergents(x, start):
        if conv.q > bound:
            return conv


def next_convergent(x, conv):
    """The convergent following conv in the expansion of x"""
    cf = expand(x, conv.index + 2)
    return convergent(cf, conv.index + 1)


def max_partial_quotient(x, index_limit):
    """max(a_1, ..., a_{index_limit - 1})"""
    if index_limit < 2:
        raise ContFracError('Index limit must be at least 2, got %d' % index_limit)
    cf = expand(x, index_limit)
    return max(cf.quotients[1:index_limit])


def max_quotient_below(x, bound):
    """max a_{i+1} over convergents p_i/q_i with q_i <= bound"""
    last = first_q_exceeding(x, bound)
    cf = expand(x, last.index + 1)
    return max(cf.quotients[1:last.index + 1])


def check_expansion(cf, x):
    """Determinant identity and best approximation |x - p/q| < 1/q^2 for all convergents"""
    convs = cf.convergents()
    lo, hi = x.exact_bounds()
    for i, conv in enumerate(convs):
        if i:
            prev = convs[i - 1]
            if conv.p * prev.q - prev.p * conv.q != (-1) ** (i - 1):
                return False
            if conv.q <= prev.q and i > 1:
                return False
        if i + 1 < len(convs):
            err = gmp.mpq(1, conv.q * convs[i + 1].q)
            pq = gmp.mpq(conv.p, conv.q)
            if not (hi - pq < err and pq - lo < err):
                return False
    return True


class ExpansionCache(Logable):
    '''
    On-disk store of expansions, one file per value: a header line
    "value_id, precision_bits, certified_count" followed by one quotient per line.
    Files are written to a temporary name and renamed into place.
    '''

    def __init__(self, *args, **kwargs):
        super(ExpansionCache, self).__init__(*args, **kwargs)
        self._directory = kwargs['directory']

    @property
    def directory(self):
        return self._directory

    def path(self, value_id):
        name = re.sub(r'[^A-Za-z0-9_.=,-]+', '_', value_id)
        return os.path.join(self._directory, name + '.cf')

    def store(self, cf):
        os.makedirs(self._directory, exist_ok=True)
        path = self.path(cf.value_id)
        try:
            existing = self.read(path)
        except CacheError as e:
            self.log.warning('%s; overwriting', e)
            existing = None
        if existing is not None and existing.certified_count >= cf.certified_count and \
                existing.extends(cf):
            return path
        fd, tmp = tempfile.mkstemp(dir=self._directory, suffix='.tmp')
        try:
            with os.fdopen(fd, 'w') as f:
                f.write('%s, %d, %d\n' % (cf.value_id, cf.precision_bits, cf.certified_count))
                for a in cf.quotients[:cf.certified_count]:
                    f.write('%d\n' % a)
            os.replace(tmp, path)
        except OSError:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise
        self.log.debug('Stored %d quotients of %s in %s', cf.certified_count, cf.value_id, path)
        return path

    def read(self, path):
        """Parse a cache file; None when absent, CacheError when malformed"""
        if not os.path.exists(path):
            return None
        with open(path, 'r') as f:
            lines = [line.strip() for line in f if line.strip()]
        try:
            value_id, bits, count = [s.strip() for s in lines[0].rsplit(',', 2)]
            quotients = [int(s) for s in lines[1:]]
            cf = CFExpansion(value_id, quotients, int(count), int(bits))
        except (IndexError, ValueError, ContFracError) as e:
            raise CacheError('Malformed expansion cache %s: %s' % (path, e))
        if cf.certified_count != len(quotients):
            raise CacheError('Cache %s lists %d quotients, header says %d' %
                             (path, len(quotients), cf.certified_count))
        return cf

    def load(self, real):
        """Load and re-certify the cached expansion of real; None if unusable"""
        path = self.path(real.value_id)
        try:
            cf = self.read(path)
        except CacheError as e:
            self.log.warning('%s; recomputing', e)
            return None
        if cf is None:
            return None
        if cf.value_id != real.value_id:
            self.log.warning('Cache %s holds %s, expected %s', path, cf.value_id, real.value_id)
            return None
        if cf.certified_count < 2:
            return None
        try:
            fresh = real.at(PrecisionSpec(max(cf.precision_bits, MIN_BITS)))
        except PrecisionError as e:
            self.log.warning('Cannot re-certify cached %s: %s', real.value_id, e)
            return None
        if not check_expansion(cf, fresh):
            self.log.warning('Cached expansion of %s failed re-certification', real.value_id)
            return None
        return cf

