"""
Sequences module

Exact k-generalized Lucas numbers: L_0 = 2, L_1 = 1, L_i = 0 for 2-k <= i <= -1
and every later term the sum of the k preceding terms.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

from collections import deque

from .classes import Object, SequenceError


def _check_order(k):
    if k < 2:
        raise SequenceError('Order k must be at least 2, got %d' % k)


class SequenceParams(Object):
    __slots__ = ['_k']

    def __init__(self, k):
        super(SequenceParams, self).__init__()
        _check_order(k)
        self._k = k

    @property
    def k(self):
        return self._k

    @property
    def first_index(self):
        return 2 - self._k


class TermWindow(Object):
    '''
    The k most recent terms of the sequence with their running sum. Sliding
    costs two big integer operations regardless of k.
    '''
    __slots__ = ['_k', '_start', '_values', '_sum']

    def __init__(self, k):
        super(TermWindow, self).__init__()
        _check_order(k)
        self._k = k
        # Window holds L_{start} .. L_{start+k-1}, initially L_{2-k} .. L_1
        self._start = 2 - k
        self._values = deque([0] * (k - 2) + [2, 1], maxlen=k)
        self._sum = 3

    @property
    def k(self):
        return self._k

    @property
    def start_index(self):
        return self._start

    @property
    def last_index(self):
        return self._start + self._k - 1

    @property
    def values(self):
        return list(self._values)

    @property
    def last(self):
        return self._values[-1]

    def slide(self):
        """Advance by one term and return it"""
        new = self._sum
        self._sum += new - self._values[0]
        self._values.append(new)
        self._start += 1
        return new


def lucas_term(k, n):
    """L_n^(k)"""
    _check_order(k)
    if n < 2 - k:
        raise SequenceError('Index %d below first index %d for k=%d' % (n, 2 - k, k))
    if n < 0:
        return 0
    if n == 0:
        return 2
    if n == 1:
        return 1
    if n <= k:
        return power_form_term(n)
    window = TermWindow(k)
    while window.last_index < n:
        window.slide()
    return window.last


def lucas_stream(k, n_max):
    """List of (n, L_n^(k)) for 1 <= n <= n_max"""
    _check_order(k)
    result = []
    if n_max < 1:
        return result
    window = TermWindow(k)
    result.append((1, window.last))
    while window.last_index < n_max:
        result.append((window.last_index + 1, window.slide()))
    return result


def iter_lucas(k, n_min=1, n_max=None):
    """Yield (n, L_n^(k)) from n_min on, optionally up to n_max"""
    _check_order(k)
    window = TermWindow(k)
    n = 1
    if n_min <= 1:
        yield 1, window.last
    while n_max is None or n < n_max:
        value = window.slide()
        n += 1
        if n >= n_min:
            yield n, value


def power_form_term(n):
    """3*2^(n-2), the value of L_n^(k) for 2 <= n <= k"""
    if n < 2:
        raise SequenceError('Power form needs n >= 2, got %d' % n)
    return 3 << (n - 2)
