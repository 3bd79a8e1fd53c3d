"""
Digits module

Recognise almost repdigits, numbers whose decimal digits are all equal except for
at most one, and decompose them as a(10^d1 - 1)/9 + (b - a)10^d2.
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

from fractions import Fraction

import numpy as np

from .classes import Object


class AlmostRepdigitForm(Object):
    '''Digit pattern (a, b, d1, d2): d1 digits a, digit b at position d2 (units = 0)'''
    __slots__ = ['_a', '_b', '_d1', '_d2']

    def __init__(self, a, b, d1, d2):
        super(AlmostRepdigitForm, self).__init__()
        self._a = a
        self._b = b
        self._d1 = d1
        self._d2 = d2

    @property
    def a(self):
        return self._a

    @property
    def b(self):
        return self._b

    @property
    def d1(self):
        return self._d1

    @property
    def d2(self):
        return self._d2

    @property
    def gap(self):
        return self._d1 - self._d2

    @property
    def value(self):
        return eval_form(self)

    def key(self):
        return (self._a, self._b, self._d1, self._d2)

    def is_valid(self):
        """All form invariants, including the exact digit count"""
        if not (0 <= self._a <= 9 and 0 <= self._b <= 9):
            return False
        if not (0 <= self._d2 < self._d1):
            return False
        value = self.value
        return value > 0 and len(str(value)) == self._d1

    def canonical(self):
        """Repdigits written with b = a collapse to d2 = 0"""
        if self._a == self._b and self._d2:
            return AlmostRepdigitForm(self._a, self._a, self._d1, 0)
        return self

    def as_dict(self):
        return {'a': self._a, 'b': self._b, 'd1': self._d1, 'd2': self._d2}

    def __eq__(self, other):
        return isinstance(other, AlmostRepdigitForm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return 'AlmostRepdigitForm(a=%d, b=%d, d1=%d, d2=%d)' % self.key()


def eval_form(form):
    return form.a * (10 ** form.d1 - 1) // 9 + (form.b - form.a) * 10 ** form.d2


def _digits(n):
    return np.frombuffer(str(n).encode('ascii'), dtype=np.uint8) - ord('0')


def is_almost_repdigit(n):
    counts = np.bincount(_digits(n), minlength=10)
    present = counts[counts > 0]
    if len(present) == 1:
        return True
    return bool(len(present) == 2 and present.min() == 1)


def decompose(n):
    """All forms encoding n, sorted by (a, b, d2); empty if n is no almost repdigit"""
    digits = _digits(n)
    d1 = len(digits)
    counts = np.bincount(digits, minlength=10)
    present = np.flatnonzero(counts)
    if len(present) == 1:
        c = int(present[0])
        return [AlmostRepdigitForm(c, c, d1, 0)]
    if len(present) != 2:
        return []
    forms = []
    for b in present:
        if counts[b] != 1:
            continue
        a = int(present[0] if present[1] == b else present[1])
        # Digit strings are written most significant first
        d2 = d1 - 1 - int(np.flatnonzero(digits == b)[0])
        forms.append(AlmostRepdigitForm(a, int(b), d1, d2))
    return sorted(forms, key=lambda f: (f.a, f.b, f.d2))


def digit_window(n):
    """Exclusive bounds (0.2n - 0.6, 0.31n + 2.31) on d1 for a solution at index n > 5"""
    return Fraction(2, 10) * n - Fraction(6, 10), Fraction(31, 100) * n + Fraction(231, 100)


def in_digit_window(n, d1):
    lo, hi = digit_window(n)
    return lo < d1 < hi
