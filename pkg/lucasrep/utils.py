"""
Utils module

Parsing of exact numbers and certified real expressions given as text
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import math
import re
from fractions import Fraction

from .classes import DomainError
from .arith import CertifiedReal, ball_from_int, ball_from_rational, ball_log, ball_sqrt
from .algebraic import alpha_real, tau_real, log10_real, mu_gamma1, mu_gamma2
from .pipeline import mu_gamma3, mu_gamma4


def parse_number(text):
    """Exact value of '12', '1/3', '0.25' or '1.8e291'"""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError('Not a number: %s' % text)


def parse_int(text):
    """Integer value, rounded up when the text is not integral"""
    return math.ceil(parse_number(text))


def _ints(text):
    return [int(s) for s in text.split(',')]


def _log(value, prec):
    return ball_log(ball_from_rational(value.numerator, value.denominator, prec))


def _atom_log_ratio(p, q):
    p, q = parse_number(p), parse_number(q)
    return CertifiedReal('log(%s)/log(%s)' % (p, q),
                         lambda prec: _log(p, prec) / _log(q, prec))


def _atom_over_log(c, q):
    c, q = parse_number(c), parse_number(q)
    return CertifiedReal('%s/log(%s)' % (c, q),
                         lambda prec: ball_from_rational(c.numerator, c.denominator, prec) /
                         _log(q, prec))


def _atom_sqrt(n):
    n = parse_number(n)
    return CertifiedReal('sqrt(%s)' % n,
                         lambda prec: ball_sqrt(ball_from_rational(n.numerator, n.denominator,
                                                                   prec)))


_ATOMS = [
    (re.compile(r'^log\(([^()]+)\)/log\(([^()]+)\)$'), lambda m: _atom_log_ratio(*m.groups())),
    (re.compile(r'^log\(([^()]+)\)$'),
     lambda m: CertifiedReal.log_of(parse_number(m.group(1)))),
    (re.compile(r'^([0-9.e/]+)/log\(([^()]+)\)$'), lambda m: _atom_over_log(*m.groups())),
    (re.compile(r'^sqrt\(([^()]+)\)$'), lambda m: _atom_sqrt(m.group(1))),
    (re.compile(r'^tau\((\d+)\)$'), lambda m: tau_real(int(m.group(1)))),
    (re.compile(r'^alpha\((\d+)\)$'), lambda m: alpha_real(int(m.group(1)))),
    (re.compile(r'^log10$'), lambda m: log10_real()),
    (re.compile(r'^mu1\(([\d,]+)\)$'), lambda m: mu_gamma1(*_ints(m.group(1)))),
    (re.compile(r'^mu2\(([\d,]+)\)$'), lambda m: mu_gamma2(*_ints(m.group(1)))),
    (re.compile(r'^mu3\(([\d,]+)\)$'), lambda m: mu_gamma3(*_ints(m.group(1)))),
    (re.compile(r'^mu4\(([\d,]+)\)$'), lambda m: mu_gamma4(*_ints(m.group(1)))),
]


def parse_atom(text):
    text = text.replace(' ', '')
    for pattern, build in _ATOMS:
        match = pattern.match(text)
        if match:
            return build(match)
    return CertifiedReal.rational(parse_number(text))


def _split_terms(text):
    """Top level signed terms of a sum"""
    terms = []
    depth = 0
    start = 0
    sign = 1
    text = text.replace(' ', '')
    for i, c in enumerate(text):
        if c == '(':
            depth += 1
        elif c == ')':
            depth -= 1
        elif c in '+-' and depth == 0 and i > start and text[i - 1] not in 'e*':
            terms.append((sign, text[start:i]))
            sign = 1 if c == '+' else -1
            start = i + 1
        elif c in '+-' and depth == 0 and i == start:
            sign = sign if c == '+' else -sign
            start = i + 1
    terms.append((sign, text[start:]))
    return terms


def _term(sign, text):
    factor = 1
    if '*' in text:
        coefficient, text = text.split('*', 1)
        factor = int(coefficient)
    return sign * factor, parse_atom(text)


def parse_real(text):
    """
    Certified real from an expression such as 'log(2)/log(10)', '1/3',
    'sqrt(2)', '1 - sqrt(2)', '5*tau(3) + mu1(3,1)' or 'mu4(9,5,1)'
    """
    split = _split_terms(text)
    if any(not t for _, t in split):
        raise DomainError('Malformed expression: %s' % text)
    terms = [_term(sign, t) for sign, t in split]
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]

    def evaluate(prec):
        total = ball_from_int(0, prec)
        for factor, real in terms:
            total = total + real.at(prec) * factor
        return total
    return CertifiedReal(text.replace(' ', ''), evaluate)
