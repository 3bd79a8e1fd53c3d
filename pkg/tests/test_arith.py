#!/usr/bin/env python

import os
import random
import unittest
from fractions import Fraction

import gmpy2 as gmp

from testing_utils import *

from lucasrep.classes import DomainError, PrecisionError, UndecidableError
from lucasrep.arith import (
    Ball, CertifiedReal, Order, PrecisionSpec,
    ball_from_int, ball_from_rational, ball_from_interval, ball_log, ball_sqrt, ball_ceil,
    ball_floor, ball_compare, ball_nearest_int_distance, nearest_integer, certified_floor,
    escalate, log_ratio,
)


P = PrecisionSpec(256, 1 << 12)


def _reference(func, x):
    with gmp.local_context(gmp.get_context(), precision=1024):
        return gmp.mpq(func(gmp.mpfr(x)))


def _oracle(func, *args):
    """Evaluate func on exact rationals at four times the working precision"""
    with gmp.local_context(gmp.get_context(), precision=4 * P.bits):
        return gmp.mpq(func(*[gmp.mpfr(gmp.mpq(a)) for a in args]))


def _reversed(order):
    return Order(-order.value)


class TestPrecisionSpec(unittest.TestCase):
    def test_escalate_doubles(self):
        p = PrecisionSpec(64, 256)
        self.assertEqual(128, p.escalate().bits)
        self.assertEqual(256, p.escalate().escalate().bits)

    def test_ceiling(self):
        with self.assertRaises(PrecisionError):
            PrecisionSpec(256, 256).escalate()
        with self.assertRaises(PrecisionError):
            PrecisionSpec(512, 256)

    def test_minimum(self):
        with self.assertRaises(DomainError):
            PrecisionSpec(8, 256)

    def test_at_least(self):
        p = PrecisionSpec(64, 1024)
        self.assertIs(p, p.at_least(32))
        self.assertEqual(300, p.at_least(300).bits)
        self.assertEqual(1024, p.at_least(5000).bits)

    def test_environment(self):
        os.environ['LUCASREP_PRECISION_START'] = '128'
        try:
            self.assertEqual(128, PrecisionSpec().bits)
        finally:
            del os.environ['LUCASREP_PRECISION_START']
        self.assertEqual(256, PrecisionSpec().bits)


class TestBall(unittest.TestCase):
    def test_exact_integers(self):
        b = ball_from_int(12345, P)
        self.assertEqual(0, b.rad)
        self.assertTrue(b.contains(12345))

    def test_third(self):
        b = ball_from_rational(1, 3, P)
        self.assertTrue(b.contains(gmp.mpq(1, 3)))
        self.assertGreater(b.rad, 0)
        self.assertLess(b.rad, gmp.exp2(-250))

    def test_zero_denominator(self):
        with self.assertRaises(DomainError):
            ball_from_rational(1, 0, P)

    def test_enclosure_random(self):
        rng = random.Random(20240501)
        for _ in range(200):
            p = rng.randint(-10 ** 30, 10 ** 30)
            q = rng.randint(1, 10 ** 20)
            r = rng.randint(-10 ** 12, 10 ** 12)
            s = rng.randint(1, 10 ** 12)
            x = ball_from_rational(p, q, P)
            y = ball_from_rational(r, s, P)
            a = Fraction(p, q)
            b = Fraction(r, s)
            self.assertTrue((x + y).contains(gmp.mpq(a + b)))
            self.assertTrue((x - y).contains(gmp.mpq(a - b)))
            self.assertTrue((x * y).contains(gmp.mpq(a * b)))
            if r:
                self.assertTrue((x / y).contains(gmp.mpq(a / b)))

    def test_negation_keeps_precision(self):
        x = ball_from_rational(1, 3, P)
        n = -x
        self.assertEqual(x.rad, n.rad)
        self.assertEqual(-gmp.mpq(x.mid), gmp.mpq(n.mid))
        self.assertTrue(n.contains(-gmp.mpq(1, 3)))
        self.assertTrue(abs(n).contains(gmp.mpq(1, 3)))
        self.assertTrue((x + n).contains(0))

    def test_negated_log_ratio(self):
        prec = PrecisionSpec(512, 1 << 12)
        ratio = -ball_log(ball_from_rational(1, 10, prec)) / ball_log(ball_from_int(10, prec))
        self.assertTrue(ratio.contains(1))
        self.assertLess(ratio.rad, gmp.exp2(-500))
        self.assertEqual(512, ratio.mid.precision)

    def test_sign_tests_near_radius(self):
        # Midpoint magnitude exceeds the radius only below double precision
        mid = ball_from_rational(2 ** 200 + 1, 2 ** 200, P).mid
        neg = ball_from_rational(-2 ** 200 - 1, 2 ** 200, P).mid
        one = gmp.mpfr(1)
        self.assertTrue(Ball(neg, one, P).is_negative())
        self.assertTrue(Ball(mid, one, P).is_positive())
        self.assertFalse(Ball(neg, one, P).contains_zero())
        self.assertFalse(Ball(mid, one, P).contains_zero())
        self.assertTrue(Ball(one, one, P).contains_zero())

    def test_composite_enclosure(self):
        def composite(a, b):
            return gmp.log(abs(a - b) + 1) * -a + abs(b) / (1 + a * a)

        rng = random.Random(20240502)
        for _ in range(100):
            a = Fraction(rng.randint(-10 ** 25, 10 ** 25), rng.randint(1, 10 ** 20))
            b = Fraction(rng.randint(-10 ** 12, 10 ** 12), rng.randint(1, 10 ** 12))
            x = ball_from_rational(a.numerator, a.denominator, P)
            y = ball_from_rational(b.numerator, b.denominator, P)
            value = ball_log(abs(x - y) + 1) * -x + abs(y) / (1 + x * x)
            self.assertTrue(value.contains(_oracle(composite, a, b)))
            self.assertTrue((-(x * y)).contains(_oracle(lambda u, v: -(u * v), a, b)))
            self.assertTrue(abs(-x).contains(abs(gmp.mpq(a))))

    def test_mixed_operands(self):
        x = ball_from_rational(1, 3, P)
        self.assertTrue((x * 3).contains(1))
        self.assertTrue((1 - x).contains(gmp.mpq(2, 3)))
        self.assertTrue((x + Fraction(2, 3)).contains(1))
        self.assertTrue((1 / x).contains(3))

    def test_power(self):
        x = ball_from_rational(3, 2, P)
        self.assertTrue((x ** 10).contains(gmp.mpq(3 ** 10, 2 ** 10)))
        self.assertTrue((x ** -2).contains(gmp.mpq(4, 9)))
        with self.assertRaises(DomainError):
            x ** 0.5

    def test_division_by_zero(self):
        with self.assertRaises(DomainError):
            ball_from_int(1, P) / ball_from_int(0, P)
        fuzzy = ball_from_interval(-gmp.mpq(1, 10 ** 6), gmp.mpq(1, 10 ** 6), P)
        with self.assertRaises(UndecidableError):
            ball_from_int(1, P) / fuzzy

    def test_negative_radius(self):
        with self.assertRaises(DomainError):
            Ball(gmp.mpfr(1), gmp.mpfr(-1), P)

    def test_interval(self):
        b = ball_from_interval(gmp.mpq(1, 3), gmp.mpq(1, 2), P)
        lo, hi = b.exact_bounds()
        self.assertLessEqual(lo, gmp.mpq(1, 3))
        self.assertGreaterEqual(hi, gmp.mpq(1, 2))
        with self.assertRaises(DomainError):
            ball_from_interval(1, 0, P)


class TestElementary(unittest.TestCase):
    def test_log(self):
        l2 = ball_log(ball_from_int(2, P))
        self.assertTrue(l2.contains(_reference(gmp.log, 2)))
        self.assertEqual(0, ball_log(ball_from_int(1, P)).mid)

    def test_log_domain(self):
        with self.assertRaises(DomainError):
            ball_log(ball_from_int(-1, P))
        with self.assertRaises(DomainError):
            ball_log(ball_from_int(0, P))
        straddle = ball_from_interval(-1, 1, P)
        with self.assertRaises(UndecidableError):
            ball_log(straddle)

    def test_log_of_wide_ball(self):
        x = ball_from_interval(gmp.mpq(9, 10), gmp.mpq(11, 10), P)
        l = ball_log(x)
        lo, hi = l.exact_bounds()
        self.assertLess(lo, gmp.mpq(gmp.log(gmp.mpfr(0.9, 128))))
        self.assertGreater(hi, gmp.mpq(gmp.log(gmp.mpfr(1.1, 128))))

    def test_sqrt(self):
        s = ball_sqrt(ball_from_int(2, P))
        self.assertTrue((s * s).contains(2))
        with self.assertRaises(DomainError):
            ball_sqrt(ball_from_int(-4, P))

    def test_ceil_floor(self):
        x = ball_from_rational(7, 2, P)
        self.assertEqual(4, ball_ceil(x))
        self.assertEqual(3, ball_floor(x))
        self.assertEqual(3, certified_floor(x))
        self.assertIsNone(certified_floor(ball_from_interval(gmp.mpq(29, 10), 3, P)))
        self.assertEqual(-3, ball_ceil(ball_from_rational(-7, 2, P)))


class TestComparison(unittest.TestCase):
    def test_order(self):
        third = ball_from_rational(1, 3, P)
        half = ball_from_rational(1, 2, P)
        self.assertEqual(Order.LESS, ball_compare(third, half))
        self.assertEqual(Order.GREATER, ball_compare(half, third))
        self.assertEqual(Order.UNDECIDABLE, ball_compare(third, third))

    def test_antisymmetry(self):
        rng = random.Random(20240503)
        for _ in range(200):
            lo = gmp.mpq(rng.randint(-1000, 1000), 100)
            width = gmp.mpq(rng.randint(0, 300), 100)
            x = ball_from_interval(lo, lo + width, P)
            y = ball_from_rational(rng.randint(-1000, 1000), 100, P)
            order = ball_compare(x, y)
            self.assertEqual(_reversed(order), ball_compare(y, x))
            self.assertEqual(_reversed(order), ball_compare(-x, -y))
            self.assertEqual(Order.UNDECIDABLE, ball_compare(x, x))

    def test_nearest_integer(self):
        self.assertEqual(3, nearest_integer(gmp.mpq(29, 10)))
        self.assertEqual(-3, nearest_integer(gmp.mpq(-29, 10)))
        self.assertEqual(1, nearest_integer(gmp.mpq(1, 2)))

    def test_nearest_int_distance(self):
        d = ball_nearest_int_distance(ball_from_rational(37, 10, P))
        self.assertTrue(d.contains(gmp.mpq(3, 10)))
        d = ball_nearest_int_distance(ball_from_rational(-21, 10, P))
        self.assertTrue(d.contains(gmp.mpq(1, 10)))

    def test_nearest_int_distance_wide(self):
        wide = ball_from_interval(0, 1, P)
        with self.assertRaises(UndecidableError):
            ball_nearest_int_distance(wide)


class TestCertifiedReal(unittest.TestCase):
    def test_memoised(self):
        calls = []

        def evaluate(prec):
            calls.append(prec.bits)
            return ball_from_rational(1, 7, prec)
        x = CertifiedReal('1/7 test', evaluate)
        x.at(P)
        x.at(P)
        self.assertEqual([256], calls)
        x.at(P.escalate())
        self.assertEqual([256, 512], calls)

    def test_identity(self):
        self.assertEqual(log_ratio(2, 10), log_ratio(2, 10))
        self.assertEqual(hash(CertifiedReal.rational(1, 3)),
                         hash(CertifiedReal.of(Fraction(1, 3))))
        with self.assertRaises(DomainError):
            CertifiedReal.of(0.5)

    def test_log_ratio(self):
        g = log_ratio(2, 10).at(P)
        self.assertTrue(g.contains(_reference(gmp.log10, 2)))

    def test_monotone_refinement(self):
        sqrt2 = CertifiedReal('sqrt(2)', lambda prec: ball_sqrt(ball_from_int(2, prec)))
        for real in (log_ratio(2, 10), sqrt2, CertifiedReal.rational(1, 7)):
            previous = None
            for bits in (64, 128, 256, 512, 1024, 2048):
                ball = real.at(PrecisionSpec(bits, 4096))
                lo, hi = ball.exact_bounds()
                if previous is not None:
                    self.assertLessEqual(ball.rad, previous.rad)
                    p_lo, p_hi = previous.exact_bounds()
                    self.assertTrue(lo <= p_hi and p_lo <= hi)
                previous = ball
            self.assertLess(previous.rad, gmp.exp2(-2000))

    def test_escalate(self):
        seen = []

        def compute(prec):
            seen.append(prec.bits)
            if prec.bits < 1024:
                raise UndecidableError('not yet')
            return prec.bits
        self.assertEqual(1024, escalate(compute, PrecisionSpec(256, 4096)))
        self.assertEqual([256, 512, 1024], seen)
        with self.assertRaises(PrecisionError):
            escalate(compute, PrecisionSpec(256, 512))


if __name__ == '__main__':
    unittest.main()
