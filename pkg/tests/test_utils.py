#!/usr/bin/env python

import unittest
from fractions import Fraction

from testing_utils import *

from lucasrep.classes import DomainError
from lucasrep.arith import CertifiedReal
from lucasrep.reduction import find_relation
from lucasrep.utils import parse_number, parse_int, parse_real


class TestNumbers(unittest.TestCase):
    def test_parse_number(self):
        self.assertEqual(Fraction(1, 3), parse_number('1/3'))
        self.assertEqual(Fraction(1, 4), parse_number(' 0.25 '))
        self.assertEqual(18 * 10 ** 290, parse_number('1.8e291'))
        for text in ('x', '1/0', ''):
            with self.assertRaises(DomainError):
                parse_number(text)

    def test_parse_int(self):
        self.assertEqual(12, parse_int('12'))
        self.assertEqual(3, parse_int('2.5'))
        self.assertEqual(85 * 10 ** 59, parse_int('8.5e60'))


class TestReals(unittest.TestCase):
    def test_atoms(self):
        self.assertEqual('log(2)/log(10)', parse_real('log(2)/log(10)').value_id)
        self.assertEqual('tau(k=3)', parse_real('tau(3)').value_id)
        self.assertIsInstance(parse_real('1/3'), CertifiedReal)

    def test_relations(self):
        sqrt2 = parse_real('sqrt(2)')
        self.assertEqual((1, 1), find_relation(sqrt2, parse_real('1 - sqrt(2)')))
        self.assertEqual((2, 3), find_relation(sqrt2, parse_real('3 - 2*sqrt(2)')))
        gamma = parse_real('log(2)/log(10)')
        self.assertEqual((1, 1), find_relation(gamma, parse_real('mu4(9,5,1)')))
        self.assertEqual((-1, 0), find_relation(gamma, parse_real('log(2)/log(10)')))

    def test_sum(self):
        real = parse_real('5*tau(3) + mu1(3,1)')
        self.assertEqual('5*tau(3)+mu1(3,1)', real.value_id)

    def test_malformed(self):
        for text in ('1 +', 'foo(2)', '2*'):
            with self.assertRaises(DomainError):
                parse_real(text)


if __name__ == '__main__':
    unittest.main()
