import unittest
from fractions import Fraction

from ncgraded.exactla import FieldSpec
from ncgraded.freealg import (
    EMPTY,
    FreeElement,
    GeneratorInfo,
    compare_words,
    enumerate_words,
    format_element,
    multiply,
    power,
    substitute,
    word_degree,
)

Q = FieldSpec.rationals()
NAMES = ("x", "y")
WEIGHTS = (1, 1)


def element(terms, field=Q):
    return FreeElement(terms, field)


class TestWords(unittest.TestCase):
    def test_degree_and_order(self):
        self.assertEqual(word_degree((0, 1, 1), (1, 2)), 5)
        self.assertEqual(compare_words((1,), (0, 0), WEIGHTS), -1)
        self.assertEqual(compare_words((1, 0), (0, 1), WEIGHTS), 1)
        self.assertEqual(compare_words((0, 1), (0, 1), WEIGHTS), 0)

    def test_enumerate_words(self):
        gens = [GeneratorInfo("x"), GeneratorInfo("y")]
        self.assertEqual(enumerate_words(gens, 2), [(0, 0), (0, 1), (1, 0), (1, 1)])
        self.assertEqual(enumerate_words(gens, 0), [EMPTY])
        self.assertEqual(enumerate_words(gens, -1), [])

    def test_weighted_enumeration(self):
        gens = [GeneratorInfo("x", 1), GeneratorInfo("u", 2)]
        self.assertEqual(enumerate_words(gens, 3), [(0, 0, 0), (0, 1), (1, 0)])

    def test_generator_needs_positive_degree(self):
        with self.assertRaises(ValueError):
            GeneratorInfo("x", 0)


class TestFreeElement(unittest.TestCase):
    def test_zero_coefficients_are_dropped(self):
        e = element({(0,): 1, (1,): 0})
        self.assertEqual(e.words(), [(0,)])
        self.assertFalse(element({(0,): 1}) - element({(0,): 1}))

    def test_arithmetic(self):
        x = FreeElement.monomial((0,), Q)
        y = FreeElement.monomial((1,), Q)
        self.assertEqual((x + y) * (x - y), element({(0, 0): 1, (0, 1): -1, (1, 0): 1, (1, 1): -1}))
        self.assertEqual(power(x + y, 0), FreeElement.one(Q))
        self.assertEqual(len(power(x + y, 3)), 8)
        self.assertEqual(x.scale(Fraction(1, 2)).coefficient((0,)), Fraction(1, 2))

    def test_fields_do_not_mix(self):
        with self.assertRaises(ValueError):
            FreeElement.monomial((0,), Q) + FreeElement.monomial((0,), FieldSpec.prime(5))

    def test_degrees(self):
        e = element({(0,): 1, (0, 1, 1): 2, EMPTY: 3})
        self.assertEqual(e.degrees(WEIGHTS), [0, 1, 3])
        self.assertEqual(e.degree(WEIGHTS), 3)
        self.assertFalse(e.is_homogeneous(WEIGHTS))
        self.assertEqual(sorted(e.homogeneous_parts(WEIGHTS)), [0, 1, 3])
        self.assertIsNone(FreeElement.zero(Q).degree(WEIGHTS))

    def test_leading_and_monic(self):
        e = element({(0, 1): 2, (1, 0): 4})
        self.assertEqual(e.leading(WEIGHTS), ((1, 0), 4))
        self.assertEqual(e.monic(WEIGHTS), element({(0, 1): Fraction(1, 2), (1, 0): 1}))

    def test_reverse_and_relabel(self):
        e = element({(0, 1): 1})
        self.assertEqual(e.reverse_words(), element({(1, 0): 1}))
        self.assertEqual(e.relabel([2, 3]), element({(2, 3): 1}))

    def test_substitute(self):
        x = FreeElement.monomial((0,), Q)
        y = FreeElement.monomial((1,), Q)
        relation = multiply(y, x) - multiply(x, y)
        # x -> x + y, y -> y keeps commutators among {x+y, y}
        image = substitute(relation, [x + y, y])
        self.assertEqual(image, multiply(y, x) - multiply(x, y))
        self.assertEqual(substitute(FreeElement.one(Q), [y, x]), FreeElement.one(Q))


class TestFormatting(unittest.TestCase):
    def test_powers_and_signs(self):
        e = element({(0, 0, 1): 1, (1, 0): -2, EMPTY: 1})
        self.assertEqual(format_element(e, NAMES, WEIGHTS), "x^2*y - 2*y*x + 1")
        self.assertEqual(format_element(FreeElement.zero(Q), NAMES, WEIGHTS), "0")

    def test_prime_field_coefficients(self):
        e = FreeElement({(1, 0): 1, (0, 1): -1}, FieldSpec.prime(5))
        self.assertEqual(format_element(e, NAMES, WEIGHTS), "y*x + 4*x*y")
