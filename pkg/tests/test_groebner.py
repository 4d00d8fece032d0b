import random
import unittest
from math import comb

from ncgraded import exceptions
from ncgraded.exactla import FieldSpec
from ncgraded.freealg import FreeElement, enumerate_words
from ncgraded.groebner import (
    complete,
    is_closed,
    is_zero_in_algebra,
    normal_form,
    normal_words,
    overlaps,
    reduce_with,
    rules_per_degree,
)
from ncgraded.presentation import builtin, parse

Q = FieldSpec.rationals()
SEEDS = (0, 1, 2)


def random_element(rng, rs, degree):
    words = enumerate_words(rs.presentation.generators, degree)
    terms = {rng.choice(words): rng.randint(1, 5) for _ in range(4)}
    return FreeElement(terms, rs.field)


class TestCompletion(unittest.TestCase):
    def test_quantum_plane(self):
        rs = complete(builtin("quantum-plane-2", Q), 4)
        self.assertEqual(len(rs), 1)
        self.assertEqual(rs.describe(rs.rules[0]), "y*x -> 2*x*y")
        self.assertEqual(rules_per_degree(rs), {2: 1})
        self.assertEqual(overlaps(rs), [])
        self.assertTrue(is_closed(rs))
        self.assertEqual([len(rs.words_of_degree(d)) for d in range(5)], [1, 2, 3, 4, 5])

    def test_polynomial_ring(self):
        rs = complete(builtin("polynomial-3", Q), 5)
        self.assertEqual(rules_per_degree(rs), {2: 3})
        self.assertEqual([o.word for o in overlaps(rs)], [(2, 1, 0)])
        self.assertTrue(is_closed(rs))
        self.assertEqual([len(normal_words(rs, d)) for d in range(6)], [comb(d + 2, 2) for d in range(6)])

    def test_smith_zhang_counts(self):
        rs = complete(builtin("smith-zhang"), 5)
        self.assertEqual(rs.complete_below, 5)
        self.assertEqual([len(normal_words(rs, d)) for d in range(6)], [comb(d + 3, 3) for d in range(6)])

    def test_free_algebra_has_no_rules(self):
        rs = complete(builtin("free-2"), 4)
        self.assertEqual(len(rs), 0)
        self.assertEqual(len(normal_words(rs, 4)), 16)

    def test_rules_are_inter_reduced(self):
        rs = complete(builtin("smith-zhang"), 4)
        leads = set(rs.leads)
        for rule in rs.rules:
            for word in rule.tail.words():
                self.assertTrue(rs.is_normal(word), rs.describe(rule))
            for other in leads - {rule.lead}:
                n = len(other)
                self.assertFalse(
                    any(rule.lead[i : i + n] == other for i in range(len(rule.lead) - n + 1))
                )

    def test_weighted_generators(self):
        p = parse("algebra w over Q\ndeg x=1, u=2\nrel u*x - x*u")
        rs = complete(p, 4)
        # u commutes with x: x^4, x^2*u and u^2 remain in degree 4
        self.assertEqual([len(rs.words_of_degree(d)) for d in range(5)], [1, 1, 2, 2, 3])

    def test_bound_too_small(self):
        with self.assertRaises(exceptions.BoundTooSmallError) as cm:
            complete(builtin("smith-zhang"), 1)
        self.assertEqual(cm.exception.args, (1, 2))


class TestNormalForms(unittest.TestCase):
    def setUp(self):
        self.rs = complete(builtin("polynomial-2", Q), 3)
        self.x = FreeElement.monomial((0,), Q)
        self.y = FreeElement.monomial((1,), Q)

    def test_commutator_is_zero(self):
        self.assertTrue(is_zero_in_algebra(self.rs, self.y * self.x - self.x * self.y))
        self.assertEqual(normal_form(self.rs, self.y * self.x * self.y), self.x * self.y * self.y)

    def test_uncertified_degree(self):
        big = self.y * self.y * self.x * self.x
        with self.assertRaises(exceptions.UncertifiedDegreeError):
            normal_form(self.rs, big)
        with self.assertRaises(exceptions.UncertifiedDegreeError):
            normal_words(self.rs, 4)
        with self.assertLogs("ncgraded.groebner", level="WARNING"):
            self.assertEqual(normal_form(self.rs, big, strict=False), self.x * self.x * self.y * self.y)

    def test_confluence_under_random_reduction_order(self):
        rs = complete(builtin("smith-zhang"), 4)
        for seed in SEEDS:
            rng = random.Random(seed)
            for degree in (2, 3, 4):
                e = random_element(rng, rs, degree)
                chosen = reduce_with(rs, e, lambda sites: rng.choice(sites))
                self.assertEqual(chosen, normal_form(rs, e), (seed, degree))
                self.assertEqual(reduce_with(rs, e), chosen)
