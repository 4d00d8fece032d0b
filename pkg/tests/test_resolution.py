import unittest

from ncgraded import exceptions
from ncgraded.exactla import FieldSpec
from ncgraded.groebner import complete
from ncgraded.hilbert import hilbert_function
from ncgraded.presentation import builtin, opposite, ore_extension, parse
from ncgraded.resolution import (
    ANICK,
    ONE_SIDED,
    PRESENTATION,
    UNCERTIFIED,
    betti,
    chain_degree_bounds,
    cyclic_module_resolution,
    differential_squares_to_zero,
    euler_characteristic_defects,
    gldim_upto,
    koszul_check,
    minimal_resolution,
)

Q = FieldSpec.rationals()


def resolve(p, hbound, dbound):
    rs = complete(p, dbound)
    return rs, minimal_resolution(rs, hbound, dbound)


class TestSmallResolutions(unittest.TestCase):
    def test_polynomial_ring_in_one_variable(self):
        _, stages = resolve(builtin("polynomial-1", Q), 3, 4)
        b = betti(stages)
        self.assertEqual(dict(b.entries), {(0, 0): 1, (1, 1): 1})
        self.assertEqual(gldim_upto(b).value, 1)

    def test_polynomial_ring_in_two_variables(self):
        rs, stages = resolve(builtin("polynomial-2", Q), 4, 6)
        self.assertEqual([s.generator_degrees for s in stages], [(0,), (1, 1), (2,), ()])
        b = betti(stages)
        self.assertEqual(dict(b.entries), {(0, 0): 1, (1, 1): 2, (2, 2): 1})
        self.assertEqual(b.totals(), [1, 2, 1])
        verdict = gldim_upto(b)
        self.assertTrue(verdict.certified)
        self.assertEqual(verdict.value, 2)
        # no 3-chains exist
        self.assertEqual(verdict.certificate, ANICK)
        self.assertTrue(differential_squares_to_zero(rs, stages))

    def test_free_algebra(self):
        _, stages = resolve(builtin("free-2", Q), 3, 4)
        self.assertEqual([s.generator_degrees for s in stages], [(0,), (1, 1), ()])
        self.assertEqual(gldim_upto(betti(stages)).value, 1)

    def test_quantum_plane_has_the_commutative_shape(self):
        _, stages = resolve(builtin("quantum-plane-2", Q), 4, 5)
        self.assertEqual(dict(betti(stages).entries), {(0, 0): 1, (1, 1): 2, (2, 2): 1})

    def test_skew_polynomial_ring(self):
        _, stages = resolve(builtin("skew-3-5", Q), 4, 5)
        b = betti(stages)
        self.assertEqual(dict(b.entries), {(0, 0): 1, (1, 1): 3, (2, 2): 3, (3, 3): 1})
        self.assertEqual(gldim_upto(b).value, 3)

    def test_ore_extension_of_the_quantum_plane(self):
        p = builtin("quantum-plane-2")
        ext = ore_extension(p, {"x": p.gen("x").scale(2)})
        _, stages = resolve(ext, 4, 5)
        b = betti(stages)
        self.assertEqual(b.totals(), [1, 3, 3, 1])
        verdict = gldim_upto(b)
        self.assertEqual((verdict.value, verdict.certificate), (3, ANICK))

    def test_minimality(self):
        _, stages = resolve(builtin("polynomial-3", Q), 4, 5)
        for stage in stages[1:]:
            for images in stage.differential:
                for coeff in images.values():
                    self.assertNotIn((), coeff.terms)

    def test_uncertified_degree(self):
        rs = complete(builtin("polynomial-2", Q), 3)
        with self.assertRaises(exceptions.UncertifiedDegreeError):
            minimal_resolution(rs, 3, 4)
        with self.assertRaises(exceptions.InputError):
            minimal_resolution(rs, 0, 3)


class TestSmithZhang(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.rs, cls.stages = resolve(builtin("smith-zhang"), 5, 8)
        cls.b = betti(cls.stages)

    def test_diagonal_betti_numbers(self):
        self.assertEqual(dict(self.b.entries), {(0, 0): 1, (1, 1): 4, (2, 2): 6, (3, 3): 4, (4, 4): 1})
        self.assertEqual(self.stages[5].generator_degrees, ())

    def test_global_dimension_is_certified(self):
        verdict = gldim_upto(self.b)
        self.assertTrue(verdict.certified, verdict.note)
        self.assertEqual(verdict.value, 4)
        # 4-chains reach degree 9, so the resolution is redone to degree 9
        self.assertEqual(verdict.certificate, ANICK)
        self.assertEqual(self.b.potential_bound(5), 9)
        self.assertEqual(self.b.certified_internal, 9)
        self.assertEqual(list(self.b.potential_bounds), [0, 1, 2, 5, 7, 9])
        self.assertEqual(list(self.b.certificates), [PRESENTATION] * 3 + [ANICK] * 3)

    def test_koszul(self):
        dims = hilbert_function(self.rs, 8)
        verdict = koszul_check(self.b, dims)
        self.assertTrue(verdict.koszul)
        self.assertEqual(verdict.upto, (5, 9))
        self.assertTrue(verdict.identity_ok)
        self.assertEqual(str(verdict), "Koszul up to (5, 9)")

    def test_exactness_checks(self):
        self.assertTrue(differential_squares_to_zero(self.rs, self.stages))
        dims = hilbert_function(self.rs, 8)
        self.assertEqual(euler_characteristic_defects(self.stages, dims), [])

    def test_gldim_is_uncertified_without_the_next_stage(self):
        _, stages = resolve(builtin("smith-zhang"), 4, 6)
        verdict = gldim_upto(betti(stages))
        self.assertFalse(verdict.certified)
        self.assertEqual(verdict.lower_bound, 4)
        self.assertEqual(str(verdict), ">= 4 (not certified)")


class TestCertificates(unittest.TestCase):
    # Tor_3 sits in degree 4, one past a degree bound of 3
    LATE_TOR = "algebra late over Q\ndeg x=1, y=1, z=1\nrel 2*z*y + 2*x^2\nrel 3*y*x"

    def setUp(self):
        self.rs = complete(parse(self.LATE_TOR), 3)

    def test_empty_stage_above_the_bound_is_not_certified(self):
        stages = minimal_resolution(self.rs, 5, 3, extend=False)
        self.assertEqual(stages[3].generator_degrees, ())
        self.assertEqual(stages[3].potential_bound, 4)
        self.assertFalse(stages[3].complete)
        verdict = gldim_upto(betti(stages))
        self.assertFalse(verdict.certified)
        self.assertEqual(verdict.lower_bound, 2)
        self.assertIn("up to degree 4", verdict.note)

    def test_extension_finds_the_late_generators(self):
        with self.assertLogs("ncgraded.resolution", level="INFO") as logs:
            stages = minimal_resolution(self.rs, 5, 3)
        self.assertTrue(any("resolving again to degree 4" in line for line in logs.output))
        b = betti(stages)
        self.assertEqual(b.certified_internal, 4)
        self.assertEqual(b[(3, 4)], 2)
        verdict = gldim_upto(b)
        # stage 4 may still reach degree 6 and the extension runs once
        self.assertFalse(verdict.certified)
        self.assertEqual(verdict.lower_bound, 3)
        self.assertEqual(b.potential_bound(4), 6)

    def test_larger_bound(self):
        rs = complete(parse(self.LATE_TOR), 6)
        b = betti(minimal_resolution(rs, 4, 6))
        self.assertEqual((b[(3, 4)], b[(4, 5)]), (2, 2))

    def test_presentation_bounds_the_first_stages(self):
        b = betti(minimal_resolution(self.rs, 5, 3, extend=False))
        self.assertEqual(list(b.potential_bounds[:3]), [0, 1, 2])
        self.assertEqual(b.certificate(2), PRESENTATION)

    def test_open_system_has_no_chain_bounds(self):
        rs = complete(builtin("smith-zhang"), 2)
        stages = minimal_resolution(rs, 4, 2)
        self.assertEqual([s.certificate for s in stages[3:]], [UNCERTIFIED] * len(stages[3:]))
        self.assertTrue(all(s.potential_bound is None for s in stages[3:]))
        verdict = gldim_upto(betti(stages))
        self.assertFalse(verdict.certified)


class TestKoszulCheck(unittest.TestCase):
    def test_cubic_relation(self):
        p = parse("algebra c over Q\ndeg x=1, y=1\nrel y*y*x - x*y*y")
        _, stages = resolve(p, 3, 5)
        verdict = koszul_check(betti(stages))
        self.assertEqual(verdict.status, "not-koszul")
        self.assertEqual(verdict.witness, (2, 3))

    def test_weighted_generators(self):
        p = parse("algebra w over Q\ndeg x=1, u=2\nrel u*x - x*u")
        _, stages = resolve(p, 3, 6)
        self.assertEqual(koszul_check(betti(stages)).status, "not-applicable")


class TestChains(unittest.TestCase):
    def test_polynomial_ring(self):
        rs = complete(builtin("polynomial-2", Q), 3)
        self.assertEqual(chain_degree_bounds(rs, 3), [{0: 1}, {1: 2}, {2: 1}, {}])

    def test_free_algebra(self):
        rs = complete(builtin("free-2", Q), 3)
        self.assertEqual(chain_degree_bounds(rs, 2), [{0: 1}, {1: 2}, {}])

    def test_chains_bound_betti_numbers(self):
        rs, stages = resolve(builtin("smith-zhang"), 4, 6)
        chains = chain_degree_bounds(rs, 4)
        for stage in stages:
            for j, n in stage.degree_counts().items():
                self.assertLessEqual(n, chains[stage.index].get(j, 0))


class TestHomogenization(unittest.TestCase):
    def test_central_regular_element_adds_one(self):
        _, rees = resolve(builtin("weyl-rees", Q), 5, 6)
        _, graded = resolve(builtin("weyl-graded", Q), 5, 6)
        rees_gldim, graded_gldim = gldim_upto(betti(rees)), gldim_upto(betti(graded))
        self.assertEqual((rees_gldim.value, graded_gldim.value), (3, 2))


class TestOppositeSymmetry(unittest.TestCase):
    def test_betti_tables_agree(self):
        for name in ("smith-zhang", "quantum-plane-3", "skew-3-2"):
            p = builtin(name)
            _, stages = resolve(p, 4, 5)
            _, op_stages = resolve(opposite(p), 4, 5)
            self.assertEqual(dict(betti(stages).entries), dict(betti(op_stages).entries), name)


class TestCyclicModules(unittest.TestCase):
    def test_all_generators_resolve_k(self):
        rs = complete(builtin("polynomial-2", Q), 5)
        gens = [rs.presentation.gen(n) for n in rs.presentation.names]
        module = cyclic_module_resolution(rs, gens, 4, 5)
        self.assertEqual(
            [s.generator_degrees for s in module],
            [s.generator_degrees for s in minimal_resolution(rs, 4, 5)],
        )

    def test_quotient_by_a_regular_element(self):
        rs = complete(builtin("polynomial-2", Q), 5)
        module = cyclic_module_resolution(rs, [rs.presentation.gen("x")], 3, 5)
        self.assertEqual([s.generator_degrees for s in module], [(0,), (1,), ()])
        dims = hilbert_function(rs, 5)
        # A/Ax is k[y]
        self.assertEqual(euler_characteristic_defects(module, dims, [1] * 6), [])

    def test_inhomogeneous_module_relation(self):
        rs = complete(builtin("polynomial-2", Q), 3)
        x = rs.presentation.gen("x")
        with self.assertRaises(exceptions.InputError):
            cyclic_module_resolution(rs, [x * x + x], 2, 3)

    def test_later_stages_need_supplied_bounds(self):
        rs = complete(builtin("polynomial-2", Q), 5)
        x = rs.presentation.gen("x")
        module = cyclic_module_resolution(rs, [x], 3, 5)
        self.assertEqual([s.potential_bound for s in module], [0, 1, None])
        self.assertFalse(module[2].complete)
        supplied = [(0, ONE_SIDED), (1, ONE_SIDED), (-1, ONE_SIDED)]
        bounded = cyclic_module_resolution(rs, [x], 3, 5, stage_bounds=supplied)
        self.assertTrue(bounded[2].complete)
        self.assertEqual([s.certificate for s in bounded], [PRESENTATION, PRESENTATION, ONE_SIDED])
