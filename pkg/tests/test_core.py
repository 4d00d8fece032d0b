import json
import os
import tempfile
import unittest
from io import StringIO

import numpy

try:
    from mock import patch
except ImportError:
    from unittest.mock import patch

from ncgraded import exceptions
from ncgraded.core import (
    Pipeline,
    RunConfig,
    batched_rank,
    confluence_sample,
    load_expectation,
    load_presentation,
    mismatches,
    normal_element_scan,
)
from ncgraded.exactla import FieldSpec
from ncgraded.groebner import complete
from ncgraded.presentation import builtin


class TestRunConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = RunConfig.from_options(builtin="smith-zhang")
        self.assertEqual((cfg.degree_bound, cfg.homological_bound), (8, 5))
        self.assertEqual(cfg.checks, frozenset(("hilbert", "betti")))
        self.assertTrue(cfg.builtin)
        self.assertIsNone(cfg.field)
        self.assertEqual(cfg.output, "text")

    def test_options(self):
        cfg = RunConfig.from_options(
            input="a.alg", field="F7", checks="koszul, gk", degree_bound=6, json="-", seed=None
        )
        self.assertFalse(cfg.builtin)
        self.assertEqual(cfg.field, FieldSpec.prime(7))
        self.assertEqual(cfg.checks, frozenset(("koszul", "gk")))
        self.assertEqual(cfg.degree_bound, 6)
        self.assertEqual(cfg.seed, 0)
        self.assertEqual(cfg.output, "json")

    def test_rejects_bad_values(self):
        with self.assertRaises(exceptions.InputError):
            RunConfig.from_options(builtin="free-2", degree_bound=1)
        with self.assertRaises(exceptions.InputError):
            RunConfig.from_options(builtin="free-2", homological_bound=0)
        with self.assertRaises(exceptions.InputError):
            RunConfig.from_options(builtin="free-2", checks="betti,everything")
        with self.assertRaises(exceptions.InvalidFieldError):
            RunConfig.from_options(builtin="free-2", field="F4")

    def test_load_presentation(self):
        self.assertEqual(load_presentation(RunConfig.from_options(builtin="free-2")).label, "free-2")
        with self.assertRaises(exceptions.UnreadableInputError):
            load_presentation(RunConfig.from_options(input="/nonexistent/algebra.alg"))
        with self.assertRaises(exceptions.InputError):
            load_presentation(RunConfig.from_options())


class TestBatchedRank(unittest.TestCase):
    def test_ranks(self):
        mats = numpy.array(
            [
                [[1, 0], [0, 1], [1, 1]],
                [[1, 1], [1, 1], [0, 0]],
                [[0, 0], [0, 0], [0, 0]],
                [[1, 2], [2, 4], [3, 3]],
            ]
        )
        self.assertEqual(batched_rank(mats, 5).tolist(), [2, 1, 0, 2])
        # over F2 the last matrix has rows (1,0), (0,0), (1,1)
        self.assertEqual(batched_rank(mats, 2).tolist(), [2, 1, 0, 2])

    def test_characteristic_matters(self):
        mats = numpy.array([[[1, 1], [1, -1]]])
        self.assertEqual(batched_rank(mats, 2).tolist(), [1])
        self.assertEqual(batched_rank(mats, 3).tolist(), [2])


class TestNormalElementScan(unittest.TestCase):
    def test_quantum_plane(self):
        rs = complete(builtin("quantum-plane-2", FieldSpec.prime(5)), 3)
        scan = normal_element_scan(rs, 1)
        first = scan["degrees"][0]
        self.assertEqual((first["checked"], first["normal"]), (6, 2))
        self.assertEqual(sorted(first["examples"]), ["x", "y"])
        self.assertTrue(scan["found"])
        self.assertEqual(scan["note"], "heuristic: enumeration over F5 only")

    def test_commutative_ring_is_all_normal(self):
        rs = complete(builtin("polynomial-2", FieldSpec.prime(2)), 4)
        scan = normal_element_scan(rs, 2)
        self.assertEqual([(d["checked"], d["normal"]) for d in scan["degrees"]], [(3, 3), (7, 7)])

    def test_smith_zhang_has_none_in_low_degree(self):
        rs = complete(builtin("smith-zhang", FieldSpec.prime(2)), 4)
        scan = normal_element_scan(rs, 2)
        self.assertFalse(scan["found"])
        self.assertEqual([d["checked"] for d in scan["degrees"]], [15, 1023])

    def test_needs_a_prime_field(self):
        rs = complete(builtin("polynomial-2", FieldSpec.rationals()), 3)
        with self.assertRaises(exceptions.InputError):
            normal_element_scan(rs, 1)

    def test_needs_certified_products(self):
        rs = complete(builtin("polynomial-2", FieldSpec.prime(2)), 3)
        with self.assertRaises(exceptions.UncertifiedDegreeError):
            normal_element_scan(rs, 3)

    def test_smith_zhang_has_none_through_degree_three(self):
        # about a million projective points in degree 3
        rs = complete(builtin("smith-zhang", FieldSpec.prime(2)), 4)
        scan = normal_element_scan(rs, 3)
        self.assertEqual([d["checked"] for d in scan["degrees"]], [15, 1023, 1048575])
        self.assertEqual([d["normal"] for d in scan["degrees"]], [0, 0, 0])
        self.assertFalse(scan["found"])

    def test_guard(self):
        rs = complete(builtin("free-3", FieldSpec.prime(2)), 4)
        with self.assertRaises(exceptions.ScanGuardError) as cm:
            normal_element_scan(rs, 3)
        self.assertEqual(cm.exception.args, (2 ** 27, 3))


class TestSelfChecks(unittest.TestCase):
    def test_confluence(self):
        rs = complete(builtin("smith-zhang"), 5)
        for seed in (0, 1, 2):
            self.assertTrue(confluence_sample(rs, seed))


class TestMismatches(unittest.TestCase):
    def test_subset_comparison(self):
        actual = {"betti": {"gldim": {"value": 4, "certified": True}, "entries": [[0, 0, 1]]}, "extra": 1}
        self.assertEqual(mismatches({"betti": {"gldim": {"value": 4}}}, actual), [])
        self.assertEqual(
            mismatches({"betti": {"gldim": {"value": 3}}}, actual),
            [".betti.gldim.value: expected 3, found 4"],
        )
        self.assertEqual(mismatches({"missing": {"a": 1}}, actual), [".missing: expected an object, found None"])
        self.assertEqual(mismatches([1], [2]), [".: expected [1], found [2]"])

    def test_load_expectation(self):
        with tempfile.TemporaryDirectory() as tmp:
            good = os.path.join(tmp, "good.json")
            with open(good, "w") as handle:
                handle.write('{"algebra": "free-2"}')
            self.assertEqual(load_expectation(good), {"algebra": "free-2"})
            bad = os.path.join(tmp, "bad.json")
            with open(bad, "w") as handle:
                handle.write("{")
            with self.assertRaises(exceptions.UnreadableInputError):
                load_expectation(bad)
            with self.assertRaises(exceptions.UnreadableInputError):
                load_expectation(os.path.join(tmp, "absent.json"))


class TestPipeline(unittest.TestCase):
    def pipeline(self, **kwargs):
        kwargs.setdefault("color", "never")
        return Pipeline(**kwargs)

    @patch("sys.stdout", new_callable=StringIO)
    def test_text_report(self, mock_stdout):
        pipeline = self.pipeline(builtin="polynomial-2", field="Q", degree_bound=4, homological_bound=3)
        self.assertEqual(pipeline.run(), 0)
        output = mock_stdout.getvalue()
        self.assertTrue(output.startswith("polynomial-2 over Q\n"))
        self.assertIn("hilbert               1 2 3 4 5\n", output)
        self.assertIn("gldim                 2 (anick-chains)\n", output)
        self.assertIn("unchecked             A is a Goldie prime ring", output)

    @patch("sys.stdout", new_callable=StringIO)
    def test_json_report(self, mock_stdout):
        pipeline = self.pipeline(
            builtin="polynomial-2", field="Q", degree_bound=4, homological_bound=3, checks="koszul", json="-"
        )
        self.assertEqual(pipeline.run(), 0)
        record = json.loads(mock_stdout.getvalue())
        self.assertEqual(record["betti"]["gldim"]["value"], 2)
        self.assertEqual(record["betti"]["koszul"]["status"], "koszul")
        self.assertEqual(record["hilbert"]["dims"], [1, 2, 3, 4, 5])
        self.assertEqual(record["checks"], ["koszul"])
        self.assertTrue(record["self_checks"]["confluence"])
        self.assertTrue(record["self_checks"]["d_squared_zero"])
        self.assertEqual(record["self_checks"]["euler_defects"], [])
        self.assertIsNone(record["normal_elements"])

    @patch("sys.stdout", new_callable=StringIO)
    def test_query(self, mock_stdout):
        pipeline = self.pipeline(builtin="free-2", degree_bound=4, homological_bound=3, query="betti.gldim.value")
        self.assertEqual(pipeline.run(), 0)
        self.assertEqual(mock_stdout.getvalue(), "1\n")

    def test_bad_query(self):
        with self.assertRaises(exceptions.InputError):
            self.pipeline(builtin="free-2", query="betti[")

    @patch("sys.stdout", new_callable=StringIO)
    def test_claim_mismatch_fails(self, mock_stdout):
        pipeline = self.pipeline(builtin="polynomial-2", field="Q", degree_bound=4, claim="1/(1-t)^3")
        with self.assertLogs("ncgraded.core", level="ERROR"):
            self.assertEqual(pipeline.run(), 1)
        self.assertIn("differs", mock_stdout.getvalue())
        self.assertEqual(pipeline.failures, ["Hilbert series differs from 1/(1-t)^3"])

    @patch("sys.stdout", new_callable=StringIO)
    def test_regular_algebra_record(self, mock_stdout):
        pipeline = self.pipeline(
            builtin="quantum-plane-2",
            degree_bound=5,
            homological_bound=4,
            checks="asregular,rigidity",
            json="-",
        )
        self.assertEqual(pipeline.run(), 0)
        record = json.loads(mock_stdout.getvalue())
        self.assertEqual(record["as_verdict"]["status"], "regular")
        self.assertEqual((record["as_verdict"]["n"], record["as_verdict"]["l"]), (2, 2))
        self.assertEqual(record["rigidity"]["concentrated_at"], 2)
        self.assertEqual(record["invariants"]["fhtr"], 2)
        self.assertIsNotNone(record["ext_k_A_op"])
        self.assertIn("bimodule_betti", record)

    @patch("sys.stdout", new_callable=StringIO)
    def test_normal_element_check(self, mock_stdout):
        pipeline = self.pipeline(
            builtin="quantum-plane-2",
            checks="normal-elements",
            degree_bound=3,
            scan_prime=5,
            scan_degree=1,
            json="-",
        )
        self.assertEqual(pipeline.run(), 0)
        record = json.loads(mock_stdout.getvalue())
        self.assertEqual(record["normal_elements"]["field"], "F5")
        self.assertTrue(record["normal_elements"]["found"])

    def test_scan_prime_killing_a_relation(self):
        pipeline = self.pipeline(builtin="quantum-plane-2", checks="normal-elements", scan_prime=2)
        with self.assertRaises(exceptions.ZeroParameterError):
            pipeline.compute()

    @patch("sys.stdout", new_callable=StringIO)
    def test_writes_json_file(self, mock_stdout):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "report.json")
            pipeline = self.pipeline(builtin="free-2", degree_bound=3, homological_bound=2, json=path)
            self.assertEqual(pipeline.run(), 0)
            with open(path) as handle:
                record = json.load(handle)
        self.assertEqual(record["algebra"], "free-2")
        self.assertEqual(record["bounds"]["degree"], 3)
        self.assertIn("free-2 over F32003", mock_stdout.getvalue())
