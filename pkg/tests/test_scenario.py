from __future__ import annotations

import tempfile
import textwrap
import unittest
from pathlib import Path
import sys

ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = ROOT / "scripts"
if str(SCRIPTS_DIR) not in sys.path:
    sys.path.insert(0, str(SCRIPTS_DIR))

from errors import InputError
from lattice_core import polarization
from mukai import FiberKind
from scenario import load_scenario, parse_scenario


class ParseScenarioTests(unittest.TestCase):
    def test_minimal_s1(self) -> None:
        scenario = parse_scenario("[surface]\nell = 21\n[vectors]\nr = 3\na = -7\ns = 3\nb = -7")
        self.assertEqual(scenario.ell, 21)
        self.assertEqual(scenario.vectors, {"r": 3, "a": -7, "s": 3, "b": -7})
        self.assertEqual((scenario.d, scenario.e), (1, 1))
        model = scenario.build_model()
        v, w = scenario.mukai_vectors(model)
        self.assertEqual(v.c1, polarization(model))
        self.assertEqual((w.r, w.a), (3, -7))

    def test_full_file(self) -> None:
        text = textwrap.dedent(
            """
            # comment line
            [surface]
            ell = 4
            fibers = I2, Istar1@2
            ample = sigma=2, f=11

            [genericity]
            fiber = smooth: plain; plain
            fiber = nodal: at_node
            fiber = reducible: on_component_intersection+at_node

            [options]
            bound = 6
            box = 8
            degree = 2
            """
        )
        scenario = parse_scenario(text)
        self.assertEqual([c.name for c in scenario.fibers], ["I2", "Istar1"])
        self.assertEqual(scenario.fibers[1].attach, 2)
        self.assertEqual(scenario.ample, (("sigma", 2), ("f", 11)))
        self.assertEqual(scenario.options, {"bound": 6, "box": 8, "degree": 2})
        fibers = scenario.genericity.fibers
        self.assertEqual(fibers[0].kind, FiberKind.SMOOTH)
        self.assertEqual(len(fibers[0].points), 2)
        self.assertEqual(fibers[2].points[0], frozenset({"on_component_intersection", "at_node"}))
        self.assertFalse(scenario.has_vectors())

    def test_malformed_integer_reports_line(self) -> None:
        with self.assertRaises(InputError) as ctx:
            parse_scenario("[surface]\nell = 21\n[vectors]\nr = x\n")
        self.assertEqual(ctx.exception.line, 4)
        self.assertIn("line 4", str(ctx.exception))

    def test_unknown_key_rejected(self) -> None:
        with self.assertRaises(InputError) as ctx:
            parse_scenario("[surface]\nell = 2\ncolour = blue\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_unknown_section_rejected(self) -> None:
        with self.assertRaises(InputError):
            parse_scenario("[surfaces]\nell = 2\n")

    def test_duplicate_key_rejected(self) -> None:
        with self.assertRaises(InputError):
            parse_scenario("[surface]\nell = 2\nell = 3\n")

    def test_ell_range(self) -> None:
        with self.assertRaises(InputError) as ctx:
            parse_scenario("[surface]\nell = 0\n")
        self.assertIn("ell >= 1", str(ctx.exception))

    def test_missing_ell(self) -> None:
        with self.assertRaises(InputError):
            parse_scenario("[vectors]\nr = 3\n")

    def test_key_outside_section(self) -> None:
        with self.assertRaises(InputError):
            parse_scenario("ell = 3\n")

    def test_bad_fiber_name_reports_line(self) -> None:
        with self.assertRaises(InputError) as ctx:
            parse_scenario("[surface]\nell = 3\nfibers = I2, II\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_bad_genericity_kind(self) -> None:
        with self.assertRaises(InputError):
            parse_scenario("[surface]\nell = 3\n[genericity]\nfiber = wobbly: plain\n")

    def test_missing_vectors(self) -> None:
        scenario = parse_scenario("[surface]\nell = 3\n[vectors]\nr = 3\n")
        with self.assertRaises(InputError):
            scenario.mukai_vectors(scenario.build_model())


class BundledScenarioTests(unittest.TestCase):
    def test_bundled_files_parse(self) -> None:
        for path in sorted((ROOT / "scenarios").glob("*.ini")):
            with self.subTest(path=path.name):
                scenario = load_scenario(path)
                self.assertGreaterEqual(scenario.ell, 1)

    def test_non_utf8_file_is_input_error(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "binary.ini"
            path.write_bytes(b"\xff\xfe[surface]\nell = 3\n")
            with self.assertRaises(InputError):
                load_scenario(path)

    def test_directory_is_input_error(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(InputError):
                load_scenario(tmp)

    def test_integers_beyond_the_default_digit_limit(self) -> None:
        big = "7" * 5000
        scenario = parse_scenario(f"[surface]\nell = {big}\n")
        self.assertEqual(scenario.ell % 10, 7)
        self.assertGreater(scenario.ell, 10**4999)

    def test_missing_file(self) -> None:
        with self.assertRaises(InputError):
            load_scenario(ROOT / "scenarios" / "does-not-exist.ini")


if __name__ == "__main__":
    unittest.main()
