from __future__ import annotations

import unittest
from pathlib import Path
import sys

ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = ROOT / "scripts"
if str(SCRIPTS_DIR) not in sys.path:
    sys.path.insert(0, str(SCRIPTS_DIR))

from errors import PreconditionError
from kodaira import (
    FiberConfig,
    box_search,
    build_fiber_config,
    bundled_fiber_names,
    discriminant_group,
    fiber_class,
    forced_multiple_check,
    parse_fiber_name,
    rational_coset_solution,
    slack_patterns,
    snf_solvable,
    zariski_check,
)

# Marks of the affine E diagrams in the component order the builders use.
E_MARKS = {
    "IIstar": (1, 2, 3, 4, 5, 6, 4, 2, 3),
    "IIIstar": (1, 2, 3, 4, 3, 2, 1, 2),
    "IVstar": (1, 2, 3, 2, 1, 2, 1),
}


class FiberConfigTests(unittest.TestCase):
    def test_component_counts(self) -> None:
        for n in range(2, 9):
            self.assertEqual(parse_fiber_name(f"I{n}").size, n)
        for n in range(0, 5):
            self.assertEqual(parse_fiber_name(f"Istar{n}").size, n + 5)
        self.assertEqual(parse_fiber_name("III").size, 2)
        self.assertEqual(parse_fiber_name("IV").size, 3)
        self.assertEqual(parse_fiber_name("IIstar").size, 9)
        self.assertEqual(parse_fiber_name("IIIstar").size, 8)
        self.assertEqual(parse_fiber_name("IVstar").size, 7)

    def test_names_round_trip(self) -> None:
        for name in bundled_fiber_names():
            self.assertEqual(parse_fiber_name(name).name, name)
        self.assertEqual(parse_fiber_name("I*2").name, "Istar2")

    def test_rejects_bad_names(self) -> None:
        for name in ("II", "I", "I1", "IIstar3", "V", "III2"):
            with self.subTest(name=name):
                with self.assertRaises(PreconditionError):
                    parse_fiber_name(name)

    def test_rejects_bad_attach(self) -> None:
        with self.assertRaises(PreconditionError):
            build_fiber_config("I", 5, attach=5)

    def test_gram_is_symmetric_with_minus_two_diagonal(self) -> None:
        for name in bundled_fiber_names():
            config = parse_fiber_name(name)
            for i in range(config.size):
                self.assertEqual(config.gram[i][i], -2)
                for j in range(config.size):
                    self.assertEqual(config.gram[i][j], config.gram[j][i])


class FiberClassTests(unittest.TestCase):
    def test_kernels_are_rank_one_primitive_positive(self) -> None:
        for name in bundled_fiber_names():
            with self.subTest(name=name):
                config = parse_fiber_name(name)
                report = zariski_check(config)
                self.assertTrue(report["passed"], report)
                mults = fiber_class(config)
                self.assertTrue(all(m > 0 for m in mults))
                self.assertIn(1, mults)

    def test_multiplicities_by_type(self) -> None:
        self.assertEqual(fiber_class(parse_fiber_name("I7")), (1,) * 7)
        self.assertEqual(fiber_class(parse_fiber_name("III")), (1, 1))
        self.assertEqual(fiber_class(parse_fiber_name("IV")), (1, 1, 1))
        self.assertEqual(fiber_class(parse_fiber_name("Istar3")), (1, 1, 1, 1, 2, 2, 2, 2))
        self.assertEqual(fiber_class(parse_fiber_name("Istar0")), (1, 1, 1, 1, 2))

    def test_exceptional_types_match_affine_marks(self) -> None:
        for name, marks in E_MARKS.items():
            with self.subTest(name=name):
                self.assertEqual(fiber_class(parse_fiber_name(name)), marks)
                self.assertEqual(parse_fiber_name(name).multiplicities, marks)


    def test_weighted_edge_breaks_semidefiniteness(self) -> None:
        config = FiberConfig(
            fiber_type="I",
            n=3,
            labels=("C1", "C2", "C3"),
            gram=((-2, 2, 1), (2, -2, 1), (1, 1, -2)),
        )
        report = zariski_check(config)
        self.assertFalse(report["passed"])
        checks = {entry["check"]: entry for entry in report["checks"]}
        self.assertEqual(checks["negative_semidefinite"]["verdict"], "fail")
        self.assertEqual(checks["negative_semidefinite"]["details"], {"signature": [1, 2, 0]})
        with self.assertRaises(PreconditionError):
            forced_multiple_check(config)


class CokernelTests(unittest.TestCase):
    def test_cycle_cokernel_has_order_n(self) -> None:
        for n in range(2, 9):
            group = discriminant_group(parse_fiber_name(f"I{n}"))
            self.assertEqual(group["torsion_order"], n)
            self.assertEqual(group["free_rank"], 1)

    def test_exceptional_discriminants(self) -> None:
        self.assertEqual(discriminant_group(parse_fiber_name("IIstar"))["torsion_order"], 1)
        self.assertEqual(discriminant_group(parse_fiber_name("IIIstar"))["torsion_order"], 2)
        self.assertEqual(discriminant_group(parse_fiber_name("IVstar"))["torsion_order"], 3)
        self.assertEqual(discriminant_group(parse_fiber_name("Istar0"))["torsion"], [2, 2])

    def test_snf_detects_solvable_target(self) -> None:
        config = parse_fiber_name("I4")
        m = (0, 2, -1, 3)
        target = [sum(config.gram[i][j] * m[j] for j in range(4)) for i in range(4)]
        self.assertTrue(snf_solvable(config.gram, target)["solvable"])
        solution = rational_coset_solution(config, target)
        self.assertEqual(solution, (0, 2, -1, 3))

    def test_snf_rejects_slack_patterns(self) -> None:
        config = parse_fiber_name("I5")
        for k in range(1, 5):
            target = [0] * 5
            target[0], target[k] = -1, 1
            self.assertFalse(snf_solvable(config.gram, target)["solvable"])
            self.assertIsNone(rational_coset_solution(config, target))


class SearchTests(unittest.TestCase):
    def test_slack_patterns_for_cycle(self) -> None:
        patterns = slack_patterns((1, 1, 1, 1, 1), 0)
        self.assertEqual(len(patterns), 4)
        for pattern in patterns:
            self.assertEqual(pattern[0], -1)
            self.assertEqual(sum(pattern[1:]), 1)

    def test_no_patterns_when_other_components_are_heavy(self) -> None:
        self.assertEqual(slack_patterns(E_MARKS["IIstar"], 0), [])

    def test_nonnegative_rows_force_zero(self) -> None:
        config = parse_fiber_name("I4")
        hits, complete = box_search(config.gram, lambda i, t: t >= 0, 0, 6)
        self.assertTrue(complete)
        self.assertEqual(hits, [(0, 0, 0, 0)])

    def test_kernel_cut_keeps_the_nonnegative_solutions(self) -> None:
        for name in ("I4", "III", "IV", "Istar0"):
            with self.subTest(name=name):
                config = parse_fiber_name(name)
                plain = box_search(config.gram, lambda i, t: t >= 0, config.attach, 3)
                cut = box_search(config.gram, lambda i, t: t >= 0, config.attach, 3, kernel=config.multiplicities)
                self.assertTrue(plain[1])
                self.assertEqual(cut, plain)

    def test_kernel_cut_finishes_on_large_fibers(self) -> None:
        config = parse_fiber_name("IIstar")
        hits, complete = box_search(
            config.gram, lambda i, t: t >= 0, config.attach, 12, cap=200_000, kernel=config.multiplicities
        )
        self.assertTrue(complete)
        self.assertEqual(hits, [(0,) * 9])

    def test_kernel_must_be_annihilated(self) -> None:
        config = parse_fiber_name("I4")
        with self.assertRaises(PreconditionError):
            box_search(config.gram, lambda i, t: t >= 0, 0, 3, kernel=(1, 2, 1, 1))
        with self.assertRaises(PreconditionError):
            box_search(config.gram, lambda i, t: t >= 0, 0, 3, kernel=(0, 0, 0, 0))

    def test_search_cap_marks_incomplete(self) -> None:
        config = parse_fiber_name("I4")
        _, complete = box_search(config.gram, lambda i, t: True, 0, 6, cap=10)
        self.assertFalse(complete)


class ForcedMultipleTests(unittest.TestCase):
    def test_i5_certificate(self) -> None:
        report = forced_multiple_check(parse_fiber_name("I5"), box=12)
        self.assertTrue(report.forced)
        self.assertEqual(report.cokernel["torsion_order"], 5)
        self.assertEqual(len(report.certificates), 4)
        for cert in report.certificates:
            self.assertFalse(cert["snf"]["solvable"])
            self.assertTrue(cert["verdicts_agree"])
            self.assertEqual(cert["box_solutions"], [])

    def test_every_bundled_type_is_forced_with_agreeing_verdicts(self) -> None:
        for name in bundled_fiber_names():
            with self.subTest(name=name):
                report = forced_multiple_check(parse_fiber_name(name), box=12, workers=4)
                self.assertTrue(report.forced)
                self.assertTrue(report.nonneg_case["only_fiber_multiples"])
                self.assertTrue(all(cert["verdicts_agree"] for cert in report.certificates))

    def test_output_independent_of_worker_count(self) -> None:
        config = parse_fiber_name("Istar2")
        one = forced_multiple_check(config, box=8, workers=1).to_dict()
        four = forced_multiple_check(config, box=8, workers=4).to_dict()
        self.assertEqual(one, four)

    def test_other_attach_component(self) -> None:
        report = forced_multiple_check(parse_fiber_name("I6", attach=3), box=6)
        self.assertTrue(report.forced)
        self.assertTrue(all(p[3] == -1 for p in report.patterns_checked))

    def test_rejects_attach_of_higher_multiplicity(self) -> None:
        with self.assertRaises(PreconditionError):
            forced_multiple_check(parse_fiber_name("IIIstar", attach=3), box=4)


if __name__ == "__main__":
    unittest.main()
