from __future__ import annotations

import contextlib
import io
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock
import sys

ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = ROOT / "scripts"
if str(SCRIPTS_DIR) not in sys.path:
    sys.path.insert(0, str(SCRIPTS_DIR))

from config import load_config
from errors import ConstraintError, InputError, NotDecidable, PreconditionError, handle_exception, safe_run
from log_utils import log, log_warning
from output_writer import write_report_output
from report import Report, render_value


class ConfigTests(unittest.TestCase):
    def test_defaults(self) -> None:
        with mock.patch.dict(os.environ, {}, clear=True):
            cfg = load_config()
        self.assertEqual(cfg["enum_bound"], 10)
        self.assertEqual(cfg["brute_box"], 12)
        self.assertEqual(cfg["search_cap"], 2_000_000)
        self.assertEqual(cfg["reflect_cap"], 1000)
        self.assertEqual(cfg["workers"], 4)
        self.assertEqual(cfg["output_dir"], "")
        self.assertFalse(cfg["quiet"])

    def test_env_and_overrides(self) -> None:
        env = {"LATTICE_ENUM_BOUND": "7", "LATTICE_QUIET": "yes", "LATTICE_BRUTE_BOX": "5"}
        with mock.patch.dict(os.environ, env, clear=True):
            cfg = load_config({"enum_bound": 3, "output_dir": None})
        self.assertEqual(cfg["enum_bound"], 3)
        self.assertEqual(cfg["brute_box"], 5)
        self.assertTrue(cfg["quiet"])

    def test_range_validation(self) -> None:
        with mock.patch.dict(os.environ, {"LATTICE_SEARCH_CAP": "0"}, clear=True):
            with self.assertRaises(ValueError):
                load_config()
        with mock.patch.dict(os.environ, {}, clear=True):
            with self.assertRaises(ValueError):
                load_config({"enum_bound": -1})


class ErrorTests(unittest.TestCase):
    def test_exit_codes(self) -> None:
        self.assertEqual(InputError("x").exit_code, 2)
        self.assertEqual(PreconditionError("x").exit_code, 2)
        self.assertEqual(NotDecidable("x").exit_code, 1)
        self.assertEqual(ConstraintError("x").exit_code, 1)

    def test_line_prefix(self) -> None:
        self.assertEqual(str(InputError("bad value", line=7)), "line 7: bad value")

    def test_handle_exception_writes_payload(self) -> None:
        with tempfile.TemporaryDirectory() as tmp, contextlib.redirect_stderr(io.StringIO()):
            code = handle_exception(ConstraintError("inconsistent"), "fm", tmp)
            payload = json.loads((Path(tmp) / "error-fm.json").read_text(encoding="utf-8"))
        self.assertEqual(code, 1)
        self.assertEqual(payload["message"], "inconsistent")

    def test_safe_run_maps_unexpected_errors(self) -> None:
        @safe_run
        def boom() -> int:
            raise RuntimeError("secret detail")

        err = io.StringIO()
        with contextlib.redirect_stderr(err):
            self.assertEqual(boom(), 3)
        self.assertNotIn("secret detail", err.getvalue())


class LogTests(unittest.TestCase):
    def test_quiet_silences_progress_only(self) -> None:
        err = io.StringIO()
        with mock.patch.dict(os.environ, {"LATTICE_QUIET": "1"}), contextlib.redirect_stderr(err):
            log("progress")
            log_warning("boundary case")
        lines = err.getvalue().splitlines()
        self.assertEqual(len(lines), 1)
        self.assertTrue(lines[0].endswith("[test_support.py] WARNING boundary case"))

    def test_log_goes_to_stderr(self) -> None:
        out, err = io.StringIO(), io.StringIO()
        with mock.patch.dict(os.environ, {"LATTICE_QUIET": ""}), contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            log("hello")
        self.assertEqual(out.getvalue(), "")
        self.assertIn("hello", err.getvalue())


class ReportTests(unittest.TestCase):
    def test_render_value(self) -> None:
        self.assertEqual(render_value(10**30), "1" + "0" * 30)
        self.assertEqual(render_value(10**5000), "1" + "0" * 5000)
        self.assertEqual(render_value([10**5000]), "[1" + "0" * 5000 + "]")
        self.assertEqual(render_value(True), "true")
        self.assertEqual(render_value({"b": 1, "a": [1, 2]}), '{"a":[1,2],"b":1}')
        self.assertEqual(render_value("x\ty"), "x y")

    def test_overall_verdict_and_renderings(self) -> None:
        report = Report("sd-check")
        report.info("chi_L", 86)
        report.check("h0_equal", True, True)
        self.assertEqual(report.exit_code, 0)
        self.assertEqual(report.render_machine(), "chi_L\tinfo\t86\nh0_equal\tpass\ttrue\noverall\tpass\t2\n")
        report.check("broken", False, 3, warning="noted")
        self.assertEqual(report.exit_code, 1)
        self.assertIn("overall: FAIL", report.render_human())
        self.assertEqual(report.warnings(), ["broken: noted"])

    def test_rejects_unknown_verdict(self) -> None:
        with self.assertRaises(ValueError):
            Report("fm").add("x", "maybe", 1)

    def test_write_report_output(self) -> None:
        report = Report("kodaira")
        report.info("I5.multiplicities", [1, 1, 1, 1, 1])
        with tempfile.TemporaryDirectory() as tmp, contextlib.redirect_stderr(io.StringIO()):
            path = write_report_output("kodaira", report.to_dict(), tmp)
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        self.assertEqual(payload["entries"][0]["value"], "[1,1,1,1,1]")


if __name__ == "__main__":
    unittest.main()
