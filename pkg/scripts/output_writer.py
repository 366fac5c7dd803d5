#!/usr/bin/env python3
"""JSON report and error files under the configured output directory.

Files are written with sorted keys and a trailing newline so that two runs
on the same input produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from log_utils import log

REPORT_PREFIX = "report"
ERROR_PREFIX = "error"


def output_path(output_dir: str | Path, prefix: str, command: str) -> Path:
    return Path(output_dir) / f"{prefix}-{command}.json"


def write_json(path: str | Path, data: Any) -> str:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True) + "\n"
    target.write_text(text, encoding="utf-8")
    log(f"Wrote JSON output to {target}")
    return str(target)


def write_report_output(command: str, report_dict: dict[str, Any], output_dir: str | Path) -> str:
    return write_json(output_path(output_dir, REPORT_PREFIX, command), report_dict)


def write_error_output(command: str, error_dict: dict[str, Any], output_dir: str | Path) -> str:
    return write_json(output_path(output_dir, ERROR_PREFIX, command), error_dict)
