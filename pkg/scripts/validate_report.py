#!/usr/bin/env python3
"""Validate a verifier report JSON against the report JSON Schema.

Usage:
    python scripts/validate_report.py --schema schemas/report_schema.json --input out/report-sd-check.json
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from errors import EXIT_OK, InputError, safe_run
from jsonschema import ValidationError, validate
from log_utils import log

DEFAULT_SCHEMA = Path(__file__).resolve().parents[1] / "schemas" / "report_schema.json"


def load_schema(path: str | Path = DEFAULT_SCHEMA) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def validate_report(report: dict[str, Any], schema: dict[str, Any] | None = None) -> None:
    try:
        validate(instance=report, schema=schema or load_schema())
    except ValidationError as exc:
        raise InputError(f"Schema validation failed: {exc.message}") from exc


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Validate a verifier report with JSON Schema.")
    parser.add_argument("--schema", default=str(DEFAULT_SCHEMA), help="Path to JSON Schema file")
    parser.add_argument("--input", required=True, help="Path to report JSON file")
    return parser.parse_args(argv)


@safe_run
def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        schema = load_schema(args.schema)
        with open(args.input, "r", encoding="utf-8") as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"Failed to load schema or report: {exc}") from exc

    log(f"Validating {args.input} against {args.schema}")
    validate_report(report, schema)
    log("Schema validation passed")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
