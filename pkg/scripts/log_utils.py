#!/usr/bin/env python3
"""Stderr logging for the verifier scripts.

stdout carries only the report, so every log line goes to stderr. Set
LATTICE_QUIET to silence progress lines; warnings and errors still print.
"""

from __future__ import annotations

import datetime as dt
import inspect
import os
import sys

QUIET_ENV = "LATTICE_QUIET"


def _timestamp_utc() -> str:
    return dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _caller_script_name(depth: int = 2) -> str:
    frame = inspect.currentframe()
    try:
        for _ in range(depth):
            frame = frame.f_back if frame else None
        caller_file = frame.f_globals.get("__file__") if frame else None
        return os.path.basename(str(caller_file)) if caller_file else "unknown"
    finally:
        del frame


def is_quiet() -> bool:
    return str(os.environ.get(QUIET_ENV) or "").strip().lower() in {"1", "true", "yes", "on"}


def _emit(level: str, msg: str) -> None:
    prefix = f"{_timestamp_utc()} [{_caller_script_name(3)}]"
    print(f"{prefix} {level}{msg}" if level else f"{prefix} {msg}", file=sys.stderr)


def log(msg: str) -> None:
    if not is_quiet():
        _emit("", msg)


def log_warning(msg: str) -> None:
    _emit("WARNING ", msg)


def log_error(msg: str) -> None:
    _emit("ERROR ", msg)
