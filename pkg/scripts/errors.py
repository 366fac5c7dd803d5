#!/usr/bin/env python3
"""Unified error handling for the verifier scripts.

Failed verification checks are report entries, not exceptions. The classes
below cover bad input, violated operation contracts and internal
inconsistencies.
"""

from __future__ import annotations

import datetime as dt
from functools import wraps
from typing import Any, Callable, TypeVar

from log_utils import log_error
from output_writer import write_error_output

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3


class EngineError(Exception):
    """Expected engine failure with a safe user-facing message."""

    exit_code = EXIT_CHECK_FAILED


class InputError(EngineError):
    """Malformed scenario, out-of-range value or violated hypothesis."""

    exit_code = EXIT_INPUT_ERROR

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class PreconditionError(InputError):
    """An operation was called outside its contract."""


class NotDecidable(EngineError):
    """The numerical argument does not apply to the given class."""


class ConstraintError(EngineError):
    """An internal constraint system is inconsistent or a guard was hit."""


class InternalError(EngineError):
    """Unexpected failure outside the verifier's own error model."""

    exit_code = EXIT_INTERNAL_ERROR


def _timestamp_utc() -> str:
    return dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def handle_exception(e: Exception, context: str, output_dir: str = "") -> int:
    error_type = type(e).__name__
    message = str(e)

    log_error(f"{context}: {message}")

    if output_dir:
        payload = {
            "error_type": error_type,
            "message": message,
            "context": context,
            "timestamp_utc": _timestamp_utc(),
        }
        write_error_output(context, payload, output_dir)

    if isinstance(e, EngineError):
        return e.exit_code
    return EXIT_INTERNAL_ERROR


F = TypeVar("F", bound=Callable[..., Any])


def safe_run(fn: F) -> F:
    @wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except EngineError as exc:
            return handle_exception(exc, context=fn.__name__)
        except Exception:
            return handle_exception(InternalError("Unexpected engine failure"), context=fn.__name__)

    return wrapper  # type: ignore[return-value]
