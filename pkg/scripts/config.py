#!/usr/bin/env python3
"""Environment-driven configuration for the lattice verifier.

Every key reads a LATTICE_* variable; explicit overrides win when not None.
"""

from __future__ import annotations

import os
from typing import Any


def _as_bool(value: str | bool | None, default: bool) -> bool:
    if value is None:
        return default
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in {"1", "true", "yes", "on"}


def _as_int(value: str | int | None, default: int) -> int:
    if value is None:
        return default
    if isinstance(value, int):
        return value
    return int(str(value).strip())


def load_config(overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    cfg: dict[str, Any] = {
        "enum_bound": _as_int(os.environ.get("LATTICE_ENUM_BOUND"), 10),
        "brute_box": _as_int(os.environ.get("LATTICE_BRUTE_BOX"), 12),
        "search_cap": _as_int(os.environ.get("LATTICE_SEARCH_CAP"), 2_000_000),
        "reflect_cap": _as_int(os.environ.get("LATTICE_REFLECT_CAP"), 1000),
        "workers": _as_int(os.environ.get("LATTICE_WORKERS"), 4),
        "output_dir": os.environ.get("LATTICE_OUTPUT_DIR") or "",
        "quiet": _as_bool(os.environ.get("LATTICE_QUIET"), False),
    }

    if overrides:
        for key, value in overrides.items():
            if value is not None:
                cfg[key] = value

    cfg["enum_bound"] = _as_int(cfg.get("enum_bound"), 10)
    cfg["brute_box"] = _as_int(cfg.get("brute_box"), 12)
    cfg["search_cap"] = _as_int(cfg.get("search_cap"), 2_000_000)
    cfg["reflect_cap"] = _as_int(cfg.get("reflect_cap"), 1000)
    cfg["workers"] = _as_int(cfg.get("workers"), 4)
    cfg["quiet"] = _as_bool(cfg.get("quiet"), False)
    cfg["output_dir"] = str(cfg.get("output_dir") or "")

    if cfg["enum_bound"] < 0:
        raise ValueError("LATTICE_ENUM_BOUND must be non-negative")
    if cfg["brute_box"] < 0:
        raise ValueError("LATTICE_BRUTE_BOX must be non-negative")
    if cfg["search_cap"] < 1:
        raise ValueError("LATTICE_SEARCH_CAP must be positive")
    if cfg["reflect_cap"] < 1:
        raise ValueError("LATTICE_REFLECT_CAP must be positive")
    if cfg["workers"] < 1:
        raise ValueError("LATTICE_WORKERS must be positive")
    return cfg
