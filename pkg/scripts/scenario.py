#!/usr/bin/env python3
"""Line-oriented scenario files.

    [surface]
    ell = 21
    fibers = I2, Istar1@2
    ample = sigma=1, f=23

    [vectors]
    r = 3
    a = -7
    s = 3
    b = -7

    [genericity]
    fiber = smooth: plain; plain
    fiber = nodal: at_node

    [options]
    bound = 10

Every value is parsed exactly; unknown sections or keys are rejected with
the offending line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from errors import InputError
from kodaira import FiberConfig, parse_fiber_name
from lattice_core import SurfaceModel, class_from_labels, fibered_model, polarization
from mukai import POINT_FLAGS, FiberKind, FiberPoints, GenericityConfig, MukaiVector
from report import allow_unbounded_int_text

_INT_RE = re.compile(r"^[+-]?\d+$")

SECTION_KEYS: dict[str, tuple[str, ...]] = {
    "surface": ("ell", "fibers", "ample"),
    "vectors": ("r", "a", "s", "b", "d", "e"),
    "genericity": ("fiber",),
    "options": ("bound", "box", "degree"),
}
REPEATABLE = {("genericity", "fiber")}
KIND_ALIASES = {
    "smooth": FiberKind.SMOOTH,
    "nodal": FiberKind.NODAL,
    "cuspidal": FiberKind.CUSPIDAL,
    "reducible": FiberKind.REDUCIBLE,
}


@dataclass(frozen=True)
class Scenario:
    ell: int
    fibers: tuple[FiberConfig, ...] = ()
    ample: tuple[tuple[str, int], ...] | None = None
    vectors: dict[str, int] = field(default_factory=dict)
    genericity: GenericityConfig | None = None
    options: dict[str, int] = field(default_factory=dict)

    def build_model(self) -> SurfaceModel:
        model = fibered_model(self.ell, self.fibers)
        if self.ample is None:
            return model
        ample = class_from_labels(model, dict(self.ample))
        return fibered_model(self.ell, self.fibers, reference_ample=ample.coeffs)

    def has_vectors(self) -> bool:
        return all(key in self.vectors for key in ("r", "a", "s", "b"))

    def mukai_vectors(self, model: SurfaceModel) -> tuple[MukaiVector, MukaiVector]:
        if not self.has_vectors():
            missing = [key for key in ("r", "a", "s", "b") if key not in self.vectors]
            raise InputError(f"[vectors] is missing {', '.join(missing)}")
        h = polarization(model)
        return (
            MukaiVector(self.vectors["r"], h, self.vectors["a"]),
            MukaiVector(self.vectors["s"], h, self.vectors["b"]),
        )

    @property
    def d(self) -> int:
        return self.vectors.get("d", 1)

    @property
    def e(self) -> int:
        return self.vectors.get("e", 1)


def _parse_int(value: str, key: str, line: int) -> int:
    if not _INT_RE.match(value):
        raise InputError(f"{key} must be an integer, got {value!r}", line=line)
    allow_unbounded_int_text()
    return int(value)


def _parse_fibers(value: str, line: int) -> tuple[FiberConfig, ...]:
    configs: list[FiberConfig] = []
    for item in (part.strip() for part in value.split(",")):
        if not item:
            continue
        name, _, attach_text = item.partition("@")
        attach = _parse_int(attach_text.strip(), "fiber attach index", line) if attach_text else 0
        try:
            configs.append(parse_fiber_name(name.strip(), attach))
        except InputError as exc:
            raise InputError(str(exc), line=line) from exc
    return tuple(configs)


def _parse_ample(value: str, line: int) -> tuple[tuple[str, int], ...]:
    pairs: list[tuple[str, int]] = []
    for item in (part.strip() for part in value.split(",")):
        if not item:
            continue
        if "=" not in item:
            raise InputError(f"ample entries look like label=coeff, got {item!r}", line=line)
        label, coeff = (part.strip() for part in item.split("=", 1))
        pairs.append((label, _parse_int(coeff, f"ample[{label}]", line)))
    if not pairs:
        raise InputError("ample is empty", line=line)
    return tuple(pairs)


def _parse_fiber_points(value: str, line: int) -> FiberPoints:
    kind_text, sep, rest = value.partition(":")
    kind = KIND_ALIASES.get(kind_text.strip().lower())
    if kind is None or not sep:
        raise InputError(f"expected 'kind: points' with kind in {sorted(KIND_ALIASES)}", line=line)
    points: list[frozenset[str]] = []
    for chunk in (part.strip() for part in rest.split(";")):
        if not chunk:
            continue
        if chunk == "plain":
            points.append(frozenset())
            continue
        flags = frozenset(flag.strip() for flag in chunk.split("+"))
        unknown = sorted(flags - set(POINT_FLAGS))
        if unknown:
            raise InputError(f"unknown point flags {unknown}", line=line)
        points.append(flags)
    return FiberPoints(kind=kind, points=tuple(points))


def parse_scenario(text: str) -> Scenario:
    section: str | None = None
    seen: set[tuple[str, str]] = set()
    ell: int | None = None
    fibers: tuple[FiberConfig, ...] = ()
    ample: tuple[tuple[str, int], ...] | None = None
    vectors: dict[str, int] = {}
    fiber_points: list[FiberPoints] = []
    options: dict[str, int] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.split("#", 1)[0].strip()
        if not stripped:
            continue

        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip().lower()
            if section not in SECTION_KEYS:
                raise InputError(f"unknown section [{section}]", line=lineno)
            continue

        if "=" not in stripped:
            raise InputError(f"expected 'key = value', got {stripped!r}", line=lineno)
        if section is None:
            raise InputError("key outside of any section", line=lineno)

        key, value = (part.strip() for part in stripped.split("=", 1))
        key = key.lower()
        if key not in SECTION_KEYS[section]:
            raise InputError(f"unknown key {key!r} in [{section}]", line=lineno)
        if (section, key) in seen and (section, key) not in REPEATABLE:
            raise InputError(f"duplicate key {key!r} in [{section}]", line=lineno)
        seen.add((section, key))

        if section == "surface":
            if key == "ell":
                ell = _parse_int(value, key, lineno)
                if ell < 1:
                    raise InputError(f"ell must satisfy ell >= 1, got {ell}", line=lineno)
            elif key == "fibers":
                fibers = _parse_fibers(value, lineno)
            else:
                ample = _parse_ample(value, lineno)
        elif section == "vectors":
            vectors[key] = _parse_int(value, key, lineno)
        elif section == "genericity":
            fiber_points.append(_parse_fiber_points(value, lineno))
        else:
            number = _parse_int(value, key, lineno)
            if number < 0 or (key == "degree" and number == 0):
                raise InputError(f"{key} must be positive, got {number}", line=lineno)
            options[key] = number

    if ell is None:
        raise InputError("[surface] must set ell")

    return Scenario(
        ell=ell,
        fibers=fibers,
        ample=ample,
        vectors=vectors,
        genericity=GenericityConfig(tuple(fiber_points)) if fiber_points else None,
        options=options,
    )


def load_scenario(path: str | Path) -> Scenario:
    scenario_path = Path(path)
    if not scenario_path.exists():
        raise InputError(f"scenario file not found: {scenario_path}")
    try:
        text = scenario_path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"scenario file is not UTF-8 text: {scenario_path}") from exc
    except OSError as exc:
        raise InputError(f"cannot read scenario file {scenario_path}: {exc.strerror or exc}") from exc
    return parse_scenario(text)


def describe(scenario: Scenario) -> dict[str, Any]:
    return {
        "ell": scenario.ell,
        "fibers": [config.name for config in scenario.fibers],
        "vectors": dict(sorted(scenario.vectors.items())),
    }
