#!/usr/bin/env python3
"""Mukai-vector algebra on a K3 surface model.

A Mukai vector is written v = r + c1 + a[pt]; the pairing convention is the
one for which dim M_v = <v,v> + 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from math import gcd
from typing import Any

from errors import ConstraintError, PreconditionError
from lattice_core import DivisorClass, SurfaceModel, pair, polarization


@dataclass(frozen=True)
class MukaiVector:
    r: int
    c1: DivisorClass
    a: int

    @property
    def model(self) -> SurfaceModel:
        return self.c1.model

    @property
    def primitive(self) -> bool:
        return reduce(gcd, (self.r, self.a, *self.c1.coeffs), 0) == 1

    def __str__(self) -> str:
        return f"({self.r}, {self.c1}, {self.a})"


class FiberKind(str, Enum):
    SMOOTH = "smooth"
    NODAL = "nodal"
    CUSPIDAL = "cuspidal"
    REDUCIBLE = "reducible"


POINT_FLAGS = ("at_node", "at_cusp", "on_component_intersection")


@dataclass(frozen=True)
class FiberPoints:
    kind: FiberKind
    points: tuple[frozenset[str], ...] = ()

    def __post_init__(self) -> None:
        for flags in self.points:
            unknown = set(flags) - set(POINT_FLAGS)
            if unknown:
                raise PreconditionError(f"unknown point flags {sorted(unknown)}")


@dataclass(frozen=True)
class GenericityConfig:
    fibers: tuple[FiberPoints, ...] = field(default=())


def _same_model(v: MukaiVector, w: MukaiVector) -> None:
    if v.model != w.model:
        raise PreconditionError("Mukai vectors live on different surface models")


def mukai_pair(v: MukaiVector, w: MukaiVector) -> int:
    _same_model(v, w)
    return pair(v.c1, w.c1) - v.r * w.a - w.r * v.a


def cup_orthogonal(v: MukaiVector, w: MukaiVector) -> int:
    """Degree-4 part of v cup w; zero iff H^2 = -rb - sa when c1(v) = c1(w) = H."""
    _same_model(v, w)
    return v.r * w.a + pair(v.c1, w.c1) + v.a * w.r


def moduli_dims(v: MukaiVector) -> tuple[int, int]:
    square = mukai_pair(v, v)
    if square % 2 != 0:
        raise ConstraintError(f"<v,v> = {square} is odd; the lattice is not even")
    if square < -2:
        raise PreconditionError(f"<v,v> = {square} < -2; the moduli space is empty")
    dim = square + 2
    return dim, dim // 2


def chi_sheaf(v: MukaiVector) -> int:
    return v.r + v.a


def dual(v: MukaiVector) -> MukaiVector:
    return MukaiVector(v.r, -v.c1, v.a)


def ideal_sheaf_vector(model: SurfaceModel, n: int) -> MukaiVector:
    """v(I_Z) for a length-n subscheme; its moduli space is X^[n]."""
    if n < 0:
        raise PreconditionError("subscheme length must be non-negative")
    return MukaiVector(1, model.zero(), 1 - n)


def euler_pairing(v: MukaiVector, w: MukaiVector) -> int:
    return -mukai_pair(v, w)


def _verdict(name: str, passed: bool, details: Any, warning: str | None = None) -> dict[str, Any]:
    entry: dict[str, Any] = {"check": name, "verdict": "pass" if passed else "fail", "details": details}
    if warning:
        entry["warning"] = warning
    return entry


def admissibility_check(v: MukaiVector, w: MukaiVector, ell: int) -> dict[str, Any]:
    """Individual verdicts for the hypotheses on the pair (v, w).

    The footnote bounds <v,v> >= 2(r-1)(r^2+1) are reported as warnings and
    do not affect the overall verdict.
    """
    _same_model(v, w)
    h = polarization(v.model)
    if v.c1 != h or w.c1 != h:
        raise PreconditionError(f"both vectors must have c1 = H = {h}")
    if h.square() != 2 * ell:
        raise PreconditionError(f"H^2 = {h.square()} does not match ell = {ell}")

    r, a, s, b = v.r, v.a, w.r, w.a
    vv = mukai_pair(v, v)
    ww = mukai_pair(w, w)
    cup = cup_orthogonal(v, w)
    checks: list[dict[str, Any]] = [
        _verdict("rank_v_at_least_3", r >= 3, r),
        _verdict("rank_w_at_least_3", s >= 3, s),
        _verdict("v_primitive", v.primitive, str(v)),
        _verdict("w_primitive", w.primitive, str(w)),
        _verdict("cup_orthogonal", cup == 0, f"H^2 = {2 * ell}, -rb - sa = {-r * b - s * a}"),
        _verdict("bound_ii", vv + ww >= 2 * (r + s) ** 2, f"{vv + ww} >= {2 * (r + s) ** 2}"),
    ]
    if cup == 0:
        identity = vv + ww == -2 * (r + s) * (a + b)
        checks.append(_verdict("pairing_sum_identity", identity, f"{vv + ww} = {-2 * (r + s) * (a + b)}"))

    for label, square, rank in (("v", vv, r), ("w", ww, s)):
        floor = 2 * (rank - 1) * (rank * rank + 1)
        ok = square >= floor
        checks.append(
            _verdict(
                f"footnote_bound_{label}",
                True,
                f"{square} >= {floor}" if ok else f"{square} < {floor}",
                warning=None if ok else "footnote bound not met; reported only",
            )
        )

    checks.append(_verdict("chi_v_nonpositive", chi_sheaf(v) <= 0, chi_sheaf(v)))
    checks.append(_verdict("chi_w_nonpositive", chi_sheaf(w) <= 0, chi_sheaf(w)))

    excess = -(a + b)
    strict = excess > r + s
    checks.append(
        _verdict(
            "minus_a_minus_b_at_least_r_plus_s",
            excess >= r + s,
            f"{excess} {'>' if strict else ('=' if excess == r + s else '<')} {r + s}",
            warning=None if strict or excess < r + s else "boundary case: -(a+b) = r+s, strict inequality fails",
        )
    )
    return {
        "passed": all(entry["verdict"] == "pass" for entry in checks),
        "strict": strict,
        "checks": checks,
    }


def fiber_degree(r: int, points: int) -> int:
    """Degree of the fiberwise restriction: -(r-1) + len - 1."""
    return -(r - 1) + points - 1


def wit_genericity(config: GenericityConfig, r: int) -> dict[str, Any]:
    if r < 1:
        raise PreconditionError("rank must be at least 1")
    checks: list[dict[str, Any]] = []
    for idx, fiber in enumerate(config.fibers):
        count = len(fiber.points)
        if fiber.kind is FiberKind.SMOOTH:
            checks.append(_verdict(f"fiber_{idx}_at_most_two_points", count <= 2, count))
            degree = fiber_degree(r, count)
            checks.append(_verdict(f"fiber_{idx}_degree_negative", degree < 0, degree))
            continue
        checks.append(_verdict(f"fiber_{idx}_at_most_one_point", count <= 1, count))
        bad = sorted({flag for flags in fiber.points for flag in flags})
        checks.append(_verdict(f"fiber_{idx}_points_general", not bad, bad or "plain"))
    return {"passed": all(entry["verdict"] == "pass" for entry in checks), "checks": checks}
