#!/usr/bin/env python3
"""Strange-duality numerics over the elliptic locus.

Dimension identities for the Hilbert-scheme reduction, ranks of the
Verlinde-type pushforwards, theta-bundle normalization exponents and the
twist T as an element of a formal Picard group.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any, NamedTuple

from sympy import binomial

from errors import ConstraintError, PreconditionError
from lattice_core import DivisorClass, euler_char_divisor, polarization
from mukai import MukaiVector, cup_orthogonal, moduli_dims


@dataclass(frozen=True)
class PicExpr:
    """Exponents on the formal generators lambda, det pi_*H, det pi_*H^2, det pi_*L and H."""

    lambda_: int = 0
    det_h: int = 0
    det_h2: int = 0
    det_l: int = 0
    h: int = 0

    def _values(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __add__(self, other: "PicExpr") -> "PicExpr":
        return PicExpr(*(x + y for x, y in zip(self._values(), other._values())))

    def __neg__(self) -> "PicExpr":
        return PicExpr(*(-x for x in self._values()))

    def __sub__(self, other: "PicExpr") -> "PicExpr":
        return self + (-other)

    def is_trivial(self) -> bool:
        return not any(self._values())

    def to_dict(self) -> dict[str, int]:
        return {"lambda": self.lambda_, "detH": self.det_h, "detH2": self.det_h2, "detL": self.det_l, "H": self.h}

    def __str__(self) -> str:
        parts = [f"{name}^{value}" for name, value in self.to_dict().items() if value]
        return " * ".join(parts) if parts else "1"


@dataclass(frozen=True)
class SDScenario:
    v: MukaiVector
    w: MukaiVector
    ell: int
    L: DivisorClass
    chi_L: int
    d_v: int
    d_w: int
    h0_v: int
    h0_w: int


class ThetaNormalization(NamedTuple):
    alpha: int
    beta: int
    restriction_exponent: int
    normalization_exponent: int


def _sum_rank(v: MukaiVector, w: MukaiVector) -> int:
    return v.r + w.r


def build_L(v: MukaiVector, w: MukaiVector, ell: int) -> tuple[DivisorClass, dict[str, int]]:
    """L on a fiber and L = H^(r+s) (x) O(F)^-((r+s)ell + a + b) over the family."""
    model = v.model
    rs = _sum_rank(v, w)
    sigma = model.section()
    f = model.fiber()
    if f is None:
        raise PreconditionError("model has no fiber class")
    fiberwise = rs * sigma + (rs - v.a - w.a) * f
    universal = {"H": rs, "O(F)": -(rs * ell + v.a + w.a)}

    restricted = universal["H"] * polarization(model) + universal["O(F)"] * f
    if restricted != fiberwise:
        raise ConstraintError(f"restriction of the universal L is {restricted}, expected {fiberwise}")
    return fiberwise, universal


def _binomial(n: int, k: int) -> int:
    return int(binomial(n, k))


def sd_counts(v: MukaiVector, w: MukaiVector, ell: int) -> SDScenario:
    if cup_orthogonal(v, w) != 0:
        raise PreconditionError(f"v and w are not orthogonal: cup product {cup_orthogonal(v, w)}")
    l_cls, _ = build_L(v, w, ell)
    chi_l = euler_char_divisor(l_cls)
    _, d_v = moduli_dims(v)
    _, d_w = moduli_dims(w)
    if d_v + d_w != chi_l:
        raise ConstraintError(f"d_v + d_w = {d_v + d_w} but chi(L) = {chi_l}")
    h0_v = _binomial(chi_l, d_v)
    h0_w = _binomial(chi_l, d_w)
    if h0_v != h0_w:
        raise ConstraintError("binomial symmetry failed")
    return SDScenario(v=v, w=w, ell=ell, L=l_cls, chi_L=chi_l, d_v=d_v, d_w=d_w, h0_v=h0_v, h0_w=h0_w)


def twist_T(r: int, s: int, d: int, e: int) -> PicExpr:
    return PicExpr(lambda_=-(r - d) * (s - e), det_h=e * (r - d) + d * (s - e), det_h2=d * e)


def theta_normalization(v: MukaiVector, w: MukaiVector, ell: int, d: int = 1, e: int = 1) -> ThetaNormalization:
    alpha = v.a - v.r - d * ell
    beta = w.a - w.r - e * ell
    return ThetaNormalization(alpha, beta, -beta * d, beta * d)


def theta_correction(v: MukaiVector, w: MukaiVector, ell: int, d: int = 1, e: int = 1) -> int:
    """Exponent of H in Theta (x) Theta_v^-1 (x) Theta_w^-1."""
    norm = theta_normalization(v, w, ell, d, e)
    return -d * norm.beta - e * norm.alpha


def pushforward_rank(v: MukaiVector, w: MukaiVector, ell: int) -> int:
    sd = sd_counts(v, w, ell)
    return sd.h0_v * sd.h0_w


def verlinde_pair(v: MukaiVector, w: MukaiVector, ell: int) -> dict[str, Any]:
    sd = sd_counts(v, w, ell)
    return {
        "W": {"twist": PicExpr(), "rank": sd.h0_v},
        "V": {"twist": PicExpr(det_l=-1), "rank": sd.h0_w},
        "rank_pi_L": sd.chi_L,
    }


def reverse_twist(pair: tuple[PicExpr, PicExpr], t: PicExpr) -> tuple[PicExpr, PicExpr]:
    return pair[0] + t, pair[1] - t


def twist_equivalent(first: tuple[PicExpr, PicExpr], second: tuple[PicExpr, PicExpr]) -> bool:
    return (first[0] - second[0]) + (first[1] - second[1]) == PicExpr()
