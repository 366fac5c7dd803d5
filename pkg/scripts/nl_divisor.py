#!/usr/bin/env python3
"""Lemma-1 engine for the elliptic Noether-Lefschetz divisor.

Given a quasipolarized model (X, H) of degree 2*ell and a class F with
F^2 = 0, F.H = 1, replay the numerical content of the argument: effectivity
of F, reflection of F to a nef isotropic class, extraction of the section,
the decomposition H = sigma + (ell+1)f, and a brute-force uniqueness oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

from sympy import Matrix, Rational

from errors import ConstraintError, InputError, PreconditionError
from kodaira import forced_multiple_check
from lattice_core import (
    FIBER_LABEL,
    SECTION_LABEL,
    DivisorClass,
    EffectiveSide,
    SurfaceModel,
    decide_effective_side,
    euler_char_divisor,
    is_nef,
    pair,
    signature,
)
from log_utils import log

DEFAULT_REFLECT_CAP = 1000
DEFAULT_ENUM_BOUND = 10
DEFAULT_SEARCH_CAP = 2_000_000


@dataclass(frozen=True)
class ReflectionStep:
    curve: DivisorClass
    multiplier: int
    degree_before: int
    degree_after: int


@dataclass
class Lemma1Report:
    fiber: DivisorClass
    section: DivisorClass
    ell: int
    decomposition_ok: bool
    reflection_chain: list[ReflectionStep] = field(default_factory=list)
    checks: list[dict[str, Any]] = field(default_factory=list)

    def passed(self) -> bool:
        return self.decomposition_ok and all(entry["verdict"] == "pass" for entry in self.checks)


def reflect(d: DivisorClass, gamma: DivisorClass) -> DivisorClass:
    if gamma.square() != -2:
        raise PreconditionError(f"cannot reflect along {gamma}: not a (-2)-class")
    return d + pair(d, gamma) * gamma


def nef_reduce(
    d: DivisorClass,
    model: SurfaceModel,
    cap: int = DEFAULT_REFLECT_CAP,
) -> tuple[DivisorClass, list[ReflectionStep]]:
    """Reflect d along declared curves it meets negatively until it is nef.

    The first declared curve with negative pairing is used at each step;
    the H'-degree drops strictly at every step.
    """
    ample = model.reference_ample()
    if ample is None:
        raise PreconditionError("nef reduction needs a reference ample class")
    if pair(d, ample) < 0:
        raise PreconditionError("class has negative degree against the reference ample class")

    curves = model.neg_curves()
    current = d
    chain: list[ReflectionStep] = []
    for _ in range(cap):
        gamma = next((c for c in curves if pair(current, c) < 0), None)
        if gamma is None:
            f = model.fiber()
            if f is not None and pair(current, f) < 0:
                raise ConstraintError(f"class {current} meets the fiber negatively after reduction")
            return current, chain
        before = pair(current, ample)
        multiplier = pair(current, gamma)
        current = current + multiplier * gamma
        after = pair(current, ample)
        if after >= before:
            raise ConstraintError("reflection did not decrease the ample degree; model is inconsistent")
        chain.append(ReflectionStep(curve=gamma, multiplier=multiplier, degree_before=before, degree_after=after))
    raise ConstraintError(f"nef reduction exceeded {cap} reflections; model is inconsistent")


def _entry(name: str, passed: bool, details: Any) -> dict[str, Any]:
    return {"check": name, "verdict": "pass" if passed else "fail", "details": details}


def _section_candidates(model: SurfaceModel, fiber: DivisorClass) -> list[DivisorClass]:
    return [c for c in model.neg_curves() if pair(c, fiber) == 1]


def _fiber_contributions(model: SurfaceModel, residual: DivisorClass) -> tuple[list[dict[str, Any]], bool]:
    """Split a residual class over the declared fibers and test each part.

    In the (sigma, f, components) basis each fiber owns its non-attach
    coordinates; the attach coordinate of the contribution is 0.
    """
    entries: list[dict[str, Any]] = []
    all_ok = True
    for block in model.fibers:
        config = block.config
        contribution = [0] * config.size
        for i, coeffs in enumerate(block.component_coeffs):
            if i == config.attach:
                continue
            idx = next(k for k, c in enumerate(coeffs) if c == 1)
            contribution[i] = residual.coeffs[idx]
        forced = forced_multiple_check(config, box=4)
        mults = config.multiplicities
        base = contribution[config.attach]
        multiple = all(c == base * m for c, m in zip(contribution, mults))
        all_ok = all_ok and forced.forced and multiple
        entries.append(
            {
                "fiber": config.name,
                "contribution": contribution,
                "forced_multiple": forced.forced,
                "is_fiber_multiple": multiple,
            }
        )
    return entries, all_ok


def lemma1_analyze(
    model: SurfaceModel,
    h: DivisorClass,
    f_class: DivisorClass,
    reflect_cap: int = DEFAULT_REFLECT_CAP,
) -> Lemma1Report:
    ell = model.ell
    if ell == 1:
        raise InputError("Lemma 1 assumes ell != 1 (degree 2 quasipolarizations are excluded)")
    if h.square() != 2 * ell:
        raise PreconditionError(f"H^2 = {h.square()} but 2*ell = {2 * ell}")
    if f_class.square() != 0:
        raise PreconditionError(f"F^2 = {f_class.square()}, expected 0")
    if pair(f_class, h) != 1:
        raise PreconditionError(f"F.H = {pair(f_class, h)}, expected 1")
    if not is_nef(model, h):
        raise PreconditionError("H is not nef against the declared curves")

    log(f"Lemma 1 analysis: ell = {ell}, F = {f_class}")
    checks: list[dict[str, Any]] = []

    chi_f = euler_char_divisor(f_class)
    checks.append(_entry("chi_O_F_equals_2", chi_f == 2, chi_f))
    side = decide_effective_side(f_class, h)
    checks.append(_entry("F_effective", side is EffectiveSide.EFFECTIVE, side.value))

    fiber, chain = nef_reduce(f_class, model, cap=reflect_cap)
    checks.append(_entry("reduced_class_nef", is_nef(model, fiber), str(fiber)))
    checks.append(_entry("reduced_class_isotropic", fiber.square() == 0, fiber.square()))
    checks.append(_entry("reduced_fiber_degree_one", pair(fiber, h) == 1, pair(fiber, h)))
    checks.append(
        _entry(
            "chain_curves_H_orthogonal",
            all(pair(step.curve, h) == 0 for step in chain),
            [pair(step.curve, h) for step in chain],
        )
    )
    checks.append(
        _entry(
            "chain_degrees_decreasing",
            all(step.degree_after < step.degree_before for step in chain),
            [[step.degree_before, step.degree_after] for step in chain],
        )
    )

    sigma_cls = h - (ell + 1) * fiber
    checks.append(_entry("Sigma_square_minus_two", sigma_cls.square() == -2, sigma_cls.square()))
    checks.append(_entry("chi_O_Sigma_equals_1", euler_char_divisor(sigma_cls) == 1, euler_char_divisor(sigma_cls)))
    degree = pair(sigma_cls, h)
    checks.append(_entry("Sigma_degree_positive", degree == ell - 1 and degree > 0, degree))
    checks.append(
        _entry("Sigma_effective", decide_effective_side(sigma_cls, h) is EffectiveSide.EFFECTIVE, degree)
    )

    candidates = _section_candidates(model, fiber)
    if len(candidates) != 1:
        checks.append(_entry("unique_transversal_curve", False, [str(c) for c in candidates]))
        return Lemma1Report(
            fiber=fiber, section=sigma_cls, ell=ell, decomposition_ok=False, reflection_chain=chain, checks=checks
        )
    section = candidates[0]
    checks.append(_entry("unique_transversal_curve", True, str(section)))
    checks.append(_entry("section_square_minus_two", section.square() == -2, section.square()))
    checks.append(_entry("section_meets_fiber_once", pair(section, fiber) == 1, pair(section, fiber)))
    checks.append(
        _entry(
            "chain_avoids_section",
            all(step.curve != section for step in chain),
            [str(step.curve) for step in chain],
        )
    )

    residual = sigma_cls - section
    fiber_entries, fibers_ok = _fiber_contributions(model, residual)
    checks.append(_entry("fiber_contributions_are_multiples", fibers_ok, fiber_entries))

    decomposition = h - section - (ell + 1) * fiber
    decomposition_ok = decomposition.is_zero()
    checks.append(_entry("H_equals_sigma_plus_ell_plus_one_f", decomposition_ok, str(decomposition)))

    return Lemma1Report(
        fiber=fiber,
        section=section,
        ell=ell,
        decomposition_ok=decomposition_ok,
        reflection_chain=chain,
        checks=checks,
    )


@dataclass(frozen=True)
class UniquenessScan:
    classes: list[DivisorClass]
    complete: bool
    nodes: int


class _NodeBudget:
    def __init__(self, cap: int) -> None:
        self.cap = cap
        self.used = 0
        self.exhausted = False

    def spend(self) -> bool:
        self.used += 1
        if self.used > self.cap:
            self.exhausted = True
        return not self.exhausted


def _definite_block(model: SurfaceModel) -> list[int] | None:
    """Indices of a negative-definite block orthogonal to sigma and f, or None."""
    if model.basis_labels[:2] != (SECTION_LABEL, FIBER_LABEL):
        return None
    block = list(range(2, model.rank))
    if any(model.gram[i][j] for i in (0, 1) for j in block):
        return None
    if block:
        _, minus, _ = signature([[model.gram[i][j] for j in block] for i in block])
        if minus != len(block):
            return None
    return block


def _vectors_of_norm(positive: Matrix, norm: int, bound: int, budget: _NodeBudget) -> list[tuple[int, ...]]:
    """All n with n^T P n = norm and |n_i| <= bound, P positive definite.

    Fincke-Pohst over P = L D L^T: with n_j fixed for j > i, coordinate i is
    confined to an interval around -sum_{j>i} L_ji n_j.
    """
    k = positive.rows
    if k == 0:
        return [()] if norm == 0 else []
    lower, diag = positive.LDLdecomposition()
    pivots = [diag[i, i] for i in range(k)]
    values = [0] * k
    found: list[tuple[int, ...]] = []

    def descend(i: int, remaining: Rational) -> None:
        if budget.exhausted:
            return
        if i < 0:
            if remaining == 0:
                found.append(tuple(values))
            return
        centre = sum((lower[j, i] * values[j] for j in range(i + 1, k)), Rational(0))
        radius = math.sqrt(float(remaining / pivots[i]))
        lo = max(-bound, math.floor(float(-centre) - radius) - 1)
        hi = min(bound, math.ceil(float(-centre) + radius) + 1)
        for value in range(lo, hi + 1):
            if not budget.spend():
                return
            term = pivots[i] * (value + centre) ** 2
            if term <= remaining:
                values[i] = value
                descend(i - 1, remaining - term)
        values[i] = 0

    descend(k - 1, Rational(norm))
    return found


def _split_scan(
    model: SurfaceModel,
    hvec: list[int],
    block: list[int],
    bound: int,
    degree: int,
    budget: _NodeBudget,
) -> list[DivisorClass]:
    gram = model.gram
    positive = -Matrix([[gram[i][j] for j in block] for i in block]) if block else Matrix(0, 0, [])
    h_on_block = [hvec[i] for i in block]
    by_norm: dict[int, list[tuple[int, ...]]] = {}
    found: list[DivisorClass] = []
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if not budget.spend():
                return found
            need = degree - hvec[0] * x - hvec[1] * y
            if need and not any(h_on_block):
                continue
            # D^2 = U-part square - n^T P n must vanish
            norm = gram[0][0] * x * x + 2 * gram[0][1] * x * y + gram[1][1] * y * y
            if norm < 0:
                continue
            if norm not in by_norm:
                by_norm[norm] = _vectors_of_norm(positive, norm, bound, budget)
                if budget.exhausted:
                    return found
            for rest in by_norm[norm]:
                if sum(hv * v for hv, v in zip(h_on_block, rest)) == need:
                    found.append(model.cls((x, y, *rest)))
    return found


def _pivot_scan(
    model: SurfaceModel,
    hvec: list[int],
    bound: int,
    degree: int,
    budget: _NodeBudget,
) -> list[DivisorClass]:
    """Solve the degree condition for one coordinate and enumerate the rest."""
    n = model.rank
    pivot = min((i for i in range(n) if hvec[i] != 0), key=lambda i: (abs(hvec[i]), i))
    free = [i for i in range(n) if i != pivot]
    found: list[DivisorClass] = []
    for values in itertools.product(range(-bound, bound + 1), repeat=len(free)):
        if not budget.spend():
            return found
        rest = degree - sum(hvec[i] * v for i, v in zip(free, values))
        if rest % hvec[pivot] != 0:
            continue
        solved = rest // hvec[pivot]
        if abs(solved) > bound:
            continue
        coeffs = [0] * n
        coeffs[pivot] = solved
        for i, v in zip(free, values):
            coeffs[i] = v
        cand = model.cls(coeffs)
        if cand.square() == 0:
            found.append(cand)
    return found


def uniqueness_scan(
    model: SurfaceModel,
    h: DivisorClass,
    bound: int = DEFAULT_ENUM_BOUND,
    degree: int = 1,
    cap: int = DEFAULT_SEARCH_CAP,
) -> UniquenessScan:
    """Every class with |coeffs| <= bound, D^2 = 0 and D.H = degree, under a node cap.

    Fibered models split as U plus a negative-definite fiber part, so only
    the (sigma, f) coordinates are enumerated and the fiber part comes from
    a short-vector search of the required norm. Other models fall back to
    solving D.H = degree for one coordinate.
    """
    n = model.rank
    hvec = [sum(model.gram[i][j] * h.coeffs[j] for j in range(n)) for i in range(n)]
    if not any(hvec):
        raise PreconditionError("H pairs to zero with every basis vector")

    budget = _NodeBudget(cap)
    block = _definite_block(model)
    if block is None:
        found = _pivot_scan(model, hvec, bound, degree, budget)
    else:
        found = _split_scan(model, hvec, block, bound, degree, budget)
    if budget.exhausted:
        log(f"Uniqueness search stopped at the node cap {cap}; result is incomplete")
    return UniquenessScan(sorted(found, key=lambda c: c.coeffs), not budget.exhausted, budget.used)


def uniqueness_search(
    model: SurfaceModel,
    h: DivisorClass,
    bound: int = DEFAULT_ENUM_BOUND,
    degree: int = 1,
    cap: int = DEFAULT_SEARCH_CAP,
) -> list[DivisorClass]:
    """Sorted classes with |coeffs| <= bound, D^2 = 0 and D.H = degree."""
    return uniqueness_scan(model, h, bound, degree, cap).classes


def uniqueness_identities(model: SurfaceModel, candidate: DivisorClass) -> dict[str, Any]:
    """Write candidate = a*sigma + R and test the relations the uniqueness proof uses.

    F'^2 = 0 with R.sigma = 1 - a(ell-1) expands to R^2 = -2a + 2a^2*ell.
    The variant with (ell+1) is returned for comparison; both vanish at a = 0.
    """
    sigma = model.section()
    fiber = model.fiber()
    if fiber is None:
        raise PreconditionError("model has no fiber class")
    a = pair(candidate, fiber)
    residual = candidate - a * sigma
    ell = model.ell
    r_sq = residual.square()
    r_sigma = pair(residual, sigma)
    return {
        "a": a,
        "R_dot_f": pair(residual, fiber),
        "R_square": r_sq,
        "R_square_identity": r_sq == -2 * a + 2 * a * a * ell,
        "R_square_printed_variant": -2 * a + 2 * a * a * (ell + 1),
        "R_dot_sigma": r_sigma,
        "R_dot_sigma_identity": r_sigma == 1 - a * (ell - 1),
    }
