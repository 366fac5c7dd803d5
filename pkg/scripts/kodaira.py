#!/usr/bin/env python3
"""Kodaira fiber configurations as integer quadratic forms.

Builds the component intersection matrix of every reducible Kodaira type,
computes fiber multiplicities as the primitive kernel vector, verifies
Zariski's lemma, and decides whether a fiber's contribution to a nef class
is forced to be a multiple of the fiber.

The forced-multiple decision is by Smith normal form: gram * m = t is
solvable over Z iff gram and [gram | t] have the same rank and the same
nonzero invariant factors. Each pattern is cross-checked against the
rational solution coset and a pruned exhaustive box search.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd
from typing import Any, Callable, Sequence

from sympy import Matrix, ZZ, ilcm
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from errors import ConstraintError, PreconditionError
from lattice_core import signature
from log_utils import log

FIBER_TYPES = ("I", "III", "IV", "I*", "II*", "III*", "IV*")
DEFAULT_BOX = 12
DEFAULT_SEARCH_CAP = 2_000_000

_NAME_RE = re.compile(r"^(IV|III|II|I)(star|\*)?(\d*)$")


@dataclass(frozen=True)
class FiberConfig:
    fiber_type: str
    n: int
    labels: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    attach: int = 0

    @property
    def name(self) -> str:
        if self.fiber_type == "I":
            return f"I{self.n}"
        if self.fiber_type == "I*":
            return f"Istar{self.n}"
        return self.fiber_type.replace("*", "star")

    @property
    def size(self) -> int:
        return len(self.labels)

    @cached_property
    def multiplicities(self) -> tuple[int, ...]:
        return fiber_class(self)


def _cycle(n: int) -> list[list[int]]:
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        gram[i][i] = -2
        gram[i][(i + 1) % n] += 1
        gram[(i + 1) % n][i] += 1
    return gram


def _from_edges(size: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    gram = [[0] * size for _ in range(size)]
    for i in range(size):
        gram[i][i] = -2
    for i, j in edges:
        gram[i][j] = gram[j][i] = 1
    return gram


def _dstar(n: int) -> tuple[list[str], list[list[int]]]:
    # C1..C4 then the chain D1..D(n+1); C1, C2 meet D1 and C3, C4 meet D(n+1)
    labels = ["C1", "C2", "C3", "C4"] + [f"D{i}" for i in range(1, n + 2)]
    first, last = 4, 4 + n
    edges = [(0, first), (1, first), (2, last), (3, last)]
    edges += [(4 + i, 5 + i) for i in range(n)]
    return labels, _from_edges(len(labels), edges)


def _affine_e(rank: int) -> tuple[list[str], list[list[int]]]:
    if rank == 8:
        size, chain, branch = 9, 8, (8, 5)
    elif rank == 7:
        size, chain, branch = 8, 7, (7, 3)
    else:
        size, chain, branch = 7, 5, (5, 2)
    edges = [(i, i + 1) for i in range(chain - 1)] + [branch]
    if rank == 6:
        edges.append((6, 5))
    return [f"A{i}" for i in range(size)], _from_edges(size, edges)


def build_fiber_config(fiber_type: str, n: int = 0, attach: int = 0) -> FiberConfig:
    if fiber_type not in FIBER_TYPES:
        raise PreconditionError(f"unknown fiber type {fiber_type!r}")

    if fiber_type == "I":
        if n < 2:
            raise PreconditionError("I_n needs n >= 2 (I_1 carries no lattice content)")
        labels = [f"C{i}" for i in range(1, n + 1)]
        gram = [[-2, 2], [2, -2]] if n == 2 else _cycle(n)
    elif fiber_type == "III":
        labels, gram = ["C1", "C2"], [[-2, 2], [2, -2]]
    elif fiber_type == "IV":
        labels, gram = ["C1", "C2", "C3"], _from_edges(3, [(0, 1), (1, 2), (0, 2)])
    elif fiber_type == "I*":
        if n < 0:
            raise PreconditionError("I*_n needs n >= 0")
        labels, gram = _dstar(n)
    else:
        rank = {"II*": 8, "III*": 7, "IV*": 6}[fiber_type]
        labels, gram = _affine_e(rank)

    if fiber_type not in ("I", "I*"):
        n = 0
    if not 0 <= attach < len(labels):
        raise PreconditionError(f"attach index {attach} out of range for {fiber_type} with {len(labels)} components")

    return FiberConfig(
        fiber_type=fiber_type,
        n=n,
        labels=tuple(labels),
        gram=tuple(tuple(row) for row in gram),
        attach=attach,
    )


def parse_fiber_name(name: str, attach: int = 0) -> FiberConfig:
    """Resolve CLI names such as I5, III, IV, Istar2, IIstar, IIIstar, IVstar."""
    match = _NAME_RE.match(name.strip())
    if not match:
        raise PreconditionError(f"unrecognised fiber name {name!r}")
    roman, star, digits = match.groups()
    if star:
        if roman == "I":
            return build_fiber_config("I*", int(digits or 0), attach)
        if digits:
            raise PreconditionError(f"{roman}* takes no index")
        return build_fiber_config(f"{roman}*", 0, attach)
    if roman == "I":
        if not digits:
            raise PreconditionError("I_n needs an index, e.g. I5")
        return build_fiber_config("I", int(digits), attach)
    if digits or roman == "II":
        raise PreconditionError(f"unrecognised fiber name {name!r}")
    return build_fiber_config(roman, 0, attach)


def bundled_fiber_names() -> list[str]:
    names = [f"I{n}" for n in range(2, 9)] + ["III", "IV"]
    names += [f"Istar{n}" for n in range(0, 5)]
    names += ["IIstar", "IIIstar", "IVstar"]
    return names


def _primitive_positive(vector: Sequence[Any]) -> tuple[int, ...]:
    scale = reduce(ilcm, (entry.q for entry in vector), 1)
    ints = [int(entry * scale) for entry in vector]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    ints = [x // g for x in ints]
    if all(x <= 0 for x in ints):
        ints = [-x for x in ints]
    return tuple(ints)


def fiber_class(config: FiberConfig) -> tuple[int, ...]:
    """The primitive positive kernel vector of the Gram (fiber multiplicities)."""
    kernel = Matrix(config.gram).nullspace()
    if len(kernel) != 1:
        raise ConstraintError(f"{config.name}: kernel rank is {len(kernel)}, expected 1")
    mults = _primitive_positive(list(kernel[0]))
    if any(x <= 0 for x in mults):
        raise ConstraintError(f"{config.name}: kernel vector {mults} is not positive")
    return mults


def _check(name: str, passed: bool, details: Any) -> dict[str, Any]:
    return {"check": name, "verdict": "pass" if passed else "fail", "details": details}


def zariski_check(config: FiberConfig) -> dict[str, Any]:
    gram = config.gram
    size = config.size
    checks: list[dict[str, Any]] = []

    diag_ok = all(gram[i][i] == -2 for i in range(size))
    checks.append(_check("diagonal_minus_two", diag_ok, [gram[i][i] for i in range(size)]))

    plus, minus, zero = signature(gram)
    checks.append(_check("negative_semidefinite", plus == 0, {"signature": [plus, minus, zero]}))
    checks.append(_check("kernel_rank_one", zero == 1, {"kernel_rank": zero}))

    kernel: tuple[int, ...] | None = None
    if zero == 1:
        try:
            kernel = fiber_class(config)
        except ConstraintError as exc:
            checks.append(_check("kernel_positive", False, str(exc)))
    if kernel is not None:
        checks.append(_check("kernel_positive", True, list(kernel)))
        products = [sum(gram[i][j] * kernel[j] for j in range(size)) for i in range(size)]
        checks.append(_check("fiber_orthogonal_to_components", not any(products), products))

    passed = all(entry["verdict"] == "pass" for entry in checks)
    return {"fiber": config.name, "passed": passed, "kernel": list(kernel) if kernel else None, "checks": checks}


def _int_matrix(rows: Sequence[Sequence[int]]) -> DomainMatrix:
    return DomainMatrix([[ZZ(x) for x in row] for row in rows], (len(rows), len(rows[0])), ZZ)


def _nonzero_invariants(rows: Sequence[Sequence[int]]) -> list[int]:
    return [int(x) for x in invariant_factors(_int_matrix(rows)) if x != 0]


def discriminant_group(config: FiberConfig) -> dict[str, Any]:
    """Cokernel of the Gram: nonzero invariant factors, torsion part and free rank."""
    invs = _nonzero_invariants(config.gram)
    torsion = [x for x in invs if x > 1]
    order = 1
    for x in torsion:
        order *= x
    return {
        "invariant_factors": invs,
        "torsion": torsion,
        "torsion_order": order,
        "free_rank": config.size - len(invs),
    }


def snf_solvable(gram: Sequence[Sequence[int]], target: Sequence[int]) -> dict[str, Any]:
    augmented = [list(row) + [t] for row, t in zip(gram, target)]
    rank_a = Matrix(gram).rank()
    rank_aug = Matrix(augmented).rank()
    invs_a = _nonzero_invariants(gram)
    invs_aug = _nonzero_invariants(augmented)
    solvable = rank_a == rank_aug and invs_a == invs_aug
    return {
        "solvable": solvable,
        "rank": rank_a,
        "augmented_rank": rank_aug,
        "invariant_factors": invs_a,
        "augmented_invariant_factors": invs_aug,
    }


def rational_coset_solution(config: FiberConfig, target: Sequence[int]) -> tuple[int, ...] | None:
    """The integral solution with m[attach] = 0, or None.

    Over Q the solutions form m0 + Q*fiber_class; with multiplicity one at
    the attach component every integral solution shifts to m[attach] = 0.
    """
    keep = [j for j in range(config.size) if j != config.attach]
    reduced = Matrix([[config.gram[i][j] for j in keep] for i in range(config.size)])
    try:
        solution, params = reduced.gauss_jordan_solve(Matrix(list(target)))
    except ValueError:
        return None
    if params.shape[0] != 0:
        raise ConstraintError(f"{config.name}: reduced system is not of full column rank")
    if any(not entry.is_integer for entry in solution):
        return None
    full = [0] * config.size
    for k, j in enumerate(keep):
        full[j] = int(solution[k])
    return tuple(full)


def _search_order(gram: Sequence[Sequence[int]], start: int) -> list[int]:
    size = len(gram)
    order = [start]
    seen = {start}
    head = 0
    while head < len(order):
        i = order[head]
        head += 1
        for j in range(size):
            if j not in seen and gram[i][j] != 0:
                seen.add(j)
                order.append(j)
    order += [j for j in range(size) if j not in seen]
    return order


def box_search(
    gram: Sequence[Sequence[int]],
    row_ok: Callable[[int, int], bool],
    fixed: int,
    box: int,
    cap: int = DEFAULT_SEARCH_CAP,
    kernel: Sequence[int] | None = None,
) -> tuple[list[tuple[int, ...]], bool]:
    """All m in [-box, box]^k with m[fixed] = 0 and row_ok(i, (gram*m)_i) for every i.

    Variables are assigned in breadth-first order from the fixed component;
    a row is tested as soon as its whole support is assigned. Returns the
    sorted solutions and whether the search finished under the node cap.

    ``kernel`` is for nonnegative row tests only: a positive vector n with
    n^T gram = 0. Then sum_i n_i t_i = 0 for every m, so a partial assignment
    whose tested rows already carry positive weighted slack has no nonnegative
    completion and is cut.
    """
    size = len(gram)
    if kernel is not None:
        if any(w <= 0 for w in kernel) or any(
            sum(kernel[i] * gram[i][j] for i in range(size)) != 0 for j in range(size)
        ):
            raise PreconditionError("kernel must be a positive vector annihilated by the Gram matrix")
    order = _search_order(gram, fixed)
    position = {v: p for p, v in enumerate(order)}
    ready: list[list[int]] = [[] for _ in range(size)]
    for i in range(size):
        support = [j for j in range(size) if gram[i][j] != 0] + [i]
        ready[max(position[j] for j in support)].append(i)

    values = [0] * size
    found: list[tuple[int, ...]] = []
    visited = 0
    complete = True

    def rows_hold(p: int, slack: int) -> int | None:
        for i in ready[p]:
            t = sum(gram[i][j] * values[j] for j in range(size))
            if not row_ok(i, t):
                return None
            if kernel is not None:
                slack += kernel[i] * t
        if kernel is not None and slack > 0:
            return None
        return slack

    def assign(p: int, slack: int) -> None:
        nonlocal visited, complete
        if not complete:
            return
        if p == size:
            found.append(tuple(values))
            return
        var = order[p]
        candidates = [0] if var == fixed else range(-box, box + 1)
        for value in candidates:
            visited += 1
            if visited > cap:
                complete = False
                return
            values[var] = value
            held = rows_hold(p, slack)
            if held is not None:
                assign(p + 1, held)
        values[var] = 0

    assign(0, 0)
    return sorted(found), complete


def slack_patterns(mults: Sequence[int], attach: int) -> list[tuple[int, ...]]:
    """Nonnegative t off the attach component with sum n_i t_i = n_attach, t_attach = -1."""
    others = [i for i in range(len(mults)) if i != attach]
    target = mults[attach]
    patterns: list[tuple[int, ...]] = []

    def extend(k: int, remaining: int, current: list[int]) -> None:
        if k == len(others):
            if remaining == 0:
                t = [0] * len(mults)
                t[attach] = -1
                for idx, value in zip(others, current):
                    t[idx] = value
                patterns.append(tuple(t))
            return
        weight = mults[others[k]]
        for value in range(remaining // weight + 1):
            extend(k + 1, remaining - value * weight, current + [value])

    extend(0, target, [])
    return sorted(patterns, reverse=True)


@dataclass(frozen=True)
class ForcedMultipleReport:
    fiber: str
    forced: bool
    patterns_checked: list[tuple[int, ...]]
    certificates: list[dict[str, Any]]
    nonneg_case: dict[str, Any] = field(default_factory=dict)
    cokernel: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "fiber": self.fiber,
            "forced": self.forced,
            "patterns_checked": [list(p) for p in self.patterns_checked],
            "certificates": self.certificates,
            "nonneg_case": self.nonneg_case,
            "cokernel": self.cokernel,
        }


def _pattern_certificate(config: FiberConfig, pattern: tuple[int, ...], box: int, cap: int) -> dict[str, Any]:
    snf = snf_solvable(config.gram, pattern)
    coset = rational_coset_solution(config, pattern)
    hits, complete = box_search(config.gram, lambda i, t: t == pattern[i], config.attach, box, cap)

    expect_in_box = coset is not None and max(abs(x) for x in coset) <= box
    agree = snf["solvable"] == (coset is not None)
    if complete:
        agree = agree and (bool(hits) == expect_in_box)
    return {
        "pattern": list(pattern),
        "snf": snf,
        "rational_solution": list(coset) if coset is not None else None,
        "box_solutions": [list(h) for h in hits],
        "box_complete": complete,
        "verdicts_agree": agree,
    }


def forced_multiple_check(
    config: FiberConfig,
    box: int = DEFAULT_BOX,
    cap: int = DEFAULT_SEARCH_CAP,
    workers: int = 1,
) -> ForcedMultipleReport:
    zariski = zariski_check(config)
    if not zariski["passed"]:
        raise PreconditionError(f"{config.name} fails Zariski's lemma; forced-multiple check does not apply")
    mults = config.multiplicities
    if mults[config.attach] != 1:
        raise PreconditionError(
            f"{config.name}: attach component {config.labels[config.attach]} has multiplicity {mults[config.attach]}"
        )

    log(f"Forced-multiple check for {config.name}: box {box}, workers {workers}")

    nonneg_hits, nonneg_complete = box_search(
        config.gram, lambda i, t: t >= 0, config.attach, box, cap, kernel=mults
    )
    only_zero = all(not any(h) for h in nonneg_hits)
    nonneg_case = {
        "solutions_with_zero_attach": [list(h) for h in nonneg_hits],
        "box": box,
        "complete": nonneg_complete,
        "only_fiber_multiples": only_zero,
    }

    patterns = slack_patterns(mults, config.attach)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        certificates = list(pool.map(lambda p: _pattern_certificate(config, p, box, cap), patterns))

    forced = only_zero and all(not cert["snf"]["solvable"] for cert in certificates)
    if not all(cert["verdicts_agree"] for cert in certificates):
        raise ConstraintError(f"{config.name}: Smith normal form and search verdicts disagree")

    return ForcedMultipleReport(
        fiber=config.name,
        forced=forced,
        patterns_checked=patterns,
        certificates=certificates,
        nonneg_case=nonneg_case,
        cokernel=discriminant_group(config),
    )
