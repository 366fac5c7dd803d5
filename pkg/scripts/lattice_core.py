#!/usr/bin/env python3
"""Exact intersection theory on Neron-Severi lattice models of K3 surfaces.

A model is a labeled basis with an even Gram matrix of signature (1, n-1),
a declared list of irreducible (-2)-curves and an optional ample reference
class. Everything is integer arithmetic; signatures are computed by exact
congruence diagonalization over the rationals.

Basis order is (sigma, f, fiber components in declaration order).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Protocol, Sequence

from sympy import Matrix, Rational, ilcm

from errors import ConstraintError, NotDecidable, PreconditionError
from log_utils import log

SECTION_LABEL = "sigma"
FIBER_LABEL = "f"
AMPLE_SEARCH_CAP = 1000


class FiberLike(Protocol):
    name: str
    labels: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    attach: int
    multiplicities: tuple[int, ...]


class EffectiveSide(str, Enum):
    EFFECTIVE = "Effective"
    ANTI_EFFECTIVE = "AntiEffective"
    INDETERMINATE = "Indeterminate"


def signature(gram: Sequence[Sequence[int]]) -> tuple[int, int, int]:
    """Return (n_plus, n_minus, n_zero) of a symmetric integer matrix.

    Symmetric LDL^T with pivoting: a zero diagonal with a nonzero off-diagonal
    entry a_ij is repaired by the congruence e_i -> e_i + e_j.
    """
    a = Matrix(gram)
    n = a.rows
    if a.cols != n or a != a.T:
        raise PreconditionError("signature needs a square symmetric matrix")

    pos = neg = 0
    active = list(range(n))
    while active:
        pivot = next((i for i in active if a[i, i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i, j] != 0), None)
            if pair is None:
                break
            i, j = pair
            a[i, :] = a[i, :] + a[j, :]
            a[:, i] = a[:, i] + a[:, j]
            pivot = i

        d = a[pivot, pivot]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(pivot)
        for i in active:
            if a[i, pivot] != 0:
                factor = Rational(a[i, pivot], d)
                a[i, :] = a[i, :] - factor * a[pivot, :]
                a[:, i] = a[:, i] - factor * a[:, pivot]

    return pos, neg, n - pos - neg


@dataclass(frozen=True)
class FiberBlock:
    """A declared reducible fiber and the classes of its components."""

    config: FiberLike
    component_coeffs: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SurfaceModel:
    basis_labels: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    ell: int
    neg_curve_coeffs: tuple[tuple[int, ...], ...]
    neg_curve_names: tuple[str, ...] = ()
    reference_ample_coeffs: tuple[int, ...] | None = None
    fibers: tuple[FiberBlock, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.basis_labels)
        if len(self.gram) != n or any(len(row) != n for row in self.gram):
            raise PreconditionError(f"Gram matrix must be {n}x{n} to match the basis")
        for i in range(n):
            if self.gram[i][i] % 2 != 0:
                raise PreconditionError(f"Gram diagonal entry {self.basis_labels[i]} is odd; K3 lattices are even")
            for j in range(i + 1, n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise PreconditionError("Gram matrix is not symmetric")
        if self.ell < 1:
            raise PreconditionError("ell must be a positive integer")

        plus, minus, zero = signature(self.gram)
        if (plus, minus, zero) != (1, n - 1, 0):
            raise PreconditionError(f"Gram signature is ({plus}, {minus}, {zero}); expected (1, {n - 1}, 0)")

        if self.neg_curve_names and len(self.neg_curve_names) != len(self.neg_curve_coeffs):
            raise PreconditionError("neg_curve_names must match neg_curve_coeffs")
        for coeffs in self.neg_curve_coeffs:
            if len(coeffs) != n:
                raise PreconditionError("declared curve has the wrong dimension")
            if self._form(coeffs, coeffs) != -2:
                raise PreconditionError(f"declared curve {coeffs} is not a (-2)-class")

        if self.reference_ample_coeffs is not None:
            h = self.reference_ample_coeffs
            if len(h) != n:
                raise PreconditionError("reference ample class has the wrong dimension")
            if self._form(h, h) <= 0:
                raise PreconditionError("reference ample class must have positive square")
            for coeffs in self.neg_curve_coeffs:
                if self._form(h, coeffs) <= 0:
                    raise PreconditionError(f"reference ample class is not positive on curve {coeffs}")

        if self.ell == 1:
            log("Model accepted with ell = 1; Lemma 1 analysis will refuse it")

    def _form(self, x: Sequence[int], y: Sequence[int]) -> int:
        total = 0
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = self.gram[i]
            total += xi * sum(row[j] * yj for j, yj in enumerate(y))
        return total

    @property
    def rank(self) -> int:
        return len(self.basis_labels)

    @property
    def ell_flagged(self) -> bool:
        return self.ell == 1

    def cls(self, coeffs: Iterable[int]) -> "DivisorClass":
        return DivisorClass(self, tuple(int(c) for c in coeffs))

    def zero(self) -> "DivisorClass":
        return self.cls([0] * self.rank)

    def basis_class(self, label: str) -> "DivisorClass":
        if label not in self.basis_labels:
            raise PreconditionError(f"unknown basis label {label!r}")
        idx = self.basis_labels.index(label)
        return self.cls(1 if i == idx else 0 for i in range(self.rank))

    def neg_curves(self) -> list["DivisorClass"]:
        return [self.cls(c) for c in self.neg_curve_coeffs]

    def reference_ample(self) -> "DivisorClass | None":
        if self.reference_ample_coeffs is None:
            return None
        return self.cls(self.reference_ample_coeffs)

    def section(self) -> "DivisorClass":
        return self.basis_class(SECTION_LABEL)

    def fiber(self) -> "DivisorClass | None":
        if FIBER_LABEL not in self.basis_labels:
            return None
        return self.basis_class(FIBER_LABEL)


@dataclass(frozen=True)
class DivisorClass:
    model: SurfaceModel
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.model.rank:
            raise PreconditionError(
                f"class has {len(self.coeffs)} coefficients but the model has rank {self.model.rank}"
            )

    def _same(self, other: "DivisorClass") -> None:
        if other.model is not self.model and other.model != self.model:
            raise PreconditionError("classes belong to different surface models")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.model, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.model, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.model, tuple(-x for x in self.coeffs))

    def __rmul__(self, k: int) -> "DivisorClass":
        return DivisorClass(self.model, tuple(int(k) * x for x in self.coeffs))

    def dot(self, other: "DivisorClass") -> int:
        return pair(self, other)

    def square(self) -> int:
        return pair(self, self)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self) -> str:
        terms: list[str] = []
        for label, c in zip(self.model.basis_labels, self.coeffs):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = label if mag == 1 else f"{mag}{label}"
            terms.append(f"{sign} {body}")
        if not terms:
            return "0"
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def pair(d1: DivisorClass, d2: DivisorClass) -> int:
    d1._same(d2)
    if len(d1.coeffs) != len(d2.coeffs):
        raise PreconditionError("dimension mismatch between classes")
    return d1.model._form(d1.coeffs, d2.coeffs)


def euler_char_divisor(d: DivisorClass) -> int:
    """Riemann-Roch on a K3: chi(O(D)) = 2 + D^2/2."""
    return 2 + d.square() // 2


def is_nef(model: SurfaceModel, d: DivisorClass) -> bool:
    if any(pair(d, c) < 0 for c in model.neg_curves()):
        return False
    f = model.fiber()
    return f is None or pair(d, f) >= 0


def decide_effective_side(d: DivisorClass, h: DivisorClass) -> EffectiveSide:
    chi = euler_char_divisor(d)
    if chi < 1:
        raise NotDecidable(f"chi(O(D)) = {chi} < 1; Riemann-Roch does not force D or -D effective")
    if h.square() <= 0 or any(pair(h, c) < 0 for c in h.model.neg_curves()):
        raise PreconditionError("H is not nef against the declared curves")

    degree = pair(d, h)
    if degree > 0:
        return EffectiveSide.EFFECTIVE
    if degree < 0:
        return EffectiveSide.ANTI_EFFECTIVE
    return EffectiveSide.INDETERMINATE


def polarization(model: SurfaceModel) -> DivisorClass:
    f = model.fiber()
    if f is None:
        raise PreconditionError("model has no fiber class in its basis")
    return model.section() + (model.ell + 1) * f


def class_from_labels(model: SurfaceModel, mapping: Mapping[str, int]) -> DivisorClass:
    coeffs = [0] * model.rank
    for label, value in mapping.items():
        if label not in model.basis_labels:
            raise PreconditionError(f"unknown basis label {label!r}")
        coeffs[model.basis_labels.index(label)] = int(value)
    return model.cls(coeffs)


def rank2_model(ell: int, reference_ample: Sequence[int] | None = (1, 3)) -> SurfaceModel:
    """The lattice U spanned by sigma and f; sigma + 3f is ample for every ell."""
    return SurfaceModel(
        basis_labels=(SECTION_LABEL, FIBER_LABEL),
        gram=((-2, 1), (1, 0)),
        ell=ell,
        neg_curve_coeffs=((1, 0),),
        neg_curve_names=(SECTION_LABEL,),
        reference_ample_coeffs=tuple(reference_ample) if reference_ample is not None else None,
    )


def _fiber_lattice(ell: int, fibers: Sequence[FiberLike]) -> tuple[
    tuple[str, ...], list[list[int]], list[tuple[int, ...]], list[str], list[FiberBlock]
]:
    labels: list[str] = [SECTION_LABEL, FIBER_LABEL]
    owners: list[tuple[int, int]] = []
    for j, fiber in enumerate(fibers, start=1):
        for i, comp in enumerate(fiber.labels):
            if i == fiber.attach:
                continue
            labels.append(f"F{j}.{comp}")
            owners.append((j - 1, i))

    n = len(labels)
    gram = [[0] * n for _ in range(n)]
    gram[0][0], gram[0][1], gram[1][0] = -2, 1, 1
    for p, (fp, ip) in enumerate(owners, start=2):
        for q, (fq, iq) in enumerate(owners, start=2):
            if fp == fq:
                gram[p][q] = fibers[fp].gram[ip][iq]

    neg_coeffs: list[tuple[int, ...]] = [tuple(1 if i == 0 else 0 for i in range(n))]
    neg_names: list[str] = [SECTION_LABEL]
    blocks: list[FiberBlock] = []
    for j, fiber in enumerate(fibers, start=1):
        comps: list[tuple[int, ...]] = []
        for i, comp in enumerate(fiber.labels):
            vec = [0] * n
            if i == fiber.attach:
                vec[1] = 1
                for p, (fp, ip) in enumerate(owners, start=2):
                    if fp == j - 1:
                        vec[p] = -fiber.multiplicities[ip]
            else:
                vec[2 + owners.index((j - 1, i))] = 1
            comps.append(tuple(vec))
            neg_coeffs.append(tuple(vec))
            neg_names.append(f"F{j}.{comp}")
        blocks.append(FiberBlock(config=fiber, component_coeffs=tuple(comps)))

    return tuple(labels), gram, neg_coeffs, neg_names, blocks


def _auto_reference_ample(
    ell: int, labels: tuple[str, ...], gram: list[list[int]], neg_coeffs: list[tuple[int, ...]]
) -> tuple[int, ...]:
    """H' = N*H + f + D, with D positive on the non-attach components."""
    n = len(labels)
    extra = list(range(2, n))
    d_vec = [0] * n
    if extra:
        root = Matrix([[gram[i][j] for j in extra] for i in extra])
        c = root.inv() * Matrix([1] * len(extra))
        scale = 1
        for entry in c:
            scale = ilcm(scale, Rational(entry).q)
        for k, idx in enumerate(extra):
            d_vec[idx] = int(c[k] * scale)

    def form(x: Sequence[int], y: Sequence[int]) -> int:
        return sum(x[i] * gram[i][j] * y[j] for i in range(n) for j in range(n))

    for big_n in range(1, AMPLE_SEARCH_CAP + 1):
        cand = [0] * n
        cand[0] = big_n
        cand[1] = big_n * (ell + 1) + 1
        cand = [x + y for x, y in zip(cand, d_vec)]
        if form(cand, cand) > 0 and all(form(cand, c) > 0 for c in neg_coeffs):
            return tuple(cand)
    raise ConstraintError("could not find an ample reference class for the fibered model")


def fibered_model(
    ell: int,
    fibers: Sequence[FiberLike] = (),
    reference_ample: Sequence[int] | None = None,
) -> SurfaceModel:
    """U plus one negative-definite root lattice per declared reducible fiber."""
    if not fibers and reference_ample is None:
        return rank2_model(ell)

    for fiber in fibers:
        if fiber.multiplicities[fiber.attach] != 1:
            raise PreconditionError(
                f"fiber {fiber.name}: the section must meet a component of multiplicity 1"
            )

    labels, gram, neg_coeffs, neg_names, blocks = _fiber_lattice(ell, fibers)
    if reference_ample is None:
        ample = _auto_reference_ample(ell, labels, gram, neg_coeffs)
    else:
        ample = tuple(int(x) for x in reference_ample)

    return SurfaceModel(
        basis_labels=labels,
        gram=tuple(tuple(row) for row in gram),
        ell=ell,
        neg_curve_coeffs=tuple(neg_coeffs),
        neg_curve_names=tuple(neg_names),
        reference_ample_coeffs=ample,
        fibers=tuple(blocks),
    )
