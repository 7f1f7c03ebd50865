"""Exact integer operators describing how rotational velocity acts on moments.

A rotation generator in the coordinate plane (a, b) moves mass so that
``d/dt x_a = -x_b`` and ``d/dt x_b = +x_a``.  Differentiating the moment sum
gives an exact integer matrix on each fixed-order moment family: the moment
``m_P`` flows to ``-P_a * m_{P - e_a + e_b} + P_b * m_{P - e_b + e_a}``.
Products of moments follow by the Leibniz rule, again with integer
coefficients, which is what makes the downstream nullspace computation exact.

Note on 3-D conventions: the uniform (a, b) rule above reproduces the usual
angular-velocity components for the planes (2, 3) and (1, 2), while (1, 3)
carries the opposite sign from the cyclic 3-D convention.  ``omega_sign_3d``
records that sign; derived tuple spaces do not depend on it.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .moments import (
    MomentVector,
    MultiIndex,
    enumerate_multi_indices,
    index_position,
    multi_index_count,
)

__all__ = [
    "GeneratorId",
    "MomentOperator",
    "BasisSpec",
    "MonomialBasis",
    "MonomialOperator",
    "generators_for_dimension",
    "generator_matrix",
    "plane_rotation",
    "moment_rotation_generator",
    "build_monomial_basis",
    "build_monomial_operator",
    "evaluate_monomials",
    "operator_to_json",
    "operator_from_json",
]


@dataclass(frozen=True, order=True)
class GeneratorId:
    """Rotation plane (axis_a, axis_b), 1-based, with axis_a < axis_b."""

    axis_a: int
    axis_b: int

    def __post_init__(self) -> None:
        if not 1 <= self.axis_a < self.axis_b:
            raise ValueError(f"require 1 <= axis_a < axis_b, got ({self.axis_a}, {self.axis_b})")

    def validate_dimension(self, n: int) -> None:
        if self.axis_b > n:
            raise ValueError(f"generator {self} out of range for dimension {n}")

    @property
    def omega_sign_3d(self) -> int:
        """Sign of this generator relative to the cyclic 3-D angular-velocity basis."""
        return -1 if (self.axis_a, self.axis_b) == (1, 3) else 1

    def __str__(self) -> str:
        return f"({self.axis_a},{self.axis_b})"


def generators_for_dimension(n: int) -> tuple[GeneratorId, ...]:
    """The n(n-1)/2 rotation-plane generators of dimension n, in fixed order."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return tuple(
        GeneratorId(a, b) for a, b in itertools.combinations(range(1, n + 1), 2)
    )


def generator_matrix(n: int, g: GeneratorId) -> np.ndarray:
    """The n x n antisymmetric velocity matrix of generator g (integer entries)."""
    g.validate_dimension(n)
    m = np.zeros((n, n), dtype=np.int64)
    m[g.axis_a - 1, g.axis_b - 1] = -1
    m[g.axis_b - 1, g.axis_a - 1] = 1
    return m


def plane_rotation(n: int, g: GeneratorId, angle: float) -> np.ndarray:
    """Finite rotation exp(angle * G) for the plane generator g."""
    g.validate_dimension(n)
    r = np.eye(n)
    a, b = g.axis_a - 1, g.axis_b - 1
    c, s = math.cos(angle), math.sin(angle)
    r[a, a] = c
    r[b, b] = c
    r[a, b] = -s
    r[b, a] = s
    return r


class _SparseIntMatrix:
    """Minimal sparse integer matrix in triplet form with row access."""

    __slots__ = ("shape", "rows")

    def __init__(self, shape: tuple[int, int], rows: dict[int, dict[int, int]]):
        self.shape = shape
        self.rows = rows

    @classmethod
    def from_triplets(cls, shape, triplets) -> "_SparseIntMatrix":
        rows: dict[int, dict[int, int]] = {}
        for r, c, v in triplets:
            if v == 0:
                continue
            row = rows.setdefault(r, {})
            row[c] = row.get(c, 0) + v
            if row[c] == 0:
                del row[c]
        return cls(tuple(shape), rows)

    def triplets(self) -> list[tuple[int, int, int]]:
        return [
            (r, c, v)
            for r in sorted(self.rows)
            for c, v in sorted(self.rows[r].items())
        ]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        for r, c, v in self.triplets():
            out[r, c] = v
        return out

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros(self.shape[0])
        for r, row in self.rows.items():
            out[r] = sum(v * vec[c] for c, v in row.items())
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, _SparseIntMatrix)
            and self.shape == other.shape
            and self.triplets() == other.triplets()
        )


@dataclass(frozen=True)
class MomentOperator:
    """Integer matrix giving d/dt of each order-p moment under one generator."""

    dimension: int
    order: int
    generator: GeneratorId
    matrix: _SparseIntMatrix

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, moments: MomentVector) -> np.ndarray:
        if moments.dimension != self.dimension or moments.order != self.order:
            raise ValueError("moment vector does not match operator family")
        return self.matrix.apply(moments.values)


def moment_rotation_generator(n: int, p: int, g: GeneratorId) -> MomentOperator:
    """Exact integer operator for the action of generator g on order-p moments."""
    g.validate_dimension(n)
    if p < 0:
        raise ValueError(f"order must be >= 0, got {p}")
    indices = enumerate_multi_indices(n, p)
    a, b = g.axis_a - 1, g.axis_b - 1
    triplets = []
    for r, idx in enumerate(indices):
        e = list(idx.exponents)
        if e[a] >= 1:
            shifted = tuple(
                v - 1 if j == a else v + 1 if j == b else v for j, v in enumerate(e)
            )
            triplets.append((r, index_position(n, p, shifted), -e[a]))
        if e[b] >= 1:
            shifted = tuple(
                v + 1 if j == a else v - 1 if j == b else v for j, v in enumerate(e)
            )
            triplets.append((r, index_position(n, p, shifted), e[b]))
    size = multi_index_count(n, p)
    return MomentOperator(n, p, g, _SparseIntMatrix.from_triplets((size, size), triplets))


@dataclass(frozen=True)
class BasisSpec:
    """Orders and degrees of a moment-monomial vector.

    ``factors`` is a sequence of (order, degree) pairs; the monomials of the
    basis are all products taking ``degree`` moments (with repetition) from
    each order's family.  Factors are canonicalized: sorted by order, same
    orders merged by adding degrees.
    """

    dimension: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        merged: dict[int, int] = {}
        for entry in self.factors:
            p, k = int(entry[0]), int(entry[1])
            # Order-1 factors are admitted so that the first-order degeneracy
            # (central moments of order 1 vanish) can be exercised end to end.
            if p < 1:
                raise ValueError(f"moment order must be >= 1, got {p}")
            if k < 1:
                raise ValueError(f"degree must be >= 1, got {k}")
            merged[p] = merged.get(p, 0) + k
        object.__setattr__(
            self, "factors", tuple(sorted((p, k) for p, k in merged.items()))
        )

    @property
    def total_degree(self) -> int:
        return sum(p * k for p, k in self.factors)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def key(self) -> str:
        return ",".join(f"{p}:{k}" for p, k in self.factors)

    @classmethod
    def parse(cls, dimension: int, text: str) -> "BasisSpec":
        """Parse the CLI syntax ``p:k[,p':k'...]`` (``:k`` optional, default 1)."""
        factors = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                p, k = part.split(":")
            else:
                p, k = part, "1"
            factors.append((int(p), int(k)))
        if not factors:
            raise ValueError(f"empty basis spec: {text!r}")
        return cls(dimension, tuple(factors))

    def __str__(self) -> str:
        return f"{self.dimension}D[{self.key()}]"


# A monomial is a sorted tuple of (order, position) factor slots; repetition
# encodes symmetric powers.
Monomial = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class MonomialBasis:
    """Deduplicated, canonically ordered monomials of a BasisSpec."""

    spec: BasisSpec
    monomials: tuple[Monomial, ...] = field(repr=False, default=())
    _positions: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        per_order = []
        for p, k in self.spec.factors:
            count = multi_index_count(self.spec.dimension, p)
            per_order.append(
                [
                    tuple((p, pos) for pos in combo)
                    for combo in itertools.combinations_with_replacement(range(count), k)
                ]
            )
        monos = tuple(
            tuple(itertools.chain.from_iterable(parts))
            for parts in itertools.product(*per_order)
        )
        object.__setattr__(self, "monomials", monos)
        object.__setattr__(self, "_positions", {m: i for i, m in enumerate(monos)})

    @property
    def size(self) -> int:
        return len(self.monomials)

    def position(self, monomial: Monomial) -> int:
        return self._positions[monomial]

    def monomial_label(self, monomial: Monomial) -> str:
        n = self.spec.dimension
        return "*".join(
            str(enumerate_multi_indices(n, p)[pos]) for p, pos in monomial
        )

    def describe(self) -> list[list[list[int]]]:
        """JSON-friendly monomial list: per monomial, the factor exponent vectors."""
        n = self.spec.dimension
        return [
            [list(enumerate_multi_indices(n, p)[pos].exponents) for p, pos in mono]
            for mono in self.monomials
        ]

    def reflection_parities(self, axis: int) -> np.ndarray:
        """Sign picked up by each monomial when coordinate ``axis`` (1-based) flips."""
        n = self.spec.dimension
        out = np.empty(self.size, dtype=np.int64)
        for i, mono in enumerate(self.monomials):
            total = sum(
                enumerate_multi_indices(n, p)[pos].exponents[axis - 1]
                for p, pos in mono
            )
            out[i] = -1 if total % 2 else 1
        return out


def build_monomial_basis(spec: BasisSpec) -> MonomialBasis:
    """Construct the canonical monomial basis of a spec."""
    return MonomialBasis(spec)


@dataclass(frozen=True)
class MonomialOperator:
    """Integer matrix giving d/dt of each basis monomial under one generator."""

    basis: MonomialBasis
    generator: GeneratorId
    matrix: _SparseIntMatrix

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix.apply(np.asarray(values, dtype=np.float64))

    def row(self, monomial: Monomial) -> dict[Monomial, int]:
        r = self.basis.position(monomial)
        row = self.matrix.rows.get(r, {})
        return {self.basis.monomials[c]: v for c, v in row.items()}


def build_monomial_operator(basis: MonomialBasis, g: GeneratorId) -> MonomialOperator:
    """Leibniz expansion of the generator action over every basis monomial."""
    n = basis.spec.dimension
    g.validate_dimension(n)
    moment_ops = {p: moment_rotation_generator(n, p, g) for p in basis.spec.orders}
    triplets = []
    for r, mono in enumerate(basis.monomials):
        for slot in range(len(mono)):
            p, pos = mono[slot]
            # Iterating slots (not distinct factors) applies the correct
            # multiplicity for repeated factors in symmetric powers.
            for target, coeff in moment_ops[p].matrix.rows.get(pos, {}).items():
                replaced = tuple(sorted(mono[:slot] + ((p, target),) + mono[slot + 1 :]))
                triplets.append((r, basis.position(replaced), coeff))
    size = basis.size
    return MonomialOperator(basis, g, _SparseIntMatrix.from_triplets((size, size), triplets))


def evaluate_monomials(
    basis: MonomialBasis, moments: dict[int, MomentVector]
) -> np.ndarray:
    """Evaluate every basis monomial on the given per-order moment vectors."""
    n = basis.spec.dimension
    for p in basis.spec.orders:
        if p not in moments:
            raise ValueError(f"missing moments of order {p}")
        mv = moments[p]
        if mv.dimension != n or mv.order != p:
            raise ValueError(f"moment vector for order {p} does not match basis")
    if basis.size == 0:
        return np.zeros(0)
    # Every monomial has the same slot layout (orders ascending), so the
    # evaluation vectorizes as a product of gathered value arrays.
    slots = len(basis.monomials[0])
    out = np.ones(basis.size)
    for s in range(slots):
        order = basis.monomials[0][s][0]
        gather = np.fromiter(
            (mono[s][1] for mono in basis.monomials), count=basis.size, dtype=np.int64
        )
        out = out * moments[order].values[gather]
    return out


def operator_to_json(op: MonomialOperator | MomentOperator) -> str:
    """Serialize an operator (and its basis context) with bit-exact integers."""
    if isinstance(op, MonomialOperator):
        doc = {
            "kind": "monomial",
            "dimension": op.basis.spec.dimension,
            "spec": [list(f) for f in op.basis.spec.factors],
            "generator": [op.generator.axis_a, op.generator.axis_b],
            "monomials": op.basis.describe(),
            "entries": op.matrix.triplets(),
        }
    else:
        doc = {
            "kind": "moment",
            "dimension": op.dimension,
            "order": op.order,
            "generator": [op.generator.axis_a, op.generator.axis_b],
            "entries": op.matrix.triplets(),
        }
    return json.dumps(doc)


def operator_from_json(text: str) -> MonomialOperator | MomentOperator:
    doc = json.loads(text)
    gen = GeneratorId(*doc["generator"])
    if doc["kind"] == "moment":
        op = moment_rotation_generator(doc["dimension"], doc["order"], gen)
    elif doc["kind"] == "monomial":
        spec = BasisSpec(doc["dimension"], tuple(tuple(f) for f in doc["spec"]))
        basis = build_monomial_basis(spec)
        if basis.describe() != doc["monomials"]:
            raise ValueError("serialized monomial list does not match canonical basis")
        op = build_monomial_operator(basis, gen)
    else:
        raise ValueError(f"unknown operator kind {doc['kind']!r}")
    if op.matrix.triplets() != [tuple(t) for t in doc["entries"]]:
        raise ValueError("serialized operator entries do not match reconstruction")
    return op
