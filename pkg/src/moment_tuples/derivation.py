"""Derivation of equivariant moment n-tuples.

An n-tuple is a vector of n integer-weighted combinations of moment
monomials that transforms under any rotation exactly like a point of the
distribution.  Requiring the time derivative of the candidate tuple to
match the rigid-velocity field for every rotation generator, for every
value of the monomial vector, yields a sparse integer linear system on the
stacked coefficient blocks (alpha_1 ... alpha_n).  Its exact rational
nullspace enumerates all derivable tuples.

Reflection compatibility (component j flips sign when coordinate j flips,
all others persist) is imposed alongside the rotational blocks.  For odd
total degree in dimension >= 3 this is automatic and changes nothing; in
2-D it removes the quarter-turn double cover of the rotational solution
space, matching the counts that hold for full orthogonal equivariance.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import TupleFileError
from .generators import (
    BasisSpec,
    GeneratorId,
    MonomialBasis,
    build_monomial_basis,
    build_monomial_operator,
    evaluate_monomials,
    generator_matrix,
    generators_for_dimension,
)
from .moments import PointCloud, compute_central_moments
from .nullspace import (
    integer_nullspace,
    primitive_integer_vector,
    reduce_against_basis,
)

__all__ = [
    "TupleDefinition",
    "ConstraintSystem",
    "assemble_constraints",
    "exact_nullspace",
    "derive_tuples",
    "derive_tuples_cached",
    "verify_equivariance",
    "evaluate_tuple",
    "save_tuples",
    "load_tuples",
    "tuples_to_document",
    "tuples_from_document",
]


@dataclass(frozen=True)
class TupleDefinition:
    """One derived n-tuple: n integer coefficient vectors over a monomial basis."""

    basis: MonomialBasis
    alphas: tuple[tuple[int, ...], ...]
    id: int

    def __post_init__(self) -> None:
        n = self.basis.spec.dimension
        if len(self.alphas) != n:
            raise ValueError(f"expected {n} coefficient vectors, got {len(self.alphas)}")
        for a in self.alphas:
            if len(a) != self.basis.size:
                raise ValueError("coefficient vector length does not match basis size")

    @property
    def dimension(self) -> int:
        return self.basis.spec.dimension

    def alpha_matrix(self) -> np.ndarray:
        return np.array(self.alphas, dtype=np.float64)

    def concatenated(self) -> tuple[int, ...]:
        return tuple(v for a in self.alphas for v in a)


@dataclass(frozen=True)
class ConstraintSystem:
    """Equivariance constraints for one basis spec.

    ``rows`` holds the rotational blocks: for generator g and component a,
    the block equation  L_g^T alpha_a - sum_b G_g[a,b] alpha_b = 0,
    stacked over all basis monomials; shape (n*P*N) x (n*N) with P
    generators and N monomials.  ``forced_zero_cols`` carries the
    reflection-compatibility conditions, which are single-variable
    constraints alpha_a[mu] = 0 for monomials of mismatched parity.
    """

    spec: BasisSpec
    basis: MonomialBasis
    generators: tuple[GeneratorId, ...]
    rows: tuple = field(repr=False, default=())
    forced_zero_cols: frozenset = field(repr=False, default=frozenset())

    @property
    def shape(self) -> tuple[int, int]:
        n = self.spec.dimension
        N = self.basis.size
        return (n * len(self.generators) * N, n * N)


def assemble_constraints(spec: BasisSpec, flip_generator_signs: bool = False) -> ConstraintSystem:
    """Build the equivariance constraint system for a basis spec.

    ``flip_generator_signs`` negates every generator (velocity matrix and
    induced monomial operator together); the nullspace is provably
    unchanged, and a dedicated test relies on this switch.
    """
    if spec.total_degree % 2 == 0:
        raise ValueError(
            f"total degree {spec.total_degree} is even; only odd-degree bases admit "
            "equivariant tuples (even degrees only reach the null solution)"
        )
    basis = build_monomial_basis(spec)
    n = spec.dimension
    N = basis.size
    gens = generators_for_dimension(n)
    sign = -1 if flip_generator_signs else 1

    rows: list[dict[int, int]] = []
    for g in gens:
        op = build_monomial_operator(basis, g)
        gmat = generator_matrix(n, g)
        # Column access to the operator: entry (nu, mu) contributes to the
        # constraint row indexed by mu with unknown alpha_a[nu].
        cols: dict[int, list[tuple[int, int]]] = {}
        for r, row in op.matrix.rows.items():
            for c, v in row.items():
                cols.setdefault(c, []).append((r, sign * v))
        for a in range(n):
            for mu in range(N):
                row: dict[int, int] = {}
                for nu, v in cols.get(mu, ()):
                    row[a * N + nu] = row.get(a * N + nu, 0) + v
                for b in range(n):
                    gv = sign * int(gmat[a, b])
                    if gv:
                        key = b * N + mu
                        row[key] = row.get(key, 0) - gv
                        if row[key] == 0:
                            del row[key]
                rows.append(row)

    forced = set()
    for a in range(1, n + 1):
        wanted = np.ones(N, dtype=np.int64)
        for axis in range(1, n + 1):
            parities = basis.reflection_parities(axis)
            target = -1 if axis == a else 1
            wanted &= parities == target
        for mu in np.nonzero(~wanted.astype(bool))[0]:
            forced.add((a - 1) * N + int(mu))

    return ConstraintSystem(spec, basis, gens, tuple(rows), frozenset(forced))


def exact_nullspace(system: ConstraintSystem) -> list[tuple[Fraction, ...]]:
    """Canonical exact basis of the constraint nullspace (may be empty)."""
    ncols = system.shape[1]
    rows = [dict(r) for r in system.rows]
    rows.extend({c: 1} for c in sorted(system.forced_zero_cols))
    return integer_nullspace(rows, ncols)


def derive_tuples(spec: BasisSpec) -> list[TupleDefinition]:
    """Derive all equivariant n-tuples of a basis spec.

    Pure integer/rational arithmetic end to end: the result is bit-identical
    across runs and platforms, and each returned coefficient set is exactly
    in the constraint nullspace.
    """
    system = assemble_constraints(spec)
    basis = system.basis
    N = basis.size
    n = spec.dimension
    out = []
    for i, vec in enumerate(exact_nullspace(system)):
        ints = [int(v) for v in primitive_integer_vector(vec)]
        alphas = tuple(tuple(ints[a * N : (a + 1) * N]) for a in range(n))
        out.append(TupleDefinition(basis=basis, alphas=alphas, id=i))
    return out


@lru_cache(maxsize=None)
def derive_tuples_cached(dimension: int, factors: tuple[tuple[int, int], ...]):
    """Memoized derivation keyed by canonical spec content."""
    return tuple(derive_tuples(BasisSpec(dimension, factors)))


def evaluate_tuple(definition: TupleDefinition, moments) -> np.ndarray:
    """Evaluate one tuple on per-order moment vectors; returns an n-vector."""
    v = evaluate_monomials(definition.basis, moments)
    return definition.alpha_matrix() @ v


def _central_moments_map(cloud: PointCloud, orders) -> dict:
    return {p: compute_central_moments(cloud, p) for p in orders}


def verify_equivariance(
    definition: TupleDefinition,
    cloud: PointCloud,
    rotation: np.ndarray,
    eps: float = 1e-15,
) -> float:
    """Relative mismatch between tuple-of-rotated-cloud and rotated-tuple.

    ``rotation`` must be a proper rotation (orthogonal, determinant +1);
    reflections are handled by the symmetry-analysis parity path instead.
    """
    r = np.asarray(rotation, dtype=np.float64)
    n = definition.dimension
    if r.shape != (n, n):
        raise ValueError(f"rotation must be {n}x{n}")
    if np.max(np.abs(r @ r.T - np.eye(n))) > 1e-10:
        raise ValueError("matrix is not orthogonal within 1e-10")
    if np.linalg.det(r) < 0:
        raise ValueError("matrix is a reflection (determinant -1), not a rotation")
    orders = definition.basis.spec.orders
    x0 = evaluate_tuple(definition, _central_moments_map(cloud, orders))
    x1 = evaluate_tuple(definition, _central_moments_map(cloud.transformed(r), orders))
    return float(np.linalg.norm(x1 - r @ x0) / max(np.linalg.norm(x0), eps))


def tuples_to_document(definitions: list[TupleDefinition]) -> dict:
    """JSON document for a collection of derived tuple sets (grouped by spec)."""
    if not definitions:
        raise ValueError("no tuple definitions to serialize")
    dim = definitions[0].dimension
    groups: dict[str, dict] = {}
    for d in definitions:
        if d.dimension != dim:
            raise ValueError("mixed dimensions in one tuple file")
        key = d.basis.spec.key()
        entry = groups.setdefault(
            key,
            {
                "spec": [list(f) for f in d.basis.spec.factors],
                "basis": d.basis.describe(),
                "tuples": [],
            },
        )
        entry["tuples"].append({"id": d.id, "alphas": [list(a) for a in d.alphas]})
    return {"dimension": dim, "sets": list(groups.values())}


def tuples_from_document(doc: dict) -> list[TupleDefinition]:
    try:
        dim = int(doc["dimension"])
        sets = doc["sets"]
    except (KeyError, TypeError) as exc:
        raise TupleFileError(f"malformed tuple document: {exc}") from exc
    out: list[TupleDefinition] = []
    for entry in sets:
        try:
            spec = BasisSpec(dim, tuple(tuple(f) for f in entry["spec"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise TupleFileError(f"malformed spec entry: {exc}") from exc
        basis = build_monomial_basis(spec)
        if basis.describe() != entry["basis"]:
            raise TupleFileError(
                f"basis in file does not match canonical basis for spec {spec.key()}"
            )
        for t in entry["tuples"]:
            alphas = [tuple(int(v) for v in a) for a in t["alphas"]]
            if len(alphas) != dim or any(len(a) != basis.size for a in alphas):
                raise TupleFileError("coefficient block shape mismatch")
            flat = [v for a in alphas for v in a]
            prim = [int(v) for v in primitive_integer_vector(flat)]
            if prim != flat:
                warnings.warn(
                    "tuple coefficients were not primitive; normalized on load",
                    stacklevel=2,
                )
                alphas = [
                    tuple(prim[a * basis.size : (a + 1) * basis.size])
                    for a in range(dim)
                ]
            out.append(TupleDefinition(basis=basis, alphas=tuple(alphas), id=int(t["id"])))
    return out


def save_tuples(path, definitions: list[TupleDefinition]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tuples_to_document(definitions), fh, indent=1)
        fh.write("\n")


def load_tuples(path, dimension: int | None = None) -> list[TupleDefinition]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TupleFileError(f"not valid JSON: {exc}") from exc
    defs = tuples_from_document(doc)
    if dimension is not None and defs and defs[0].dimension != dimension:
        raise TupleFileError(
            f"tuple file is {defs[0].dimension}-dimensional, expected {dimension}"
        )
    return defs


def nullspace_contains(
    basis_vectors: list[tuple[Fraction, ...]], vector
) -> bool:
    """Exact membership test of a vector in the span of an RREF basis."""
    rem = reduce_against_basis(vector, basis_vectors)
    return not any(rem)


def largest_principal_angle(span_a, span_b) -> float:
    """Largest principal angle (radians) between two equal-dimension spans.

    Inputs are sequences of vectors (rows).  Computed through the sine of
    the angle, which stays accurate for nearly identical subspaces where
    the cosine formulation loses half the digits.
    """
    a = np.asarray(span_a, dtype=np.float64)
    b = np.asarray(span_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"span dimensions differ: {a.shape} vs {b.shape}")
    qa, _ = np.linalg.qr(a.T)
    qb, _ = np.linalg.qr(b.T)
    residual = qb - qa @ (qa.T @ qb)
    sines = np.linalg.svd(residual, compute_uv=False)
    return float(np.arcsin(np.clip(np.max(sines, initial=0.0), 0.0, 1.0)))
