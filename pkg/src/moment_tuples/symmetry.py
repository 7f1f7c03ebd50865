"""Symmetry classification from the singular-value structure of tuple sets.

Evaluating a battery of derived n-tuples on the central moments of a
centered, scale-normalized distribution gives a T x n matrix of points that
rotates rigidly with the object.  Its SVD separates the symmetry classes:

* all rows ~ 0            -> point symmetry (odd-degree tuples vanish),
* rows confined to a plane -> planar symmetry, normal = last singular vector,
* rows confined to a line  -> axial symmetry, axis = first singular vector,
* otherwise                -> asymmetric.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .derivation import TupleDefinition, evaluate_tuple
from .errors import StateError
from .generators import evaluate_monomials
from .moments import MomentVector

__all__ = [
    "TupleSet",
    "SymmetryReport",
    "Thresholds",
    "DEFAULT_BATTERY_2D",
    "DEFAULT_BATTERY_3D",
    "default_battery",
    "evaluate_tuple_set",
    "classify_symmetry",
    "symmetry_plane",
    "symmetry_axis",
    "reflect_moments",
    "reflection_parity",
    "CLASS_POINT",
    "CLASS_PLANAR",
    "CLASS_AXIAL",
    "CLASS_ASYMMETRIC",
]

CLASS_POINT = "point"
CLASS_PLANAR = "planar"
CLASS_AXIAL = "axial"
CLASS_ASYMMETRIC = "asymmetric"

# Mixed-order batteries used by default: pairing a low even order with a
# higher odd order stabilizes the SVD with rows of complementary
# sensitivity.  Entries are (order, degree) factor lists.
DEFAULT_BATTERY_3D = (
    ((2, 1), (3, 1)),
    ((2, 1), (5, 1)),
    ((4, 1), (3, 1)),
    ((4, 1), (5, 1)),
)
DEFAULT_BATTERY_2D = (
    ((2, 1), (3, 1)),
    ((2, 1), (5, 1)),
    ((4, 1), (3, 1)),
    ((4, 1), (5, 1)),
    ((6, 1), (3, 1)),
    ((6, 1), (5, 1)),
    ((6, 1), (7, 1)),
    ((6, 1), (9, 1)),
    ((8, 1), (7, 1)),
    ((8, 1), (9, 1)),
)


def default_battery(dimension: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    if dimension == 2:
        return DEFAULT_BATTERY_2D
    return DEFAULT_BATTERY_3D


@dataclass(frozen=True)
class Thresholds:
    """Classification thresholds on singular-value ratios.

    ``tau_plane`` and ``tau_axis`` are ratio thresholds (> 1).  The point
    class triggers when the largest singular value falls below
    ``tau_point * 1e-6 * unit``, where unit is the larger of the median
    tuple-row norm and 1 (the natural magnitude for tuples of a unit-RMS
    cloud); an identically zero tuple set is point-symmetric by definition.
    """

    tau_plane: float = 100.0
    tau_axis: float = 100.0
    tau_point: float = 1.0

    def __post_init__(self) -> None:
        if self.tau_plane <= 1 or self.tau_axis <= 1:
            raise ValueError("ratio thresholds must exceed 1")
        if self.tau_point <= 0:
            raise ValueError("tau_point must be positive")

    POINT_FLOOR_COEFF = 1e-6


@dataclass(frozen=True)
class TupleSet:
    """Evaluated n-tuples of one distribution: one row per tuple definition.

    Row order follows the supplied definitions, so tuple sets of two poses
    evaluated with the same battery correspond row by row with no matching
    step.
    """

    dimension: int
    points: np.ndarray  # (T, n)
    provenance: tuple[tuple[str, int], ...]
    scale: float = 1.0

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise ValueError(f"points must be (T, {self.dimension}), got {pts.shape}")
        if pts.shape[0] == 0:
            raise ValueError("tuple set must contain at least one row")
        if len(self.provenance) != pts.shape[0]:
            raise ValueError("provenance length must match row count")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SymmetryReport:
    classification: str
    singular_values: np.ndarray  # descending
    singular_vectors: np.ndarray  # orthonormal columns nu_1 ... nu_n
    ratio_12: float
    ratio_1n: float
    plane_normal: np.ndarray | None
    axis: np.ndarray | None
    thresholds: Thresholds
    per_spec_ratios: dict[str, float] = field(default_factory=dict)
    scale: float = 1.0

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "singular_values": [float(s) for s in self.singular_values],
            "singular_vectors": [
                [float(v) for v in col] for col in self.singular_vectors.T
            ],
            "ratio_sigma1_sigma2": self.ratio_12,
            "ratio_sigma1_sigman": self.ratio_1n,
            "plane_normal": None
            if self.plane_normal is None
            else [float(v) for v in self.plane_normal],
            "axis": None if self.axis is None else [float(v) for v in self.axis],
            "thresholds": {
                "tau_plane": self.thresholds.tau_plane,
                "tau_axis": self.thresholds.tau_axis,
                "tau_point": self.thresholds.tau_point,
            },
            "per_spec_ratios": dict(self.per_spec_ratios),
            "normalization_scale": self.scale,
        }


def evaluate_tuple_set(
    definitions: list[TupleDefinition],
    moments: dict[int, MomentVector],
    scale: float = 1.0,
) -> TupleSet:
    """Evaluate tuple definitions on central moments of one distribution.

    ``moments`` maps order to the central MomentVector of the centered,
    normalized cloud; it must cover every order used by the definitions.
    """
    if not definitions:
        raise ValueError("no tuple definitions supplied")
    n = definitions[0].dimension
    rows = []
    provenance = []
    values_cache: dict[int, np.ndarray] = {}
    for d in definitions:
        if d.dimension != n:
            raise ValueError("tuple definitions mix dimensions")
        key = id(d.basis)
        v = values_cache.get(key)
        if v is None:
            v = evaluate_monomials(d.basis, moments)
            values_cache[key] = v
        rows.append(d.alpha_matrix() @ v)
        provenance.append((d.basis.spec.key(), d.id))
    return TupleSet(n, np.array(rows), tuple(provenance), scale)


def _sign_fix(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    for x in v:
        if abs(x) > tol:
            return v if x > 0 else -v
    return v


def classify_symmetry(
    tuple_set: TupleSet, thresholds: Thresholds = Thresholds()
) -> SymmetryReport:
    """Classify global symmetry from the SVD of the stacked tuple rows.

    Rows are stacked raw (not individually normalized): magnitude balance
    across specs is already handled by evaluating on a unit-RMS cloud.
    """
    n = tuple_set.dimension
    pts = tuple_set.points
    if tuple_set.size < n:
        warnings.warn(
            f"tuple set has {tuple_set.size} rows < dimension {n}; "
            "classification may be underdetermined",
            stacklevel=2,
        )
    _, svals, vt = np.linalg.svd(pts, full_matrices=True)
    svals = np.concatenate([svals, np.zeros(n - len(svals))])
    vecs = vt.T
    vecs = np.column_stack([_sign_fix(vecs[:, j]) for j in range(n)])

    def ratio(lo: float) -> float:
        if lo <= 0.0:
            return float("inf")
        return float(svals[0] / lo)

    r12 = ratio(svals[1])
    r1n = ratio(svals[n - 1])

    row_norms = np.linalg.norm(pts, axis=1)
    unit = max(float(np.median(row_norms)), 1.0)
    floor = thresholds.tau_point * Thresholds.POINT_FLOOR_COEFF * unit

    classification = CLASS_ASYMMETRIC
    if svals[0] < floor:
        classification = CLASS_POINT
    elif n >= 3 and r12 >= thresholds.tau_axis:
        classification = CLASS_AXIAL
    elif r1n >= thresholds.tau_plane and (n == 2 or r12 < thresholds.tau_axis):
        classification = CLASS_PLANAR

    plane_normal = vecs[:, n - 1] if classification == CLASS_PLANAR else None
    axis = _sign_fix(vecs[:, 0]) if classification == CLASS_AXIAL else None

    per_spec: dict[str, float] = {}
    for spec_key in dict.fromkeys(key for key, _ in tuple_set.provenance):
        mask = [k == spec_key for k, _ in tuple_set.provenance]
        sub = pts[np.array(mask)]
        s = np.linalg.svd(sub, compute_uv=False)
        s = np.concatenate([s, np.zeros(n - len(s))])
        per_spec[spec_key] = float("inf") if s[n - 1] <= 0 else float(s[0] / s[n - 1])

    return SymmetryReport(
        classification=classification,
        singular_values=svals,
        singular_vectors=vecs,
        ratio_12=r12,
        ratio_1n=r1n,
        plane_normal=plane_normal,
        axis=axis,
        thresholds=thresholds,
        per_spec_ratios=per_spec,
        scale=tuple_set.scale,
    )


def symmetry_plane(report: SymmetryReport) -> np.ndarray:
    """Unit normal of the detected mirror plane (line normal in 2-D)."""
    if report.classification != CLASS_PLANAR:
        raise StateError(
            f"symmetry plane requires planar classification, got {report.classification}"
        )
    return report.plane_normal


def symmetry_axis(report: SymmetryReport) -> np.ndarray:
    """Unit axis of the detected rotational symmetry (3-D only)."""
    if report.singular_vectors.shape[0] != 3:
        raise StateError("symmetry axis is defined for 3-D reports only")
    if report.classification != CLASS_AXIAL:
        raise StateError(
            f"symmetry axis requires axial classification, got {report.classification}"
        )
    # nu_2 x nu_3 coincides with +-nu_1; the cross product form makes the
    # geometric meaning (intersection of the two small-sigma planes) explicit.
    axis = np.cross(report.singular_vectors[:, 1], report.singular_vectors[:, 2])
    axis = axis / np.linalg.norm(axis)
    return _sign_fix(axis)


def reflect_moments(
    moments: dict[int, MomentVector], axis: int
) -> dict[int, MomentVector]:
    """Transform per-order moments by a sign flip of coordinate ``axis`` (1-based).

    Each moment picks up (-1) raised to its exponent on the flipped axis.
    """
    out = {}
    for p, mv in moments.items():
        signs = np.array(
            [(-1) ** idx.exponents[axis - 1] for idx in mv.indices], dtype=np.float64
        )
        out[p] = MomentVector(mv.dimension, p, mv.values * signs)
    return out


def reflection_parity(
    definitions: list[TupleDefinition],
    moments: dict[int, MomentVector],
    axis: int,
) -> float:
    """Check the algebraic reflection law of tuples on the given moments.

    Reflecting coordinate ``axis`` must negate component ``axis`` of every
    tuple and preserve the others.  Returns the maximum relative deviation.
    """
    worst = 0.0
    for d in definitions:
        x = evaluate_tuple(d, moments)
        x_ref = evaluate_tuple(d, reflect_moments(moments, axis))
        expected = x.copy()
        expected[axis - 1] = -expected[axis - 1]
        denom = max(float(np.linalg.norm(x)), 1e-30)
        worst = max(worst, float(np.linalg.norm(x_ref - expected) / denom))
    return worst
