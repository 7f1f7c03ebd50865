"""Orthogonal transform recovery between two poses of the same object.

Because tuple sets of two poses correspond row by row, the rotation or
reflection between the poses is the solution of an orthogonal Procrustes
problem on the two T x n matrices; no point-level correspondence search is
involved.  Symmetric objects make the problem rank-deficient, in which case
the transform is genuinely unobservable and an AmbiguityError is raised
instead of returning an arbitrary completion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguityError
from .symmetry import TupleSet

__all__ = [
    "OrthogonalEstimate",
    "MODE_ROTATION_ONLY",
    "MODE_ALLOW_REFLECTION",
    "estimate_orthogonal",
    "estimate_reflection_composition",
    "alignment_residual",
    "canonical_reflection",
]

MODE_ROTATION_ONLY = "rotation_only"
MODE_ALLOW_REFLECTION = "allow_reflection"

# Below this ratio to the top singular value, a direction of the tuple set
# carries no orientation information.
RANK_TOLERANCE = 1e-8


@dataclass(frozen=True)
class OrthogonalEstimate:
    matrix: np.ndarray
    determinant: int
    residual: float
    mode: str
    det_conflict: bool = False  # rotation_only requested but data prefers a reflection

    def to_dict(self) -> dict:
        return {
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "determinant": self.determinant,
            "residual": self.residual,
            "mode": self.mode,
            "det_conflict": self.det_conflict,
        }


def _check_pair(a: TupleSet, b: TupleSet) -> None:
    if a.dimension != b.dimension:
        raise ValueError("tuple sets have different dimensions")
    if a.size != b.size:
        raise ValueError("tuple sets have different row counts")
    if a.provenance != b.provenance:
        raise ValueError("tuple sets were built from different tuple batteries")


def alignment_residual(a: TupleSet, b: TupleSet, matrix: np.ndarray) -> float:
    """RMS row mismatch of ``matrix @ a`` against ``b``, relative to b's RMS row norm."""
    _check_pair(a, b)
    m = np.asarray(matrix, dtype=np.float64)
    diff = a.points @ m.T - b.points
    rms = float(np.sqrt(np.mean(np.sum(diff**2, axis=1))))
    denom = float(np.sqrt(np.mean(np.sum(b.points**2, axis=1))))
    return rms / max(denom, 1e-30)


def estimate_orthogonal(
    a: TupleSet, b: TupleSet, mode: str = MODE_ROTATION_ONLY
) -> OrthogonalEstimate:
    """Best orthogonal map Q with Q @ a_t ~ b_t over all rows.

    ``rotation_only`` restricts to determinant +1 (sign of the weakest
    singular direction corrected); ``allow_reflection`` searches all of
    O(n).  Requires the source rows to span at least an (n-1)-dimensional
    subspace; below that the transform is unobservable.
    """
    if mode not in (MODE_ROTATION_ONLY, MODE_ALLOW_REFLECTION):
        raise ValueError(f"unknown mode {mode!r}")
    _check_pair(a, b)
    n = a.dimension

    sa = np.linalg.svd(a.points, compute_uv=False)
    sa = np.concatenate([sa, np.zeros(n - len(sa))])
    if sa[0] <= 0.0 or sa[n - 2] < RANK_TOLERANCE * sa[0]:
        raise AmbiguityError(
            "tuple set spans fewer than n-1 directions (symmetric input); "
            "the orthogonal transform is not observable from it"
        )

    corr = a.points.T @ b.points
    u, _, vt = np.linalg.svd(corr)
    q = vt.T @ u.T
    det_free = float(np.linalg.det(q))
    det_conflict = False
    if mode == MODE_ROTATION_ONLY and det_free < 0:
        det_conflict = True
    if mode == MODE_ROTATION_ONLY:
        flip = np.eye(n)
        flip[n - 1, n - 1] = np.sign(np.linalg.det(vt.T @ u.T))
        q = vt.T @ flip @ u.T
    det = int(round(float(np.linalg.det(q))))
    return OrthogonalEstimate(
        matrix=q,
        determinant=det,
        residual=alignment_residual(a, b, q),
        mode=mode,
        det_conflict=det_conflict,
    )


def canonical_reflection(n: int) -> np.ndarray:
    """The canonical single-axis reflection diag(1, -1, 1, ...)."""
    f = np.eye(n)
    f[1, 1] = -1.0
    return f


def estimate_reflection_composition(
    a: TupleSet, b: TupleSet
) -> tuple[np.ndarray, np.ndarray, OrthogonalEstimate]:
    """Factor the estimated orthogonal map as rotation @ canonical reflection.

    Returns (rotation, reflection, estimate).  When the estimate is proper
    the reflection factor is the identity.
    """
    est = estimate_orthogonal(a, b, MODE_ALLOW_REFLECTION)
    n = a.dimension
    if est.determinant < 0:
        f = canonical_reflection(n)
        r = est.matrix @ f  # f is its own inverse
    else:
        f = np.eye(n)
        r = est.matrix
    return r, f, est
