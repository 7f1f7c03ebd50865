"""Discovery of discrete mirror planes around a known symmetry axis.

Objects with b-fold symmetry expose their axis through the tuple analysis,
but the individual mirror planes need a local search: for plane normals
perpendicular to the axis, reflect the cloud across the candidate plane and
score it by the RMS nearest-neighbor distance to the original points.  The
score is exactly zero when the reflected samples are themselves samples, so
seeding the 1-D search on the axis-constrained circle finds every plane in
a handful of iterations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .moments import PointCloud

__all__ = [
    "CandidatePlane",
    "NeighborIndex",
    "RefinementConfig",
    "RefinementResult",
    "build_neighbor_index",
    "reflection_residual",
    "refine_planes",
    "random_plane_search",
]


@dataclass(frozen=True)
class CandidatePlane:
    """A mirror-plane candidate through the centroid.

    When ``axis`` is given the plane is required to contain it (normal
    perpendicular to the axis within 1e-9).
    """

    normal: np.ndarray
    score: float = float("nan")
    iterations: int = 0
    axis: np.ndarray | None = None

    def __post_init__(self) -> None:
        nrm = np.asarray(self.normal, dtype=np.float64)
        length = np.linalg.norm(nrm)
        if length == 0.0:
            raise ValueError("plane normal must be nonzero")
        nrm = nrm / length
        nrm.setflags(write=False)
        object.__setattr__(self, "normal", nrm)
        if self.axis is not None:
            ax = np.asarray(self.axis, dtype=np.float64)
            ax = ax / np.linalg.norm(ax)
            ax.setflags(write=False)
            object.__setattr__(self, "axis", ax)
            if abs(float(nrm @ ax)) > 1e-9:
                raise ValueError(
                    "plane normal must be perpendicular to the axis "
                    "(the plane must contain the axis)"
                )

    def to_dict(self) -> dict:
        return {
            "normal": [float(v) for v in self.normal],
            "score": float(self.score),
            "iterations": self.iterations,
        }


class NeighborIndex:
    """Exact Euclidean nearest-neighbor queries over a fixed point set."""

    def __init__(self, points: np.ndarray):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("neighbor index needs a non-empty (N, n) array")
        self._tree = cKDTree(pts)
        self.points = pts

    def query(self, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Distances and indices of the nearest stored point for each query row."""
        d, i = self._tree.query(np.asarray(queries, dtype=np.float64), k=1)
        return np.atleast_1d(d), np.atleast_1d(i)


def build_neighbor_index(cloud: PointCloud) -> NeighborIndex:
    return NeighborIndex(cloud.points)


def reflection_residual(
    cloud: PointCloud,
    plane: CandidatePlane,
    index: NeighborIndex | None = None,
    normals: np.ndarray | None = None,
) -> float:
    """RMS reflect-and-match score of a candidate mirror plane.

    Every point is reflected across the plane (through the origin of the
    centered cloud) and matched to its nearest original point.  With
    ``normals`` supplied (per-point unit orientations), distances are
    measured along the matched point's normal instead of point-to-point.
    Zero iff the plane is an exact symmetry of the sampled set.
    """
    if index is None:
        index = build_neighbor_index(cloud)
    nrm = plane.normal
    reflected = cloud.points - 2.0 * np.outer(cloud.points @ nrm, nrm)
    dists, nn = index.query(reflected)
    if normals is not None:
        n_arr = np.asarray(normals, dtype=np.float64)
        if n_arr.shape != cloud.points.shape:
            raise ValueError("normals must match the point array shape")
        delta = reflected - index.points[nn]
        dists = np.abs(np.sum(delta * n_arr[nn], axis=1))
    return float(np.sqrt(np.mean(dists**2)))


@dataclass(frozen=True)
class RefinementConfig:
    grid_step_deg: float = 2.0
    min_angular_separation_deg: float = 5.0
    accept_residual: float = 0.02  # fraction of the cloud RMS radius
    max_iters: int = 20
    angle_tolerance_deg: float = 0.01
    # Fraction of grid samples below the acceptance score beyond which the
    # residual is considered flat (continuous rotational symmetry).
    continuous_fraction: float = 0.9

    def __post_init__(self) -> None:
        if self.grid_step_deg <= 0 or self.max_iters < 0:
            raise ValueError("invalid refinement configuration")

    def to_dict(self) -> dict:
        return {
            "grid_step_deg": self.grid_step_deg,
            "min_angular_separation_deg": self.min_angular_separation_deg,
            "accept_residual": self.accept_residual,
            "max_iters": self.max_iters,
            "angle_tolerance_deg": self.angle_tolerance_deg,
            "continuous_fraction": self.continuous_fraction,
        }


@dataclass(frozen=True)
class RefinementResult:
    planes: tuple[CandidatePlane, ...]
    continuous_symmetry: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "planes": [p.to_dict() for p in self.planes],
            "continuous_symmetry": self.continuous_symmetry,
            "diagnostics": self.diagnostics,
        }


def _axis_frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ax = axis / np.linalg.norm(axis)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(ax)))] = 1.0
    u = np.cross(ax, helper)
    u /= np.linalg.norm(u)
    w = np.cross(ax, u)
    return u, w


GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_descent(f, lo: float, hi: float, max_iters: int, tol: float):
    """Golden-section minimization on [lo, hi]; returns (x, f(x), iterations)."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    iters = 0
    while iters < max_iters and (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        iters += 1
    x = c if fc <= fd else d
    return x, min(fc, fd), iters


def refine_planes(
    cloud: PointCloud,
    axis: np.ndarray,
    b_max: int = 8,
    cfg: RefinementConfig = RefinementConfig(),
) -> RefinementResult:
    """Find up to ``b_max`` mirror planes containing ``axis``.

    The centered cloud is scanned over a uniform angle grid on [0, pi)
    (plane normals perpendicular to the axis, period pi because a plane
    equals its negated normal); golden-section descent refines each local
    grid minimum; near-duplicates are merged and only planes scoring below
    the acceptance threshold survive.
    """
    if cloud.dimension != 3:
        raise ValueError("plane refinement is defined for 3-D clouds")
    if b_max < 1:
        raise ValueError("b_max must be >= 1")
    axis = np.asarray(axis, dtype=np.float64)
    index = build_neighbor_index(cloud)
    u, w = _axis_frame(axis)
    rms = cloud.rms_radius()
    accept = cfg.accept_residual * rms

    def residual_at(theta: float) -> float:
        nrm = math.cos(theta) * u + math.sin(theta) * w
        return reflection_residual(
            cloud, CandidatePlane(normal=nrm, axis=axis), index
        )

    step = math.radians(cfg.grid_step_deg)
    thetas = np.arange(0.0, math.pi, step)
    scores = np.array([residual_at(t) for t in thetas])

    below = scores <= accept
    continuous = bool(np.mean(below) >= cfg.continuous_fraction)
    diagnostics = {
        "grid_points": len(thetas),
        "grid_min": float(np.min(scores)),
        "grid_max": float(np.max(scores)),
        "grid_fraction_below_accept": float(np.mean(below)),
        "accept_threshold": accept,
        "cloud_rms_radius": rms,
    }
    if continuous:
        return RefinementResult((), True, diagnostics)

    m = len(thetas)
    candidates = []
    for i in range(m):
        if scores[i] <= scores[(i - 1) % m] and scores[i] <= scores[(i + 1) % m]:
            theta0 = float(thetas[i])
            x, fx, iters = _golden_descent(
                residual_at,
                theta0 - step,
                theta0 + step,
                cfg.max_iters,
                math.radians(cfg.angle_tolerance_deg),
            )
            candidates.append((fx, x % math.pi, iters))

    candidates.sort()
    min_sep = math.radians(cfg.min_angular_separation_deg)
    kept: list[tuple[float, float, int]] = []
    for fx, x, iters in candidates:
        separation = lambda a, b: min((a - b) % math.pi, (b - a) % math.pi)
        if any(separation(x, kx) < min_sep for _, kx, _ in kept):
            continue
        kept.append((fx, x, iters))

    planes = tuple(
        CandidatePlane(
            normal=math.cos(x) * u + math.sin(x) * w,
            score=fx,
            iterations=iters,
            axis=axis,
        )
        for fx, x, iters in kept
        if fx <= accept
    )[:b_max]
    diagnostics["candidates_after_dedup"] = len(kept)
    return RefinementResult(planes, False, diagnostics)


def random_plane_search(
    cloud: PointCloud,
    n_seeds: int,
    iters: int,
    rng: np.random.Generator,
    accept_residual: float = 0.02,
) -> list[CandidatePlane]:
    """Budget-matched baseline: local compass search from random unconstrained normals.

    Each seed is a uniformly random plane normal (not required to contain
    any axis).  One iteration evaluates four perturbed normals in the
    tangent directions and moves to the best, halving the step.  Used to
    measure how much the axis-constrained seeding buys.
    """
    index = build_neighbor_index(cloud)
    rms = cloud.rms_radius()
    out = []
    for _ in range(n_seeds):
        nrm = rng.normal(size=3)
        nrm /= np.linalg.norm(nrm)
        step = math.radians(10.0)
        score = reflection_residual(cloud, CandidatePlane(normal=nrm), index)
        for _ in range(iters):
            t1 = np.cross(nrm, [1.0, 0.0, 0.0])
            if np.linalg.norm(t1) < 1e-6:
                t1 = np.cross(nrm, [0.0, 1.0, 0.0])
            t1 /= np.linalg.norm(t1)
            t2 = np.cross(nrm, t1)
            best = (score, nrm)
            for direction in (t1, -t1, t2, -t2):
                cand = nrm + math.tan(step) * direction
                cand /= np.linalg.norm(cand)
                s = reflection_residual(cloud, CandidatePlane(normal=cand), index)
                if s < best[0]:
                    best = (s, cand)
            score, nrm = best
            step /= 2.0
        if score <= accept_residual * rms:
            out.append(CandidatePlane(normal=nrm, score=score, iterations=iters))
    return out
