"""Self-contained synthetic shapes for tests, demos and CLI fixtures.

Each generator is deterministic given a seed.  Shapes with an intended
symmetry are built by orbiting base samples under the exact symmetry group,
so reflected or rotated sample points are themselves sample points and the
symmetry holds to machine precision, not just statistically.  Surfaces of
revolution are sampled on rings of K equally spaced angles: discrete ring
sums of coordinate monomials up to order K-1 match the continuous circle,
so every moment order used here behaves as fully rotation invariant.
"""
from __future__ import annotations

import numpy as np

from .moments import DensityImage, PointCloud

__all__ = [
    "rect_image",
    "mug_cloud",
    "bottle_cloud",
    "table_cloud",
    "camera_cloud",
    "make_shape",
    "SHAPE_NAMES",
    "RECT_VARIANTS",
]

RECT_VARIANTS = ("point", "mirror-x", "mirror-y", "asym")

_RING_K = 36  # supports exact rotational invariance for moment orders < 36


def rect_image(
    variant: str = "mirror-x", width: int = 96, height: int = 72
) -> DensityImage:
    """Rectangle raster with a controllable symmetry class.

    ``point``: plain centered rectangle (point symmetric).
    ``mirror-x``: rectangle plus a disc centered on the horizontal midline
    (single mirror line along x).
    ``mirror-y``: same with the disc on the vertical midline.
    ``asym``: disc placed off both midlines (no symmetry).
    """
    if variant not in RECT_VARIANTS:
        raise ValueError(f"unknown rect variant {variant!r}; options: {RECT_VARIANTS}")
    px = np.zeros((height, width))
    rect_w, rect_h = width // 2, height // 3
    r0 = (height - rect_h) // 2
    c0 = (width - rect_w) // 2
    px[r0 : r0 + rect_h, c0 : c0 + rect_w] = 1.0
    if variant != "point":
        radius = min(width, height) / 7.0
        if variant == "mirror-x":
            cx, cy = c0 + rect_w + radius * 0.7, height / 2.0
        elif variant == "mirror-y":
            cx, cy = width / 2.0, r0 + rect_h + radius * 0.7
        else:
            cx, cy = c0 + rect_w + radius * 0.7, height / 2.0 + rect_h * 0.9
        rows, cols = np.mgrid[0:height, 0:width]
        disc = (cols + 0.5 - cx) ** 2 + (rows + 0.5 - cy) ** 2 <= radius**2
        px[disc] = 1.0
    # Exact discrete mirror symmetry for the mirror variants: symmetrize the
    # raster itself so moments vanish to machine precision, not approximately.
    if variant == "mirror-x":
        px = np.maximum(px, px[::-1, :])
    elif variant == "mirror-y":
        px = np.maximum(px, px[:, ::-1])
    elif variant == "point":
        px = np.maximum(px, px[::-1, ::-1])
    return DensityImage(width=width, height=height, pixels=px)


def _revolution_rings(profile, z_values, k: int = _RING_K) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(k) / k
    pts = []
    for z in z_values:
        r = profile(z)
        if r <= 0:
            continue
        pts.append(
            np.column_stack(
                [r * np.cos(angles), r * np.sin(angles), np.full(k, z)]
            )
        )
    return np.vstack(pts)


def mug_cloud(n_points: int = 6000, seed: int = 0) -> PointCloud:
    """Cylinder with bottom disk and a side handle; exact mirror across y=0.

    Every sample is emitted together with its y-negated image, so the
    reflection across the x-z plane is an exact symmetry of the sample set.
    The bottom disk and the z-asymmetric handle break all other near
    symmetries, keeping the in-plane singular values well separated from
    each other.
    """
    rng = np.random.default_rng(seed)
    mirror = np.array([1.0, -1.0, 1.0])

    half_body = max(n_points // 5, 4)
    theta = rng.uniform(0.0, np.pi, half_body)  # upper half only
    z = rng.uniform(-1.0, 1.0, half_body)
    body_up = np.column_stack([np.cos(theta), np.sin(theta), z])

    half_bottom = max(n_points // 8, 4)
    theta_b = rng.uniform(0.0, np.pi, half_bottom)
    radius_b = np.sqrt(rng.uniform(0.0, 1.0, half_bottom))
    bottom_up = np.column_stack(
        [radius_b * np.cos(theta_b), radius_b * np.sin(theta_b), np.full(half_bottom, -1.0)]
    )

    half_handle = max(n_points // 2 - half_body - half_bottom, 4)
    # torus arc in the x-z plane; the asymmetric arc range breaks the
    # accidental z-mirror a plain cylinder would have
    phi = rng.uniform(-0.35 * np.pi, 0.8 * np.pi, half_handle)
    psi = rng.uniform(0.0, np.pi, half_handle)  # tube angle, upper half
    cx, arc_r, tube_r = 1.05, 0.55, 0.18
    handle_up = np.column_stack(
        [
            cx + (arc_r + tube_r * np.cos(psi)) * np.cos(phi),
            tube_r * np.sin(psi),
            (arc_r + tube_r * np.cos(psi)) * np.sin(phi),
        ]
    )

    upper = np.vstack([body_up, bottom_up, handle_up])
    return PointCloud.from_points(np.vstack([upper, upper * mirror]))


def bottle_cloud(n_rings: int = 160, seed: int = 0, ring_samples: int = _RING_K) -> PointCloud:
    """Surface of revolution about z with a bottle-like (z-asymmetric) profile.

    ``ring_samples`` controls the azimuthal density; raise it when the cloud
    feeds nearest-neighbor residuals so that mirror scores stay flat around
    the axis.
    """
    del seed  # deterministic rings; parameter kept for a uniform interface

    def profile(z: float) -> float:
        if z < 0.6:
            return 1.0  # body
        if z < 0.8:
            return 1.0 - 3.5 * (z - 0.6)  # shoulder
        return 0.3  # neck

    z_values = np.linspace(-1.0, 1.2, n_rings)
    return PointCloud.from_points(_revolution_rings(profile, z_values, ring_samples))


def table_cloud(n_points: int = 8000, seed: int = 0) -> PointCloud:
    """Four-legged table with exact 4-fold dihedral symmetry about z.

    Base samples live in one fundamental sector and are orbited under the
    8-element dihedral group (rotations by 90 degrees and the x-mirror), so
    all four vertical mirror planes (normals at 0, 45, 90, 135 degrees to
    the x-axis) are exact symmetries of the sample set.
    """
    rng = np.random.default_rng(seed)
    n_base = max(n_points // 8, 16)

    n_top = n_base // 2
    xy = rng.uniform(0.0, 1.0, (4 * n_top, 2))
    sector = xy[(xy[:, 1] <= xy[:, 0])][:n_top]  # one-eighth of the square top
    top = np.column_stack([sector[:, 0], sector[:, 1], np.full(len(sector), 1.0)])

    n_leg = n_base - len(top)
    # center exactly on the diagonal so the orbit forms 4 legs, not 8
    leg_center = np.array([0.7, 0.7, 0.0])
    leg_angle = rng.uniform(0.0, 2.0 * np.pi, n_leg)
    leg_z = rng.uniform(-1.0, 1.0, n_leg)
    leg = np.column_stack(
        [
            leg_center[0] + 0.08 * np.cos(leg_angle),
            leg_center[1] + 0.08 * np.sin(leg_angle),
            leg_z,
        ]
    )
    base = np.vstack([top, leg])

    rot90 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    mirror = np.diag([1.0, -1.0, 1.0])
    orbit = []
    for k in range(4):
        rk = np.linalg.matrix_power(rot90, k)
        orbit.append(base @ rk.T)
        orbit.append(base @ (rk @ mirror).T)
    return PointCloud.from_points(np.vstack(orbit))


def camera_cloud(n_points: int = 6000, seed: int = 0) -> PointCloud:
    """Reflex-camera-like asymmetric shape: box body, offset lens, corner bump.

    Deliberately has no symmetry at all, so its tuple set has full rank and
    orthogonal transforms are recoverable without ambiguity.
    """
    rng = np.random.default_rng(seed)
    n_body = n_points // 2
    n_lens = n_points // 3
    n_bump = n_points - n_body - n_lens

    body = rng.uniform(-1.0, 1.0, (n_body, 3)) * np.array([1.0, 0.35, 0.6])
    phi = rng.uniform(0.0, 2.0 * np.pi, n_lens)
    depth = rng.uniform(0.35, 0.95, n_lens)
    lens = np.column_stack(
        [
            0.25 + 0.45 * np.cos(phi),
            depth,
            0.05 + 0.45 * np.sin(phi),
        ]
    )
    bump = rng.normal(size=(n_bump, 3)) * 0.12 + np.array([-0.7, 0.1, 0.75])
    return PointCloud.from_points(np.vstack([body, lens, bump]))


SHAPE_NAMES = ("rect", "mug", "bottle", "table", "camera")


def make_shape(name: str, n_points: int = 6000, seed: int = 0, variant: str = "mirror-x"):
    """Dispatch by shape name; returns a DensityImage for rect, else a PointCloud."""
    if name == "rect":
        return rect_image(variant=variant)
    if name == "mug":
        return mug_cloud(n_points, seed)
    if name == "bottle":
        return bottle_cloud(max(n_points // _RING_K, 24), seed)
    if name == "table":
        return table_cloud(n_points, seed)
    if name == "camera":
        return camera_cloud(n_points, seed)
    raise ValueError(f"unknown shape {name!r}; options: {SHAPE_NAMES}")
