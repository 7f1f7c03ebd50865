"""End-to-end flows shared by the CLI, the scripts and the test suite.

The canonical analysis path is: center the cloud, normalize its scale,
compute the central moments of every order the tuple battery needs, then
evaluate and classify.  Both poses of an estimation problem run through the
same path, which makes their tuple sets directly comparable.
"""
from __future__ import annotations

import numpy as np

from .derivation import TupleDefinition, derive_tuples_cached
from .generators import BasisSpec
from .moments import PointCloud, center_cloud, compute_raw_moments, normalize_scale
from .symmetry import (
    SymmetryReport,
    Thresholds,
    TupleSet,
    classify_symmetry,
    default_battery,
    evaluate_tuple_set,
)

__all__ = [
    "battery_definitions",
    "tuple_set_of_cloud",
    "analyze_cloud",
]


def battery_definitions(
    dimension: int, specs=None
) -> list[TupleDefinition]:
    """Derive (memoized) all tuples of a battery; defaults per dimension."""
    factor_lists = default_battery(dimension) if specs is None else specs
    defs: list[TupleDefinition] = []
    for factors in factor_lists:
        spec = BasisSpec(dimension, tuple(factors))
        defs.extend(derive_tuples_cached(dimension, spec.factors))
    return defs


def tuple_set_of_cloud(
    cloud: PointCloud, definitions: list[TupleDefinition]
) -> TupleSet:
    """Center, normalize and evaluate the tuple battery on one cloud."""
    centered, _ = center_cloud(cloud)
    normalized, scale = normalize_scale(centered)
    orders = sorted({p for d in definitions for p in d.basis.spec.orders})
    # after centering, raw moments of the normalized cloud are its central moments
    moments = {p: compute_raw_moments(normalized, p) for p in orders}
    return evaluate_tuple_set(definitions, moments, scale=scale)


def analyze_cloud(
    cloud: PointCloud,
    definitions: list[TupleDefinition] | None = None,
    thresholds: Thresholds = Thresholds(),
) -> tuple[SymmetryReport, TupleSet]:
    """Full symmetry analysis of one cloud; returns (report, tuple set)."""
    defs = battery_definitions(cloud.dimension) if definitions is None else definitions
    tuple_set = tuple_set_of_cloud(cloud, defs)
    return classify_symmetry(tuple_set, thresholds), tuple_set


def tuple_rows_csv(tuple_set: TupleSet) -> str:
    """CSV dump of tuple rows with provenance, for external plotting."""
    header = "spec,tuple_id," + ",".join(f"x{i+1}" for i in range(tuple_set.dimension))
    lines = [header]
    for (spec_key, tid), row in zip(tuple_set.provenance, tuple_set.points):
        lines.append(f"{spec_key},{tid}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
