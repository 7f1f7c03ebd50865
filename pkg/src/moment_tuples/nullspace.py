"""Exact nullspace of sparse integer matrices via fraction-free elimination.

Rows are dicts mapping column index to a Python int, so everything stays
exact regardless of magnitude.  Rows are gcd-reduced after every update to
keep entries small.  The returned basis is canonicalized (reduced row
echelon form of the spanning set, scaled to primitive integers, first
nonzero entry positive), so it is unique for the subspace and therefore
reproducible across runs, platforms and pivot orders.
"""
from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "integer_nullspace",
    "canonical_subspace_basis",
    "primitive_integer_vector",
    "reduce_against_basis",
]

Row = dict[int, int]


def _gcd_reduce(row: Row) -> None:
    g = 0
    for v in row.values():
        g = math.gcd(g, abs(v))
        if g == 1:
            return
    if g > 1:
        for c in row:
            row[c] //= g


def _eliminate(rows: list[Row], ncols: int) -> list[tuple[int, Row]]:
    """Forward elimination; returns (pivot column, row) pairs.

    Columns are processed from the highest index down and, within a column,
    the sparsest row with a unit coefficient is preferred.  On the block
    systems produced upstream this ordering performs the natural
    substitution of dependent coefficient blocks first, which keeps fill-in
    and integer growth low.  The choice only affects speed: the caller
    canonicalizes the resulting basis.
    """
    by_col: dict[int, set[int]] = {}
    active: dict[int, Row] = {}
    for i, row in enumerate(rows):
        _gcd_reduce(row)
        if row:
            active[i] = row
            for c in row:
                by_col.setdefault(c, set()).add(i)

    def detach(i: int, row: Row) -> None:
        for c in row:
            members = by_col.get(c)
            if members is not None:
                members.discard(i)

    pivots: list[tuple[int, Row]] = []
    for col in range(ncols - 1, -1, -1):
        members = by_col.get(col)
        if not members:
            continue
        piv_i = min(
            members,
            key=lambda i: (abs(active[i][col]) != 1, len(active[i]), i),
        )
        piv = active.pop(piv_i)
        detach(piv_i, piv)
        pv = piv[col]
        for i in sorted(members):
            row = active[i]
            rv = row.pop(col)
            detach(i, row)
            # row := pv * row - rv * piv  (kills column col, stays integer)
            if pv != 1:
                for c in row:
                    row[c] *= pv
            for c, v in piv.items():
                if c == col:
                    continue
                nv = row.get(c, 0) - v * rv
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            _gcd_reduce(row)
            if row:
                for c in row:
                    by_col.setdefault(c, set()).add(i)
            else:
                del active[i]
        pivots.append((col, piv))
    return pivots


def integer_nullspace(rows: list[Row], ncols: int) -> list[tuple[Fraction, ...]]:
    """Canonical basis of {x : Ax = 0} for integer A given as sparse rows."""
    pivots = _eliminate([dict(r) for r in rows], ncols)
    pivot_cols = {col for col, _ in pivots}
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    # Back-substitute one vector per free column.  Pivots were produced in
    # descending column order, so iterating them in reverse (ascending)
    # resolves each pivot variable after everything below it is known.
    basis = []
    for f in free_cols:
        x: dict[int, Fraction] = {f: Fraction(1)}
        for col, row in reversed(pivots):
            s = Fraction(0)
            for c, v in row.items():
                if c == col:
                    continue
                xc = x.get(c)
                if xc is not None:
                    s += v * xc
            if s:
                x[col] = -s / row[col]
        basis.append(tuple(x.get(c, Fraction(0)) for c in range(ncols)))
    return canonical_subspace_basis(basis)


def canonical_subspace_basis(
    vectors: list[tuple[Fraction, ...]],
) -> list[tuple[Fraction, ...]]:
    """Unique representative basis of span(vectors): RREF rows, primitive integers."""
    work = [list(v) for v in vectors if any(v)]
    if not work:
        return []
    ncols = len(work[0])
    rref: list[tuple[int, list[Fraction]]] = []
    for row in work:
        for col, prow in rref:
            f = row[col]
            if f:
                for c in range(ncols):
                    if prow[c]:
                        row[c] -= f * prow[c]
        lead = next((c for c in range(ncols) if row[c]), None)
        if lead is None:
            continue
        inv = row[lead]
        row = [v / inv for v in row]
        for _, prow in rref:
            f = prow[lead]
            if f:
                for c in range(ncols):
                    if row[c]:
                        prow[c] -= f * row[c]
        rref.append((lead, row))
    rref.sort(key=lambda t: t[0])
    return [primitive_integer_vector(row) for _, row in rref]


def primitive_integer_vector(vec) -> tuple[Fraction, ...]:
    """Scale a rational vector to coprime integers with positive first nonzero."""
    vec = [Fraction(v) for v in vec]
    denom = 1
    for v in vec:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    ints = [int(v * denom) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v), 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(Fraction(v) for v in ints)


def reduce_against_basis(
    vector, basis: list[tuple[Fraction, ...]]
) -> tuple[Fraction, ...]:
    """Exact remainder of ``vector`` after elimination by an RREF basis.

    A zero remainder certifies membership of the vector in the span.
    """
    rem = [Fraction(v) for v in vector]
    for brow in basis:
        lead = next((c for c, v in enumerate(brow) if v), None)
        if lead is None or not rem[lead]:
            continue
        f = rem[lead] / brow[lead]
        for c, v in enumerate(brow):
            if v:
                rem[c] -= f * v
    return tuple(rem)
