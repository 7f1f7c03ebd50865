"""Readers and writers for the supported geometry formats.

Point clouds: ASCII XYZ (n coordinates per line, optional trailing weight
column) and ASCII PLY (vertex positions only).  Images: PGM, both ASCII
(P2) and binary (P5), scaled to [0, 1].
"""
from __future__ import annotations

import numpy as np

from .moments import DensityImage, PointCloud

__all__ = [
    "load_xyz",
    "save_xyz",
    "load_ply",
    "load_pgm",
    "save_pgm",
    "load_cloud",
]


def load_xyz(path, dimension: int | None = None) -> PointCloud:
    """Load an ASCII XYZ file.

    With ``dimension`` given, each line must carry ``dimension`` coordinates
    or ``dimension + 1`` values (trailing weight).  Without it, the column
    count of the first data line fixes the dimension and no weight column is
    assumed.
    """
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values = [float(tok) for tok in text.split()]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not numeric: {text!r}") from exc
            rows.append((lineno, values))
    if not rows:
        raise ValueError(f"{path}: no data lines")
    ncols = len(rows[0][1])
    dim = ncols if dimension is None else dimension
    has_weights = dimension is not None and ncols == dimension + 1
    if dimension is not None and ncols not in (dimension, dimension + 1):
        raise ValueError(
            f"{path}: expected {dimension} or {dimension + 1} columns, got {ncols}"
        )
    pts, weights = [], []
    for lineno, values in rows:
        if len(values) != ncols:
            raise ValueError(f"{path}:{lineno}: inconsistent column count")
        pts.append(values[:dim])
        weights.append(values[dim] if has_weights else 1.0)
    return PointCloud(dim, np.array(pts), np.array(weights))


def save_xyz(path, cloud: PointCloud, write_weights: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(cloud.size):
            coords = " ".join(repr(float(v)) for v in cloud.points[i])
            if write_weights:
                coords += f" {cloud.weights[i]!r}"
            fh.write(coords + "\n")


def load_ply(path) -> PointCloud:
    """Load vertex positions from an ASCII PLY file (3-D, unit weights)."""
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"ply":
            raise ValueError(f"{path}: not a PLY file")
        fmt = fh.readline().strip()
        if not fmt.startswith(b"format ascii"):
            raise ValueError(f"{path}: only ASCII PLY is supported")
        n_vertices = None
        properties: list[str] = []
        in_vertex_element = False
        while True:
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: missing end_header")
            tokens = line.split()
            if not tokens or tokens[0] == b"comment":
                continue
            if tokens[0] == b"element":
                in_vertex_element = tokens[1] == b"vertex"
                if in_vertex_element:
                    n_vertices = int(tokens[2])
            elif tokens[0] == b"property" and in_vertex_element:
                properties.append(tokens[-1].decode())
            elif tokens[0] == b"end_header":
                break
        if n_vertices is None:
            raise ValueError(f"{path}: no vertex element")
        try:
            cols = [properties.index(name) for name in ("x", "y", "z")]
        except ValueError as exc:
            raise ValueError(f"{path}: vertex element lacks x/y/z properties") from exc
        pts = np.empty((n_vertices, 3))
        for i in range(n_vertices):
            values = fh.readline().split()
            if len(values) < len(properties):
                raise ValueError(f"{path}: truncated vertex data at row {i}")
            pts[i] = [float(values[c]) for c in cols]
    return PointCloud(3, pts, np.ones(n_vertices))


def load_cloud(path, dimension: int | None = None) -> PointCloud:
    """Dispatch on file extension: .ply -> PLY, anything else -> XYZ."""
    if str(path).lower().endswith(".ply"):
        return load_ply(path)
    return load_xyz(path, dimension)


def _read_pgm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """First ``count`` whitespace/comment-separated integer tokens and end offset."""
    tokens: list[int] = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise ValueError("truncated PGM header")
        ch = data[i : i + 1]
        if ch == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            tokens.append(int(data[i:j]))
            i = j
    return tokens, i


def load_pgm(path) -> DensityImage:
    """Load a PGM image (P2 or P5), scaling gray values to [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    (width, height, maxval), offset = _read_pgm_tokens(data[2:], 3)
    offset += 2
    if maxval <= 0:
        raise ValueError(f"{path}: invalid maxval {maxval}")
    n = width * height
    if magic == b"P2":
        values = np.array(data[offset:].split()[:n], dtype=np.float64)
        if values.size != n:
            raise ValueError(f"{path}: expected {n} pixels, got {values.size}")
    else:
        offset += 1  # single whitespace byte after maxval
        dtype = np.uint8 if maxval < 256 else ">u2"
        raw = np.frombuffer(data, dtype=dtype, offset=offset, count=n)
        if raw.size != n:
            raise ValueError(f"{path}: expected {n} pixels, got {raw.size}")
        values = raw.astype(np.float64)
    pixels = (values / maxval).reshape(height, width)
    return DensityImage(width=width, height=height, pixels=pixels)


def save_pgm(path, image: DensityImage, maxval: int = 255) -> None:
    """Write a P2 (ASCII) PGM."""
    gray = np.rint(image.pixels * maxval).astype(int)
    lines = [f"P2\n{image.width} {image.height}\n{maxval}"]
    for row in gray:
        lines.append(" ".join(str(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
