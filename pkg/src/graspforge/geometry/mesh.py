"""Triangle mesh container, OBJ/OFF ingestion, and load-time cleanup.

All lengths are meters. Faces with more than three vertices are split into
a fan anchored at the first vertex, so a quad (v0, v1, v2, v3) becomes
(v0, v1, v2) and (v0, v2, v3), i.e. a split along the (0, 2) diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..errors import EmptyMesh, ParseError

# Vertices closer than this are merged at load time.
MERGE_TOLERANCE = 1e-9
# Triangles with less area than this are dropped as degenerate.
MIN_TRIANGLE_AREA = 1e-15


@dataclass(frozen=True)
class TriangleMesh:
    """Immutable triangle mesh with cleanup applied at construction.

    Attributes:
        vertices: (V, 3) float64 positions, meters.
        triangles: (T, 3) int vertex indices.
        scale: uniform scale factor already applied to the vertices.
        watertight: True iff every edge is shared by exactly two triangles
            with consistent orientation.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    scale: float = 1.0
    watertight: bool = field(default=False)

    @staticmethod
    def from_arrays(vertices, triangles, scale: float = 1.0) -> "TriangleMesh":
        """Build a mesh from raw arrays, applying merge/degeneracy cleanup."""
        if scale <= 0.0:
            raise ValueError(f"scale must be positive, got {scale}")
        vertices = np.asarray(vertices, dtype=float).reshape(-1, 3) * scale
        triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise ParseError("triangle index out of range")
        vertices, triangles = _merge_duplicate_vertices(vertices, triangles)
        triangles = _drop_degenerate(vertices, triangles)
        if len(triangles) == 0:
            raise EmptyMesh("no valid triangles after cleanup")
        used = np.zeros(len(vertices), dtype=bool)
        used[triangles.ravel()] = True
        if not used.all():
            remap = np.cumsum(used) - 1
            vertices = vertices[used]
            triangles = remap[triangles]
        vertices = np.ascontiguousarray(vertices)
        vertices.setflags(write=False)
        triangles = np.ascontiguousarray(triangles)
        triangles.setflags(write=False)
        return TriangleMesh(
            vertices=vertices,
            triangles=triangles,
            scale=float(scale),
            watertight=_is_watertight(triangles),
        )

    @property
    def triangle_vertices(self) -> np.ndarray:
        """(T, 3, 3) corner positions."""
        return self.vertices[self.triangles]

    def triangle_areas(self) -> np.ndarray:
        tv = self.triangle_vertices
        cross = np.cross(tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def mirrored(self) -> "TriangleMesh":
        """Reflection across the x=0 plane; winding reversed to keep normals outward."""
        verts = self.vertices.copy()
        verts[:, 0] = -verts[:, 0]
        tris = self.triangles[:, ::-1]
        out = TriangleMesh.from_arrays(verts, tris, scale=1.0)
        return replace(out, scale=self.scale)


def _merge_duplicate_vertices(vertices: np.ndarray, triangles: np.ndarray):
    if len(vertices) == 0:
        return vertices, triangles
    quantized = np.round(vertices / MERGE_TOLERANCE).astype(np.int64)
    _, first, inverse = np.unique(
        quantized, axis=0, return_index=True, return_inverse=True
    )
    if len(first) == len(vertices):
        return vertices, triangles
    return vertices[first], inverse[triangles]


def _drop_degenerate(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    if len(triangles) == 0:
        return triangles
    distinct = (
        (triangles[:, 0] != triangles[:, 1])
        & (triangles[:, 1] != triangles[:, 2])
        & (triangles[:, 0] != triangles[:, 2])
    )
    triangles = triangles[distinct]
    if len(triangles) == 0:
        return triangles
    tv = vertices[triangles]
    cross = np.cross(tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0])
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    return triangles[areas > MIN_TRIANGLE_AREA]


def _is_watertight(triangles: np.ndarray) -> bool:
    """Closed and consistently oriented: each directed edge appears exactly
    once and its reverse appears exactly once."""
    if len(triangles) == 0:
        return False
    edges = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
    )
    keys = edges[:, 0].astype(np.int64) * (triangles.max() + 1) + edges[:, 1]
    uniq, counts = np.unique(keys, return_counts=True)
    if counts.max() > 1:
        return False
    rev = edges[:, 1].astype(np.int64) * (triangles.max() + 1) + edges[:, 0]
    return bool(np.isin(rev, uniq).all())


def load_mesh(path, scale: float = 1.0) -> TriangleMesh:
    """Load an OBJ or OFF file and apply uniform scaling plus cleanup.

    Raises ParseError for malformed files and EmptyMesh when no valid
    triangles remain.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"mesh file not found: {path}")
    suffix = path.suffix.lower()
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read mesh file {path}: {exc}") from exc
    if suffix == ".obj":
        vertices, faces = _parse_obj(text, path)
    elif suffix == ".off":
        vertices, faces = _parse_off(text, path)
    else:
        raise ParseError(f"unsupported mesh format: {path.suffix!r}")
    if not vertices:
        raise EmptyMesh(f"{path}: no vertices")
    triangles = _triangulate(faces, len(vertices), path)
    if not triangles:
        raise EmptyMesh(f"{path}: no faces")
    return TriangleMesh.from_arrays(np.array(vertices), np.array(triangles), scale)


def _parse_obj(text: str, path) -> tuple[list, list]:
    vertices: list = []
    faces: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(f"{path}:{lineno}: vertex needs 3 coordinates")
            try:
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad vertex: {exc}") from exc
        elif tag == "f":
            if len(parts) < 4:
                raise ParseError(f"{path}:{lineno}: face needs at least 3 vertices")
            idx = []
            for token in parts[1:]:
                ref = token.split("/")[0]
                try:
                    i = int(ref)
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: bad face index {token!r}") from exc
                # OBJ is 1-based; negative indices count from the end.
                idx.append(i - 1 if i > 0 else len(vertices) + i)
            faces.append(idx)
    return vertices, faces


def _parse_off(text: str, path) -> tuple[list, list]:
    tokens: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise ParseError(f"{path}: missing OFF header")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4  # skip edge count
        vertices = []
        for _ in range(nv):
            vertices.append([float(tokens[pos]), float(tokens[pos + 1]), float(tokens[pos + 2])])
            pos += 3
        faces = []
        for _ in range(nf):
            k = int(tokens[pos])
            faces.append([int(t) for t in tokens[pos + 1 : pos + 1 + k]])
            pos += 1 + k
    except (ValueError, IndexError) as exc:
        raise ParseError(f"{path}: malformed OFF data: {exc}") from exc
    return vertices, faces


def _triangulate(faces: list, n_vertices: int, path) -> list:
    triangles = []
    for face in faces:
        if any(i < 0 or i >= n_vertices for i in face):
            raise ParseError(f"{path}: face index out of range")
        for k in range(1, len(face) - 1):
            triangles.append([face[0], face[k], face[k + 1]])
    return triangles


def save_obj(mesh: TriangleMesh, path) -> None:
    """Write a mesh as Wavefront OBJ (positions only)."""
    path = Path(path)
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    for t in mesh.triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    path.write_text("\n".join(lines) + "\n")
