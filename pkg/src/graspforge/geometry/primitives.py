"""Procedural primitive meshes used by tests and demos.

All generators return watertight, consistently wound meshes.
"""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh


def icosphere(radius: float = 1.0, subdivisions: int = 3) -> TriangleMesh:
    """Unit icosahedron subdivided and projected onto the sphere."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = list(verts)
    for _ in range(subdivisions):
        midpoint_cache: dict = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint_cache:
                m = verts[i] + verts[j]
                m /= np.linalg.norm(m)
                verts.append(m)
                midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    vertices = np.array(verts) * radius
    return TriangleMesh.from_arrays(vertices, np.array(faces))


def box(size_x: float, size_y: float, size_z: float, segments: int = 4) -> TriangleMesh:
    """Axis-aligned box centered at the origin with subdivided faces."""
    return box_grid(
        np.array([-size_x / 2, -size_y / 2, -size_z / 2]),
        np.array([size_x / 2, size_y / 2, size_z / 2]),
        (segments, segments, segments),
    )


def box_grid(lo: np.ndarray, hi: np.ndarray, segments) -> TriangleMesh:
    """Box spanning [lo, hi] with per-axis face subdivision counts.

    Faces are emitted as outward-wound quads split along the (0, 2)
    diagonal; coincident border vertices are merged by the mesh cleanup.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    nx, ny, nz = (max(1, int(s)) for s in segments)
    verts: list = []
    tris: list = []

    def grid_face(axis, sign):
        # Axes u, v span the face; w is the fixed axis.
        u_axis, v_axis = [(1, 2), (0, 2), (0, 1)][axis]
        nu = (nx, ny, nz)[u_axis]
        nv = (nx, ny, nz)[v_axis]
        base = len(verts)
        for i in range(nu + 1):
            for j in range(nv + 1):
                p = np.empty(3)
                p[axis] = hi[axis] if sign > 0 else lo[axis]
                p[u_axis] = lo[u_axis] + (hi[u_axis] - lo[u_axis]) * i / nu
                p[v_axis] = lo[v_axis] + (hi[v_axis] - lo[v_axis]) * j / nv
                verts.append(p)
        for i in range(nu):
            for j in range(nv):
                a = base + i * (nv + 1) + j
                b = a + (nv + 1)
                quad = (a, b, b + 1, a + 1)
                # Outward orientation depends on which side we are on and on
                # the handedness of (u, v, w) for this axis.
                flip = (sign < 0) ^ (axis == 1)
                q = quad[::-1] if flip else quad
                tris.append((q[0], q[1], q[2]))
                tris.append((q[0], q[2], q[3]))

    for axis in range(3):
        grid_face(axis, +1)
        grid_face(axis, -1)
    return TriangleMesh.from_arrays(np.array(verts), np.array(tris))


def cylinder(radius: float, length: float, sides: int = 48, rings: int = 4) -> TriangleMesh:
    """Closed cylinder along the z axis centered at the origin."""
    sides = max(3, int(sides))
    rings = max(1, int(rings))
    angles = np.linspace(0.0, 2.0 * np.pi, sides, endpoint=False)
    circle = np.stack([np.cos(angles), np.sin(angles)], axis=1) * radius
    zs = np.linspace(-length / 2.0, length / 2.0, rings + 1)
    verts = []
    for z in zs:
        for cx, cy in circle:
            verts.append([cx, cy, z])
    tris = []
    for r in range(rings):
        for s in range(sides):
            a = r * sides + s
            b = r * sides + (s + 1) % sides
            c = a + sides
            d = b + sides
            tris += [(a, b, d), (a, d, c)]
    bottom = len(verts)
    verts.append([0.0, 0.0, -length / 2.0])
    top = len(verts)
    verts.append([0.0, 0.0, length / 2.0])
    last_ring = rings * sides
    for s in range(sides):
        s2 = (s + 1) % sides
        tris.append((bottom, s2, s))
        tris.append((top, last_ring + s, last_ring + s2))
    return TriangleMesh.from_arrays(np.array(verts, dtype=float), np.array(tris))
