"""Proximity, sign, and signed-distance queries over triangle meshes.

Acceleration structures here never change the answer: closest-point queries
prune candidates with a centroid KD-tree plus a circumradius bound that
provably retains the true minimizer, and the inside test for watertight
meshes is plain ray parity evaluated through a 2D bucket grid. Non-watertight
meshes fall back to the generalized winding number with a 0.5 threshold and
the result is flagged approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .mesh import TriangleMesh
from .sampling import SurfaceSamples

# Relative tolerance for treating two candidate distances as tied; ties are
# broken by the lowest element index.
TIE_RTOL = 1e-12


def closest_point_on_triangles(points: np.ndarray, tv: np.ndarray) -> np.ndarray:
    """Closest point on each triangle to each query, elementwise.

    points: (N, 3); tv: (N, 3, 3) triangle corners. Returns (N, 3). Standard
    barycentric region classification; the per-region work stays scalar and a
    single fused evaluation produces the points.
    """
    a, b, c = tv[:, 0], tv[:, 1], tv[:, 2]
    ab = b - a
    ac = c - a
    ap = points - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = points - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = points - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)

    n = len(points)
    v = np.empty(n)
    w = np.empty(n)
    done = np.zeros(n, dtype=bool)

    def assign(mask, v_val, w_val):
        todo = mask & ~done
        if todo.any():
            v[todo] = v_val[todo] if isinstance(v_val, np.ndarray) else v_val
            w[todo] = w_val[todo] if isinstance(w_val, np.ndarray) else w_val
            done[todo] = True

    with np.errstate(invalid="ignore", divide="ignore"):
        assign((d1 <= 0) & (d2 <= 0), 0.0, 0.0)  # vertex A
        assign((d3 >= 0) & (d4 <= d3), 1.0, 0.0)  # vertex B
        assign((d6 >= 0) & (d5 <= d6), 0.0, 1.0)  # vertex C
        vc = d1 * d4 - d3 * d2
        safe = np.where(d1 - d3 == 0.0, 1.0, d1 - d3)
        assign((vc <= 0) & (d1 >= 0) & (d3 <= 0), d1 / safe, 0.0)  # edge AB
        vb = d5 * d2 - d1 * d6
        safe = np.where(d2 - d6 == 0.0, 1.0, d2 - d6)
        assign((vb <= 0) & (d2 >= 0) & (d6 <= 0), 0.0, d2 / safe)  # edge AC
        va = d3 * d6 - d5 * d4
        denom = (d4 - d3) + (d5 - d6)
        safe = np.where(denom == 0.0, 1.0, denom)
        t_bc = (d4 - d3) / safe
        assign((va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0), 1.0 - t_bc, t_bc)  # edge BC
        total = va + vb + vc
        inv = 1.0 / np.where(total == 0.0, 1.0, total)
        assign(np.ones(n, dtype=bool), vb * inv, vc * inv)  # interior
    return a + v[:, None] * ab + w[:, None] * ac


class ParityGrid:
    """Vertical-ray crossing counter over a triangle soup.

    Triangles are bucketed on a uniform 2D grid in the xy plane; a query
    point is inside when the number of upward (+z) crossings is odd. Exact
    boundary hits in the projection are resolved by retrying that point at a
    deterministically jittered position, falling back to winding numbers.
    """

    def __init__(self, vertices: np.ndarray, triangles: np.ndarray):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        tv = self.vertices[self.triangles]
        self._tv = tv
        # Flat per-corner coordinate arrays make the crossing test gathers cheap.
        self._ax, self._ay, self._az = tv[:, 0, 0], tv[:, 0, 1], tv[:, 0, 2]
        self._bx, self._by, self._bz = tv[:, 1, 0], tv[:, 1, 1], tv[:, 1, 2]
        self._cx, self._cy, self._cz = tv[:, 2, 0], tv[:, 2, 1], tv[:, 2, 2]
        xy = tv[:, :, :2]
        self._lo = xy.min(axis=(0, 1))
        self._hi = xy.max(axis=(0, 1))
        self._zlo = float(tv[:, :, 2].min())
        self._zhi = float(tv[:, :, 2].max())
        span = np.maximum(self._hi - self._lo, 1e-12)
        self._diag = float(np.linalg.norm(span))
        n_cells = int(np.clip(1.5 * np.sqrt(len(self.triangles)), 4, 96))
        self._nx = n_cells
        self._ny = n_cells
        self._cell = span / np.array([self._nx, self._ny])
        tmin = xy.min(axis=1)
        tmax = xy.max(axis=1)
        ix0 = np.clip(((tmin[:, 0] - self._lo[0]) / self._cell[0]).astype(int), 0, self._nx - 1)
        ix1 = np.clip(((tmax[:, 0] - self._lo[0]) / self._cell[0]).astype(int), 0, self._nx - 1)
        iy0 = np.clip(((tmin[:, 1] - self._lo[1]) / self._cell[1]).astype(int), 0, self._ny - 1)
        iy1 = np.clip(((tmax[:, 1] - self._lo[1]) / self._cell[1]).astype(int), 0, self._ny - 1)
        wx = ix1 - ix0 + 1
        wy = iy1 - iy0 + 1
        counts = wx * wy
        total = int(counts.sum())
        tri_rep = np.repeat(np.arange(len(self.triangles)), counts)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        local = np.arange(total) - np.repeat(starts, counts)
        wx_rep = np.repeat(wx, counts)
        dx = local % wx_rep
        dy = local // wx_rep
        cells = (np.repeat(iy0, counts) + dy) * self._nx + (np.repeat(ix0, counts) + dx)
        order = np.argsort(cells, kind="stable")
        self._bucket_tris = tri_rep[order]
        self._offsets = np.searchsorted(
            cells[order], np.arange(self._nx * self._ny + 1)
        )

    def _candidates(self, pts_xy: np.ndarray):
        ix = ((pts_xy[:, 0] - self._lo[0]) / self._cell[0]).astype(int)
        iy = ((pts_xy[:, 1] - self._lo[1]) / self._cell[1]).astype(int)
        in_grid = (ix >= 0) & (ix < self._nx) & (iy >= 0) & (iy < self._ny)
        cells = np.where(in_grid, iy * self._nx + ix, 0)
        begin = self._offsets[cells]
        end = self._offsets[cells + 1]
        counts = np.where(in_grid, end - begin, 0)
        total = int(counts.sum())
        if total == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), counts
        point_rep = np.repeat(np.arange(len(pts_xy)), counts)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        local = np.arange(total) - np.repeat(starts, counts)
        tri_idx = self._bucket_tris[np.repeat(begin, counts) + local]
        return point_rep, tri_idx, counts

    def crossings(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Upward crossing counts per point plus a mask of degenerate hits."""
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        point_rep, tri_idx, _ = self._candidates(points[:, :2])
        counts = np.zeros(len(points), dtype=np.int64)
        degenerate = np.zeros(len(points), dtype=bool)
        if len(point_rep) == 0:
            return counts, degenerate
        ax, ay = self._ax[tri_idx], self._ay[tri_idx]
        bx, by = self._bx[tri_idx], self._by[tri_idx]
        cx, cy = self._cx[tri_idx], self._cy[tri_idx]
        px, py = points[point_rep, 0], points[point_rep, 1]
        s_ab = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        s_bc = (cx - bx) * (py - by) - (cy - by) * (px - bx)
        s_ca = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
        area2 = s_ab + s_bc + s_ca
        flat = area2 == 0.0  # vertical triangles never cross a +z ray transversally
        strict_in = ((s_ab > 0) & (s_bc > 0) & (s_ca > 0)) | (
            (s_ab < 0) & (s_bc < 0) & (s_ca < 0)
        )
        on_edge = (
            ~flat
            & ~strict_in
            & (((s_ab >= 0) & (s_bc >= 0) & (s_ca >= 0)) | ((s_ab <= 0) & (s_bc <= 0) & (s_ca <= 0)))
        )
        if on_edge.any():
            np.logical_or.at(degenerate, point_rep[on_edge], True)
        use = strict_in & ~flat
        if use.any():
            idx = tri_idx[use]
            z_hit = (
                s_bc[use] * self._az[idx] + s_ca[use] * self._bz[idx] + s_ab[use] * self._cz[idx]
            ) / area2[use]
            crossing = z_hit > points[point_rep[use], 2]
            np.add.at(counts, point_rep[use][crossing], 1)
        return counts, degenerate

    def inside(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        mask = np.zeros(len(points), dtype=bool)
        # Points outside the 3D bounds of a closed surface are outside.
        near = (
            (points[:, 0] >= self._lo[0])
            & (points[:, 0] <= self._hi[0])
            & (points[:, 1] >= self._lo[1])
            & (points[:, 1] <= self._hi[1])
            & (points[:, 2] >= self._zlo)
            & (points[:, 2] <= self._zhi)
        )
        if not near.any():
            return mask
        sub = points[near]
        counts, degenerate = self.crossings(sub)
        sub_mask = (counts % 2).astype(bool)
        if degenerate.any():
            for i in np.where(degenerate)[0]:
                sub_mask[i] = self._inside_single(sub[i])
        mask[near] = sub_mask
        return mask

    def _inside_single(self, point: np.ndarray) -> bool:
        # Deterministic jitters in xy; irrational ratio avoids re-hitting
        # lattice-aligned edges. Falls back to the winding number.
        eps = 1e-9 * self._diag
        for k in (1.0, 37.41, 1311.71):
            shifted = point + np.array([k * eps, k * eps * np.sqrt(2.0), 0.0])
            counts, degenerate = self.crossings(shifted[None, :])
            if not degenerate[0]:
                return bool(counts[0] % 2)
        w = winding_numbers(point[None, :], self.vertices, self.triangles)
        return bool(w[0] > 0.5)


def winding_numbers(
    points: np.ndarray, vertices: np.ndarray, triangles: np.ndarray, chunk: int = 500_000
) -> np.ndarray:
    """Generalized winding number of each point w.r.t. a triangle soup.

    Solid-angle sum (van Oosterom and Strackee) divided by 4 pi. Roughly 1
    inside a consistently oriented closed surface and 0 outside.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    tv = np.asarray(vertices, dtype=float)[np.asarray(triangles, dtype=np.int64)]
    n_pts = len(points)
    n_tri = len(tv)
    if n_pts == 0 or n_tri == 0:
        return np.zeros(n_pts)
    out = np.zeros(n_pts)
    rows = max(1, int(chunk // max(n_tri, 1)))
    for lo in range(0, n_pts, rows):
        p = points[lo : lo + rows]
        a = tv[None, :, 0, :] - p[:, None, :]
        b = tv[None, :, 1, :] - p[:, None, :]
        c = tv[None, :, 2, :] - p[:, None, :]
        la = np.linalg.norm(a, axis=2)
        lb = np.linalg.norm(b, axis=2)
        lc = np.linalg.norm(c, axis=2)
        numer = np.einsum("ptk,ptk->pt", a, np.cross(b, c))
        denom = (
            la * lb * lc
            + np.einsum("ptk,ptk->pt", a, b) * lc
            + np.einsum("ptk,ptk->pt", b, c) * la
            + np.einsum("ptk,ptk->pt", c, a) * lb
        )
        omega = 2.0 * np.arctan2(numer, denom)
        out[lo : lo + rows] = omega.sum(axis=1) / (4.0 * np.pi)
    return out


@dataclass(frozen=True)
class InsideResult:
    """Boolean inside mask; approximate is set for non-watertight meshes."""

    mask: np.ndarray
    approximate: bool


class ProximityIndex:
    """Immutable acceleration structure over mesh triangles and sample points.

    Queries through the index match exhaustive scans: the candidate pruning
    radius includes the largest triangle circumradius, so the true closest
    triangle is always examined.
    """

    def __init__(self, mesh: TriangleMesh, samples: SurfaceSamples | None = None):
        self.mesh = mesh
        self.samples = samples
        tv = mesh.triangle_vertices
        self._tv = tv
        centroids = tv.mean(axis=1)
        self._centroids = centroids
        self._centroid_tree = cKDTree(centroids)
        # Distance from a centroid to its corners bounds how far that
        # triangle's surface can extend beyond its centroid.
        self._tri_reach = np.linalg.norm(tv - centroids[:, None, :], axis=2).max(axis=1)
        self._reach = float(self._tri_reach.max())
        self._parity = ParityGrid(mesh.vertices, mesh.triangles) if mesh.watertight else None
        self._sample_tree = cKDTree(samples.points) if samples is not None and len(samples) else None

    # -- closest point on the triangulated surface --------------------------------

    def closest_surface_point(self, points: np.ndarray):
        """Closest surface point, distance, and triangle id per query.

        Accepts (3,) or (N, 3); returns arrays of matching batch shape. Ties
        are broken by the lowest triangle index.
        """
        single = np.asarray(points).ndim == 1
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        n = len(pts)
        n_tri = len(self._tv)
        out_pts = np.empty((n, 3))
        out_d = np.empty(n)
        out_tri = np.empty(n, dtype=np.int64)
        # Upper bound per query: the nearest surface sample when available
        # (it lies exactly on the surface), or exact distances to the
        # triangles under the 8 nearest centroids otherwise.
        if self._sample_tree is not None:
            upper, _ = self._sample_tree.query(pts, k=1)
            upper = np.asarray(upper).reshape(-1)
            todo = np.arange(n)
        else:
            sub_pts, sub_d, sub_tri, certified = self._closest_by_knn(
                pts, min(8, n_tri), n_tri
            )
            out_pts[:] = sub_pts
            out_d[:] = sub_d
            out_tri[:] = sub_tri
            todo = np.where(~certified)[0]
            upper = out_d
        if len(todo):
            # Bounded k-query: the radius provably contains every triangle
            # that could beat the upper bound; rows that fill all k slots
            # below their own radius may be truncated and take the exact
            # radius-query fallback.
            k2 = min(48, n_tri)
            radii = upper[todo] + self._reach + 1e-12
            cd2, ci2 = self._centroid_tree.query(
                pts[todo], k=k2, distance_upper_bound=float(radii.max())
            )
            cd2 = cd2.reshape(len(todo), k2)
            ci2 = ci2.reshape(len(todo), k2)
            truncated = np.isfinite(cd2[:, -1]) & (cd2[:, -1] < radii)
            valid = cd2 <= radii[:, None]
            rows_rep, cols_rep = np.nonzero(valid)
            flat_tri = ci2[rows_rep, cols_rep]
            closest = closest_point_on_triangles(pts[todo][rows_rep], self._tv[flat_tri])
            dists = np.linalg.norm(closest - pts[todo][rows_rep], axis=1)
            order = np.lexsort((flat_tri, dists, rows_rep))
            firsts = np.searchsorted(rows_rep[order], np.arange(len(todo)))
            pick = order[firsts]
            out_pts[todo] = closest[pick]
            out_d[todo] = dists[pick]
            out_tri[todo] = flat_tri[pick]
            todo = todo[truncated]
        if len(todo):
            sub_pts, sub_d, sub_tri = self._closest_by_ball(pts[todo], out_d[todo])
            out_pts[todo] = sub_pts
            out_d[todo] = sub_d
            out_tri[todo] = sub_tri
        if single:
            return out_pts[0], float(out_d[0]), int(out_tri[0])
        return out_pts, out_d, out_tri

    def _closest_by_knn(self, pts: np.ndarray, k: int, n_tri: int):
        n = len(pts)
        cd, ci = self._centroid_tree.query(pts, k=k)
        cd = cd.reshape(n, k)
        ci = ci.reshape(n, k)
        rep = np.repeat(pts, k, axis=0)
        cand_closest = closest_point_on_triangles(rep, self._tv[ci.ravel()])
        cand_d = np.linalg.norm(cand_closest - rep, axis=1).reshape(n, k)
        order = np.lexsort((ci, cand_d))  # per row: by distance, then lowest id
        best_col = order[:, 0]
        rows = np.arange(n)
        best_d = cand_d[rows, best_col]
        certified = (k == n_tri) | (best_d <= cd[:, -1] - self._reach + 1e-12)
        return (
            cand_closest.reshape(n, k, 3)[rows, best_col],
            best_d,
            ci[rows, best_col],
            certified,
        )

    def _closest_by_ball(self, pts: np.ndarray, upper: np.ndarray):
        """Exact closest triangle via a radius query that provably contains
        the minimizer: any candidate must have its centroid within the
        current upper bound plus its own reach."""
        n = len(pts)
        radii = upper + self._reach + 1e-12
        cand_lists = self._centroid_tree.query_ball_point(pts, radii)
        counts = np.fromiter((len(c) for c in cand_lists), dtype=np.int64, count=n)
        flat_tri = np.concatenate([np.asarray(c, dtype=np.int64) for c in cand_lists])
        point_rep = np.repeat(np.arange(n), counts)
        cdist = np.linalg.norm(self._centroids[flat_tri] - pts[point_rep], axis=1)
        keep = cdist <= upper[point_rep] + self._tri_reach[flat_tri] + 1e-12
        flat_tri = flat_tri[keep]
        point_rep = point_rep[keep]
        closest = closest_point_on_triangles(pts[point_rep], self._tv[flat_tri])
        dists = np.linalg.norm(closest - pts[point_rep], axis=1)
        # Lowest triangle id wins exact ties.
        order = np.lexsort((flat_tri, dists, point_rep))
        firsts = np.searchsorted(point_rep[order], np.arange(n))
        pick = order[firsts]
        return closest[pick], dists[pick], flat_tri[pick]

    def surface_distances(self, points: np.ndarray) -> np.ndarray:
        return self.closest_surface_point(np.atleast_2d(points))[1]

    # -- inside / signed distance --------------------------------------------------

    def inside(self, points: np.ndarray) -> InsideResult:
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        if self._parity is not None:
            return InsideResult(mask=self._parity.inside(pts), approximate=False)
        w = winding_numbers(pts, self.mesh.vertices, self.mesh.triangles)
        return InsideResult(mask=w > 0.5, approximate=True)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Unsigned closest-surface distance with negative sign inside."""
        single = np.asarray(points).ndim == 1
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        dists = self.surface_distances(pts)
        mask = self.inside(pts).mask
        signed = np.where(mask, -dists, dists)
        return float(signed[0]) if single else signed

    # -- nearest sample point -------------------------------------------------------

    def nearest_sample(self, points: np.ndarray):
        """Index of and distance to the nearest surface sample per query.

        Distance ties within TIE_RTOL resolve to the lowest sample index.
        """
        if self._sample_tree is None:
            raise ValueError("index was built without sample points")
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        k = min(4, self._sample_tree.n)
        dists, idx = self._sample_tree.query(pts, k=k)
        if k == 1:
            return idx.reshape(-1), dists.reshape(-1)
        best = dists[:, :1] * (1.0 + TIE_RTOL) + 1e-300
        tied = dists <= best
        picked = np.where(tied, idx, np.iinfo(np.int64).max).min(axis=1)
        d = dists[np.arange(len(pts)), np.argmax(idx == picked[:, None], axis=1)]
        return picked, d


def classify_inside(
    points: np.ndarray, mesh: TriangleMesh, index: ProximityIndex | None = None
) -> InsideResult:
    """Inside/outside classification for a batch of points.

    Watertight meshes use exact ray parity; others use the generalized
    winding number with a 0.5 threshold and the result is flagged
    approximate.
    """
    if index is not None and index.mesh is mesh:
        return index.inside(points)
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if mesh.watertight:
        return InsideResult(mask=ParityGrid(mesh.vertices, mesh.triangles).inside(pts), approximate=False)
    w = winding_numbers(pts, mesh.vertices, mesh.triangles)
    return InsideResult(mask=w > 0.5, approximate=True)


def closest_surface_point(points: np.ndarray, index: ProximityIndex):
    return index.closest_surface_point(points)


def signed_distance(points: np.ndarray, index: ProximityIndex):
    return index.signed_distance(points)
