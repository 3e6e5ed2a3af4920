"""Mesh ingestion, sampling, proximity and sign queries, planar analysis."""

from .mesh import TriangleMesh, load_mesh, save_obj
from .plane import PlaneProjection, PrincipalAxes2D, plane_basis, principal_axes_2d, project_to_plane
from .queries import (
    InsideResult,
    ParityGrid,
    ProximityIndex,
    classify_inside,
    closest_point_on_triangles,
    closest_surface_point,
    signed_distance,
    winding_numbers,
)
from .sampling import SurfaceSamples, furthest_point_along, sample_surface

__all__ = [
    "TriangleMesh",
    "load_mesh",
    "save_obj",
    "SurfaceSamples",
    "sample_surface",
    "furthest_point_along",
    "ProximityIndex",
    "ParityGrid",
    "InsideResult",
    "classify_inside",
    "closest_surface_point",
    "closest_point_on_triangles",
    "signed_distance",
    "winding_numbers",
    "PlaneProjection",
    "PrincipalAxes2D",
    "plane_basis",
    "project_to_plane",
    "principal_axes_2d",
]
