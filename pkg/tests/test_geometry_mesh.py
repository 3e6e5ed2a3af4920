import numpy as np
import pytest

from graspforge.errors import EmptyMesh, ParseError
from graspforge.geometry import TriangleMesh, load_mesh, primitives, save_obj

CUBE_OBJ = """\
v -0.5 -0.5 -0.5
v 0.5 -0.5 -0.5
v 0.5 0.5 -0.5
v -0.5 0.5 -0.5
v -0.5 -0.5 0.5
v 0.5 -0.5 0.5
v 0.5 0.5 0.5
v -0.5 0.5 0.5
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
"""


@pytest.fixture
def cube_path(tmp_path):
    path = tmp_path / "cube.obj"
    path.write_text(CUBE_OBJ)
    return path


def test_load_unit_cube(cube_path):
    mesh = load_mesh(cube_path, scale=1.0)
    assert len(mesh.vertices) == 8
    assert len(mesh.triangles) == 12
    assert mesh.watertight


def test_load_cube_scaled(cube_path):
    mesh = load_mesh(cube_path, scale=0.1)
    lo, hi = mesh.bounds()
    np.testing.assert_allclose(lo, [-0.05, -0.05, -0.05], atol=0)
    np.testing.assert_allclose(hi, [0.05, 0.05, 0.05], atol=0)


def test_zero_area_only_raises(tmp_path):
    path = tmp_path / "degenerate.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n")
    with pytest.raises(EmptyMesh):
        load_mesh(path)


def test_missing_file_raises():
    with pytest.raises(ParseError):
        load_mesh("/nonexistent/never.obj")


def test_bad_format_raises(tmp_path):
    path = tmp_path / "mesh.stl"
    path.write_text("whatever")
    with pytest.raises(ParseError):
        load_mesh(path)


def test_quads_split_along_02_diagonal(tmp_path):
    path = tmp_path / "quad.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    mesh = load_mesh(path)
    tris = {tuple(sorted(t)) for t in mesh.triangles.tolist()}
    assert tris == {(0, 1, 2), (0, 2, 3)}


def test_off_round_trip(tmp_path):
    path = tmp_path / "tetra.off"
    path.write_text(
        "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
        "3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n"
    )
    mesh = load_mesh(path)
    assert len(mesh.vertices) == 4
    assert len(mesh.triangles) == 4
    assert mesh.watertight


def test_duplicate_vertices_merged(tmp_path):
    path = tmp_path / "dup.obj"
    path.write_text(
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 0 0\nv 0 0 1\nf 1 2 3\nf 1 4 5\n"
    )
    mesh = load_mesh(path)
    assert len(mesh.vertices) == 4


def test_negative_obj_indices(tmp_path):
    path = tmp_path / "neg.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n")
    mesh = load_mesh(path)
    assert len(mesh.triangles) == 1


def test_save_obj_round_trip(tmp_path, icosphere_small):
    path = tmp_path / "sphere.obj"
    save_obj(icosphere_small, path)
    again = load_mesh(path)
    assert len(again.vertices) == len(icosphere_small.vertices)
    assert again.watertight


def test_primitives_watertight():
    for mesh in (
        primitives.icosphere(0.05, 2),
        primitives.box(0.1, 0.2, 0.3),
        primitives.cylinder(0.03, 0.2),
    ):
        assert mesh.watertight


def test_open_mesh_not_watertight():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    mesh = TriangleMesh.from_arrays(verts, np.array([[0, 1, 2]]))
    assert not mesh.watertight


def test_mirrored_preserves_watertight(icosphere_small):
    mirrored = icosphere_small.mirrored()
    assert mirrored.watertight
    assert np.allclose(sorted(mirrored.vertices[:, 0]), sorted(-icosphere_small.vertices[:, 0]))


def test_scale_must_be_positive():
    with pytest.raises(ValueError):
        TriangleMesh.from_arrays(np.zeros((3, 3)), np.array([[0, 1, 2]]), scale=0.0)
