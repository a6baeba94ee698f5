import numpy as np
import pytest

from cipflow.mesh import (MeshError, Mesh2D, build_structured_mesh,
                          dump_mesh, make_periodic_x)


def test_minimal_split():
    m = build_structured_mesh(1, 1)
    assert len(m.triangles) == 2
    assert len(m.interior_faces) == 1
    assert len(m.boundary_faces) == 4
    assert m.interior_faces.h[0] == pytest.approx(np.sqrt(2.0))


def test_area_additivity():
    m = build_structured_mesh(2, 2)
    assert len(m.triangles) == 8
    assert m.total_area == pytest.approx(1.0, rel=1e-12)


def test_mesh_parameter_conventions():
    m = build_structured_mesh(80, 80)
    # triangle diameter is the cell diagonal; the CFL parameter is the side
    assert m.h == pytest.approx(np.sqrt(2.0) / 80, rel=1e-12)
    assert m.h_cell == pytest.approx(0.0125, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_interior_face_count_closed_form(n):
    # brute-force count against the closed form 3n^2 - 2n
    m = build_structured_mesh(n, n)
    edges = {}
    for tri in m.triangles:
        for k in range(3):
            key = tuple(sorted((int(tri[k]), int(tri[(k + 1) % 3]))))
            edges[key] = edges.get(key, 0) + 1
    brute = sum(1 for c in edges.values() if c == 2)
    assert brute == 3 * n * n - 2 * n
    assert len(m.interior_faces) == brute


def test_boundary_perimeter():
    m = build_structured_mesh(3, 5, domain=(0.0, 2.0, 0.0, 1.0))
    assert m.boundary_faces.h.sum() == pytest.approx(6.0, rel=1e-12)


def test_rejects_bad_input():
    with pytest.raises(MeshError):
        build_structured_mesh(0, 3)
    with pytest.raises(MeshError):
        build_structured_mesh(2, 2, domain=(0.0, 0.0, 0.0, 1.0))


def test_rejects_nonconforming():
    verts = [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 1)]
    tris = [(0, 1, 2), (1, 3, 2), (0, 2, 4)]
    tris.append((0, 2, 3))  # third triangle on edge (0, 2)
    with pytest.raises(MeshError):
        Mesh2D(np.array(verts, float), tris, (0, 1, 0, 1), 1.0)


def test_rejects_clockwise():
    with pytest.raises(MeshError):
        Mesh2D(np.array([(0, 0), (1, 0), (0, 1)], float), [(0, 2, 1)],
               (0, 1, 0, 1), 1.0)


def test_unit_normals_and_orientation():
    m = build_structured_mesh(3, 2)
    itf = m.interior_faces
    norms = np.hypot(itf.normal[:, 0], itf.normal[:, 1])
    assert np.allclose(norms, 1.0, atol=1e-14)
    # normal points from the left triangle into the right one
    cl = m.vertices[m.triangles[itf.left]].mean(axis=1)
    cr = m.vertices[m.triangles[itf.right]].mean(axis=1)
    dots = np.einsum("fa,fa->f", itf.normal, cr - cl)
    assert np.all(dots > 0)
    bn = np.hypot(m.boundary_faces.normal[:, 0], m.boundary_faces.normal[:, 1])
    assert np.allclose(bn, 1.0, atol=1e-14)
    # boundary normals point out of the domain
    mid = 0.5 * (m.vertices[m.boundary_faces.verts[:, 0]]
                 + m.vertices[m.boundary_faces.verts[:, 1]])
    outside = mid + 1e-3 * m.boundary_faces.normal
    assert np.all((outside[:, 0] < 0) | (outside[:, 0] > 1)
                  | (outside[:, 1] < 0) | (outside[:, 1] > 1))


def test_refinement_halves_h():
    m1 = build_structured_mesh(4, 4)
    m2 = build_structured_mesh(8, 8)
    assert m2.h == pytest.approx(0.5 * m1.h, rel=1e-14)
    assert m2.h_cell == pytest.approx(0.5 * m1.h_cell, rel=1e-14)


def test_periodic_2x2_face_counts():
    m = build_structured_mesh(2, 2)
    nb, ni = len(m.boundary_faces), len(m.interior_faces)
    p = make_periodic_x(m)
    assert len(p.boundary_faces) == nb - 4
    assert len(p.interior_faces) == ni + 2


def test_periodic_1x1_single_seam_face():
    p = make_periodic_x(build_structured_mesh(1, 1))
    assert len(p.boundary_faces) == 2
    assert len(p.interior_faces) == 2


def test_periodic_seam_geometry():
    p = make_periodic_x(build_structured_mesh(2, 2))
    itf = p.interior_faces
    seam = np.abs(itf.left_pts[:, 0, 0] - itf.right_pts[:, 0, 0]) > 0.5
    assert seam.sum() == 2
    # matched endpoints differ by the period in x, agree in y
    lp, rp = itf.left_pts[seam], itf.right_pts[seam]
    assert np.allclose(lp[..., 0] - rp[..., 0], 1.0)
    assert np.allclose(lp[..., 1], rp[..., 1])


def test_periodic_rejects_mismatched_walls():
    m = build_structured_mesh(2, 2)
    shifted = m.vertices.copy()
    # move one right-wall vertex so the walls no longer match
    idx = np.where((shifted[:, 0] == 1.0) & (shifted[:, 1] == 0.5))[0][0]
    shifted[idx, 1] = 0.4
    bad = Mesh2D(shifted, m.triangles, m.domain, m.h_cell)
    with pytest.raises(MeshError):
        make_periodic_x(bad)


def test_dump_mesh(tmp_path):
    m = build_structured_mesh(2, 1)
    nodes = tmp_path / "nodes.txt"
    elems = tmp_path / "elems.txt"
    dump_mesh(m, nodes, elems)
    nd = np.loadtxt(nodes)
    el = np.loadtxt(elems, dtype=int)
    assert nd.shape == (len(m.vertices), 2)
    assert el.shape == (len(m.triangles), 3)
    assert np.allclose(nd, m.vertices)
    assert np.array_equal(el, m.triangles)
