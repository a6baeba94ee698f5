"""Structured triangulations of rectangles with face connectivity.

Meshes are immutable after construction.  Interior faces carry a left/right
triangle pair and a unit normal oriented left-to-right; under x-periodicity
the two vertical walls are stitched into interior faces and the touching
vertices are aliased.
"""

import numpy as np


class MeshError(Exception):
    pass


class InteriorFaces:
    """Struct-of-arrays record of interior faces.

    left_pts/right_pts are the physical endpoints of the face as seen from
    each side; they differ only for periodic seam faces (shift by the domain
    width).  Endpoint order is matched pointwise between the two sides.
    """

    def __init__(self, verts, left, right, normal, h, left_pts, right_pts):
        self.verts = verts
        self.left = left
        self.right = right
        self.normal = normal
        self.h = h
        self.left_pts = left_pts
        self.right_pts = right_pts

    def __len__(self):
        return len(self.h)


class BoundaryFaces:
    def __init__(self, verts, tri, normal, h):
        self.verts = verts
        self.tri = tri
        self.normal = normal
        self.h = h

    def __len__(self):
        return len(self.h)


class Mesh2D:
    def __init__(self, vertices, triangles, domain, h_cell, periodic_x=False,
                 vertex_alias=None, x_period=0.0):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.domain = domain  # (x0, x1, y0, y1)
        self.h_cell = float(h_cell)
        self.periodic_x = periodic_x
        self.x_period = x_period
        nv = len(self.vertices)
        if vertex_alias is None:
            vertex_alias = np.arange(nv, dtype=np.int64)
        self.vertex_alias = vertex_alias

        self._check_orientation()
        self.h = float(self._edge_lengths().max())
        self.interior_faces, self.boundary_faces = self._enumerate_faces()

    # -- construction helpers -------------------------------------------

    def _tri_coords(self):
        return self.vertices[self.triangles]  # (nt, 3, 2)

    def _check_orientation(self):
        xy = self._tri_coords()
        e1 = xy[:, 1] - xy[:, 0]
        e2 = xy[:, 2] - xy[:, 0]
        area2 = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        if np.any(area2 <= 0):
            bad = int(np.argmax(area2 <= 0))
            raise MeshError(f"triangle {bad} is not counterclockwise")
        self.areas = 0.5 * area2

    def _edge_lengths(self):
        xy = self._tri_coords()
        out = np.empty((len(self.triangles), 3))
        for k in range(3):
            d = xy[:, (k + 1) % 3] - xy[:, k]
            out[:, k] = np.hypot(d[:, 0], d[:, 1])
        return out

    def _enumerate_faces(self):
        owners = {}
        for it, tri in enumerate(self.triangles):
            for k in range(3):
                a, b = int(tri[k]), int(tri[(k + 1) % 3])
                key = (a, b) if a < b else (b, a)
                owners.setdefault(key, []).append((it, a, b))
        iverts, ileft, iright, inormal, ih, ilp, irp = [], [], [], [], [], [], []
        bverts, btri, bnormal, bh = [], [], [], []
        for key, own in owners.items():
            if len(own) > 2:
                raise MeshError(f"face {key} shared by {len(own)} triangles")
            it, a, b = own[0]
            pa, pb = self.vertices[a], self.vertices[b]
            e = pb - pa
            length = float(np.hypot(e[0], e[1]))
            nrm = np.array([e[1], -e[0]]) / length  # outward for CCW owner
            if len(own) == 1:
                bverts.append((a, b))
                btri.append(it)
                bnormal.append(nrm)
                bh.append(length)
            else:
                # first owner traverses (a, b) CCW, so nrm points into the
                # second owner: first owner is the left triangle
                iverts.append((a, b))
                ileft.append(it)
                iright.append(own[1][0])
                inormal.append(nrm)
                ih.append(length)
                pts = np.array([pa, pb])
                ilp.append(pts)
                irp.append(pts)
        interior = InteriorFaces(
            np.array(iverts, dtype=np.int64).reshape(-1, 2),
            np.array(ileft, dtype=np.int64),
            np.array(iright, dtype=np.int64),
            np.array(inormal, dtype=float).reshape(-1, 2),
            np.array(ih, dtype=float),
            np.array(ilp, dtype=float).reshape(-1, 2, 2),
            np.array(irp, dtype=float).reshape(-1, 2, 2),
        )
        boundary = BoundaryFaces(
            np.array(bverts, dtype=np.int64).reshape(-1, 2),
            np.array(btri, dtype=np.int64),
            np.array(bnormal, dtype=float).reshape(-1, 2),
            np.array(bh, dtype=float),
        )
        return interior, boundary

    @property
    def total_area(self):
        return float(self.areas.sum())


def build_structured_mesh(nx, ny, domain=(0.0, 1.0, 0.0, 1.0)):
    """Split each cell of an nx-by-ny grid along its bottom-left diagonal."""
    if nx < 1 or ny < 1:
        raise MeshError(f"cell counts must be positive, got ({nx}, {ny})")
    x0, x1, y0, y1 = domain
    if x1 <= x0 or y1 <= y0:
        raise MeshError(f"domain has nonpositive side lengths: {domain}")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    xx, yy = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i, j):
        return j * (nx + 1) + i

    triangles = []
    for j in range(ny):
        for i in range(nx):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            triangles.append((a, b, c))
            triangles.append((a, c, d))
    h_cell = max((x1 - x0) / nx, (y1 - y0) / ny)
    return Mesh2D(vertices, triangles, domain, h_cell)


def make_periodic_x(mesh, tol=1e-12):
    """Identify the x=min and x=max walls, turning their faces interior."""
    x0, x1, y0, y1 = mesh.domain
    period = x1 - x0
    bf = mesh.boundary_faces
    mid = 0.5 * (mesh.vertices[bf.verts[:, 0]] + mesh.vertices[bf.verts[:, 1]])
    on_left = np.abs(mid[:, 0] - x0) < tol
    on_right = np.abs(mid[:, 0] - x1) < tol
    left_idx = np.where(on_left)[0]
    right_idx = np.where(on_right)[0]
    if len(left_idx) != len(right_idx):
        raise MeshError(
            f"periodic walls differ: {len(left_idx)} left vs {len(right_idx)} right faces")
    left_idx = left_idx[np.argsort(mid[left_idx, 1])]
    right_idx = right_idx[np.argsort(mid[right_idx, 1])]
    if not np.allclose(mid[left_idx, 1], mid[right_idx, 1], atol=tol):
        raise MeshError("periodic walls have mismatched face positions")

    # vertex aliasing: right-wall vertex -> left-wall vertex with equal y
    alias = mesh.vertex_alias.copy()
    vx, vy = mesh.vertices[:, 0], mesh.vertices[:, 1]
    lverts = np.where(np.abs(vx - x0) < tol)[0]
    rverts = np.where(np.abs(vx - x1) < tol)[0]
    if len(lverts) != len(rverts):
        raise MeshError("periodic walls have mismatched vertex counts")
    lverts = lverts[np.argsort(vy[lverts])]
    rverts = rverts[np.argsort(vy[rverts])]
    if not np.allclose(vy[lverts], vy[rverts], atol=tol):
        raise MeshError("periodic walls have mismatched vertex positions")
    alias[rverts] = lverts

    out = Mesh2D(mesh.vertices, mesh.triangles, mesh.domain, mesh.h_cell,
                 periodic_x=True, vertex_alias=alias, x_period=period)

    # stitch the wall faces: left side of the seam is the right-wall owner
    bf = out.boundary_faces
    mid = 0.5 * (out.vertices[bf.verts[:, 0]] + out.vertices[bf.verts[:, 1]])
    on_left = np.abs(mid[:, 0] - x0) < tol
    on_right = np.abs(mid[:, 0] - x1) < tol
    left_idx = np.where(on_left)[0][np.argsort(mid[on_left, 1])]
    right_idx = np.where(on_right)[0][np.argsort(mid[on_right, 1])]

    itf = out.interior_faces
    add_verts, add_left, add_right, add_normal, add_h = [], [], [], [], []
    add_lp, add_rp = [], []
    for fl, fr in zip(left_idx, right_idx):
        pts_l = out.vertices[bf.verts[fl]]  # on x = x0
        pts_r = out.vertices[bf.verts[fr]]  # on x = x1
        ol = np.argsort(pts_l[:, 1])
        orr = np.argsort(pts_r[:, 1])
        add_verts.append(bf.verts[fr][orr])  # stored pair: right-wall ids
        add_left.append(bf.tri[fr])
        add_right.append(bf.tri[fl])
        add_normal.append((1.0, 0.0))
        add_h.append(bf.h[fr])
        add_lp.append(pts_r[orr])
        add_rp.append(pts_l[ol])
    keep = ~(on_left | on_right)
    out.boundary_faces = BoundaryFaces(
        bf.verts[keep], bf.tri[keep], bf.normal[keep], bf.h[keep])
    out.interior_faces = InteriorFaces(
        np.vstack([itf.verts, np.array(add_verts, dtype=np.int64).reshape(-1, 2)]),
        np.concatenate([itf.left, np.array(add_left, dtype=np.int64)]),
        np.concatenate([itf.right, np.array(add_right, dtype=np.int64)]),
        np.vstack([itf.normal, np.array(add_normal, dtype=float).reshape(-1, 2)]),
        np.concatenate([itf.h, np.array(add_h, dtype=float)]),
        np.vstack([itf.left_pts, np.array(add_lp, dtype=float).reshape(-1, 2, 2)]),
        np.vstack([itf.right_pts, np.array(add_rp, dtype=float).reshape(-1, 2, 2)]),
    )
    return out


def dump_mesh(mesh, nodes_path, elems_path):
    """Plain-text listing: one "x y" line per vertex, one "i j k" per triangle."""
    with open(nodes_path, "w") as f:
        for x, y in mesh.vertices:
            f.write(f"{x:.17g} {y:.17g}\n")
    with open(elems_path, "w") as f:
        for a, b, c in mesh.triangles:
            f.write(f"{a} {b} {c}\n")
