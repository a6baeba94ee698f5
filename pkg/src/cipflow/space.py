"""Continuous Lagrange spaces (P1/P2, scalar or 2-vector) on Mesh2D.

A space owns the DOF maps (with periodic aliasing folded in) and lazily
builds quadrature tables: basis values/gradients at element points, and
per-side tables on interior and boundary faces.  Vector spaces are
component-blocked: global dof = comp * ndof_scalar + scalar_dof.
"""

import numpy as np

from .quadrature import triangle_rule, segment_rule


class SpaceError(Exception):
    pass


def shape_values(degree, pts):
    """Basis values at reference points, shape (npts, nloc)."""
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0], pts[:, 1]
    l0, l1, l2 = 1.0 - x - y, x, y
    if degree == 1:
        return np.stack([l0, l1, l2], axis=1)
    if degree == 2:
        return np.stack([
            l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
            4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0,
        ], axis=1)
    raise SpaceError(f"unsupported degree {degree}")


def shape_grads(degree, pts):
    """Reference-space basis gradients at reference points, (npts, nloc, 2)."""
    pts = np.atleast_2d(pts)
    n = len(pts)
    x, y = pts[:, 0], pts[:, 1]
    g0 = np.array([-1.0, -1.0])
    g1 = np.array([1.0, 0.0])
    g2 = np.array([0.0, 1.0])
    if degree == 1:
        out = np.empty((n, 3, 2))
        out[:, 0], out[:, 1], out[:, 2] = g0, g1, g2
        return out
    if degree == 2:
        l0, l1, l2 = 1.0 - x - y, x, y
        out = np.empty((n, 6, 2))
        out[:, 0] = (4 * l0 - 1)[:, None] * g0
        out[:, 1] = (4 * l1 - 1)[:, None] * g1
        out[:, 2] = (4 * l2 - 1)[:, None] * g2
        out[:, 3] = 4 * (l0[:, None] * g1 + l1[:, None] * g0)
        out[:, 4] = 4 * (l1[:, None] * g2 + l2[:, None] * g1)
        out[:, 5] = 4 * (l2[:, None] * g0 + l0[:, None] * g2)
        return out
    raise SpaceError(f"unsupported degree {degree}")


def reference_nodes(degree):
    if degree == 1:
        return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                     [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]])


class ElemTables:
    def __init__(self, pts, wts, N, grad, detJ, phys):
        self.pts = pts          # reference points (nq, 2)
        self.wts = wts          # reference weights (nq,)
        self.N = N              # (nq, nloc)
        self.grad = grad        # (nt, nq, nloc, 2) physical gradients
        self.detJ = detJ        # (nt,)
        self.phys = phys        # (nt, nq, 2)


class FaceSideTables:
    def __init__(self, dofs, val, grad):
        self.dofs = dofs        # (nf, nloc)
        self.val = val          # (nf, nqf, nloc)
        self.grad = grad        # (nf, nqf, nloc, 2)


class InteriorFaceTables:
    def __init__(self, s, wts, left, right, phys, normal, h):
        self.s = s
        self.wts = wts          # weights on [0,1]
        self.left = left        # FaceSideTables
        self.right = right
        self.phys = phys        # (nf, nqf, 2), left-side coordinates
        self.normal = normal    # (nf, 2)
        self.h = h              # (nf,)


class BoundaryFaceTables:
    def __init__(self, s, wts, side, phys, normal, h):
        self.s = s
        self.wts = wts
        self.side = side        # FaceSideTables
        self.phys = phys
        self.normal = normal
        self.h = h


class FeSpace:
    def __init__(self, mesh, degree, components=1):
        if degree not in (1, 2):
            raise SpaceError(f"unsupported degree {degree}, expected 1 or 2")
        if components not in (1, 2):
            raise SpaceError(f"unsupported component count {components}")
        self.mesh = mesh
        self.degree = degree
        self.components = components
        self._build_dofs()
        self._elem_cache = {}
        self._iface_cache = {}
        self._bface_cache = {}
        # affine map data
        xy = mesh.vertices[mesh.triangles]
        J = np.stack([xy[:, 1] - xy[:, 0], xy[:, 2] - xy[:, 0]], axis=2)
        self._J = J
        self._detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        self._Jinv = np.empty_like(J)
        self._Jinv[:, 0, 0] = J[:, 1, 1] / self._detJ
        self._Jinv[:, 0, 1] = -J[:, 0, 1] / self._detJ
        self._Jinv[:, 1, 0] = -J[:, 1, 0] / self._detJ
        self._Jinv[:, 1, 1] = J[:, 0, 0] / self._detJ
        self._v0 = xy[:, 0]

    # -- DOF maps --------------------------------------------------------

    def _build_dofs(self):
        mesh = self.mesh
        alias = mesh.vertex_alias
        masters = np.unique(alias)
        vmap = -np.ones(len(mesh.vertices), dtype=np.int64)
        vmap[masters] = np.arange(len(masters))
        vdof = vmap[alias]
        nvm = len(masters)
        coords = [mesh.vertices[masters]]

        nt = len(mesh.triangles)
        nloc = 3 if self.degree == 1 else 6
        cell_dofs = np.empty((nt, nloc), dtype=np.int64)
        cell_dofs[:, :3] = vdof[mesh.triangles]
        nedge = 0
        if self.degree == 2:
            edge_ids = {}
            mids = []
            for it, tri in enumerate(mesh.triangles):
                for k, (a, b) in enumerate(((0, 1), (1, 2), (2, 0))):
                    va, vb = int(tri[a]), int(tri[b])
                    # an edge is aliased onto its periodic image only when it
                    # lies on the wall itself (both endpoints aliased)
                    if alias[va] != va and alias[vb] != vb:
                        va, vb = int(alias[va]), int(alias[vb])
                    key = (va, vb) if va < vb else (vb, va)
                    if key not in edge_ids:
                        edge_ids[key] = len(edge_ids)
                        mids.append(0.5 * (mesh.vertices[tri[a]] + mesh.vertices[tri[b]]))
                    cell_dofs[it, 3 + k] = nvm + edge_ids[key]
            nedge = len(edge_ids)
            coords.append(np.array(mids).reshape(-1, 2))
        self.ndof_scalar = nvm + nedge
        self.cell_dofs = cell_dofs
        self.dof_coords = np.vstack(coords)
        self.nloc = nloc

    @property
    def ndof(self):
        return self.components * self.ndof_scalar

    def boundary_scalar_dofs(self):
        """Scalar DOFs located on non-periodic boundary faces."""
        mesh = self.mesh
        bf = mesh.boundary_faces
        alias = mesh.vertex_alias
        masters = np.unique(alias)
        vmap = -np.ones(len(mesh.vertices), dtype=np.int64)
        vmap[masters] = np.arange(len(masters))
        dofs = set(vmap[alias[bf.verts]].ravel().tolist())
        if self.degree == 2:
            tables = self.boundary_face_tables()
            # the edge dof of a boundary face is the one whose basis value is
            # nonzero at the face midpoint and is not a vertex dof
            for f in range(len(bf)):
                for d in tables.side.dofs[f]:
                    if d >= len(masters) and np.any(np.abs(tables.side.val[f][:, tables.side.dofs[f] == d]) > 1e-12):
                        dofs.add(int(d))
        return np.array(sorted(dofs), dtype=np.int64)

    # -- quadrature tables -----------------------------------------------

    def default_elem_degree(self):
        return 2 * self.degree + 2

    def default_face_degree(self):
        return 2 * self.degree + 1

    def elem_tables(self, qdeg=None):
        qdeg = qdeg or self.default_elem_degree()
        if qdeg in self._elem_cache:
            return self._elem_cache[qdeg]
        pts, wts = triangle_rule(qdeg)
        N = shape_values(self.degree, pts)
        dN = shape_grads(self.degree, pts)
        # physical gradient: Jinv^T @ dN
        grad = np.einsum("tba,qlb->tqla", self._Jinv, dN)
        phys = self._v0[:, None, :] + np.einsum("tab,qb->tqa", self._J, pts)
        tab = ElemTables(pts, wts, N, grad, self._detJ.copy(), phys)
        self._elem_cache[qdeg] = tab
        return tab

    def _side_tables(self, tris, endpoints, s):
        """Values/gradients of the owning triangles' bases at face points."""
        xq = endpoints[:, None, 0, :] + s[None, :, None] * (
            endpoints[:, None, 1, :] - endpoints[:, None, 0, :])  # (nf, nq, 2)
        d = xq - self._v0[tris][:, None, :]
        ref = np.einsum("fab,fqb->fqa", self._Jinv[tris], d)
        nf, nq = ref.shape[:2]
        flat = ref.reshape(-1, 2)
        val = shape_values(self.degree, flat).reshape(nf, nq, self.nloc)
        dN = shape_grads(self.degree, flat).reshape(nf, nq, self.nloc, 2)
        grad = np.einsum("fba,fqlb->fqla", self._Jinv[tris], dN)
        return FaceSideTables(self.cell_dofs[tris], val, grad), xq

    def interior_face_tables(self, qdeg=None):
        qdeg = qdeg or self.default_face_degree()
        if qdeg in self._iface_cache:
            return self._iface_cache[qdeg]
        s, wts = segment_rule(qdeg)
        itf = self.mesh.interior_faces
        left, xq = self._side_tables(itf.left, itf.left_pts, s)
        right, _ = self._side_tables(itf.right, itf.right_pts, s)
        tab = InteriorFaceTables(s, wts, left, right, xq, itf.normal, itf.h)
        self._iface_cache[qdeg] = tab
        return tab

    def boundary_face_tables(self, qdeg=None):
        qdeg = qdeg or self.default_face_degree()
        if qdeg in self._bface_cache:
            return self._bface_cache[qdeg]
        s, wts = segment_rule(qdeg)
        bf = self.mesh.boundary_faces
        endpoints = self.mesh.vertices[bf.verts]
        side, xq = self._side_tables(bf.tri, endpoints, s)
        tab = BoundaryFaceTables(s, wts, side, xq, bf.normal, bf.h)
        self._bface_cache[qdeg] = tab
        return tab

    # -- field evaluation --------------------------------------------------

    def split(self, u):
        """View the component blocks of a coefficient vector."""
        n = self.ndof_scalar
        return [u[c * n:(c + 1) * n] for c in range(self.components)]

    def eval_elem(self, u, tables=None):
        """Field values at element quadrature points, (nt, nq, components)."""
        tab = tables or self.elem_tables()
        comps = [np.einsum("ql,tl->tq", tab.N, uc[self.cell_dofs])
                 for uc in self.split(u)]
        return np.stack(comps, axis=-1)

    def eval_grad_elem(self, u, tables=None):
        """Field gradients at element points, (nt, nq, components, 2)."""
        tab = tables or self.elem_tables()
        comps = [np.einsum("tqla,tl->tqa", tab.grad, uc[self.cell_dofs])
                 for uc in self.split(u)]
        return np.stack(comps, axis=-2)


def build_space(mesh, degree, components=1):
    return FeSpace(mesh, degree, components)
