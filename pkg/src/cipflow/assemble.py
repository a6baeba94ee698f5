"""Assembly of the discrete flow operators as scipy sparse matrices.

Conventions (component-blocked vector layout, n = ndof_scalar):
  M   vector mass,                (w, v)
  A   Nitsche viscous form,       mu (grad w, grad v) - boundary consistency
                                  terms + (gamma mu / h_F)(w, v) on Dirichlet
                                  faces
  G   pressure-gradient coupling, G[i,j] = -(q_j, div v_i) + (q_j, v_i.n)
  Sp  pressure gradient-jump stabilization with coefficient
      gamma_p * xi * h^3 / mu
  C   convection + CIP + boundary normal penalty (time dependent, explicit)
  D   mixed matrix D[i,j] = (v_i, grad q_j), used by the projection steps

The divergence matrix is -G^T by construction (never assembled separately).
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels


class AssemblyError(Exception):
    pass


# -- beta field providers -------------------------------------------------

class AnalyticBeta:
    """Convection field given by a vectorized callable (x, y) -> (b1, b2)."""

    def __init__(self, fun):
        self.fun = fun
        self._sup = None

    def at(self, pts):
        b1, b2 = self.fun(pts[..., 0], pts[..., 1])
        out = np.empty(pts.shape)
        out[..., 0] = b1
        out[..., 1] = b2
        return out

    def elem(self, vspace, tab):
        return self.at(tab.phys)

    def iface(self, vspace, tab):
        return self.at(tab.phys)

    def bface(self, vspace, tab):
        return self.at(tab.phys)

    def sup_norm(self, vspace):
        if self._sup is None:
            b = self.elem(vspace, vspace.elem_tables())
            self._sup = float(np.sqrt((b ** 2).sum(axis=-1)).max()) if b.size else 0.0
        return self._sup


class DiscreteBeta:
    """Convection field carried by velocity coefficients on vspace."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self._sup = None

    def elem(self, vspace, tab):
        return vspace.eval_elem(self.coeffs, tab)

    def iface(self, vspace, tab):
        u0, u1 = vspace.split(self.coeffs)
        L = tab.left
        b1 = np.einsum("fql,fl->fq", L.val, u0[L.dofs])
        b2 = np.einsum("fql,fl->fq", L.val, u1[L.dofs])
        return np.stack([b1, b2], axis=-1)

    def bface(self, vspace, tab):
        u0, u1 = vspace.split(self.coeffs)
        S = tab.side
        b1 = np.einsum("fql,fl->fq", S.val, u0[S.dofs])
        b2 = np.einsum("fql,fl->fq", S.val, u1[S.dofs])
        return np.stack([b1, b2], axis=-1)

    def sup_norm(self, vspace):
        if self._sup is None:
            b = self.elem(vspace, vspace.elem_tables())
            self._sup = float(np.sqrt((b ** 2).sum(axis=-1)).max()) if b.size else 0.0
        return self._sup


# -- scatter helpers -------------------------------------------------------

def _scatter(n, dofs, local):
    """Assemble (nf, nloc, nloc) local matrices into an n x n CSR matrix."""
    nloc = dofs.shape[1]
    rows = np.repeat(dofs, nloc, axis=1).ravel()
    cols = np.tile(dofs, (1, nloc)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def _block_diag2(As):
    return sp.block_diag([As, As], format="csr")


# -- time independent operators --------------------------------------------

def assemble_mass_scalar(space, qdeg=None):
    tab = space.elem_tables(qdeg)
    local = np.einsum("q,qi,qj,t->tij", tab.wts, tab.N, tab.N, tab.detJ)
    return _scatter(space.ndof_scalar, space.cell_dofs, local)


def assemble_mass(space):
    """Mass matrix; block-diagonal over components for vector spaces."""
    Ms = assemble_mass_scalar(space)
    return _block_diag2(Ms) if space.components == 2 else Ms


def assemble_stiffness_scalar(space, qdeg=None):
    tab = space.elem_tables(qdeg)
    local = np.einsum("q,tqia,tqja,t->tij", tab.wts, tab.grad, tab.grad, tab.detJ)
    return _scatter(space.ndof_scalar, space.cell_dofs, local)


def assemble_stiffness(space):
    """Plain (grad w, grad v), no boundary terms (diagnostics, projections)."""
    Ks = assemble_stiffness_scalar(space)
    return _block_diag2(Ks) if space.components == 2 else Ks


def assemble_viscous_nitsche(space, params, dirichlet_mask=None):
    """Viscous operator with Nitsche terms on the masked boundary faces.

    mask=None applies the terms on every (non-periodic) boundary face;
    an all-False mask leaves the natural free-slip form mu (grad w, grad v).
    """
    n = space.ndof_scalar
    if params.mu == 0.0:
        Z = sp.csr_matrix((n, n))
        return _block_diag2(Z) if space.components == 2 else Z
    As = params.mu * assemble_stiffness_scalar(space)
    bt = space.boundary_face_tables()
    nf = len(space.mesh.boundary_faces)
    mask = np.ones(nf, dtype=bool) if dirichlet_mask is None else dirichlet_mask
    if np.any(mask):
        S = bt.side
        gn = np.einsum("fa,fqla->fql", bt.normal, S.grad)[mask]
        val = S.val[mask]
        w = bt.wts[None, :] * bt.h[mask][:, None]          # (nf, nq) ds weights
        pen = params.gamma * params.mu / bt.h[mask]
        consist = np.einsum("fq,fqi,fqj->fij", w, gn, val)
        local = (-params.mu) * (consist + consist.transpose(0, 2, 1)) \
            + pen[:, None, None] * np.einsum("fq,fqi,fqj->fij", w, val, val)
        As = As + _scatter(n, S.dofs[mask], local)
    return _block_diag2(As) if space.components == 2 else As


def assemble_gradient(vspace, pspace):
    """G with G[i,j] = -(q_j, div v_i) + (q_j, v_i.n)_boundary."""
    if vspace.mesh is not pspace.mesh:
        raise AssemblyError("velocity and pressure spaces use different meshes")
    qdeg = max(vspace.default_elem_degree(), pspace.default_elem_degree())
    vt = vspace.elem_tables(qdeg)
    pt = pspace.elem_tables(qdeg)
    n, m = vspace.ndof_scalar, pspace.ndof_scalar
    blocks = []
    for c in range(2):
        local = -np.einsum("q,tqi,qj,t->tij", vt.wts, vt.grad[..., c], pt.N, vt.detJ)
        rows = np.repeat(vspace.cell_dofs, pt.N.shape[1], axis=1).ravel()
        cols = np.tile(pspace.cell_dofs, (1, vt.N.shape[1])).ravel()
        blocks.append(sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, m)))
    fdeg = max(vspace.default_face_degree(), pspace.default_face_degree())
    vb = vspace.boundary_face_tables(fdeg)
    pb = pspace.boundary_face_tables(fdeg)
    if len(vspace.mesh.boundary_faces):
        w = vb.wts[None, :] * vb.h[:, None]
        for c in range(2):
            local = np.einsum("fq,f,fqi,fqj->fij", w, vb.normal[:, c], vb.side.val, pb.side.val)
            rows = np.repeat(vb.side.dofs, pb.side.val.shape[2], axis=1).ravel()
            cols = np.tile(pb.side.dofs, (1, vb.side.val.shape[2])).ravel()
            blocks[c] = blocks[c] + sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, m))
    return sp.vstack([b.tocsr() for b in blocks], format="csr")


def _face_jump_matrix(space, coef):
    """Sum over interior faces of int_F coef(f,q) [grad w].[grad v] ds."""
    tab = space.interior_face_tables()
    nf = len(space.mesh.interior_faces)
    n = space.ndof_scalar
    if nf == 0:
        return sp.csr_matrix((n, n))
    w = tab.wts[None, :] * tab.h[:, None] * coef          # (nf, nq)
    g = np.concatenate([tab.left.grad, -tab.right.grad], axis=2)  # (nf, nq, 2*nloc, 2)
    dofs = np.concatenate([tab.left.dofs, tab.right.dofs], axis=1)
    local = np.einsum("fq,fqia,fqja->fij", w, g, g)
    return _scatter(n, dofs, local)


def assemble_pressure_stab(pspace, params):
    """CIP pressure stabilization; requires mu > 0 (use the inviscid
    splitting scheme instead of assembling Sp when mu = 0)."""
    if params.mu == 0.0:
        raise AssemblyError(
            "pressure stabilization needs mu > 0; with mu = 0 use the "
            "inviscid splitting scheme (pressure Poisson projection)")
    coef = params.gamma_p * params.xi * params.h ** 3 / params.mu
    return coef * _face_jump_matrix(pspace, np.array(1.0))


def assemble_velocity_pressure_grad(vspace, pspace):
    """D[i,j] = (v_i, grad q_j), the projection-step coupling."""
    qdeg = max(vspace.default_elem_degree(), pspace.default_elem_degree())
    vt = vspace.elem_tables(qdeg)
    pt = pspace.elem_tables(qdeg)
    n, m = vspace.ndof_scalar, pspace.ndof_scalar
    blocks = []
    for c in range(2):
        local = np.einsum("q,qi,tqj,t->tij", vt.wts, vt.N, pt.grad[..., c], vt.detJ)
        rows = np.repeat(vspace.cell_dofs, pt.N.shape[1], axis=1).ravel()
        cols = np.tile(pspace.cell_dofs, (1, vt.N.shape[1])).ravel()
        blocks.append(sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, m)).tocsr())
    return sp.vstack(blocks, format="csr")


def mean_vector(pspace):
    """Vector of int(q_j), the zero-mean constraint row."""
    tab = pspace.elem_tables()
    local = np.einsum("q,qj,t->tj", tab.wts, tab.N, tab.detJ)
    out = np.zeros(pspace.ndof_scalar)
    np.add.at(out, pspace.cell_dofs.ravel(), local.ravel())
    return out


class DiscreteOperators:
    """Time-independent matrices of one discretization."""

    def __init__(self, vspace, pspace, params, dirichlet_mask=None):
        self.vspace = vspace
        self.pspace = pspace
        self.params = params
        self.dirichlet_mask = dirichlet_mask
        self.Ms = assemble_mass_scalar(vspace)
        self.M = _block_diag2(self.Ms)
        self.A = assemble_viscous_nitsche(vspace, params, dirichlet_mask)
        self.G = assemble_gradient(vspace, pspace)
        self.Sp = (assemble_pressure_stab(pspace, params) if params.mu > 0
                   else sp.csr_matrix((pspace.ndof_scalar, pspace.ndof_scalar)))
        self.D = assemble_velocity_pressure_grad(vspace, pspace)
        self.stiffness = assemble_stiffness(vspace)
        self.mean_row = mean_vector(pspace)
        self._mass_lu = None

    def mass_solve(self, rhs):
        """Solve M x = rhs componentwise with a cached factorization."""
        if self._mass_lu is None:
            self._mass_lu = spla.splu(self.Ms.tocsc())
        n = self.vspace.ndof_scalar
        out = np.empty_like(rhs)
        out[:n] = self._mass_lu.solve(rhs[:n])
        out[n:] = self._mass_lu.solve(rhs[n:])
        return out


# -- convection ------------------------------------------------------------

def _jump_coef(space, beta, params, tab, beta_inf):
    bn = np.einsum("fqa,fa->fq", beta.iface(space, tab), tab.normal)
    return params.gamma_u * tab.h[:, None] ** 2 * (np.abs(bn) + beta_inf * params.eps_perp)


def assemble_convection(vspace, beta, params, beta_inf=None,
                        boundary_penalty=True):
    """Sparse matrix of the explicit convection operator at one time.

    beta is an AnalyticBeta (bound to the evaluation time) or DiscreteBeta.
    The boundary normal penalty is dropped under strong Dirichlet imposition.
    """
    n = vspace.ndof_scalar
    tab = vspace.elem_tables()
    if beta_inf is None:
        beta_inf = beta.sup_norm(vspace)
    b = beta.elem(vspace, tab)
    conv = np.einsum("tqa,tqja->tqj", b, tab.grad)
    local = np.einsum("q,qi,tqj,t->tij", tab.wts, tab.N, conv, tab.detJ)
    Cs = _scatter(n, vspace.cell_dofs, local)
    ft = vspace.interior_face_tables()
    if len(vspace.mesh.interior_faces):
        Cs = Cs + _face_jump_matrix(vspace, _jump_coef(vspace, beta, params, ft, beta_inf))
    C = _block_diag2(Cs)
    bt = vspace.boundary_face_tables()
    nfb = len(vspace.mesh.boundary_faces)
    if nfb and beta_inf > 0.0 and boundary_penalty:
        w = beta_inf * bt.wts[None, :] * bt.h[:, None]
        nloc = vspace.nloc
        local = np.empty((nfb, 2 * nloc, 2 * nloc))
        for ci in range(2):
            for cj in range(2):
                nn = bt.normal[:, ci] * bt.normal[:, cj]
                local[:, ci * nloc:(ci + 1) * nloc, cj * nloc:(cj + 1) * nloc] = \
                    np.einsum("fq,f,fqi,fqj->fij", w, nn, bt.side.val, bt.side.val)
        dofs = np.concatenate([bt.side.dofs, bt.side.dofs + n], axis=1)
        C = C + _scatter(2 * n, dofs, local)
    return C


def apply_convection(vspace, u, beta, params, beta_inf=None,
                     boundary_penalty=True):
    """Fast action c_i = (beta.grad w, v_i) + s_u(w, v_i) for w given by u."""
    tab = vspace.elem_tables()
    ft = vspace.interior_face_tables()
    bt = vspace.boundary_face_tables()
    if beta_inf is None:
        beta_inf = beta.sup_norm(vspace)
    n = vspace.ndof_scalar
    out = np.zeros(2 * n)
    sw = tab.wts[None, :] * tab.detJ[:, None]
    be = beta.elem(vspace, tab)
    u0, u1 = vspace.split(u)
    for c, uc in enumerate((u0, u1)):
        kernels.conv_volume(out[c * n:(c + 1) * n], uc, vspace.cell_dofs,
                            tab.N, tab.grad, sw, be)
    if len(vspace.mesh.interior_faces):
        coef = _jump_coef(vspace, beta, params, ft, beta_inf) * \
            (ft.wts[None, :] * ft.h[:, None])
        for c, uc in enumerate((u0, u1)):
            kernels.face_jump(out[c * n:(c + 1) * n], uc,
                              ft.left.dofs, ft.right.dofs,
                              ft.left.grad, ft.right.grad, coef)
    if len(vspace.mesh.boundary_faces) and beta_inf > 0.0 and boundary_penalty:
        w = beta_inf * bt.wts[None, :] * bt.h[:, None]
        kernels.boundary_normal(out[:n], out[n:], u0, u1, bt.side.dofs,
                                bt.side.val, bt.normal, w)
    return out


def su_seminorm(vspace, u, beta, params, beta_inf=None):
    """|u|^2_{s_u} by an explicit loop over faces (reference path)."""
    ft = vspace.interior_face_tables()
    bt = vspace.boundary_face_tables()
    if beta_inf is None:
        beta_inf = beta.sup_norm(vspace)
    u0, u1 = vspace.split(u)
    total = 0.0
    if len(vspace.mesh.interior_faces):
        bn = np.einsum("fqa,fa->fq", beta.iface(vspace, ft), ft.normal)
        for f in range(len(ft.h)):
            dl, dr = ft.left.dofs[f], ft.right.dofs[f]
            acc = 0.0
            for q in range(len(ft.wts)):
                coef = params.gamma_u * ft.h[f] ** 2 * (
                    abs(bn[f, q]) + beta_inf * params.eps_perp)
                for uc in (u0, u1):
                    jump = ft.left.grad[f, q].T @ uc[dl] - ft.right.grad[f, q].T @ uc[dr]
                    acc += ft.wts[q] * coef * (jump @ jump)
            total += ft.h[f] * acc
    if len(vspace.mesh.boundary_faces) and beta_inf > 0.0:
        for f in range(len(bt.h)):
            d = bt.side.dofs[f]
            acc = 0.0
            for q in range(len(bt.wts)):
                un = bt.normal[f, 0] * (bt.side.val[f, q] @ u0[d]) + \
                    bt.normal[f, 1] * (bt.side.val[f, q] @ u1[d])
                acc += bt.wts[q] * beta_inf * un * un
            total += bt.h[f] * acc
    return total


# -- right hand sides -------------------------------------------------------

def forcing_rhs(vspace, f, qdeg=None):
    """Load vector (f, v_i) for a vectorized f(x, y) -> (f1, f2)."""
    tab = vspace.elem_tables(qdeg)
    f1, f2 = f(tab.phys[..., 0], tab.phys[..., 1])
    n = vspace.ndof_scalar
    out = np.zeros(2 * n)
    for c, fc in enumerate((f1, f2)):
        vals = np.einsum("q,tq,qi,t->ti", tab.wts, np.broadcast_to(fc, tab.phys.shape[:2]),
                         tab.N, tab.detJ)
        np.add.at(out[c * n:(c + 1) * n], vspace.cell_dofs.ravel(), vals.ravel())
    return out


def l2_project(space, f, qdeg=None):
    """Coefficients of the L2 projection of f onto the space."""
    tab = space.elem_tables(qdeg)
    Ms = assemble_mass_scalar(space)
    lu = spla.splu(Ms.tocsc())
    n = space.ndof_scalar
    if space.components == 1:
        vals = np.broadcast_to(f(tab.phys[..., 0], tab.phys[..., 1]), tab.phys.shape[:2])
        load = np.zeros(n)
        loc = np.einsum("q,tq,qi,t->ti", tab.wts, vals, tab.N, tab.detJ)
        np.add.at(load, space.cell_dofs.ravel(), loc.ravel())
        return lu.solve(load)
    f1, f2 = f(tab.phys[..., 0], tab.phys[..., 1])
    out = np.empty(2 * n)
    for c, fc in enumerate((f1, f2)):
        load = np.zeros(n)
        loc = np.einsum("q,tq,qi,t->ti", tab.wts,
                        np.broadcast_to(fc, tab.phys.shape[:2]), tab.N, tab.detJ)
        np.add.at(load, space.cell_dofs.ravel(), loc.ravel())
        out[c * n:(c + 1) * n] = lu.solve(load)
    return out


def viscous_bc_rhs(vspace, params, g, dirichlet_mask=None):
    """Nitsche data terms -mu(n.grad v, g) + (gamma mu/h_F)(g, v)."""
    n = vspace.ndof_scalar
    out = np.zeros(2 * n)
    if params.mu == 0.0 or not len(vspace.mesh.boundary_faces):
        return out
    bt = vspace.boundary_face_tables()
    mask = (np.ones(len(bt.h), dtype=bool) if dirichlet_mask is None
            else dirichlet_mask)
    if not np.any(mask):
        return out
    g1, g2 = g(bt.phys[mask][..., 0], bt.phys[mask][..., 1])
    gn = np.einsum("fa,fqla->fql", bt.normal[mask], bt.side.grad[mask])
    w = bt.wts[None, :] * bt.h[mask][:, None]
    pen = params.gamma * params.mu / bt.h[mask]
    for c, gc in enumerate((g1, g2)):
        gc = np.broadcast_to(gc, w.shape)
        vals = -params.mu * np.einsum("fq,fq,fql->fl", w, gc, gn) + \
            np.einsum("f,fq,fq,fql->fl", pen, w, gc, bt.side.val[mask])
        np.add.at(out[c * n:(c + 1) * n], bt.side.dofs[mask].ravel(), vals.ravel())
    return out


def normal_penalty_bc_rhs(vspace, g, beta_inf):
    """Data term (beta_inf g.n, v.n) of the boundary velocity penalty."""
    n = vspace.ndof_scalar
    out = np.zeros(2 * n)
    if beta_inf == 0.0 or not len(vspace.mesh.boundary_faces):
        return out
    bt = vspace.boundary_face_tables()
    g1, g2 = g(bt.phys[..., 0], bt.phys[..., 1])
    w = bt.wts[None, :] * bt.h[:, None]
    gn = np.broadcast_to(g1, w.shape) * bt.normal[:, 0:1] + \
        np.broadcast_to(g2, w.shape) * bt.normal[:, 1:2]
    for c in range(2):
        vals = beta_inf * np.einsum("fq,f,fql->fl", w * gn, bt.normal[:, c], bt.side.val)
        np.add.at(out[c * n:(c + 1) * n], bt.side.dofs.ravel(), vals.ravel())
    return out


def mass_bc_rhs(pspace, g):
    """Continuity data term -(q_j, g.n)_boundary for Dirichlet data g."""
    m = pspace.ndof_scalar
    out = np.zeros(m)
    if not len(pspace.mesh.boundary_faces):
        return out
    bt = pspace.boundary_face_tables()
    g1, g2 = g(bt.phys[..., 0], bt.phys[..., 1])
    w = bt.wts[None, :] * bt.h[:, None]
    gn = np.broadcast_to(g1, w.shape) * bt.normal[:, 0:1] + \
        np.broadcast_to(g2, w.shape) * bt.normal[:, 1:2]
    vals = -np.einsum("fq,fql->fl", w * gn, bt.side.val)
    np.add.at(out, bt.side.dofs.ravel(), vals.ravel())
    return out


def dump_matrix(mat, path):
    """Coordinate text dump: one "row col value" line per entry."""
    coo = mat.tocoo()
    with open(path, "w") as f:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{r} {c} {v:.17g}\n")
