"""Error norms, energy/dissipation diagnostics, and convergence rates."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assemble import su_seminorm


@dataclass
class DiagnosticsRow:
    t: float
    kinetic_energy: float
    physical_dissipation: float
    artificial_dissipation: float
    err_u_l2: Optional[float] = None
    err_p_l2: Optional[float] = None
    err_u_h1: Optional[float] = None


def error_quad_degree(space):
    """Error quadrature one notch above assembly to keep rate fits clean."""
    return 2 * space.degree + 4


def l2_error(space, coeffs, exact, qdeg=None):
    """||exact - u_h|| over the domain by element quadrature."""
    tab = space.elem_tables(qdeg or error_quad_degree(space))
    if space.components == 1:
        vals = np.einsum("ql,tl->tq", tab.N, coeffs[space.cell_dofs])
        ex = np.broadcast_to(exact(tab.phys[..., 0], tab.phys[..., 1]), vals.shape)
        diff2 = (ex - vals) ** 2
    else:
        uh = space.eval_elem(coeffs, tab)
        e1, e2 = exact(tab.phys[..., 0], tab.phys[..., 1])
        diff2 = (np.broadcast_to(e1, uh.shape[:2]) - uh[..., 0]) ** 2 \
            + (np.broadcast_to(e2, uh.shape[:2]) - uh[..., 1]) ** 2
    return float(np.sqrt(np.einsum("q,tq,t->", tab.wts, diff2, tab.detJ)))


def h1_error(space, coeffs, exact_grad, qdeg=None):
    """|exact - u_h|_{H1} seminorm; exact_grad(x, y) returns the gradient
    components (du1/dx, du1/dy[, du2/dx, du2/dy])."""
    tab = space.elem_tables(qdeg or error_quad_degree(space))
    x, y = tab.phys[..., 0], tab.phys[..., 1]
    shape = x.shape
    if space.components == 1:
        gh = np.einsum("tqla,tl->tqa", tab.grad, coeffs[space.cell_dofs])
        gx, gy = exact_grad(x, y)
        diff2 = (np.broadcast_to(gx, shape) - gh[..., 0]) ** 2 \
            + (np.broadcast_to(gy, shape) - gh[..., 1]) ** 2
    else:
        gh = space.eval_grad_elem(coeffs, tab)
        g11, g12, g21, g22 = exact_grad(x, y)
        diff2 = (np.broadcast_to(g11, shape) - gh[..., 0, 0]) ** 2 \
            + (np.broadcast_to(g12, shape) - gh[..., 0, 1]) ** 2 \
            + (np.broadcast_to(g21, shape) - gh[..., 1, 0]) ** 2 \
            + (np.broadcast_to(g22, shape) - gh[..., 1, 1]) ** 2
    return float(np.sqrt(np.einsum("q,tq,t->", tab.wts, diff2, tab.detJ)))


def convergence_rates(hs, errors):
    """Pairwise slopes log(e_i/e_{i+1}) / log(h_i/h_{i+1})."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(hs) != len(errors) or len(hs) < 2:
        raise ValueError("need matching sequences of length >= 2")
    if np.any(hs <= 0) or np.any(errors <= 0):
        raise ValueError("mesh sizes and errors must be positive")
    return list(np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:]))


def fitted_rate(hs, errors):
    """Least-squares slope of log(e) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(hs <= 0) or np.any(errors <= 0):
        raise ValueError("mesh sizes and errors must be positive")
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


def energy_row(state, ops, beta, errors=None):
    """Kinetic energy, physical and artificial dissipation of a state.

    The artificial dissipation uses the independent face-loop seminorm.
    """
    u = state.u_curr
    ke = 0.5 * float(u @ (ops.M @ u))
    phys = ops.params.mu * float(u @ (ops.stiffness @ u))
    art = su_seminorm(ops.vspace, u, beta, ops.params)
    row = DiagnosticsRow(state.t, ke, phys, art)
    if errors:
        row.err_u_l2 = errors.get("err_u_l2")
        row.err_p_l2 = errors.get("err_p_l2")
        row.err_u_h1 = errors.get("err_u_h1")
    return row


CSV_HEADER_BASE = "t,ke,phys_diss,art_diss"
CSV_HEADER_ERRORS = CSV_HEADER_BASE + ",err_u_l2,err_p_l2,err_u_h1"


def format_float(x):
    return f"{x:.17g}"


def rows_to_csv(rows, with_errors=False):
    lines = [CSV_HEADER_ERRORS if with_errors else CSV_HEADER_BASE]
    for r in rows:
        cols = [r.t, r.kinetic_energy, r.physical_dissipation,
                r.artificial_dissipation]
        if with_errors:
            cols += [r.err_u_l2 or 0.0, r.err_p_l2 or 0.0, r.err_u_h1 or 0.0]
        lines.append(",".join(format_float(c) for c in cols))
    return "\n".join(lines) + "\n"
