"""Pure-numpy implementations of the hot per-step kernels.

Mirrors the compiled module `_kernels`; both accumulate into `out` in place.
Results agree with the compiled twin up to floating-point reassociation.
"""

import numpy as np


def _acc(out, dofs, vals):
    out += np.bincount(dofs.ravel(), weights=vals.ravel(), minlength=len(out))


def conv_volume(out, uc, cell_dofs, N, grad, sw, beta):
    """out_i += sum_T int_T (beta.grad w) phi_i for one velocity component."""
    ue = uc[cell_dofs]
    gw = np.einsum("tqla,tl->tqa", grad, ue)
    val = sw * (beta[..., 0] * gw[..., 0] + beta[..., 1] * gw[..., 1])
    _acc(out, cell_dofs, np.einsum("tq,qi->ti", val, N))


def face_jump(out, uc, dofsL, dofsR, gradL, gradR, coef):
    """Gradient-jump penalty action; coef carries the full ds weight."""
    jw = np.einsum("fqla,fl->fqa", gradL, uc[dofsL]) \
        - np.einsum("fqla,fl->fqa", gradR, uc[dofsR])
    jw = jw * coef[..., None]
    _acc(out, dofsL, np.einsum("fqa,fqla->fl", jw, gradL))
    _acc(out, dofsR, -np.einsum("fqa,fqla->fl", jw, gradR))


def boundary_normal(out0, out1, u0, u1, dofs, val, normal, w):
    """Boundary penalty (beta_inf w.n, v.n); w carries beta_inf and ds."""
    un = normal[:, 0:1] * np.einsum("fql,fl->fq", val, u0[dofs]) \
        + normal[:, 1:2] * np.einsum("fql,fl->fq", val, u1[dofs])
    wun = w * un
    _acc(out0, dofs, np.einsum("fq,f,fql->fl", wun, normal[:, 0], val))
    _acc(out1, dofs, np.einsum("fq,f,fql->fl", wun, normal[:, 1], val))
