# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the hot per-step kernels (see _kernels_numpy)."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t idx_t


def conv_volume(double[::1] out, const double[::1] uc,
                const idx_t[:, ::1] cell_dofs, const double[:, ::1] N,
                const double[:, :, :, ::1] grad, const double[:, ::1] sw,
                const double[:, :, ::1] beta):
    cdef Py_ssize_t nt = cell_dofs.shape[0]
    cdef Py_ssize_t nloc = cell_dofs.shape[1]
    cdef Py_ssize_t nq = N.shape[0]
    cdef Py_ssize_t t, q, l
    cdef double g0, g1, val
    for t in range(nt):
        for q in range(nq):
            g0 = 0.0
            g1 = 0.0
            for l in range(nloc):
                g0 += grad[t, q, l, 0] * uc[cell_dofs[t, l]]
                g1 += grad[t, q, l, 1] * uc[cell_dofs[t, l]]
            val = sw[t, q] * (beta[t, q, 0] * g0 + beta[t, q, 1] * g1)
            for l in range(nloc):
                out[cell_dofs[t, l]] += val * N[q, l]


def face_jump(double[::1] out, const double[::1] uc,
              const idx_t[:, ::1] dofsL, const idx_t[:, ::1] dofsR,
              const double[:, :, :, ::1] gradL, const double[:, :, :, ::1] gradR,
              const double[:, ::1] coef):
    cdef Py_ssize_t nf = dofsL.shape[0]
    cdef Py_ssize_t nloc = dofsL.shape[1]
    cdef Py_ssize_t nq = coef.shape[1]
    cdef Py_ssize_t f, q, l
    cdef double j0, j1, c
    for f in range(nf):
        for q in range(nq):
            j0 = 0.0
            j1 = 0.0
            for l in range(nloc):
                j0 += gradL[f, q, l, 0] * uc[dofsL[f, l]]
                j1 += gradL[f, q, l, 1] * uc[dofsL[f, l]]
                j0 -= gradR[f, q, l, 0] * uc[dofsR[f, l]]
                j1 -= gradR[f, q, l, 1] * uc[dofsR[f, l]]
            c = coef[f, q]
            j0 *= c
            j1 *= c
            for l in range(nloc):
                out[dofsL[f, l]] += j0 * gradL[f, q, l, 0] + j1 * gradL[f, q, l, 1]
                out[dofsR[f, l]] -= j0 * gradR[f, q, l, 0] + j1 * gradR[f, q, l, 1]


def boundary_normal(double[::1] out0, double[::1] out1,
                    const double[::1] u0, const double[::1] u1,
                    const idx_t[:, ::1] dofs, const double[:, :, ::1] val,
                    const double[:, ::1] normal, const double[:, ::1] w):
    cdef Py_ssize_t nf = dofs.shape[0]
    cdef Py_ssize_t nloc = dofs.shape[1]
    cdef Py_ssize_t nq = w.shape[1]
    cdef Py_ssize_t f, q, l
    cdef double un, wun, n0, n1
    for f in range(nf):
        n0 = normal[f, 0]
        n1 = normal[f, 1]
        for q in range(nq):
            un = 0.0
            for l in range(nloc):
                un += val[f, q, l] * (n0 * u0[dofs[f, l]] + n1 * u1[dofs[f, l]])
            wun = w[f, q] * un
            for l in range(nloc):
                out0[dofs[f, l]] += wun * n0 * val[f, q, l]
                out1[dofs[f, l]] += wun * n1 * val[f, q, l]
