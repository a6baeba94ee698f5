"""Direct factorizations of the time-constant linear systems.

The IMEX step solves one saddle-point system per run configuration,

    [ M/tau + A/2   G      0 ] [u]   [rhs_u]
    [    -G^T       Sp     m ] [p] = [rhs_p]
    [     0        m^T     0 ] [z]   [  0  ]

with m the zero-mean constraint vector; the factorization is reused for
every step.  The splitting schemes use the pressure Poisson matrix and the
velocity transport matrix instead.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assemble import assemble_stiffness_scalar, mean_vector

FACTORIZATION_COUNT = 0


class SolverError(Exception):
    pass


class FactorizedSystem:
    """An LU-factorized sparse matrix reusable across right-hand sides.

    Factors in SuperLU's symmetric mode first (the step matrices are
    structurally symmetric, and the fill-in is several times smaller);
    falls back to plain partial-pivoted LU if a probe solve is inaccurate.
    """

    PROBE_TOL = 1e-9

    def __init__(self, matrix, nv, np_, tau=None):
        global FACTORIZATION_COUNT
        self.matrix = matrix.tocsr()
        self.nv = nv
        self.np = np_
        self.tau = tau
        csc = matrix.tocsc()
        try:
            self.lu = spla.splu(csc, permc_spec="MMD_AT_PLUS_A",
                                options={"SymmetricMode": True,
                                         "DiagPivotThresh": 0.001})
            probe = np.arange(1.0, csc.shape[0] + 1.0)
            probe /= np.linalg.norm(probe)
            if self.residual(self.lu.solve(probe), probe) > self.PROBE_TOL:
                raise RuntimeError("inaccurate symmetric-mode factorization")
        except RuntimeError:
            try:
                self.lu = spla.splu(csc)
            except RuntimeError as exc:
                raise SolverError(f"singular factorization: {exc}") from exc
        FACTORIZATION_COUNT += 1

    def solve(self, rhs):
        if len(rhs) != self.matrix.shape[0]:
            raise SolverError(
                f"rhs length {len(rhs)} does not match system size {self.matrix.shape[0]}")
        return self.lu.solve(rhs)

    def solve_step(self, rhs_u, rhs_p):
        """Solve for (u, p) given the momentum and continuity loads."""
        if len(rhs_u) != self.nv or len(rhs_p) != self.np:
            raise SolverError(
                f"block sizes ({len(rhs_u)}, {len(rhs_p)}) do not match "
                f"({self.nv}, {self.np})")
        ncon = self.matrix.shape[0] - self.nv - self.np
        x = self.solve(np.concatenate([rhs_u, rhs_p, np.zeros(ncon)]))
        return x[:self.nv], x[self.nv:self.nv + self.np]

    def residual(self, x, rhs):
        r = self.matrix @ x - rhs
        scale = np.linalg.norm(rhs)
        return np.linalg.norm(r) / (scale if scale > 0 else 1.0)


def build_imex_system(ops, tau, strong_dofs=None):
    """Factorize the coupled Crank-Nicolson step matrix."""
    if tau <= 0:
        raise SolverError(f"time step must be positive, got {tau}")
    nv = ops.M.shape[0]
    npr = ops.Sp.shape[0]
    m = sp.csr_matrix(ops.mean_row.reshape(-1, 1))
    K = sp.bmat([
        [ops.M / tau + 0.5 * ops.A, ops.G, None],
        [-ops.G.T, ops.Sp, m],
        [None, m.T, None],
    ], format="csr")
    if strong_dofs is not None and len(strong_dofs):
        K = _replace_rows(K, strong_dofs)
    return FactorizedSystem(K, nv, npr, tau)


def build_velocity_system(ops, tau, strong_dofs=None, include_viscous=True):
    """Factorize the split velocity update, M/tau (+ A/2 when viscous)."""
    if tau <= 0:
        raise SolverError(f"time step must be positive, got {tau}")
    K = (ops.M / tau + 0.5 * ops.A).tocsr() if include_viscous \
        else (ops.M / tau).tocsr()
    if strong_dofs is not None and len(strong_dofs):
        K = _replace_rows(K, strong_dofs)
    return FactorizedSystem(K, K.shape[0], 0, tau)


def build_pressure_poisson(pspace):
    """Factorize the Neumann Laplacian with the zero-mean constraint."""
    Kp = assemble_stiffness_scalar(pspace)
    m = sp.csr_matrix(mean_vector(pspace).reshape(-1, 1))
    K = sp.bmat([[Kp, m], [m.T, None]], format="csr")
    sysm = FactorizedSystem(K, 0, Kp.shape[0])
    return sysm


def solve_pressure(poisson, rhs_p):
    """Solve the constrained Poisson problem for a zero-mean pressure."""
    x = poisson.solve(np.concatenate([rhs_p, [0.0]]))
    return x[:poisson.np]


def _replace_rows(K, rows):
    """Turn the given rows into identity rows (strong Dirichlet)."""
    K = K.tolil()
    for r in rows:
        K.rows[r] = [int(r)]
        K.data[r] = [1.0]
    return K.tocsr()
