"""Time advancement: monolithic IMEX Crank-Nicolson and the two
pressure-projection splittings derived from it.

State convention: u_curr approximates u(t^n), u_prev approximates
u(t^{n-1}), p_curr approximates p(t^{n-1/2}).  The convection term is
explicit through the extrapolation u_hat = 1.5 u^n - 0.5 u^{n-1}, evaluated
at t^{n+1/2}; in Navier-Stokes mode the convecting field is u_hat itself.
"""

from dataclasses import dataclass

import numpy as np

from .assemble import (AnalyticBeta, DiscreteBeta, DiscreteOperators,
                       apply_convection, forcing_rhs, l2_project,
                       mass_bc_rhs, normal_penalty_bc_rhs, viscous_bc_rhs)
from .saddle import (build_imex_system, build_pressure_poisson,
                     build_velocity_system, solve_pressure)

SCHEMES = ("imex_cn", "split_inviscid", "split_viscous")
CONVECTION_MODES = ("oseen", "navier_stokes")

BLOWUP_FACTOR = 1e6


class SteppingError(Exception):
    pass


class BlowUpError(Exception):
    def __init__(self, step, t, norm, ref, co, co43):
        self.step = step
        self.t = t
        msg = (f"velocity blow-up at step {step} (t={t:.6g}): ||u||={norm:.3e} "
               f"exceeds {BLOWUP_FACTOR:.0e} x ||u1||={ref:.3e}; "
               f"Courant numbers Co={co:.3g}, Co_4/3={co43:.3g} "
               "(reduce the time step)")
        super().__init__(msg)


@dataclass
class FlowState:
    u_prev: np.ndarray
    u_curr: np.ndarray
    p_curr: np.ndarray
    n: int
    t: float

    def extrapolated(self):
        """u_hat at the next half level, 1.5 u^n - 0.5 u^{n-1}."""
        return 1.5 * self.u_curr - 0.5 * self.u_prev

    def average_with(self, u_new):
        return 0.5 * (u_new + self.u_curr)


def nominal_tau(cfl_rule, courant, h):
    """Time step from the configured CFL rule (beta_inf = 1 convention)."""
    if cfl_rule == "hyperbolic":
        return courant * h
    if cfl_rule == "four_thirds":
        return courant * h ** (4.0 / 3.0)
    raise SteppingError(f"unknown CFL rule {cfl_rule!r}")


def courant_numbers(tau, h, beta_inf):
    co = (beta_inf + 1.0) * tau / h
    co43 = tau / (h / beta_inf) ** (4.0 / 3.0) if beta_inf > 0 else 0.0
    return co, co43


class Stepper:
    """Holds the factorized systems for one run and advances FlowStates."""

    def __init__(self, case, vspace, pspace, params, tau, scheme,
                 convection="navier_stokes", strong_dirichlet=False,
                 explicit_viscosity=None, record_residuals=False):
        if scheme not in SCHEMES:
            raise SteppingError(f"unknown scheme {scheme!r}")
        if convection not in CONVECTION_MODES:
            raise SteppingError(f"unknown convection mode {convection!r}")
        if scheme == "split_viscous" and params.mu == 0.0:
            raise SteppingError("split_viscous requires mu > 0")
        self.case = case
        self.vspace = vspace
        self.pspace = pspace
        self.params = params
        self.tau = tau
        self.scheme = scheme
        self.convection = convection
        self.strong = strong_dirichlet
        self.record_residuals = record_residuals
        self.last_residuals = {}

        if explicit_viscosity is None:
            explicit_viscosity = scheme == "split_inviscid"
        self.explicit_viscosity = explicit_viscosity

        nfb = len(vspace.mesh.boundary_faces)
        if case.bc_layout == "channel" or strong_dirichlet:
            mask = np.zeros(nfb, dtype=bool)
        else:
            mask = np.ones(nfb, dtype=bool)
        self.dirichlet_mask = mask
        self.weak_data = case.bc_layout == "dirichlet" and not strong_dirichlet

        self.ops = DiscreteOperators(vspace, pspace, params,
                                     dirichlet_mask=mask)
        self.strong_dofs = None
        if strong_dirichlet:
            sd = vspace.boundary_scalar_dofs()
            n = vspace.ndof_scalar
            self.strong_dofs = np.concatenate([sd, sd + n])
            self.strong_coords = vspace.dof_coords[sd]

        if scheme == "imex_cn":
            self.system = build_imex_system(self.ops, tau, self.strong_dofs)
        else:
            self.poisson = build_pressure_poisson(pspace)
            # velocity update matrix: M/tau for the inviscid split,
            # M/tau + A/2 for the viscous one
            self.velsys = build_velocity_system(
                self.ops, tau, self.strong_dofs,
                include_viscous=(scheme == "split_viscous"))
        self.ref_norm = None

    # -- helpers ----------------------------------------------------------

    def mass_norm(self, u):
        return float(np.sqrt(u @ (self.ops.M @ u)))

    def _beta(self, t_half, uhat):
        if self.convection == "oseen":
            return AnalyticBeta(self.case.oseen_beta(t_half))
        return DiscreteBeta(uhat)

    def _explicit_convection(self, uhat, t_half):
        """Vector of (C w*, v_i) minus the boundary-penalty data term.

        Under strong imposition the boundary penalty is dropped; it would be
        redundant on the replaced rows and would leak into the projection.
        """
        beta = self._beta(t_half, uhat)
        binf = beta.sup_norm(self.vspace)
        c = apply_convection(self.vspace, uhat, beta, self.params, binf,
                             boundary_penalty=not self.strong)
        if self.weak_data:
            g = self.case.dirichlet(t_half)
            c -= normal_penalty_bc_rhs(self.vspace, g, binf)
        return c, binf

    def _set_strong_rows(self, rhs, t):
        g1, g2 = self.case.dirichlet(t)(self.strong_coords[:, 0],
                                        self.strong_coords[:, 1])
        half = len(self.strong_dofs) // 2
        rhs[self.strong_dofs[:half]] = g1
        rhs[self.strong_dofs[half:]] = g2

    def _forcing(self, t_half):
        if getattr(self.case, "_f1", None) is None:
            return None
        return forcing_rhs(self.vspace, self.case.forcing(t_half))

    def _viscous_data(self, t):
        if not self.weak_data or self.params.mu == 0.0:
            return None
        return viscous_bc_rhs(self.vspace, self.params, self.case.dirichlet(t),
                              self.dirichlet_mask)

    def _check_blowup(self, state, u_new):
        norm = self.mass_norm(u_new)
        if self.ref_norm is None:
            self.ref_norm = max(self.mass_norm(state.u_curr), 1e-300)
        if not np.isfinite(norm) or norm > BLOWUP_FACTOR * self.ref_norm:
            co, co43 = courant_numbers(self.tau, self.params.h,
                                       max(self.params.beta_inf, 1e-300))
            raise BlowUpError(state.n + 1, state.t + self.tau, norm,
                              self.ref_norm, co, co43)

    # -- initialization ----------------------------------------------------

    def initialize(self):
        """Project the initial data; u^1 from the exact solution when it
        exists, else one first-order bootstrap step (u_hat = u^0)."""
        u0 = l2_project(self.vspace, self.case.initial_velocity())
        p0 = np.zeros(self.pspace.ndof_scalar)
        if self.case.has_exact:
            u1 = l2_project(self.vspace, self.case.velocity(self.tau))
            return FlowState(u0, u1, p0, 1, self.tau)
        boot = FlowState(u0.copy(), u0, p0, 0, 0.0)
        out = self.step(boot, first_order=True)
        return out

    # -- steps -------------------------------------------------------------

    def step(self, state, first_order=False):
        if self.scheme == "imex_cn":
            return self.imex_cn_step(state, first_order)
        if self.scheme == "split_inviscid":
            return self.split_inviscid_step(state, first_order)
        return self.split_viscous_step(state, first_order)

    def imex_cn_step(self, state, first_order=False):
        tau = self.tau
        t_half = state.t + 0.5 * tau
        t_new = state.t + tau
        uhat = state.u_curr if first_order else state.extrapolated()
        c, _ = self._explicit_convection(uhat, t_half)
        rhs_u = self.ops.M @ (state.u_curr / tau) - 0.5 * (self.ops.A @ state.u_curr) - c
        f = self._forcing(t_half)
        if f is not None:
            rhs_u += f
        visc_old = self._viscous_data(state.t)
        if visc_old is not None:
            rhs_u += 0.5 * (visc_old + self._viscous_data(t_new))
        if self.weak_data or self.strong:
            rhs_p = mass_bc_rhs(self.pspace, self.case.dirichlet(t_new))
        else:
            rhs_p = np.zeros(self.pspace.ndof_scalar)
        if self.strong:
            self._set_strong_rows(rhs_u, t_new)
        rhs_full = np.concatenate([rhs_u, rhs_p, [0.0]])
        x = self.system.solve(rhs_full)
        nv = len(rhs_u)
        u_new, p_new = x[:nv], x[nv:nv + len(rhs_p)]
        if self.record_residuals:
            self.last_residuals = {"saddle": self.system.residual(x, rhs_full)}
        self._check_blowup(state, u_new)
        return FlowState(state.u_curr, u_new, p_new, state.n + 1, t_new)

    def split_inviscid_step(self, state, first_order=False):
        """Pressure-Poisson splitting; viscosity (if any) handled explicitly."""
        tau = self.tau
        t_half = state.t + 0.5 * tau
        ustar = state.u_curr if first_order else state.extrapolated()
        c, _ = self._explicit_convection(ustar, t_half)
        e = c
        if self.explicit_viscosity and self.params.mu > 0.0:
            e = e + self.ops.A @ ustar
            visc = self._viscous_data(t_half)
            if visc is not None:
                e = e - visc
        f = self._forcing(t_half)
        load = -e if f is None else f - e
        r = state.u_curr / tau + self.ops.mass_solve(load)
        rhs_p = self.ops.D.T @ r
        if self.strong:
            # prescribed normal flux: (grad p, grad q) = (r, grad q)
            #                         - (g.n, q)_boundary / tau
            rhs_p += mass_bc_rhs(self.pspace,
                                 self.case.dirichlet(state.t + tau)) / tau
        rhs_full = np.concatenate([rhs_p, [0.0]])
        x = self.poisson.solve(rhs_full)
        p_new = x[:-1]
        rhs_v = self.ops.M @ r - self.ops.G @ p_new
        if self.strong:
            self._set_strong_rows(rhs_v, state.t + tau)
        u_new = self.velsys.solve(rhs_v)
        if self.record_residuals:
            self.last_residuals = {
                "poisson": self.poisson.residual(x, rhs_full),
                "velocity": self.velsys.residual(u_new, rhs_v),
            }
        self._check_blowup(state, u_new)
        return FlowState(state.u_curr, u_new, p_new, state.n + 1, state.t + tau)

    def split_viscous_step(self, state, first_order=False):
        """Viscous splitting: explicit viscosity in the Poisson residual,
        implicit Crank-Nicolson viscosity in the velocity update."""
        tau = self.tau
        t_half = state.t + 0.5 * tau
        t_new = state.t + tau
        ustar = state.u_curr if first_order else state.extrapolated()
        c, _ = self._explicit_convection(ustar, t_half)
        aU = self.ops.A @ ustar
        visc_half = self._viscous_data(t_half)
        if visc_half is not None:
            aU = aU - visc_half
        f = self._forcing(t_half)
        load = -(c + aU) if f is None else f - (c + aU)
        rD = state.u_curr / tau + self.ops.mass_solve(load)
        rhs_p = self.ops.D.T @ rD
        if self.strong:
            rhs_p += mass_bc_rhs(self.pspace, self.case.dirichlet(t_new)) / tau
        p_new = solve_pressure(self.poisson, rhs_p)
        rhs_v = self.ops.M @ (state.u_curr / tau) - c - self.ops.G @ p_new \
            - 0.5 * (self.ops.A @ state.u_curr)
        if f is not None:
            rhs_v += f
        visc_old = self._viscous_data(state.t)
        if visc_old is not None:
            rhs_v += 0.5 * (visc_old + self._viscous_data(t_new))
        if self.strong:
            self._set_strong_rows(rhs_v, t_new)
        u_new = self.velsys.solve(rhs_v)
        if self.record_residuals:
            self.last_residuals = {
                "velocity": self.velsys.residual(u_new, rhs_v)}
        self._check_blowup(state, u_new)
        return FlowState(state.u_curr, u_new, p_new, state.n + 1, t_new)


def run(stepper, T, stride=1, row_fn=None):
    """Advance from the initialized state to T = N tau.

    Emits row_fn(state) every `stride` steps (and at the start and end).
    Returns (rows, final_state).  Step failures are annotated with the index.
    """
    tau = stepper.tau
    N = int(round(T / tau))
    if abs(N * tau - T) > 1e-9 * max(T, 1.0):
        raise SteppingError(f"final time {T} is not a multiple of tau={tau}")
    if N < 1:
        raise SteppingError(f"final time {T} shorter than one step {tau}")
    state = stepper.initialize()
    rows = []
    if row_fn is not None:
        rows.append(row_fn(state))
    while state.n < N:
        try:
            state = stepper.step(state)
        except BlowUpError:
            raise
        except Exception as exc:
            raise SteppingError(f"step {state.n + 1} failed: {exc}") from exc
        if row_fn is not None and (state.n % stride == 0 or state.n == N):
            rows.append(row_fn(state))
    return rows, state
