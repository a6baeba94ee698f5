"""Command line driver: single runs, convergence sweeps, mesh dumps.

Exit codes: 0 success, 2 configuration error, 3 numerical blow-up.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import diagnostics as diag
from .assemble import AnalyticBeta, DiscreteBeta
from .cases import get_case
from .config import ConfigError, parse_config
from .mesh import build_structured_mesh, dump_mesh, make_periodic_x
from .params import PhysParams
from .space import build_space
from .stepping import BlowUpError, Stepper, nominal_tau, run


class Problem:
    """Everything needed to run one mesh level of a configuration."""

    def __init__(self, cfg, n):
        self.cfg = cfg
        self.case = get_case(cfg.case, mu=cfg.mu)
        mesh = build_structured_mesh(n, n, self.case.domain)
        if self.case.periodic_x:
            mesh = make_periodic_x(mesh)
        self.mesh = mesh
        self.h = mesh.h_cell
        self.vspace = build_space(mesh, cfg.degree, components=2)
        self.pspace = build_space(mesh, cfg.degree, components=1)
        self.params = PhysParams(
            mu=cfg.mu, h=self.h, beta_inf=cfg.beta_inf, gamma_u=cfg.gamma_u,
            gamma_p=cfg.gamma_p, gamma=cfg.gamma, eps_perp=cfg.eps_perp)
        tau0 = cfg.tau if cfg.tau else nominal_tau(cfg.cfl_rule, cfg.courant, self.h)
        nsteps = max(1, math.ceil(cfg.final_time / tau0 - 1e-12))
        self.tau = cfg.final_time / nsteps
        self.nsteps = nsteps
        self.stepper = Stepper(
            self.case, self.vspace, self.pspace, self.params, self.tau,
            cfg.scheme, convection=cfg.convection,
            strong_dirichlet=cfg.strong_dirichlet,
            explicit_viscosity=(cfg.viscous_treatment == "explicit"
                                if cfg.scheme == "split_inviscid" else None))

    def _beta_at(self, state):
        if self.cfg.convection == "oseen":
            return AnalyticBeta(self.case.oseen_beta(state.t))
        return DiscreteBeta(state.u_curr)

    def diagnostics_row(self, state):
        errors = None
        if self.case.has_exact:
            errors = self.errors(state)
        return diag.energy_row(state, self.stepper.ops, self._beta_at(state),
                               errors)

    def errors(self, state):
        """L2/H1 errors; the pressure is compared at its own time level
        t - tau/2 (the half-step the scheme's pressure approximates)."""
        t = state.t
        return {
            "err_u_l2": diag.l2_error(self.vspace, state.u_curr,
                                      self.case.velocity(t)),
            "err_p_l2": diag.l2_error(self.pspace, state.p_curr,
                                      self.case.pressure(t - 0.5 * self.tau)),
            "err_u_h1": diag.h1_error(self.vspace, state.u_curr,
                                      self.case.velocity_gradient(t)),
        }


def run_single(cfg, out_dir=None):
    """One run at the first configured level; writes CSV and state dump."""
    out = out_dir or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    prob = Problem(cfg, cfg.levels[0])
    csv_path = os.path.join(out, "diagnostics.csv")
    rows = []
    try:
        rows, state = run(prob.stepper, cfg.final_time, cfg.stride,
                          row_fn=prob.diagnostics_row)
    except BlowUpError as exc:
        with open(csv_path, "w") as f:
            f.write(diag.rows_to_csv(rows, with_errors=prob.case.has_exact))
            f.write(f"# ABORTED: {exc}\n")
        raise
    with open(csv_path, "w") as f:
        f.write(diag.rows_to_csv(rows, with_errors=prob.case.has_exact))
    np.savetxt(os.path.join(out, "final_u.txt"), state.u_curr, fmt="%.17g")
    np.savetxt(os.path.join(out, "final_p.txt"), state.p_curr, fmt="%.17g")
    dump_mesh(prob.mesh, os.path.join(out, "nodes.txt"),
              os.path.join(out, "elements.txt"))
    return rows, state


def run_convergence_sweep(cfg, out_dir=None):
    """Run every level to the final time and tabulate errors and rates."""
    if len(cfg.levels) < 2:
        raise ConfigError(f"a sweep needs at least 2 levels, got {cfg.levels}")
    out = out_dir or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    hs, taus, eu, ep = [], [], [], []
    for n in cfg.levels:
        prob = Problem(cfg, n)
        try:
            _, state = run(prob.stepper, cfg.final_time, stride=10 ** 9)
        except BlowUpError:
            raise
        except Exception as exc:
            raise RuntimeError(f"sweep level n={n} failed: {exc}") from exc
        err = prob.errors(state)
        hs.append(prob.h)
        taus.append(prob.tau)
        eu.append(err["err_u_l2"])
        ep.append(err["err_p_l2"])
    lines = ["h,tau,err_u_l2,err_p_l2"]
    for row in zip(hs, taus, eu, ep):
        lines.append(",".join(diag.format_float(v) for v in row))
    for label, err in (("u_l2", eu), ("p_l2", ep)):
        pairwise = diag.convergence_rates(hs, err)
        fit = diag.fitted_rate(hs, err)
        lines.append("# rates_" + label + " = "
                     + " ".join(f"{r:.4f}" for r in pairwise))
        lines.append(f"# fitted_rate_{label} = {fit:.4f}")
    text = "\n".join(lines) + "\n"
    path = os.path.join(out, "sweep.csv")
    with open(path, "w") as f:
        f.write(text)
    return {"h": hs, "tau": taus, "err_u_l2": eu, "err_p_l2": ep,
            "fitted_rate_u": diag.fitted_rate(hs, eu),
            "fitted_rate_p": diag.fitted_rate(hs, ep), "path": path}


def dump_mesh_cmd(cfg, out_dir=None):
    out = out_dir or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    case = get_case(cfg.case, mu=cfg.mu)
    mesh = build_structured_mesh(cfg.levels[0], cfg.levels[0], case.domain)
    if case.periodic_x:
        mesh = make_periodic_x(mesh)
    dump_mesh(mesh, os.path.join(out, "nodes.txt"),
              os.path.join(out, "elements.txt"))


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cipflow")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "sweep", "dump-mesh"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--levels", type=int, nargs="+", default=None)
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.levels:
            cfg.levels = args.levels
            cfg.resolve()
        if args.command == "run":
            run_single(cfg, args.out)
        elif args.command == "sweep":
            run_convergence_sweep(cfg, args.out)
        else:
            dump_mesh_cmd(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
