"""Benchmark definitions: exact fields, initial data, forcing, boundary data.

Closed-form solutions are stated symbolically; derivatives and the momentum
residual forcing f = u_t + (u.grad)u + grad p - mu lap u are derived with
sympy and lambdified once per case.  The traveling Taylor-Green vortex
solves the momentum equation exactly (residual simplifies to zero), so its
forcing is hardwired to zero.
"""

import numpy as np
import sympy as sym


class CaseError(Exception):
    pass


_X, _Y, _T = sym.symbols("x y t", real=True)


def _lambdify(expr):
    return sym.lambdify((_X, _Y, _T), expr, "numpy")


def _residual(u1, u2, p, mu):
    f1 = sym.diff(u1, _T) + u1 * sym.diff(u1, _X) + u2 * sym.diff(u1, _Y) \
        + sym.diff(p, _X) - mu * (sym.diff(u1, _X, 2) + sym.diff(u1, _Y, 2))
    f2 = sym.diff(u2, _T) + u1 * sym.diff(u2, _X) + u2 * sym.diff(u2, _Y) \
        + sym.diff(p, _Y) - mu * (sym.diff(u2, _X, 2) + sym.diff(u2, _Y, 2))
    return f1, f2


class BenchmarkCase:
    def __init__(self, name, mu, exact=None, forcing_exprs=None,
                 initial_exprs=None, periodic_x=False, bc_layout="dirichlet",
                 beta_inf=1.0):
        self.name = name
        self.mu = mu
        self.domain = (0.0, 1.0, 0.0, 1.0)
        self.periodic_x = periodic_x
        self.bc_layout = bc_layout
        self.beta_inf = beta_inf
        self.has_exact = exact is not None
        if exact is not None:
            u1, u2, p = exact
            self._u1, self._u2 = _lambdify(u1), _lambdify(u2)
            self._p = _lambdify(p)
            self._du = [_lambdify(sym.diff(u, v))
                        for u in (u1, u2) for v in (_X, _Y)]
        if forcing_exprs is not None:
            self._f1, self._f2 = [_lambdify(e) for e in forcing_exprs]
        else:
            self._f1 = self._f2 = None
        if initial_exprs is not None:
            i1, i2 = initial_exprs
            self._i1, self._i2 = _lambdify(i1), _lambdify(i2)
        else:
            self._i1 = self._i2 = None

    # All field accessors return vectorized callables of (x, y).

    def velocity(self, t):
        if not self.has_exact:
            raise CaseError(f"case {self.name} has no exact solution")
        return lambda x, y: (np.broadcast_to(np.asarray(self._u1(x, y, t), dtype=float), np.shape(x)),
                             np.broadcast_to(np.asarray(self._u2(x, y, t), dtype=float), np.shape(x)))

    def pressure(self, t):
        if not self.has_exact:
            raise CaseError(f"case {self.name} has no exact solution")
        return lambda x, y: np.broadcast_to(np.asarray(self._p(x, y, t), dtype=float), np.shape(x))

    def initial_velocity(self):
        if self.has_exact:
            return self.velocity(0.0)
        return lambda x, y: (np.broadcast_to(np.asarray(self._i1(x, y, 0.0), dtype=float), np.shape(x)),
                             np.broadcast_to(np.asarray(self._i2(x, y, 0.0), dtype=float), np.shape(x)))

    def forcing(self, t):
        if self._f1 is None and not self.has_exact:
            raise CaseError(f"case {self.name} has no closed-form solution, "
                            "forcing is undefined")
        if self._f1 is None:
            return lambda x, y: (np.zeros(np.shape(x)), np.zeros(np.shape(x)))
        return lambda x, y: (np.broadcast_to(np.asarray(self._f1(x, y, t), dtype=float), np.shape(x)),
                             np.broadcast_to(np.asarray(self._f2(x, y, t), dtype=float), np.shape(x)))

    def velocity_gradient(self, t):
        """Exact velocity gradient (d1u1, d2u1, d1u2, d2u2) at time t."""
        if not self.has_exact:
            raise CaseError(f"case {self.name} has no exact solution")
        return lambda x, y: tuple(
            np.broadcast_to(np.asarray(d(x, y, t), dtype=float), np.shape(x))
            for d in self._du)

    def dirichlet(self, t):
        """Boundary velocity data; None means homogeneous u.n handling."""
        if self.bc_layout == "channel":
            return None
        return self.velocity(t)

    def oseen_beta(self, t):
        """Prescribed convection field (the exact velocity)."""
        return self.velocity(t)


def taylor_green(mu=3.571e-6):
    """Traveling vortex at unit phase speed; solves Navier-Stokes with f=0."""
    E = sym.exp(-8 * sym.pi ** 2 * mu * _T)
    u1 = 1 + sym.sin(2 * sym.pi * (_X - _T)) * sym.cos(2 * sym.pi * _Y) * E
    u2 = -sym.cos(2 * sym.pi * (_X - _T)) * sym.sin(2 * sym.pi * _Y) * E
    p = sym.Rational(1, 4) * (sym.cos(4 * sym.pi * (_X - _T))
                              + sym.cos(4 * sym.pi * _Y)) \
        * sym.exp(-16 * sym.pi ** 2 * mu * _T)
    return BenchmarkCase("taylor_green", mu, exact=(u1, u2, p))


def low_re(mu=0.1):
    """Manufactured viscous solution with zero boundary trace."""
    u1 = 2 * sym.cos(_T) * sym.sin(sym.pi * _X) ** 2 * _Y * (1 - _Y) * (1 - 2 * _Y)
    u2 = -sym.pi * sym.cos(_T) * sym.sin(2 * sym.pi * _X) * _Y ** 2 * (1 - _Y) ** 2
    p = sym.sin(sym.pi * _X) * sym.cos(sym.pi * _Y) * sym.cos(_T)
    f1, f2 = _residual(u1, u2, p, sym.Float(mu))
    return BenchmarkCase("low_re", mu, exact=(u1, u2, p), forcing_exprs=(f1, f2))


def kelvin_helmholtz(mu=3.571e-6, u_inf=1.0, sigma0=1.0 / 28.0, c=0.001,
                     theta=8 * np.pi):
    """Perturbed shear layer; periodic in x, penalized u.n = 0 at the walls."""
    xi = c * u_inf * sym.exp(-(_Y - sym.Rational(1, 2)) ** 2 / sigma0 ** 2) \
        * sym.cos(theta * _X)
    i1 = u_inf * sym.tanh((2 * _Y - 1) / sigma0) + sym.diff(xi, _Y)
    i2 = -sym.diff(xi, _X)
    return BenchmarkCase("kelvin_helmholtz", mu, initial_exprs=(i1, i2),
                         periodic_x=True, bc_layout="channel", beta_inf=u_inf)


_CASES = {
    "taylor_green": taylor_green,
    "low_re": low_re,
    "kelvin_helmholtz": kelvin_helmholtz,
}


def get_case(name, mu=None):
    if name not in _CASES:
        raise CaseError(f"unknown case {name!r}; available: {sorted(_CASES)}")
    return _CASES[name]() if mu is None else _CASES[name](mu=mu)


def forcing(case, t, x, y):
    """Momentum-residual forcing of a case at one time."""
    f = case.forcing(t)
    return f(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
