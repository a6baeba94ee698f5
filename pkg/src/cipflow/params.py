"""Physical and stabilization parameters with derived mesh-Reynolds data."""

from dataclasses import dataclass


@dataclass
class PhysParams:
    """Viscosity and stabilization constants.

    h is the mesh parameter entering the coefficient formulas (the cell side
    for structured grids); beta_inf is the nominal convection bound used for
    the pressure stabilization scaling and CFL bookkeeping.  The convection
    operator measures its own sup of |beta| per application.
    """

    mu: float
    h: float
    beta_inf: float = 1.0
    gamma_u: float = 0.001
    gamma_p: float = 0.001
    gamma: float = 10.0
    eps_perp: float = 0.01

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"viscosity must be nonnegative, got {self.mu}")
        if self.gamma_u < 0 or self.gamma_p < 0:
            raise ValueError("stabilization parameters must be nonnegative")
        if self.gamma <= 0:
            raise ValueError(f"Nitsche penalty must be positive, got {self.gamma}")
        if self.eps_perp <= 0:
            raise ValueError(f"crosswind floor must be positive, got {self.eps_perp}")

    @property
    def reynolds(self):
        if self.mu == 0.0:
            return float("inf")
        return self.h * self.beta_inf / self.mu

    @property
    def xi(self):
        re = self.reynolds
        return 1.0 if re <= 1.0 else 1.0 / re


def default_gamma(degree):
    """Coercivity-safe Nitsche penalty for degree-k elements."""
    return 10.0 * degree * degree
