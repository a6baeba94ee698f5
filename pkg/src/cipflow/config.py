"""Run configuration: flat key = value sections, strict parsing.

Defaults reproduce the reference benchmark setup: gamma_u = gamma_p = 0.001,
Courant 0.05 with the hyperbolic rule for degree 1, Courant 0.025 with the
4/3 rule for degree 2, mu = 3.571e-6 for the high-Reynolds cases.
"""

import configparser
from dataclasses import dataclass, field
from typing import List, Optional

from .params import default_gamma

CASE_MU_DEFAULTS = {
    "taylor_green": 3.571e-6,
    "low_re": 0.1,
    "kelvin_helmholtz": 3.571e-6,
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    case: str = "taylor_green"
    mu: Optional[float] = None
    degree: int = 1
    levels: List[int] = field(default_factory=lambda: [10])
    strong_dirichlet: bool = False
    scheme: str = "imex_cn"
    convection: str = "navier_stokes"
    cfl_rule: Optional[str] = None
    courant: Optional[float] = None
    final_time: float = 1.0
    tau: Optional[float] = None
    viscous_treatment: Optional[str] = None
    gamma_u: float = 0.001
    gamma_p: float = 0.001
    gamma: Optional[float] = None
    eps_perp: float = 0.01
    beta_inf: float = 1.0
    out_dir: str = "out"
    stride: int = 1

    def resolve(self):
        """Fill degree-dependent defaults and validate combinations."""
        if self.mu is None:
            if self.case not in CASE_MU_DEFAULTS:
                raise ConfigError(f"unknown case {self.case!r}")
            self.mu = CASE_MU_DEFAULTS[self.case]
        if self.degree not in (1, 2):
            raise ConfigError(f"degree must be 1 or 2, got {self.degree}")
        if self.cfl_rule is None:
            self.cfl_rule = "hyperbolic" if self.degree == 1 else "four_thirds"
        if self.cfl_rule not in ("hyperbolic", "four_thirds"):
            raise ConfigError(f"unknown cfl_rule {self.cfl_rule!r}")
        if self.courant is None:
            self.courant = 0.05 if self.degree == 1 else 0.025
        if self.gamma is None:
            self.gamma = default_gamma(self.degree)
        if self.scheme not in ("imex_cn", "split_inviscid", "split_viscous"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.convection not in ("oseen", "navier_stokes"):
            raise ConfigError(f"unknown convection mode {self.convection!r}")
        if self.viscous_treatment is None:
            self.viscous_treatment = ("explicit" if self.scheme == "split_inviscid"
                                      else "implicit")
        if self.viscous_treatment not in ("implicit", "explicit"):
            raise ConfigError(
                f"viscous_treatment must be implicit or explicit, got "
                f"{self.viscous_treatment!r}")
        if self.scheme == "split_inviscid" and self.mu > 0 \
                and self.viscous_treatment == "implicit":
            raise ConfigError(
                "split_inviscid cannot treat viscosity implicitly; set "
                "viscous_treatment = explicit or use split_viscous")
        if self.scheme == "split_viscous" and self.mu == 0:
            raise ConfigError("split_viscous requires mu > 0; use "
                              "split_inviscid for inviscid flow")
        if not self.levels or any(n < 1 for n in self.levels):
            raise ConfigError(f"levels must be positive cell counts, got {self.levels}")
        if self.final_time <= 0:
            raise ConfigError(f"final_time must be positive, got {self.final_time}")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        return self


_SCHEMA = {
    "case": {"name": str, "mu": float},
    "discretization": {"degree": int, "levels": "intlist",
                       "strong_dirichlet": bool},
    "stabilization": {"gamma_u": float, "gamma_p": float, "gamma": float,
                      "eps_perp": float},
    "time": {"scheme": str, "convection": str, "cfl_rule": str,
             "courant": float, "final_time": float, "tau": float,
             "beta_inf": float, "viscous_treatment": str},
    "output": {"directory": str, "stride": int},
}

_DEST = {
    ("case", "name"): "case",
    ("output", "directory"): "out_dir",
}


def _convert(kind, raw, where):
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "intlist":
            return [int(tok) for tok in raw.split()]
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {where}: {exc}") from exc


def parse_config(path):
    """Read a config file; unknown sections or keys are rejected."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as f:
            parser.read_file(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    cfg = RunConfig()
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{section}] in {path}; expected one of "
                f"{sorted(_SCHEMA)}")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}] of {path}; "
                    f"expected one of {sorted(_SCHEMA[section])}")
            dest = _DEST.get((section, key), key)
            setattr(cfg, dest, _convert(_SCHEMA[section][key], raw,
                                        f"[{section}] {key}"))
    return cfg.resolve()
