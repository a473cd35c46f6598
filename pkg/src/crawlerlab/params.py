"""Dimensional parameters, characteristic scales, and the dimensionless groups.

Units are documented in the field comments but not enforced; validation only
checks signs. The timescale ratio ``eps`` is stored explicitly (default 1e-4)
because the singular-perturbation machinery works with the eps-scaled groups.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError, InvalidParameterError

DEFAULT_EPS = 1e-4


@dataclass(frozen=True)
class DimensionalParams:
    """Physical constants of the crawler body and controller circuit."""

    m: float         # segment mass [kg]
    ell: float       # natural body length [m]
    k: float         # elastic constant [kg/s^2]
    b: float         # viscous damping [kg/s]
    A_sigma: float   # friction force scale [N]
    k_v: float       # voltage-to-force gain [A s/m]
    c: float         # capacitance [F]
    kappa: float     # cubic current coefficient [A/V^3]
    rho: float       # linear current coefficient [A/V]
    gamma_p: float   # proprioceptive current gain [A/m]
    eps_f: float     # friction slope speed [m/s]
    n_f: float       # friction anisotropy [-]

    def __post_init__(self):
        strict = ("m", "ell", "k", "A_sigma", "k_v", "c", "kappa", "rho",
                  "gamma_p", "eps_f")
        for name in strict:
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be > 0, got {v!r}")
        for name in ("b", "n_f"):
            v = getattr(self, name)
            if v < 0.0 or not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class Scales:
    """Characteristic mechanical and electrical scales."""

    l_star: float    # length scale [m]
    m_star: float    # mass scale [kg]
    t_star: float    # time scale [s]
    omega_n: float   # natural frequency [rad/s]
    V_star: float    # voltage scale [V]


@dataclass(frozen=True)
class Groups:
    """The eight dimensionless groups plus the timescale ratio eps.

    The eps-scaled variants ``pi_c_eps = eps * pi_c`` (and likewise for l, s)
    are exposed as properties so they can never drift out of sync.
    """

    zeta: float      # damping ratio
    pi_f: float      # friction / elastic force ratio
    pi_V: float      # actuator / elastic force ratio
    pi_eps: float    # friction slope group
    n_f: float       # friction anisotropy
    pi_c: float      # cubic (fast negative feedback) group
    pi_l: float      # linear (fast positive feedback) group
    pi_s: float      # sensorimotor gain
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        for name in ("pi_f", "pi_V", "pi_eps", "pi_c", "pi_l", "pi_s", "eps"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be > 0, got {v!r}")
        # n_f = 0 (isotropic friction) is admitted for the relay analysis even
        # though the bifurcation theorems assume n_f > 0.
        for name in ("zeta", "n_f"):
            v = getattr(self, name)
            if v < 0.0 or not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be >= 0, got {v!r}")

    @property
    def pi_c_eps(self) -> float:
        return self.eps * self.pi_c

    @property
    def pi_l_eps(self) -> float:
        return self.eps * self.pi_l

    @property
    def pi_s_eps(self) -> float:
        return self.eps * self.pi_s

    def with_pi_s(self, pi_s: float) -> "Groups":
        return replace(self, pi_s=pi_s)


def characteristic_scales(p: DimensionalParams) -> Scales:
    """Mechanical scales plus the voltage scale 100*sqrt(c/(t_star*kappa))."""
    omega_n = math.sqrt(2.0 * p.k / p.m)
    t_star = 1.0 / omega_n
    V_star = 100.0 * math.sqrt(p.c / (t_star * p.kappa))
    return Scales(l_star=p.ell, m_star=2.0 * p.m, t_star=t_star,
                  omega_n=omega_n, V_star=V_star)


def nondimensionalize(p: DimensionalParams, sc: Scales,
                      eps: float = DEFAULT_EPS) -> Groups:
    """Form the eight dimensionless groups from dimensional constants."""
    if sc.t_star <= 0 or sc.l_star <= 0 or sc.V_star <= 0:
        raise InvalidParameterError("scales must be strictly positive")
    return Groups(
        zeta=p.b / math.sqrt(2.0 * p.m * p.k),
        pi_f=p.A_sigma / (2.0 * p.k * sc.l_star),
        pi_V=0.5 * p.k_v * sc.V_star / (p.k * sc.l_star),
        pi_eps=sc.l_star / (sc.t_star * p.eps_f),
        n_f=p.n_f,
        pi_c=p.kappa * sc.V_star ** 2 * sc.t_star / p.c,
        pi_l=p.rho * sc.t_star / p.c,
        pi_s=p.gamma_p * sc.l_star * sc.t_star / (p.c * sc.V_star),
        eps=eps,
    )


def groups_from_dimensional(p: DimensionalParams,
                            eps: float = DEFAULT_EPS) -> Groups:
    return nondimensionalize(p, characteristic_scales(p), eps)


_GROUP_KEYS = {"zeta", "pi_f", "pi_V", "pi_eps", "n_f", "pi_c", "pi_l",
               "pi_s", "eps"}
_DIM_KEYS = {f.name for f in fields(DimensionalParams)} | {"eps"}


def groups_from_mapping(data: dict) -> Groups:
    """Build Groups from a parsed parameter mapping.

    Accepts exactly one of the two top-level shapes ``{"dimensional": {...}}``
    or ``{"groups": {...}}``; unknown keys anywhere are rejected.
    """
    if not isinstance(data, dict):
        raise ConfigError("parameter block must be a JSON object")
    heads = set(data.keys())
    if heads == {"groups"}:
        body = data["groups"]
        unknown = set(body) - _GROUP_KEYS
        if unknown:
            raise ConfigError(f"unknown group keys: {sorted(unknown)}")
        missing = (_GROUP_KEYS - {"eps"}) - set(body)
        if missing:
            raise ConfigError(f"missing group keys: {sorted(missing)}")
        try:
            return Groups(**{k: float(v) for k, v in body.items()})
        except InvalidParameterError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad group value: {exc}") from exc
    if heads == {"dimensional"}:
        body = data["dimensional"]
        unknown = set(body) - _DIM_KEYS
        if unknown:
            raise ConfigError(f"unknown dimensional keys: {sorted(unknown)}")
        missing = (_DIM_KEYS - {"eps"}) - set(body)
        if missing:
            raise ConfigError(f"missing dimensional keys: {sorted(missing)}")
        eps = float(body.get("eps", DEFAULT_EPS))
        try:
            p = DimensionalParams(**{k: float(v) for k, v in body.items()
                                     if k != "eps"})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad dimensional value: {exc}") from exc
        return groups_from_dimensional(p, eps)
    raise ConfigError(
        "expected exactly one of top-level keys 'groups' or 'dimensional', "
        f"got {sorted(heads)}")


def load_groups(path: str) -> Groups:
    """Read a JSON parameter file and return the dimensionless groups."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return groups_from_mapping(data)
