"""Vector fields of the closed-loop crawler and the friction nonlinearity.

State ordering is (V, v_com, s, v_s) throughout: controller voltage,
center-of-mass speed, body strain, strain rate (all dimensionless).
All functions here are pure; derivatives of the friction curve are coded
analytically because the Lyapunov-coefficient computation amplifies
derivative error (finite differences are kept as a test oracle only).
"""

from __future__ import annotations

import math

import numpy as np

from .params import DimensionalParams, Groups

#: Reflection that maps a trajectory onto its mirror trajectory.
SYMMETRY_SIGNS = np.array([-1.0, 1.0, -1.0, -1.0])


def _sech2(z: float) -> float:
    # sech^2 via exp(-|z|) to avoid cosh overflow for |z| > ~710
    az = abs(z)
    if az > 350.0:
        return 0.0
    t = math.exp(-az)
    s = 2.0 * t / (1.0 + t * t)
    return s * s


def sigma_dimensional(u_dot: float, eps_f: float, n_f: float) -> float:
    """Anisotropic friction fraction of the local (dimensional) speed."""
    tn = math.tanh(n_f)
    return (math.tanh(u_dot / eps_f + n_f) - tn) / (1.0 + tn)


def sigma_pi(u: float, pi_eps: float, n_f: float) -> float:
    """Dimensionless friction fraction at dimensionless local speed ``u``."""
    tn = math.tanh(n_f)
    return (math.tanh(pi_eps * u + n_f) - tn) / (1.0 + tn)


def sigma_pi_d1(u: float, pi_eps: float, n_f: float) -> float:
    return pi_eps * _sech2(pi_eps * u + n_f) / (1.0 + math.tanh(n_f))


def sigma_pi_d2(u: float, pi_eps: float, n_f: float) -> float:
    z = pi_eps * u + n_f
    return -2.0 * pi_eps * sigma_pi_d1(u, pi_eps, n_f) * math.tanh(z)


def sigma_pi_d3(u: float, pi_eps: float, n_f: float) -> float:
    z = pi_eps * u + n_f
    d1 = sigma_pi_d1(u, pi_eps, n_f)
    d2 = -2.0 * pi_eps * d1 * math.tanh(z)
    return -2.0 * pi_eps * (d2 * math.tanh(z) + pi_eps * d1 * _sech2(z))


def friction_limit_forward(n_f: float) -> float:
    """sup of the friction fraction for forward motion, (1-tanh nf)/(1+tanh nf)."""
    tn = math.tanh(n_f)
    return (1.0 - tn) / (1.0 + tn)


def vector_field(x, g: Groups) -> np.ndarray:
    """Full dimensionless closed-loop dynamics."""
    V, v_com, s, v_s = float(x[0]), float(x[1]), float(x[2]), float(x[3])
    sm = sigma_pi(v_com - 0.5 * v_s, g.pi_eps, g.n_f)
    sp = sigma_pi(v_com + 0.5 * v_s, g.pi_eps, g.n_f)
    return np.array([
        -g.pi_c * V ** 3 + g.pi_l * V - g.pi_s * s,
        -0.5 * g.pi_f * (sm + sp),
        v_s,
        g.pi_f * (sm - sp) - s - 2.0 * g.zeta * v_s + 2.0 * g.pi_V * V,
    ])


def vector_field_dimensional(x, p: DimensionalParams) -> np.ndarray:
    """Dimensional closed loop in the same (V, v_com, s, v_s) ordering."""
    V, v_com, s, v_s = float(x[0]), float(x[1]), float(x[2]), float(x[3])
    sm = sigma_dimensional(v_com - 0.5 * v_s, p.eps_f, p.n_f)
    sp = sigma_dimensional(v_com + 0.5 * v_s, p.eps_f, p.n_f)
    return np.array([
        (-p.kappa * V ** 3 + p.rho * V - p.gamma_p * s) / p.c,
        -0.5 * p.A_sigma / p.m * (sm + sp),
        v_s,
        p.A_sigma / p.m * (sm - sp)
        - 2.0 / p.m * (p.k * s + p.b * v_s - p.k_v * V),
    ])


def symmetry_action(x) -> np.ndarray:
    """Apply the reflection (V, v_com, s, v_s) -> (-V, v_com, -s, -v_s)."""
    return SYMMETRY_SIGNS * np.asarray(x, dtype=float)


def slow_vector_field(x, g: Groups) -> np.ndarray:
    """Slow-time form: algebraically identical to the full field, but written
    through the eps-scaled groups so the singular structure is explicit."""
    V, v_com, s, v_s = float(x[0]), float(x[1]), float(x[2]), float(x[3])
    sm = sigma_pi(v_com - 0.5 * v_s, g.pi_eps, g.n_f)
    sp = sigma_pi(v_com + 0.5 * v_s, g.pi_eps, g.n_f)
    return np.array([
        (-g.pi_c_eps * V ** 3 + g.pi_l_eps * V - g.pi_s_eps * s) / g.eps,
        -0.5 * g.pi_f * (sm + sp),
        v_s,
        g.pi_f * (sm - sp) - s - 2.0 * g.zeta * v_s + 2.0 * g.pi_V * V,
    ])


def fast_vector_field(x, g: Groups) -> np.ndarray:
    """Fast-time form (T = t/eps): voltage row O(1), mechanical rows O(eps)."""
    V, v_com, s, v_s = float(x[0]), float(x[1]), float(x[2]), float(x[3])
    sm = sigma_pi(v_com - 0.5 * v_s, g.pi_eps, g.n_f)
    sp = sigma_pi(v_com + 0.5 * v_s, g.pi_eps, g.n_f)
    return np.array([
        -g.pi_c_eps * V ** 3 + g.pi_l_eps * V - g.pi_s_eps * s,
        g.eps * (-0.5 * g.pi_f * (sm + sp)),
        g.eps * v_s,
        g.eps * (g.pi_f * (sm - sp) - s - 2.0 * g.zeta * v_s
                 + 2.0 * g.pi_V * V),
    ])


def layer_rhs(V: float, s: float, g: Groups) -> float:
    """Fast-subsystem voltage derivative with the slow variables frozen."""
    return -g.pi_c_eps * V ** 3 + g.pi_l_eps * V - g.pi_s_eps * s


def manifold_strain(V: float, g: Groups) -> float:
    """Strain on the critical manifold as a function of the voltage."""
    return (-g.pi_c_eps * V ** 3 + g.pi_l_eps * V) / g.pi_s_eps


def desingularized_vector_field(y, g: Groups) -> np.ndarray:
    """Desingularized reduced flow in the chart (V, v_com, v_s).

    The strain is eliminated through the critical manifold; the state
    dependent time rescaling dt = -(pi_l_eps - 3 pi_c_eps V^2) dtau removes
    the blow-up at the folds (the flow direction is reversed on the
    repelling branch as a consequence).
    """
    V, v_com, v_s = float(y[0]), float(y[1]), float(y[2])
    sm = sigma_pi(v_com - 0.5 * v_s, g.pi_eps, g.n_f)
    sp = sigma_pi(v_com + 0.5 * v_s, g.pi_eps, g.n_f)
    slope = g.pi_l_eps - 3.0 * g.pi_c_eps * V ** 2
    return np.array([
        -g.pi_s_eps * v_s,
        0.5 * g.pi_f * slope * (sm + sp),
        -slope * (g.pi_f * (sm - sp)
                  + (g.pi_c_eps * V ** 3 - g.pi_l_eps * V) / g.pi_s_eps
                  - 2.0 * g.zeta * v_s + 2.0 * g.pi_V * V),
    ])
