"""Time integration of the stiff closed loop and limit-cycle metrics.

The integrator is scipy's adaptive `solve_ivp`: the default is the explicit
RK45 pair; stiff parameter sets (timescale ratio ~1e4) should use one of the
implicit modes "lsoda" | "radau" | "bdf". The center-of-mass displacement is
carried as a fifth quadrature state so it inherits the integrator's error
control instead of a post-hoc trapezoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import sigma_pi
from .errors import (CrawlerlabError, InvalidParameterError,
                     LayerConvergenceError, NoCycleError, StiffnessError)
from .gsp import critical_manifold_residual, manifold_slope
from .params import Groups

_METHODS = {"rk45": "RK45", "dop853": "DOP853", "radau": "Radau",
            "bdf": "BDF", "lsoda": "LSODA", "auto": "LSODA"}
_EXPLICIT = {"rk45", "dop853"}

#: column layout of Trajectory.states
COLUMNS = ("V", "v_com", "s", "v_s", "u_com")


@dataclass(frozen=True)
class IntegratorStats:
    steps: int
    nfev: int
    rejected_estimate: Optional[int]
    tol_abs: float
    tol_rel: float
    method: str


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray          # (N,)
    states: np.ndarray         # (N, 5): V, v_com, s, v_s, u_com
    stats: IntegratorStats

    @property
    def V(self):
        return self.states[:, 0]

    @property
    def v_com(self):
        return self.states[:, 1]

    @property
    def s(self):
        return self.states[:, 2]

    @property
    def v_s(self):
        return self.states[:, 3]

    @property
    def u_com(self):
        return self.states[:, 4]


def _make_rhs(g: Groups, budget: list):
    pi_c, pi_l, pi_s = g.pi_c, g.pi_l, g.pi_s
    pi_f, pi_V, zeta = g.pi_f, g.pi_V, g.zeta
    pi_eps, n_f = g.pi_eps, g.n_f

    def rhs(t, y):
        budget[0] -= 1
        if budget[0] < 0:
            raise StiffnessError(
                "evaluation budget exhausted; retry with an implicit method "
                "(lsoda/radau/bdf)")
        V, v_com, s, v_s = y[0], y[1], y[2], y[3]
        sm = sigma_pi(v_com - 0.5 * v_s, pi_eps, n_f)
        sp = sigma_pi(v_com + 0.5 * v_s, pi_eps, n_f)
        return (
            -pi_c * V ** 3 + pi_l * V - pi_s * s,
            -0.5 * pi_f * (sm + sp),
            v_s,
            pi_f * (sm - sp) - s - 2.0 * zeta * v_s + 2.0 * pi_V * V,
            v_com,
        )

    return rhs


def integrate(x0, g: Groups, t_end: float, tol=(1e-9, 1e-7),
              method: str = "rk45", t_eval=None,
              max_nfev: int = 5_000_000) -> Trajectory:
    """Adaptive integration of the closed loop from a 4-state initial point.

    Parameters
    ----------
    x0 : array_like, shape (4,) or (5,)
        Initial (V, v_com, s, v_s); a fifth entry seeds u_com (default 0).
    tol : (abs, rel)
        Local error tolerances.
    method : str
        "rk45" (default), "dop853", or the implicit modes "radau", "bdf",
        "lsoda" ("auto" is an alias for lsoda).

    Raises
    ------
    StiffnessError
        On step-size underflow or evaluation-budget exhaustion in an
        explicit mode; the message advises the implicit modes.
    """
    tol_abs, tol_rel = float(tol[0]), float(tol[1])
    if tol_abs <= 0 or tol_rel <= 0 or t_end <= 0:
        raise InvalidParameterError("tolerances and t_end must be positive")
    key = method.lower()
    if key not in _METHODS:
        raise InvalidParameterError(
            f"unknown method {method!r}; choose from {sorted(_METHODS)}")
    x0 = np.asarray(x0, dtype=float)
    y0 = np.zeros(5)
    y0[:x0.size] = x0
    budget = [max_nfev]
    sol = solve_ivp(_make_rhs(g, budget), (0.0, float(t_end)), y0,
                    method=_METHODS[key], rtol=tol_rel, atol=tol_abs,
                    t_eval=t_eval, dense_output=False)
    if not sol.success:
        msg = sol.message or "integration failed"
        if key in _EXPLICIT and "step size" in msg.lower():
            raise StiffnessError(
                f"{msg}; retry with an implicit method (lsoda/radau/bdf)")
        raise CrawlerlabError(msg)
    n_steps = len(sol.t) - 1 if t_eval is None else None
    rejected = None
    if key == "rk45" and n_steps is not None:
        # RK45 spends 6 evaluations per attempted step plus the initial one
        rejected = max(0, (sol.nfev - 1) // 6 - n_steps)
    stats = IntegratorStats(steps=n_steps if n_steps is not None else -1,
                            nfev=sol.nfev, rejected_estimate=rejected,
                            tol_abs=tol_abs, tol_rel=tol_rel, method=key)
    return Trajectory(times=sol.t, states=sol.y.T.copy(), stats=stats)


def fast_layer_settle(x0, g: Groups, tol: float = 1e-10,
                      max_iter: int = 200_000):
    """Run only the voltage layer flow (slow variables frozen) to rest.

    Returns the state with V replaced by its value on an attracting branch
    of the critical manifold.
    """
    x0 = np.asarray(x0, dtype=float)
    V = float(x0[0])
    s = float(x0[2])
    rate_floor = 0.05 * g.pi_l_eps

    def layer(Vv):
        return -g.pi_c_eps * Vv ** 3 + g.pi_l_eps * Vv - g.pi_s_eps * s

    f = layer(V)
    for _ in range(max_iter):
        if abs(f) < tol:
            break
        rate = abs(-3.0 * g.pi_c_eps * V ** 2 + g.pi_l_eps)
        dt = 0.5 / max(rate, rate_floor)
        V += dt * f
        f = layer(V)
    else:
        raise LayerConvergenceError(
            f"layer flow did not settle within {max_iter} steps from "
            f"V={x0[0]!r}")
    if abs(critical_manifold_residual(V, s, g)) > 1e-8:
        raise LayerConvergenceError("settled point off the critical manifold")
    if manifold_slope(V, g) >= 0.0:
        raise LayerConvergenceError(
            "layer flow settled on a repelling branch (initial V on a basin "
            "boundary)")
    out = x0.copy()
    out[0] = V
    return out


def _hermite_eval(tau, h, y0, y1, d0, d1):
    t2 = tau * tau
    t3 = t2 * tau
    return ((2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + tau) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1)


def _hermite_root(t0, t1, y0, y1, d0, d1):
    """Zero of the cubic Hermite interpolant on [t0, t1]; y0 < 0 <= y1."""
    h = t1 - t0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _hermite_eval(mid, h, y0, y1, d0, d1) < 0.0:
            lo = mid
        else:
            hi = mid
    return t0 + 0.5 * (lo + hi) * h


def _hermite_value_at(t, times, values, derivs, idx):
    h = times[idx + 1] - times[idx]
    tau = (t - times[idx]) / h
    return _hermite_eval(tau, h, values[idx], values[idx + 1],
                         derivs[idx], derivs[idx + 1])


@dataclass(frozen=True)
class CycleMetrics:
    period: float
    period_std: float
    omega: float
    S_amp: float
    v_com_bar: float
    V_extrema: tuple
    n_events: int
    converged: bool


def cycle_metrics(traj: Trajectory, skip: float = 20.0) -> CycleMetrics:
    """Limit-cycle metrics from upward zero crossings of the strain.

    Events are s-crossings from negative to positive with positive strain
    rate, localized by cubic Hermite interpolation between accepted steps
    (the strain rate is a state, so exact derivatives are available).
    Raises NoCycleError with fewer than 5 events after the transient.
    """
    t = traj.times
    s = traj.s
    v_s = traj.v_s
    start = t[0] + skip
    events = []
    for i in range(len(t) - 1):
        if t[i] < start:
            continue
        if s[i] < 0.0 <= s[i + 1]:
            te = _hermite_root(t[i], t[i + 1], s[i], s[i + 1], v_s[i],
                               v_s[i + 1])
            # positive-slope requirement: interpolated strain rate at the event
            h = t[i + 1] - t[i]
            tau = (te - t[i]) / h
            vs_e = (1.0 - tau) * v_s[i] + tau * v_s[i + 1]
            if vs_e > 0.0:
                events.append((te, i))
    if len(events) < 5:
        raise NoCycleError(
            f"only {len(events)} strain events after t={start:g}; "
            "resting regime or trajectory too short")
    times_e = np.array([e[0] for e in events])
    gaps = np.diff(times_e)
    period = float(np.mean(gaps))
    period_std = float(np.std(gaps))
    in_window = (t >= times_e[0]) & (t <= times_e[-1])
    s_win = s[in_window]
    V_win = traj.V[in_window]
    u_start = _hermite_value_at(times_e[0], t, traj.u_com, traj.v_com,
                                events[0][1])
    u_end = _hermite_value_at(times_e[-1], t, traj.u_com, traj.v_com,
                              events[-1][1])
    v_com_bar = (u_end - u_start) / (times_e[-1] - times_e[0])
    return CycleMetrics(
        period=period,
        period_std=period_std,
        omega=2.0 * math.pi / period,
        S_amp=0.5 * float(s_win.max() - s_win.min()),
        v_com_bar=float(v_com_bar),
        V_extrema=(float(V_win.min()), float(V_win.max())),
        n_events=len(events),
        converged=bool(period_std / period < 1e-3),
    )


def time_fraction_near_manifold(traj: Trajectory, g: Groups,
                                rel_threshold: float = 0.05,
                                skip: float = 0.0) -> float:
    """Fraction of (post-transient) time the state spends within
    ``rel_threshold`` of the peak critical-manifold residual."""
    mask = traj.times >= traj.times[0] + skip
    t = traj.times[mask]
    res = np.abs(critical_manifold_residual(traj.V[mask], traj.s[mask], g))
    if len(t) < 3:
        raise CrawlerlabError("trajectory too short for dwell statistics")
    near = res < rel_threshold * res.max()
    dt = np.diff(t)
    weights = np.concatenate(([dt[0] / 2.0], (dt[:-1] + dt[1:]) / 2.0,
                              [dt[-1] / 2.0]))
    return float(np.sum(weights[near]) / np.sum(weights))


def write_trajectory_csv(traj: Trajectory, path: str):
    """Export with segment displacements recovered from (s, u_com)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,V,v_com,s,v_s,u_com,u1,u2\n")
        for i in range(len(traj.times)):
            t = traj.times[i]
            V, v_com, s, v_s, u_com = traj.states[i]
            u1 = u_com - 0.5 * s
            u2 = u_com + 0.5 * s
            fh.write(",".join(f"{v:.17g}" for v in
                              (t, V, v_com, s, v_s, u_com, u1, u2)) + "\n")
