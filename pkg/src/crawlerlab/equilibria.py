"""Fixed points, Jacobian, factored eigenstructure, directional derivatives.

Everything exploits the 4-state structure: the characteristic polynomial at
the symmetric fixed points factors into a known real eigenvalue times a
cubic, so cubic roots are computed in closed form (trigonometric/Cardano)
with a Newton polish instead of calling a general eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import sigma_pi_d1, sigma_pi_d2, sigma_pi_d3, symmetry_action
from .errors import (DegenerateEigenstructureError, DegenerateHopfError,
                     InvalidParameterError)
from .params import Groups


def composite_gain(g: Groups) -> float:
    """Effective linear dissipation pi_f * sigma'(0) + 2 zeta.

    Always recomputed from the groups; never stored, so it cannot drift out
    of sync with pi_eps / n_f / zeta.
    """
    return g.pi_f * sigma_pi_d1(0.0, g.pi_eps, g.n_f) + 2.0 * g.zeta


@dataclass(frozen=True)
class FixedPointSet:
    x0: np.ndarray
    x_plus: Optional[np.ndarray]
    x_minus: Optional[np.ndarray]
    exists_symmetric: bool
    degenerate: bool  # radicand exactly zero: pitchfork point


def fixed_points(g: Groups) -> FixedPointSet:
    """Origin plus the symmetric pair, when pi_l - 2 pi_V pi_s > 0."""
    x0 = np.zeros(4)
    radicand = (g.pi_l - 2.0 * g.pi_V * g.pi_s) / g.pi_c
    if radicand > 0.0:
        amp = math.sqrt(radicand)
        x_plus = amp * np.array([1.0, 0.0, 2.0 * g.pi_V, 0.0])
        return FixedPointSet(x0, x_plus, symmetry_action(x_plus), True, False)
    if radicand == 0.0:
        return FixedPointSet(x0, None, None, False, True)
    return FixedPointSet(x0, None, None, False, False)


def jacobian(x, g: Groups) -> np.ndarray:
    """Jacobian of the closed-loop field at a point."""
    V, v_com, v_s = float(x[0]), float(x[1]), float(x[3])
    d1p = sigma_pi_d1(v_com + 0.5 * v_s, g.pi_eps, g.n_f)
    d1m = sigma_pi_d1(v_com - 0.5 * v_s, g.pi_eps, g.n_f)
    dplus = d1p + d1m
    dminus = d1p - d1m
    return np.array([
        [-3.0 * g.pi_c * V ** 2 + g.pi_l, 0.0, -g.pi_s, 0.0],
        [0.0, -0.5 * g.pi_f * dplus, 0.0, -0.25 * g.pi_f * dminus],
        [0.0, 0.0, 0.0, 1.0],
        [2.0 * g.pi_V, -g.pi_f * dminus, -1.0,
         -0.5 * g.pi_f * dplus - 2.0 * g.zeta],
    ])


def char_cubic_at_symmetric_fp(g: Groups, pi_s: float | None = None):
    """Coefficients (c2, c1, c0) of the cubic factor of the characteristic
    polynomial at the symmetric fixed points.

    The quartic factors as (pi_f sigma'(0) + lambda) * (lambda^3 + c2
    lambda^2 + c1 lambda + c0).
    """
    if pi_s is None:
        pi_s = g.pi_s
    if g.pi_l - 2.0 * g.pi_V * pi_s <= 0.0:
        raise InvalidParameterError(
            "symmetric fixed points do not exist for "
            f"pi_s={pi_s!r} >= pi_l/(2 pi_V)")
    gam = composite_gain(g)
    omega_term = 3.0 * pi_s * g.pi_V - g.pi_l
    c2 = gam - 2.0 * omega_term
    c1 = 1.0 - 2.0 * gam * omega_term
    c0 = 2.0 * (g.pi_l - 2.0 * pi_s * g.pi_V)
    return c2, c1, c0


def cubic_roots(c2: float, c1: float, c0: float) -> np.ndarray:
    """Roots of the monic cubic x^3 + c2 x^2 + c1 x + c0.

    Trigonometric form in the three-real-root regime, Cardano otherwise,
    then one or two complex Newton steps to remove cancellation error.
    """
    shift = c2 / 3.0
    p = c1 - c2 ** 2 / 3.0
    q = 2.0 * c2 ** 3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = -4.0 * p ** 3 - 27.0 * q ** 2
    if p == 0.0 and q == 0.0:
        roots = np.zeros(3, dtype=complex)
    elif disc > 0.0:
        # three distinct real roots (p < 0 here)
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg)
        roots = np.array([m * math.cos((theta - 2.0 * math.pi * k) / 3.0)
                          for k in range(3)], dtype=complex)
    else:
        aux = q ** 2 / 4.0 + p ** 3 / 27.0
        sq = math.sqrt(max(aux, 0.0))
        u = math.copysign(abs(-q / 2.0 + sq) ** (1.0 / 3.0), -q / 2.0 + sq)
        v = math.copysign(abs(-q / 2.0 - sq) ** (1.0 / 3.0), -q / 2.0 - sq)
        real = u + v
        imag = math.sqrt(3.0) / 2.0 * (u - v)
        roots = np.array([real, -real / 2.0 + 1j * imag,
                          -real / 2.0 - 1j * imag], dtype=complex)
    roots = roots - shift
    # Newton polish on the original cubic; only take well-conditioned,
    # last-digit-sized steps (double roots would otherwise blow up)
    for _ in range(2):
        f = ((roots + c2) * roots + c1) * roots + c0
        df = (3.0 * roots + 2.0 * c2) * roots + c1
        df_scale = (3.0 * np.abs(roots) ** 2 + 2.0 * abs(c2) * np.abs(roots)
                    + abs(c1) + 1e-300)
        safe = np.abs(df) > 1e-6 * df_scale
        step = np.where(safe, f / np.where(safe, df, 1.0), 0.0)
        step = np.where(np.abs(step) < 1e-2 * (1.0 + np.abs(roots)), step,
                        0.0)
        roots = roots - step
    # collapse spurious imaginary dust on real roots
    tiny = 1e-12 * (1.0 + np.abs(roots.real))
    roots.imag[np.abs(roots.imag) < tiny * 1e-2] = 0.0
    return roots


@dataclass(frozen=True)
class EigenData:
    """Eigenstructure at a symmetric fixed point via the factored polynomial."""

    lambda1: float
    cubic_coeffs: tuple
    roots: np.ndarray
    eigvec_q: Optional[np.ndarray] = None
    eigvec_p: Optional[np.ndarray] = None

    @property
    def all_eigenvalues(self) -> np.ndarray:
        return np.concatenate(([complex(self.lambda1)], self.roots))


def eigen_data_at_symmetric(g: Groups, pi_s: float | None = None) -> EigenData:
    c2, c1, c0 = char_cubic_at_symmetric_fp(g, pi_s)
    lam1 = -g.pi_f * sigma_pi_d1(0.0, g.pi_eps, g.n_f)
    return EigenData(lambda1=lam1, cubic_coeffs=(c2, c1, c0),
                     roots=cubic_roots(c2, c1, c0))


def _nonzero_parts(v):
    """(v_com, v_s) components of a direction vector; the field is nonlinear
    only in V, v_com and v_s."""
    v = np.asarray(v)
    return v[0], v[1], v[3]


def d2f(x, g: Groups, v1, v2) -> np.ndarray:
    """Second directional derivative of the field, bilinear in (v1, v2).

    Accepts complex directions (needed by the Lyapunov coefficient).
    """
    V, v_com, v_s = float(x[0]), float(x[1]), float(x[3])
    d2p = sigma_pi_d2(v_com + 0.5 * v_s, g.pi_eps, g.n_f)
    d2m = sigma_pi_d2(v_com - 0.5 * v_s, g.pi_eps, g.n_f)
    dplus = d2p + d2m
    dminus = d2p - d2m
    a1, b1, c1_ = _nonzero_parts(v1)
    a2, b2, c2_ = _nonzero_parts(v2)
    s_cc = b1 * b2
    s_ss = c1_ * c2_
    s_cs = b1 * c2_ + c1_ * b2
    pf = g.pi_f
    comp_V = -6.0 * g.pi_c * V * a1 * a2
    comp_com = (-0.5 * pf * dplus * s_cc - 0.125 * pf * dplus * s_ss
                - 0.25 * pf * dminus * s_cs)
    comp_vs = (-pf * dminus * s_cc - 0.25 * pf * dminus * s_ss
               - 0.5 * pf * dplus * s_cs)
    dtype = np.result_type(float, np.asarray(v1).dtype, np.asarray(v2).dtype)
    return np.array([comp_V, comp_com, 0.0, comp_vs], dtype=dtype)


def d3f(x, g: Groups, v1, v2, v3) -> np.ndarray:
    """Third directional derivative of the field, trilinear in (v1, v2, v3)."""
    v_com, v_s = float(x[1]), float(x[3])
    d3p = sigma_pi_d3(v_com + 0.5 * v_s, g.pi_eps, g.n_f)
    d3m = sigma_pi_d3(v_com - 0.5 * v_s, g.pi_eps, g.n_f)
    dplus = d3p + d3m
    dminus = d3p - d3m
    a1, b1, c1_ = _nonzero_parts(v1)
    a2, b2, c2_ = _nonzero_parts(v2)
    a3, b3, c3_ = _nonzero_parts(v3)
    s_ccc = b1 * b2 * b3
    s_ccs = b1 * b2 * c3_ + b1 * c2_ * b3 + c1_ * b2 * b3
    s_css = b1 * c2_ * c3_ + c1_ * b2 * c3_ + c1_ * c2_ * b3
    s_sss = c1_ * c2_ * c3_
    pf = g.pi_f
    comp_V = -6.0 * g.pi_c * a1 * a2 * a3
    comp_com = (-0.5 * pf * dplus * s_ccc - 0.25 * pf * dminus * s_ccs
                - 0.125 * pf * dplus * s_css - 0.0625 * pf * dminus * s_sss)
    comp_vs = (-pf * dminus * s_ccc - 0.5 * pf * dplus * s_ccs
               - 0.25 * pf * dminus * s_css - 0.125 * pf * dplus * s_sss)
    dtype = np.result_type(float, np.asarray(v1).dtype,
                           np.asarray(v2).dtype, np.asarray(v3).dtype)
    return np.array([comp_V, comp_com, 0.0, comp_vs], dtype=dtype)


def linear_solve(A: np.ndarray, b: np.ndarray, what: str = "linear system"):
    """Dense solve with a conditioning guard (cond > 1e12 means degenerate)."""
    A = np.asarray(A)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateHopfError(f"{what} is singular (cond ~ {cond:.2e})")
    return np.linalg.solve(A, b)


def _bordered_null_vector(A: np.ndarray, norm_index: int) -> np.ndarray:
    """Null vector of a (numerically) rank-3 complex 4x4 matrix, normalized
    so that component ``norm_index`` equals 1, via a bordered 5x5 solve."""
    n = A.shape[0]
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[n] = 1.0
    scale = np.linalg.norm(A, ord=np.inf) + 1.0
    for border_col in (norm_index, 0, n - 1):
        M = np.zeros((n + 1, n + 1), dtype=complex)
        M[:n, :n] = A
        M[border_col, n] = scale
        M[n, norm_index] = 1.0
        try:
            sol = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue
        vec = sol[:n]
        if np.linalg.norm(A @ vec) <= 1e-9 * scale * np.linalg.norm(vec):
            return vec
    raise DegenerateEigenstructureError(
        "no simple null vector found (defective eigenvalue?)")


def eigen_pair_hopf(g: Groups, pi_s_H: float, omega_H: float):
    """Right/left eigenvectors (q, p) at the Hopf point of x_plus.

    J q = i omega q, J^T p = -i omega p, normalized so q[2] = 1 and
    <p, q> := conj(p)^T q = 1.
    """
    g_h = g.with_pi_s(pi_s_H)
    fps = fixed_points(g_h)
    if not fps.exists_symmetric:
        raise InvalidParameterError("no symmetric fixed point at pi_s_H")
    J = jacobian(fps.x_plus, g_h)
    q = _bordered_null_vector(J - 1j * omega_H * np.eye(4), norm_index=2)
    p = _bordered_null_vector(J.T + 1j * omega_H * np.eye(4), norm_index=3)
    c = np.vdot(p, q)
    if abs(c) < 1e-12:
        raise DegenerateEigenstructureError(
            "left/right eigenvectors nearly orthogonal")
    return q, p / np.conj(c)
