"""Organizing bifurcations of the closed loop in the sensorimotor gain.

Closed forms for the Hopf gain, Hopf frequency, transversality rate, first
Lyapunov coefficient and the pitchfork data, each paired with an independent
numeric oracle (bisection on eigenvalue crossings, finite differences of
root real parts, determinant checks). Assumption checks warn by default and
raise under ``strict=True``; bounds that make a formula meaningless (negative
radicand, wrong root branch) always raise.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import vector_field
from .equilibria import (char_cubic_at_symmetric_fp, composite_gain,
                         cubic_roots, d2f, d3f, eigen_pair_hopf,
                         fixed_points, jacobian, linear_solve)
from .errors import AssumptionViolation, CrawlerlabError, InvalidParameterError
from .params import Groups

_ANISO_BOUND = 0.5 * math.log(2.0 + math.sqrt(3.0))


def positivity_holds(g: Groups) -> bool:
    return (g.pi_s > 0 and g.pi_V > 0 and g.pi_eps > 0 and g.pi_c > 0
            and g.pi_f > 0 and g.pi_l > 0 and g.n_f > 0 and g.zeta >= 0)


def gain_window_holds(g: Groups) -> bool:
    gam = composite_gain(g)
    return math.sqrt(5.0 / 3.0) < gam < g.pi_l


def strict_gain_window_holds(g: Groups) -> bool:
    gam = composite_gain(g)
    return 100.0 < gam < g.pi_l / 6.0 and 600.0 < g.pi_l < 1e4


def anisotropy_window_holds(g: Groups) -> bool:
    return 0.0 < g.n_f < _ANISO_BOUND


def _require(ok: bool, name: str, detail: str, strict: bool):
    if ok:
        return
    if strict:
        raise AssumptionViolation(name, detail)
    warnings.warn(f"{name} violated: {detail}", stacklevel=3)


def hopf_gain(g: Groups, strict: bool = False) -> float:
    """Critical sensorimotor gain at which the symmetric pair loses stability.

    Requires the gain window sqrt(5/3) < gamma < pi_l; outside it the
    closed form may still evaluate and is returned with a warning unless
    ``strict``.
    """
    gam = composite_gain(g)
    _require(positivity_holds(g), "positivity",
             "all groups positive, n_f > 0, zeta >= 0", strict)
    _require(gam > math.sqrt(5.0 / 3.0), "gain-window",
             f"gamma={gam:.6g} <= sqrt(5/3)", strict)
    _require(gam < g.pi_l, "gain-window",
             f"gamma={gam:.6g} >= pi_l={g.pi_l:.6g}", strict)
    radicand = (1.0 / (324.0 * gam ** 2) + gam ** 2 / 36.0
                + 2.0 * g.pi_l / (27.0 * gam) - 5.0 / 54.0)
    if radicand < 0.0:
        raise AssumptionViolation(
            "gain-window",
            f"negative radicand {radicand:.3e} in the critical-gain formula")
    omega_term = (gam / 12.0 + 1.0 / (36.0 * gam) + g.pi_l / 3.0
                  - 0.5 * math.sqrt(radicand))
    pi_s_H = omega_term / g.pi_V
    bound = (1.0 / (3.0 * g.pi_V)) * (1.0 / (2.0 * gam) + g.pi_l)
    if not pi_s_H < bound:
        raise AssumptionViolation(
            "gain-window",
            f"critical gain {pi_s_H:.6g} fails the root-selection bound "
            f"{bound:.6g}")
    return pi_s_H


def hopf_gain_plus_root(g: Groups) -> float:
    """The discarded (plus-sign) root of the crossing condition."""
    gam = composite_gain(g)
    radicand = (1.0 / (324.0 * gam ** 2) + gam ** 2 / 36.0
                + 2.0 * g.pi_l / (27.0 * gam) - 5.0 / 54.0)
    return (gam / 12.0 + 1.0 / (36.0 * gam) + g.pi_l / 3.0
            + 0.5 * math.sqrt(max(radicand, 0.0))) / g.pi_V


def hopf_frequency(g: Groups, pi_s_H: float) -> float:
    gam = composite_gain(g)
    c1 = 1.0 - 2.0 * gam * (3.0 * pi_s_H * g.pi_V - g.pi_l)
    if c1 <= 0.0:
        raise AssumptionViolation(
            "gain-window", f"nonpositive frequency radicand c1={c1:.3e}")
    return math.sqrt(c1)


def transversality(g: Groups, pi_s_H: float, omega_H: float) -> float:
    """Rate d Re(lambda) / d Omega of the crossing pair, Omega = pi_s pi_V."""
    gam = composite_gain(g)
    b2 = omega_H ** 2
    return (6.0 * b2 + 3.0 * gam ** 2 - 5.0) / (
        b2 + (gam - (1.0 - b2) / gam) ** 2)


def _pair_real_part(g: Groups, pi_s: float) -> float:
    """Real part of the complex-conjugate root pair of the cubic factor."""
    roots = cubic_roots(*char_cubic_at_symmetric_fp(g, pi_s))
    imags = np.abs(roots.imag)
    if np.all(imags == 0.0):
        raise CrawlerlabError(
            f"no complex pair at pi_s={pi_s!r}; not near the crossing")
    return float(roots.real[np.argmax(imags)])


def transversality_numeric(g: Groups, pi_s_H: float,
                           rel_step: float = 1e-6) -> float:
    """Finite-difference slope of the crossing pair's real part w.r.t.
    Omega = pi_s * pi_V (oracle for `transversality`)."""
    d_pi_s = rel_step * max(1.0, pi_s_H)
    rp = _pair_real_part(g, pi_s_H + d_pi_s)
    rm = _pair_real_part(g, pi_s_H - d_pi_s)
    return (rp - rm) / (2.0 * d_pi_s * g.pi_V)


def max_cubic_real_part(g: Groups, pi_s: float) -> float:
    roots = cubic_roots(*char_cubic_at_symmetric_fp(g, pi_s))
    return float(np.max(roots.real))


def hopf_gain_numeric(g: Groups, rel_tol: float = 1e-12) -> float:
    """Bisection oracle: locate the sign change of the dominant cubic-root
    real part on (0, pi_s_P)."""
    lo = 1e-6
    hi = pitchfork_gain(g) - 1e-6
    f_lo = max_cubic_real_part(g, lo)
    f_hi = max_cubic_real_part(g, hi)
    if not (f_lo < 0.0 < f_hi):
        raise CrawlerlabError(
            f"bisection bracket invalid: f({lo})={f_lo:.3e}, "
            f"f({hi})={f_hi:.3e}")
    while hi - lo > rel_tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if max_cubic_real_part(g, mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def lyapunov_first_coefficient(g: Groups, pi_s_H: float | None = None,
                               omega_H: float | None = None) -> float:
    """First Lyapunov coefficient at the Hopf point of the symmetric pair.

    Negative values mean the bifurcation is supercritical (a stable small
    limit cycle emerges for gains just above critical).
    """
    if pi_s_H is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pi_s_H = hopf_gain(g)
    if omega_H is None:
        omega_H = hopf_frequency(g, pi_s_H)
    g_h = g.with_pi_s(pi_s_H)
    fp = fixed_points(g_h).x_plus
    J = jacobian(fp, g_h)
    q, p = eigen_pair_hopf(g, pi_s_H, omega_H)
    return _l1_from_eigvectors(g_h, fp, J, q, p, omega_H)


def _l1_from_eigvectors(g_h: Groups, fp, J, q, p, omega_H: float) -> float:
    qb = np.conj(q)
    t1 = np.vdot(p, d3f(fp, g_h, q, q, qb))
    w1 = linear_solve(J, d2f(fp, g_h, q, qb), "Jacobian at the Hopf point")
    t2 = np.vdot(p, d2f(fp, g_h, q, w1))
    w2 = linear_solve(2j * omega_H * np.eye(4) - J, d2f(fp, g_h, q, q),
                      "resolvent (2 i omega I - J)")
    t3 = np.vdot(p, d2f(fp, g_h, qb, w2))
    return float((t1 - 2.0 * t2 + t3).real / (2.0 * omega_H))


def pitchfork_gain(g: Groups, strict: bool = False) -> float:
    """Gain at which the origin undergoes the (subcritical) pitchfork."""
    gam = composite_gain(g)
    if g.pi_l == gam:
        raise AssumptionViolation("gain-window",
                                  f"pi_l == gamma == {gam:.6g}")
    _require(positivity_holds(g), "positivity",
             "all groups positive, n_f > 0, zeta >= 0", strict)
    return g.pi_l / (2.0 * g.pi_V)


def pitchfork_origin_eigenvalues(g: Groups) -> np.ndarray:
    """Eigenvalues of the Jacobian at the origin at the pitchfork gain."""
    gam = composite_gain(g)
    from .dynamics import sigma_pi_d1
    lam1 = -g.pi_f * sigma_pi_d1(0.0, g.pi_eps, g.n_f)
    disc = cmath.sqrt((gam + g.pi_l) ** 2 - 4.0)
    lam3 = (g.pi_l - gam + disc) / 2.0
    lam4 = (g.pi_l - gam - disc) / 2.0
    return np.array([lam1, 0.0, lam3, lam4], dtype=complex)


@dataclass(frozen=True)
class PitchforkAnalysis:
    pi_s_P: float
    v: np.ndarray            # right null vector
    w: np.ndarray            # left null vector
    c_transversal: float     # <w, d(d_pi_s f)[v]>, equals 4 pi_V^2
    c_quadratic: float       # <w, d2f[v, v]>, vanishes
    c_cubic: float           # <w, d3f[v, v, v]>, equals 12 pi_c pi_V
    subcritical: bool


def pitchfork_normal_form(g: Groups) -> PitchforkAnalysis:
    """Null vectors and normal-form scalars of the pitchfork at the origin."""
    pi_s_P = pitchfork_gain(g)
    g_p = g.with_pi_s(pi_s_P)
    gam = composite_gain(g)
    x0 = np.zeros(4)
    J = jacobian(x0, g_p)
    v = np.array([1.0, 0.0, 2.0 * g.pi_V, 0.0])
    w = np.array([-2.0 * g.pi_V, 0.0, gam * g.pi_l, g.pi_l])
    scale = np.linalg.norm(J, ord=np.inf)
    if (np.linalg.norm(J @ v) > 1e-9 * scale * np.linalg.norm(v)
            or np.linalg.norm(w @ J) > 1e-9 * scale * np.linalg.norm(w)):
        raise CrawlerlabError("pitchfork null vectors fail the residual check")
    # d/d pi_s of the field is (-s, 0, 0, 0); its state derivative along v
    d_mu_along_v = np.array([-v[2], 0.0, 0.0, 0.0])
    c_transversal = float(w @ d_mu_along_v)
    c_quadratic = float((w @ d2f(x0, g_p, v, v)).real)
    c_cubic = float((w @ d3f(x0, g_p, v, v, v)).real)
    return PitchforkAnalysis(
        pi_s_P=pi_s_P, v=v, w=w, c_transversal=c_transversal,
        c_quadratic=c_quadratic, c_cubic=c_cubic,
        subcritical=(c_transversal > 0.0 and c_cubic > 0.0))


@dataclass(frozen=True)
class RegimeVerdict:
    verdict: str             # "resting" | "crawling" | "boundary"
    pi_s: float
    pi_s_H: float
    max_real_part: float     # dominant cubic-root real part at x_plus


def resting_regime_check(g: Groups, pi_s: float | None = None) -> RegimeVerdict:
    """Classify a gain value as resting or crawling; the closed-form
    threshold and the eigenvalue sign test must agree."""
    if pi_s is None:
        pi_s = g.pi_s
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pi_s_H = hopf_gain(g)
    max_re = max_cubic_real_part(g, pi_s)
    if pi_s == pi_s_H:
        return RegimeVerdict("boundary", pi_s, pi_s_H, max_re)
    verdict = "resting" if pi_s < pi_s_H else "crawling"
    band = 1e-8 * max(1.0, abs(max_re))
    agree = (max_re < band) if verdict == "resting" else (max_re > -band)
    if not agree:
        raise CrawlerlabError(
            f"threshold and eigenvalue tests disagree at pi_s={pi_s!r}: "
            f"verdict {verdict}, max Re = {max_re:.3e}")
    return RegimeVerdict(verdict, pi_s, pi_s_H, max_re)


@dataclass(frozen=True)
class HopfAnalysis:
    gamma: float
    pi_s_H: float
    omega_H: float
    alpha_real_root: float   # real root of the cubic at the crossing
    transversality: float
    l1: float
    positivity: bool
    gain_window: bool
    strict_gain_window: bool
    anisotropy_window: bool


def hopf_analysis(g: Groups, strict: bool = False) -> HopfAnalysis:
    """Full closed-form Hopf characterization at the symmetric fixed points."""
    gam = composite_gain(g)
    pi_s_H = hopf_gain(g, strict=strict)
    omega_H = hopf_frequency(g, pi_s_H)
    c2, _, _ = char_cubic_at_symmetric_fp(g, pi_s_H)
    return HopfAnalysis(
        gamma=gam,
        pi_s_H=pi_s_H,
        omega_H=omega_H,
        alpha_real_root=-c2,
        transversality=transversality(g, pi_s_H, omega_H),
        l1=lyapunov_first_coefficient(g, pi_s_H, omega_H),
        positivity=positivity_holds(g),
        gain_window=gain_window_holds(g),
        strict_gain_window=strict_gain_window_holds(g),
        anisotropy_window=anisotropy_window_holds(g),
    )


def fixed_point_residual(g: Groups) -> float:
    """Max |f(x*)| over the returned fixed points (diagnostic)."""
    fps = fixed_points(g)
    res = float(np.max(np.abs(vector_field(fps.x0, g))))
    if fps.exists_symmetric:
        res = max(res, float(np.max(np.abs(vector_field(fps.x_plus, g)))),
                  float(np.max(np.abs(vector_field(fps.x_minus, g)))))
    return res
