"""Critical manifold geometry: folds, folded singularities, classification.

Everything is expressed through the eps-scaled groups, matching the slow-fast
decomposition of the dynamics module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import cubic_roots
from .params import Groups


def critical_manifold_residual(V: float, s: float, g: Groups) -> float:
    """Zero exactly on the set of fast-subsystem equilibria."""
    return g.pi_c_eps * V ** 3 - g.pi_l_eps * V + g.pi_s_eps * s


def manifold_slope(V: float, g: Groups) -> float:
    """d/dV of the layer right-hand side; negative on attracting branches."""
    return -3.0 * g.pi_c_eps * V ** 2 + g.pi_l_eps


def manifold_branches(s: float, g: Groups):
    """Real manifold voltages at a given strain with stability labels.

    Returns a list of (V, label) sorted by V; label is "attracting",
    "repelling", or "fold" at the degenerate double root.
    """
    roots = cubic_roots(0.0, -g.pi_l_eps / g.pi_c_eps,
                        g.pi_s_eps * s / g.pi_c_eps)
    out = []
    for r in roots:
        if abs(r.imag) > 1e-9 * (1.0 + abs(r)):
            continue
        V = float(r.real)
        slope = manifold_slope(V, g)
        tol = 1e-10 * (abs(g.pi_l_eps) + 3.0 * g.pi_c_eps * V ** 2)
        if abs(slope) <= tol:
            label = "fold"
        else:
            label = "attracting" if slope < 0.0 else "repelling"
        out.append((V, label))
    out.sort(key=lambda t: t[0])
    return out


@dataclass(frozen=True)
class FoldData:
    V_F_plus: float
    V_F_minus: float
    s_F_plus: float
    s_F_minus: float
    sing_eigs: np.ndarray      # (0, +lam, -lam) of the desingularized flow
    classification: str        # "folded-saddle" | "non-saddle" | "degenerate"


def classify_folded_singularity(g: Groups):
    """Nonzero eigenvalue pair of the desingularized flow at the folded
    singularities and the resulting classification."""
    radicand = g.pi_l_eps * (g.pi_l_eps / 3.0 - g.pi_V * g.pi_s_eps)
    if radicand > 0.0:
        lam = 2.0 * math.sqrt(radicand)
        return "folded-saddle", np.array([0.0, lam, -lam], dtype=complex)
    if radicand < 0.0:
        lam = 2.0 * math.sqrt(-radicand)
        return "non-saddle", np.array([0.0, 1j * lam, -1j * lam])
    # pi_s == pi_l / (3 pi_V): reported, never classified
    return "degenerate", np.zeros(3, dtype=complex)


def folds(g: Groups) -> FoldData:
    """Fold coordinates of the cubic critical manifold.

    Folded singularities are the fold points with zero strain rate; any
    center-of-mass speed qualifies.
    """
    V_F = math.sqrt(g.pi_l_eps / (3.0 * g.pi_c_eps))
    s_F = (2.0 * g.pi_l_eps ** 1.5
           / (3.0 * math.sqrt(3.0) * math.sqrt(g.pi_c_eps) * g.pi_s_eps))
    classification, eigs = classify_folded_singularity(g)
    return FoldData(V_F_plus=V_F, V_F_minus=-V_F, s_F_plus=s_F,
                    s_F_minus=-s_F, sing_eigs=eigs,
                    classification=classification)


def folded_saddle_condition(g: Groups) -> bool:
    """True iff 0 < pi_s < pi_l / (3 pi_V)."""
    return 0.0 < g.pi_s < g.pi_l / (3.0 * g.pi_V)
