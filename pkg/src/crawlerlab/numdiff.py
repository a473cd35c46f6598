"""Central finite-difference stencils used as independent test oracles.

These deliberately share no code with the analytic derivatives they check.
Default steps follow the usual truncation/round-off balance: h ~ eps^(1/3)
for second-order directional derivatives, h ~ eps^(1/4) for third order,
scaled by max(1, |x|).
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps


def _default_step(x, power: float) -> float:
    return _EPS ** power * max(1.0, float(np.max(np.abs(x))) if np.size(x) else 1.0)


def fd_jacobian(f, x, h: float | None = None) -> np.ndarray:
    """Jacobian of a vector field by central differences, column by column."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = _default_step(x, 0.5)
    n = x.size
    f0 = np.asarray(f(x), dtype=float)
    jac = np.empty((f0.size, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        jac[:, j] = (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h)
    return jac


def fd_directional2(f, x, v1, v2, h1: float | None = None,
                    h2: float | None = None) -> np.ndarray:
    """Second directional derivative d2f[v1, v2] via a 4-point stencil."""
    x = np.asarray(x, dtype=float)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if h1 is None:
        h1 = _default_step(x, 1.0 / 3.0)
    if h2 is None:
        h2 = h1
    fpp = np.asarray(f(x + h1 * v1 + h2 * v2))
    fpm = np.asarray(f(x + h1 * v1 - h2 * v2))
    fmp = np.asarray(f(x - h1 * v1 + h2 * v2))
    fmm = np.asarray(f(x - h1 * v1 - h2 * v2))
    return (fpp - fpm - fmp + fmm) / (4.0 * h1 * h2)


def fd_directional3(f, x, v1, v2, v3, h: float | None = None) -> np.ndarray:
    """Third directional derivative d3f[v1, v2, v3] via an 8-point stencil."""
    x = np.asarray(x, dtype=float)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    v3 = np.asarray(v3, dtype=float)
    if h is None:
        h = _default_step(x, 0.25)
    out = None
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            for s3 in (1.0, -1.0):
                val = np.asarray(
                    f(x + h * (s1 * v1 + s2 * v2 + s3 * v3)), dtype=float)
                term = s1 * s2 * s3 * val
                out = term if out is None else out + term
    return out / (8.0 * h ** 3)


def fd_scalar_d1(f, x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def fd_scalar_d2(f, x: float, h: float) -> float:
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / h ** 2


def fd_scalar_d3(f, x: float, h: float) -> float:
    return (f(x + 2.0 * h) - 2.0 * f(x + h)
            + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h ** 3)


def richardson(stencil, f, x: float, h: float) -> float:
    """One Richardson step on an O(h^2) stencil, upgrading it to O(h^4)."""
    return (4.0 * stencil(f, x, 0.5 * h) - stencil(f, x, h)) / 3.0
