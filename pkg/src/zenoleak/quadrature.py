"""Adaptive Gauss-Legendre quadrature on vectorized complex integrands.

All physics integrals here are smooth between a handful of known breakpoints
(pole excised analytically, branch points mapped away), so panel-wise
Gauss-Legendre with bisection-based error control is both fast and robust.
Integrands must accept a numpy array of abscissae and return complex values.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


class QuadratureError(RuntimeError):
    """Quadrature non-convergence; message carries the diagnostic."""


@lru_cache(maxsize=16)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel(f, a, b, order):
    x, w = _gl_nodes(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * np.sum(w * f(mid + half * x))


def integrate(f, a, b, rel_tol=1e-10, abs_tol=1e-13, max_subdivisions=200,
              order=16, breakpoints=()):
    """Adaptive integral of a vectorized complex f over the finite [a, b].

    Panels are bisected until the coarse/fine estimates agree; known interior
    breakpoints become initial panel edges.
    """
    edges = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    stack = list(zip(edges[:-1], edges[1:]))
    total = 0.0 + 0.0j
    err = 0.0
    used = 0
    while stack:
        lo, hi = stack.pop()
        coarse = _panel(f, lo, hi, order)
        mid = 0.5 * (lo + hi)
        fine = _panel(f, lo, mid, order) + _panel(f, mid, hi, order)
        delta = abs(fine - coarse)
        scale = max(abs(total + fine), abs_tol / max(rel_tol, 1e-300))
        if delta <= max(abs_tol, rel_tol * scale) * max(1.0, (hi - lo) / (b - a)):
            total += fine
            err += delta
            continue
        used += 1
        if used > max_subdivisions:
            raise QuadratureError(
                f"quadrature non-convergence on [{a}, {b}]: "
                f"{max_subdivisions} subdivisions exhausted, "
                f"last panel [{lo}, {hi}] error {delta:.2e}")
        stack.append((lo, mid))
        stack.append((mid, hi))
    return total


def integrate_tail(f, a, scale, rel_tol=1e-10, abs_tol=1e-13,
                   max_subdivisions=200, order=16, max_panels=120):
    """Integral of a decaying f over [a, inf) by geometrically growing panels.

    `scale` sets the first panel width; panels double until a panel's
    contribution drops below the tolerance floor.
    """
    total = 0.0 + 0.0j
    lo = a
    width = scale
    for _ in range(max_panels):
        hi = lo + width
        part = integrate(f, lo, hi, rel_tol=rel_tol, abs_tol=abs_tol,
                         max_subdivisions=max_subdivisions, order=order)
        total += part
        if abs(part) <= max(abs_tol, rel_tol * abs(total)):
            return total
        lo = hi
        width *= 2.0
    raise QuadratureError(
        f"tail integral from {a} did not settle after {max_panels} panels")
