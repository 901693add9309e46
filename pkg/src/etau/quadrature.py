"""Adaptive quadrature and elliptic-integral helpers used by the profile code."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import ParameterError


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 48,
) -> float:
    """Adaptive Simpson rule with Richardson correction.

    tol is an absolute tolerance for the whole interval; subintervals get
    proportionally tightened budgets, so the returned value is accurate to
    roughly tol regardless of how the recursion splits.
    """
    if not b > a:
        if b == a:
            return 0.0
        raise ParameterError(f"empty integration interval [{a}, {b}]")

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h * (fa + 4.0 * fm + fb) / 6.0

    def recurse(a, m, b, fa, fm, fb, whole, tol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = f(lm)
        frm = f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        err = left + right - whole
        if depth <= 0 or abs(err) <= 15.0 * tol:
            return left + right + err / 15.0
        return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(
            m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1
        )

    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    return recurse(a, m, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, max_depth)


def elliptic_k(k: float) -> float:
    """Complete elliptic integral K(k) via the arithmetic-geometric mean."""
    if not 0.0 <= k < 1.0:
        raise ParameterError(f"elliptic modulus must satisfy 0 <= k < 1, got {k}")
    a = 1.0
    b = math.sqrt(1.0 - k * k)
    for _ in range(200):
        if abs(a - b) <= 1e-17 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def cumulative_simpson_table(
    f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int
) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative integral of f on a uniform grid, one Simpson rule per panel.

    f must accept numpy arrays.  Returns (nodes, cumulative values); the
    per-panel rule keeps the node values locally fourth-order accurate.
    """
    if panels < 1:
        raise ParameterError("need at least one panel")
    xs = np.linspace(a, b, panels + 1)
    mids = 0.5 * (xs[:-1] + xs[1:])
    fx = f(xs)
    fm = f(mids)
    h = (b - a) / panels
    increments = h * (fx[:-1] + 4.0 * fm + fx[1:]) / 6.0
    table = np.empty(panels + 1)
    table[0] = 0.0
    np.cumsum(increments, out=table[1:])
    return xs, table
