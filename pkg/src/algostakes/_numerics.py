"""Small 1-D search helpers shared by the designer and voter solvers."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import optimize

from .exceptions import BracketError

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6, max_iter: int = 200
) -> float:
    """Maximizer of a unimodal ``f`` on ``[lo, hi]``, bracket shrunk below ``tol``."""
    a, b = lo, hi
    x1 = b - INV_GOLDEN * (b - a)
    x2 = a + INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_GOLDEN * (b - a)
            f2 = f(x2)
    best = max(((f(a), a), (f1, x1), (f2, x2), (f(b), b)), key=lambda p: p[0])
    return best[1]


def bracketed_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    coarse: int = 201,
    tol: float = 1e-6,
    fprime: Callable[[float], float] | None = None,
    fsecond: Callable[[float], float] | None = None,
    newton_steps: int = 8,
    f_vec: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """Coarse scan, golden-section inside the winning cell, then Newton polish.

    ``f_vec``, when given, evaluates ``f`` on the whole coarse grid at once.
    The polish only accepts steps that stay inside ``[lo, hi]`` and do not
    lower ``f``.
    """
    xs = np.linspace(lo, hi, coarse)
    vals = f_vec(xs) if f_vec is not None else [f(float(x)) for x in xs]
    i = int(np.argmax(vals))
    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, coarse - 1)])
    x = golden_section_max(f, a, b, tol=tol)
    fx = f(x)
    if fprime is None or fsecond is None or x in (lo, hi):
        return x
    for _ in range(newton_steps):
        g, h = fprime(x), fsecond(x)
        if not (math.isfinite(g) and math.isfinite(h)) or h >= 0:
            break
        step = -g / h
        if abs(step) > 10 * tol:
            break
        xn = min(max(x + step, lo), hi)
        fn = f(xn)
        if fn < fx:
            break
        x, fx = xn, fn
        if abs(step) < 1e-15:
            break
    return x


def expanding_root(
    g: Callable[[float], float],
    anchor: float,
    direction: int,
    width: float = 1.0,
    cap: float = 1e3,
    xtol: float = 1e-14,
) -> float:
    """Root of ``g`` between ``anchor`` and ``anchor + direction * w``.

    The half-width ``w`` starts at ``width`` and doubles until ``g``
    changes sign; past ``cap`` a :class:`BracketError` is raised.
    """
    g_anchor = g(anchor)
    if g_anchor == 0.0:
        return anchor
    w = width
    while w <= cap:
        other = anchor + direction * w
        g_other = g(other)
        if math.isfinite(g_other) and g_other * g_anchor <= 0:
            lo, hi = sorted((anchor, other))
            return optimize.brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
        w *= 2.0
    raise BracketError(
        f"no sign change within {cap:g} of {anchor:g} (direction {direction:+d}); "
        "is the cost distribution log-concave with full support?"
    )
