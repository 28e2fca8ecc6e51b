"""Small scalar numerical routines shared by the other modules."""

from __future__ import annotations

import math
from typing import Callable

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class QuadratureError(ArithmeticError):
    """Adaptive quadrature hit its depth limit before meeting tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-8, max_depth: int = 40) -> float:
    """Integrate ``f`` over ``[a, b]`` with adaptive Simpson's rule.

    Raises :class:`QuadratureError` when some subinterval reaches
    ``max_depth`` without its local error estimate falling under its share
    of ``tol``. The error carries the accumulated error estimate.
    """
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    failed_err = 0.0
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a_, b_, fa_, fm_, fb_, whole_, tol_, depth = stack.pop()
        m_ = 0.5 * (a_ + b_)
        lm, rm = 0.5 * (a_ + m_), 0.5 * (m_ + b_)
        flm, frm = f(lm), f(rm)
        left = (m_ - a_) / 6.0 * (fa_ + 4.0 * flm + fm_)
        right = (b_ - m_) / 6.0 * (fm_ + 4.0 * frm + fb_)
        err = left + right - whole_
        if abs(err) <= 15.0 * tol_:
            total += left + right + err / 15.0
        elif depth >= max_depth:
            total += left + right + err / 15.0
            failed_err += abs(err) / 15.0
        else:
            stack.append((a_, m_, fa_, flm, fm_, left, 0.5 * tol_, depth + 1))
            stack.append((m_, b_, fm_, frm, fb_, right, 0.5 * tol_, depth + 1))
    if failed_err > tol:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a}, {b}]", failed_err)
    return total


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-10, max_iter: int = 500) -> float:
    """Return an approximate maximiser of a unimodal ``f`` on ``[lo, hi]``.

    The endpoints are also compared at the end so that monotone objectives
    return the boundary exactly.
    """
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    best_x, best_f = x, f(x)
    for cand in (lo, hi):
        fv = f(cand)
        if fv > best_f:
            best_x, best_f = cand, fv
    return best_x
