"""Dense primal simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

The origin is feasible, so no phase one is needed. The tableau is kept in
compact (Tucker) form: rows are basic variables, columns are non-basic
variables, and a pivot swaps one of each.

Entering variables are chosen by the largest reduced cost (Dantzig). After
a run of degenerate pivots the rule switches to Bland's smallest-index rule,
which cannot cycle, and switches back once the objective moves again.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(ArithmeticError):
    """The simplex method failed; ``diagnostics`` holds condition details."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    pivots: int
    bland_pivots: int


def solve_lp(c, A, b, *, eps: float = 1e-10, piv_tol: float = 1e-9, max_pivots: int = 200_000,
             degenerate_run: int = 50) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("shape mismatch between c, A and b")
    if np.any(b < 0.0):
        raise ValueError("right-hand side must be non-negative (origin feasible)")

    T = np.zeros((m + 1, n + 1))
    T[:m, :n] = A
    T[:m, n] = b
    T[m, :n] = -c
    # labels: 0..n-1 structural, n..n+m-1 slack
    col_label = np.arange(n)
    row_label = np.arange(n, n + m)

    pivots = bland = 0
    stall = 0
    use_bland = False
    while True:
        obj_row = T[m, :n]
        if use_bland:
            cand = np.flatnonzero(obj_row < -eps)
            if cand.size == 0:
                break
            s = int(cand[np.argmin(col_label[cand])])
        else:
            s = int(np.argmin(obj_row))
            if obj_row[s] >= -eps:
                break
        col = T[:m, s]
        pos = np.flatnonzero(col > piv_tol)
        if pos.size == 0:
            raise LPError("objective is unbounded", {"entering": int(col_label[s])})
        ratios = T[pos, n] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + eps * max(1.0, abs(best))]
        if use_bland:
            r = int(ties[np.argmin(row_label[ties])])
        else:
            # largest pivot among tied rows keeps the tableau well conditioned
            r = int(ties[np.argmax(col[ties])])

        piv = T[r, s]
        if abs(piv) < 1e-12:
            raise LPError("pivot element too small", {"pivot": float(piv), "row": r, "col": s})
        before = T[m, n]
        _pivot(T, r, s)
        row_label[r], col_label[s] = col_label[s], row_label[r]
        pivots += 1
        bland += use_bland
        if T[m, n] - before <= eps * max(1.0, abs(before)):
            stall += 1
            if stall >= degenerate_run:
                use_bland = True
        else:
            stall = 0
            use_bland = False
        if pivots >= max_pivots:
            raise LPError("pivot limit reached", {"pivots": pivots})

    x = np.zeros(n + m)
    basic = row_label < n
    x[row_label[basic]] = T[:m, n][basic]
    rhs_min = float(T[:m, n].min()) if m else 0.0
    if rhs_min < -1e-7:
        raise LPError("basis lost primal feasibility", {"min_rhs": rhs_min})
    return LPResult(np.maximum(x[:n], 0.0), float(T[m, n]), pivots, bland)


def _pivot(T: np.ndarray, r: int, s: int) -> None:
    piv = T[r, s]
    col = T[:, s].copy()
    row = T[r] / piv
    row[s] = 1.0 / piv
    nz = np.flatnonzero(col)
    nz = nz[nz != r]
    # only rows touched by the entering column change
    T[nz] -= np.outer(col[nz], row)
    T[nz, s] = -col[nz] / piv
    T[r] = row
