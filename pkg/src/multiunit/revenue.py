"""Buyer best response and the expected revenue of a menu of bundle prices.

Conventions: bundles are indexed ``1..k`` in order of increasing demand and
index ``0`` is the "buy nothing" sentinel with ``d_0 = 0`` and ``p_0 = 0``.
A price vector is any length-``k`` array; functions that accept batches take
an ``(N, k)`` array and return ``N`` results.

For a price vector ``p`` the threshold ``D[j, l] = (p_j - p_l) / (d_j - d_l)``
is the value at which a buyer with enough demand is indifferent between
bundles ``j`` and ``l``. ``sigma(i)`` is the bundle a buyer with demand
``d_i`` falls back to first as the value drops, and chasing ``sigma`` gives
the chain of bundles bought as the value decreases to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distributions import ProblemInstance
from .numerics import adaptive_simpson


def _padded(p, inst: ProblemInstance) -> tuple[np.ndarray, np.ndarray, bool]:
    arr = np.asarray(p, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != inst.k:
        raise ValueError(f"price vector has length {arr.shape[1]}, expected {inst.k}")
    P = np.concatenate([np.zeros((arr.shape[0], 1)), arr], axis=1)
    dem = np.array((0,) + inst.demands, dtype=float)
    return P, dem, single


def threshold(p, inst: ProblemInstance, j: int, l: int):
    """Indifference value ``D[j, l]`` between bundles ``j > l >= 0``."""
    if not (inst.k >= j > l >= 0):
        raise ValueError(f"threshold needs k >= j > l >= 0, got j={j}, l={l}")
    P, dem, single = _padded(p, inst)
    out = (P[:, j] - P[:, l]) / (dem[j] - dem[l])
    return float(out[0]) if single else out


def threshold_matrix(p, inst: ProblemInstance) -> np.ndarray:
    """``(k+1, k+1)`` matrix with ``D[j, l]`` below the diagonal, NaN elsewhere."""
    P, dem, _ = _padded(p, inst)
    P = P[0]
    num = P[:, None] - P[None, :]
    den = dem[:, None] - dem[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        D = num / den
    D[np.triu_indices(inst.k + 1)] = np.nan
    return D


def convex_combination_identity(p, inst: ProblemInstance, i: int, j: int, l: int):
    """Return ``(lam, lhs, rhs)`` with ``lhs = D[i,l]`` and
    ``rhs = (1 - lam) D[i,j] + lam D[j,l]``, ``lam = (d_j - d_l)/(d_i - d_l)``.

    Prices given as ``Fraction`` (or ints) are kept exact, so the two sides
    compare equal with ``==``.
    """
    if not (inst.k >= i > j > l >= 0):
        raise ValueError(f"identity needs k >= i > j > l >= 0, got {(i, j, l)}")
    exact = all(isinstance(x, (int, Fraction)) for x in p)
    conv = Fraction if exact else float
    P = [conv(0)] + [conv(x) for x in p]
    d = [0] + list(inst.demands)

    def D(a, b):
        return (P[a] - P[b]) / conv(d[a] - d[b])

    lam = conv(d[j] - d[l]) / conv(d[i] - d[l])
    return lam, D(i, l), (1 - lam) * D(i, j) + lam * D(j, l)


def best_bundle(v: float, d: int, p, inst: ProblemInstance) -> int:
    """Bundle index a buyer of type ``(v, d)`` buys; ties go to the larger bundle.

    Only bundles with ``d_j <= d`` are considered, since extra units are
    worthless to the buyer and prices are ordered.
    """
    if d not in inst.demands:
        raise ValueError(f"demand {d} is not one of {inst.demands}")
    i = inst.demands.index(d) + 1
    P, dem, _ = _padded(p, inst)
    util = v * dem[: i + 1] - P[0, : i + 1]
    # argmax on the reversed array picks the largest index among ties
    return int(i - np.argmax(util[::-1]))


def best_bundle_batch(v: np.ndarray, demand_idx: np.ndarray, p, inst: ProblemInstance) -> np.ndarray:
    """Vectorised best response for values ``v`` and demand indices ``1..k``."""
    P, dem, _ = _padded(p, inst)
    v = np.asarray(v, dtype=float)
    demand_idx = np.asarray(demand_idx)
    util = v[:, None] * dem[None, :] - P[0][None, :]
    cols = np.arange(inst.k + 1)
    util = np.where(cols[None, :] <= demand_idx[:, None], util, -np.inf)
    return inst.k - np.argmax(util[:, ::-1], axis=1)


@dataclass(frozen=True)
class SigmaAssignment:
    """Fallback bundle for each demand index and the induced chains.

    ``sigma[i - 1]`` is ``sigma(i)`` and ``paths[i - 1]`` is
    ``(i, sigma(i), sigma(sigma(i)), ..., 0)``.
    """

    sigma: tuple[int, ...]

    def __post_init__(self):
        sig = tuple(int(s) for s in self.sigma)
        object.__setattr__(self, "sigma", sig)
        for i, s in enumerate(sig, start=1):
            if not 0 <= s < i:
                raise ValueError(f"sigma({i}) = {s} must lie in [0, {i})")

    def __call__(self, i: int) -> int:
        return 0 if i == 0 else self.sigma[i - 1]

    @property
    def k(self) -> int:
        return len(self.sigma)

    def path(self, i: int) -> tuple[int, ...]:
        out = [i]
        while out[-1] != 0:
            out.append(self(out[-1]))
        return tuple(out)

    @property
    def paths(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.path(i) for i in range(1, self.k + 1))

    def with_choice(self, i: int, s: int) -> "SigmaAssignment":
        sig = list(self.sigma)
        sig[i - 1] = s
        return SigmaAssignment(tuple(sig))


def _sigma_batch(P: np.ndarray, dem: np.ndarray) -> np.ndarray:
    """``(N, k+1)`` array with ``sig[:, i] = sigma(i)`` and ``sig[:, 0] = 0``."""
    N, k1 = P.shape
    sig = np.zeros((N, k1), dtype=int)
    for i in range(1, k1):
        D = (P[:, i : i + 1] - P[:, :i]) / (dem[i] - dem[:i])
        sig[:, i] = i - 1 - np.argmax(D[:, ::-1], axis=1)
    return sig


def assign_sigma(p, inst: ProblemInstance) -> SigmaAssignment:
    """``sigma(i) = argmax_{j < i} D[i, j]``, ties going to the largest ``j``."""
    P, dem, _ = _padded(p, inst)
    return SigmaAssignment(tuple(_sigma_batch(P[:1], dem)[0, 1:]))


def tied_choices(p, inst: ProblemInstance, i: int, tol: float = 1e-12) -> tuple[int, ...]:
    """All ``j < i`` whose threshold ``D[i, j]`` is within ``tol`` of the max."""
    P, dem, _ = _padded(p, inst)
    D = (P[0, i] - P[0, :i]) / (dem[i] - dem[:i])
    return tuple(int(j) for j in np.flatnonzero(D >= D.max() - tol))


def rev_sigma(p, sigma: SigmaAssignment, inst: ProblemInstance) -> float:
    """Closed-form revenue for a fixed fallback assignment ``sigma``.

    For each demand ``d_i`` the buyer pays ``p_i`` above ``D[i, sigma(i)]``
    and ``p_{sigma(j)}`` between consecutive thresholds along the chain of
    ``i``. Thresholds are clamped to ``[0, v_bar]`` before the CDF is
    applied. The last link of a chain ends at bundle 0, whose price is zero,
    so it contributes nothing.
    """
    if sigma.k != inst.k:
        raise ValueError("sigma length does not match the instance")
    P, dem, _ = _padded(p, inst)
    P = P[0]

    def D(a, b):
        return (P[a] - P[b]) / (dem[a] - dem[b])

    total = 0.0
    for i in range(1, inst.k + 1):
        F = inst.marginals[i - 1].cdf_clipped
        s = sigma(i)
        term = P[i] * (1.0 - F(D(i, s)))
        for j in sigma.path(i)[:-1]:
            sj = sigma(j)
            if sj > 0:
                term += P[sj] * (F(D(j, sj)) - F(D(sj, sigma(sj))))
        total += inst.weights[i - 1] * term
    return float(total)


def _rev_and_grad(P: np.ndarray, dem: np.ndarray, inst: ProblemInstance,
                  want_grad: bool):
    """Telescoped revenue ``sum_i q_i (p_i - sum_chain F_i(D) (p_a - p_b))``.

    Returns revenue of shape ``(N,)`` and optionally the gradient ``(N, k)``.
    """
    N = P.shape[0]
    k = inst.k
    sig = _sigma_batch(P, dem)
    rows = np.arange(N)
    revenue = np.zeros(N)
    grad = np.zeros((N, k + 1)) if want_grad else None
    for i in range(1, k + 1):
        m = inst.marginals[i - 1]
        q = inst.weights[i - 1]
        acc = P[:, i].copy()
        g = np.zeros((N, k + 1)) if want_grad else None
        if want_grad:
            g[:, i] = 1.0
        cur = np.full(N, i)
        for _ in range(i):
            active = cur > 0
            if not active.any():
                break
            nxt = sig[rows, cur]
            gap = P[rows, cur] - P[rows, nxt]
            width = np.where(active, dem[cur] - dem[nxt], 1.0)
            D = np.clip(gap / width, 0.0, inst.v_bar)
            F = m.cdf_clipped(D)
            acc -= np.where(active, F * gap, 0.0)
            if want_grad:
                raw = gap / width
                dens = np.where((raw > inst.v_bar) | (raw < 0.0), 0.0, m.pdf_clipped(D))
                slope = np.where(active, F + raw * dens, 0.0)
                g[rows, cur] -= slope
                g[rows, nxt] += slope
            cur = np.where(active, nxt, 0)
        revenue += q * acc
        if want_grad:
            grad += q * g
    return revenue, (grad[:, 1:] if want_grad else None)


def rev(p, inst: ProblemInstance):
    """Expected revenue of posting price vector ``p`` (or a batch of them)."""
    P, dem, single = _padded(p, inst)
    out, _ = _rev_and_grad(P, dem, inst, want_grad=False)
    return float(out[0]) if single else out


def supergradient(p, inst: ProblemInstance) -> np.ndarray:
    """Analytic gradient of the active closed form at ``p``.

    At region boundaries every admissible assignment gives the same vector,
    so the tie-break used by :func:`assign_sigma` does not matter. Where a
    clamped threshold sits exactly at ``v_bar`` the left-hand density is used.
    """
    P, dem, single = _padded(p, inst)
    _, g = _rev_and_grad(P, dem, inst, want_grad=True)
    return g[0] if single else g


def rev_by_integration(p, inst: ProblemInstance, tol: float = 1e-8) -> float:
    """Revenue by integrating the price paid against each density.

    The value axis is split at every clamped threshold and every density
    breakpoint; on each piece the best response is constant, so the piece
    contributes its price times the integral of the density (adaptive
    Simpson). Independent of the closed form in :func:`rev`.
    """
    P, dem, _ = _padded(p, inst)
    prices = P[0]
    k = inst.k
    total = 0.0
    for i in range(1, k + 1):
        m = inst.marginals[i - 1]
        cuts = {0.0, inst.v_bar}
        for a in range(1, i + 1):
            for b in range(a):
                D = (prices[a] - prices[b]) / (dem[a] - dem[b])
                if 0.0 < D < inst.v_bar:
                    cuts.add(float(D))
        cuts.update(b for b in m.breakpoints() if 0.0 < b < inst.v_bar)
        pts = sorted(cuts)
        pieces = [(a, b) for a, b in zip(pts[:-1], pts[1:]) if b > a]
        share = tol / max(1, len(pieces))
        contrib = 0.0
        for a, b in pieces:
            j = best_bundle(0.5 * (a + b), inst.demands[i - 1], prices[1:], inst)
            if prices[j] == 0.0:
                continue
            mass = adaptive_simpson(lambda x: float(m.pdf_clipped(x)), a, b, tol=share)
            contrib += prices[j] * mass
        total += inst.weights[i - 1] * contrib
    return total


def rev_monte_carlo(p, inst: ProblemInstance, n: int, seed: int,
                    chunk: int = 250_000) -> tuple[float, float]:
    """Sample ``n`` buyers and average the price they pay.

    Returns ``(mean, standard error)``. Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    P, _, _ = _padded(p, inst)
    prices = P[0]
    remaining = n
    while remaining > 0:
        size = min(chunk, remaining)
        remaining -= size
        idx = rng.choice(inst.k, size=size, p=np.asarray(inst.weights)) + 1
        u = rng.random(size)
        v = np.empty(size)
        for i in range(1, inst.k + 1):
            mask = idx == i
            if mask.any():
                v[mask] = inst.marginals[i - 1].ppf(u[mask])
        paid = prices[best_bundle_batch(v, idx, prices[1:], inst)]
        total += paid.sum()
        total_sq += (paid * paid).sum()
    mean = total / n
    if n == 1:
        return float(mean), 0.0
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    return float(mean), float(np.sqrt(var / n))


# -- boundary helpers -----------------------------------------------------

def disjoint_paths(sigma: SigmaAssignment, other: SigmaAssignment,
                   i_star: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Portions of the two chains from ``i_star`` up to where they merge.

    Both returned tuples start at ``i_star`` and end at the merge node
    (``0`` when they only meet at the sentinel).
    """
    a = sigma.path(i_star)
    b = other.path(i_star)
    common = set(a) & set(b) - {i_star}
    merge = max(common)
    return a[: a.index(merge) + 1], b[: b.index(merge) + 1]


def equal_thresholds_on_paths(p, inst: ProblemInstance, sigma: SigmaAssignment,
                              other: SigmaAssignment, i_star: int,
                              tol: float = 1e-9) -> bool:
    """Check that every pair ``j > j'`` on the union of the disjoint chain
    portions has the same threshold ``D[j, j']``."""
    path_a, path_b = disjoint_paths(sigma, other, i_star)
    nodes = sorted(set(path_a) | set(path_b), reverse=True)
    D = threshold_matrix(p, inst)
    vals = [D[j, l] for x, j in enumerate(nodes) for l in nodes[x + 1:]]
    return bool(max(vals) - min(vals) <= tol)
