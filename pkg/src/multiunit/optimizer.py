"""Maximise expected revenue over ordered price vectors.

Revenue is concave on the set of ordered price vectors whose consecutive
per-unit increments stay below ``v_bar`` (every threshold then lies inside
``[0, v_bar]``). Any ordered price vector can be pulled into that set by
:func:`retract` without changing revenue, so the search runs there. In
increment coordinates ``u_j = p_j - p_{j-1}`` the set is a box, which makes
the projection trivial.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import ProblemInstance
from .revenue import rev, supergradient

log = logging.getLogger(__name__)


class NumericalError(ArithmeticError):
    """The objective produced a non-finite value."""


@dataclass(frozen=True)
class OptimizeConfig:
    max_iters: int = 400
    tol: float = 1e-12
    eta0: float = 0.5
    decay: float = 0.5
    restarts: int = 3
    seed: int = 0
    polish_iters: int = 2000

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if not self.eta0 > 0.0:
            raise ValueError("eta0 must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass(frozen=True)
class OptimizeResult:
    p_star: tuple[float, ...]
    rev_star: float
    iterations: int
    certificate: float
    certified: bool
    lattice_gap: float | None = None
    history: tuple[float, ...] = field(default=(), repr=False)


def project_ordered(p, upper: float) -> np.ndarray:
    """Euclidean projection onto ``{0 <= p_1 <= ... <= p_k <= upper}``.

    Pool-adjacent-violators gives the isotonic fit, then the box clip keeps
    the order (clipping a monotone sequence stays monotone).
    """
    y = np.asarray(p, dtype=float).ravel()
    means: list[float] = []
    sizes: list[int] = []
    for val in y:
        means.append(float(val))
        sizes.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            n = sizes[-2] + sizes[-1]
            means[-2] = (means[-2] * sizes[-2] + means[-1] * sizes[-1]) / n
            sizes[-2] = n
            means.pop()
            sizes.pop()
    fit = np.repeat(means, sizes)
    return np.clip(fit, 0.0, upper)


def increment_bounds(inst: ProblemInstance) -> np.ndarray:
    """Upper bound ``v_bar (d_j - d_{j-1})`` on each per-bundle increment."""
    dem = np.array((0,) + inst.demands, dtype=float)
    return inst.v_bar * np.diff(dem)


def retract(p, inst) -> np.ndarray:
    """Lower each price until no threshold exceeds ``v_bar``.

    ``p'_j = min(p_j, min_{l<j} p'_l + v_bar (d_j - d_l))``. A bundle priced
    above that cap is weakly dominated for every value in ``[0, v_bar]``, so
    with atomless marginals the revenue is unchanged. ``inst`` only needs
    ``demands``, ``v_bar`` and ``k``.
    """
    arr = np.atleast_2d(np.asarray(p, dtype=float)).copy()
    dem = np.array((0,) + inst.demands, dtype=float)
    out = np.zeros((arr.shape[0], inst.k + 1))
    for j in range(1, inst.k + 1):
        caps = out[:, :j] + inst.v_bar * (dem[j] - dem[:j])
        out[:, j] = np.minimum(arr[:, j - 1], caps.min(axis=1))
    res = out[:, 1:]
    return res[0] if np.asarray(p).ndim == 1 else res


def _to_prices(u: np.ndarray) -> np.ndarray:
    return np.cumsum(u, axis=-1)


def _to_increments(p: np.ndarray) -> np.ndarray:
    return np.diff(np.concatenate([[0.0], p]))


def _objective(p: np.ndarray, inst: ProblemInstance) -> float:
    val = rev(p, inst)
    if not math.isfinite(val):
        raise NumericalError(f"revenue is not finite at {p}")
    return val


def _increment_gradient(p: np.ndarray, inst: ProblemInstance) -> np.ndarray:
    g = supergradient(p, inst)
    # p = cumsum(u)  =>  dRev/du_j = sum_{i >= j} dRev/dp_i
    return np.cumsum(g[::-1])[::-1]


def _pattern_directions(k: int) -> np.ndarray:
    if k <= 4:
        dirs = [d for d in itertools.product((-1.0, 0.0, 1.0), repeat=k) if any(d)]
        return np.array(dirs)
    eye = np.eye(k)
    return np.concatenate([eye, -eye])


def _polish(u: np.ndarray, val: float, inst: ProblemInstance, box: np.ndarray,
            cfg: OptimizeConfig) -> tuple[np.ndarray, float, int]:
    """Projected gradient with backtracking, then a shrinking pattern search."""
    iters = 0
    step = 1.0
    for _ in range(cfg.polish_iters):
        iters += 1
        g = _increment_gradient(_to_prices(u), inst)
        improved = False
        while step > 1e-14:
            cand = np.clip(u + step * g, 0.0, box)
            cval = _objective(_to_prices(cand), inst)
            if cval > val:
                improved = cval - val > cfg.tol
                u, val = cand, cval
                step *= 2.0
                break
            step *= 0.5
        if not improved:
            break

    dirs = _pattern_directions(inst.k)
    h = 0.05 * float(box.max())
    while h > 1e-11:
        iters += 1
        cands = np.clip(u[None, :] + h * dirs, 0.0, box)
        vals = rev(_to_prices(cands), inst)
        best = int(np.argmax(vals))
        if vals[best] > val + cfg.tol:
            u, val = cands[best], float(vals[best])
        else:
            h *= 0.5
    return u, val, iters


def certificate(p, inst: ProblemInstance, h: float = 1e-5) -> float:
    """Largest one-sided finite-difference directional derivative at ``p``.

    Directions are ``+-e_i`` and the block moves ``+-(e_i + ... + e_k)``,
    kept only when ``p + h * dir`` stays ordered inside ``[0, d_k v_bar]``.
    A value near zero (or negative) certifies a local, hence global, max.
    """
    p = np.asarray(p, dtype=float)
    k = inst.k
    base = _objective(p, inst)
    dirs = []
    for i in range(k):
        e = np.zeros(k)
        e[i] = 1.0
        block = np.zeros(k)
        block[i:] = 1.0
        dirs.extend([e, -e, block, -block])
    worst = -math.inf
    for d in dirs:
        q = p + h * d
        if np.any(q < 0.0) or np.any(q > inst.upper) or np.any(np.diff(q) < 0.0):
            continue
        worst = max(worst, (_objective(q, inst) - base) / h)
    return worst


def maximize(inst: ProblemInstance, cfg: OptimizeConfig | None = None) -> OptimizeResult:
    """Projected supergradient ascent with best-iterate tracking and restarts.

    Steps are ``eta0 * scale / t**decay`` in increment space, where ``scale``
    is the size of the increment box. Every restart is polished and the best
    result wins. The result is flagged uncertified when the instance is not
    DMR with supports reaching ``v_bar``, or when the certificate exceeds
    ``1e-3``.
    """
    cfg = cfg or OptimizeConfig()
    dmr = inst.is_dmr_on_domain()
    if not dmr:
        log.warning("instance is not DMR on [0, v_bar]; result is not certified optimal")
    box = increment_bounds(inst)
    scale = float(box.max())
    rng = np.random.default_rng(cfg.seed)
    best_u, best_val = None, -math.inf
    history: list[float] = []
    total_iters = 0
    for r in range(cfg.restarts):
        u = 0.5 * box if r == 0 else rng.uniform(0.0, 1.0, inst.k) * box
        val = _objective(_to_prices(u), inst)
        run_u, run_val = u, val
        for t in range(1, cfg.max_iters + 1):
            total_iters += 1
            g = _increment_gradient(_to_prices(u), inst)
            norm = float(np.linalg.norm(g))
            if norm == 0.0:
                break
            u = np.clip(u + cfg.eta0 * scale / t ** cfg.decay * g / norm, 0.0, box)
            val = _objective(_to_prices(u), inst)
            if val > run_val:
                run_u, run_val = u, val
            history.append(max(best_val, run_val))
        run_u, run_val, extra = _polish(run_u, run_val, inst, box, cfg)
        total_iters += extra
        if run_val > best_val:
            best_u, best_val = run_u, run_val
        history.append(best_val)
    p_star = _to_prices(best_u)
    rev_star = _objective(p_star, inst)
    cert = certificate(p_star, inst)
    return OptimizeResult(
        p_star=tuple(float(x) for x in p_star),
        rev_star=rev_star,
        iterations=total_iters,
        certificate=cert,
        certified=bool(dmr and cert <= 1e-3),
        history=tuple(history),
    )


def _ordered_lattice(lows: np.ndarray, highs: np.ndarray, n: int,
                     ordered: bool = True) -> np.ndarray:
    axes = [np.linspace(lo, hi, n) for lo, hi in zip(lows, highs)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    if ordered:
        mesh = mesh[np.all(np.diff(mesh, axis=1) >= 0.0, axis=1)]
    return mesh


def _batched_rev(points: np.ndarray, inst: ProblemInstance, batch: int = 200_000) -> np.ndarray:
    return np.concatenate([rev(points[s:s + batch], inst) for s in range(0, len(points), batch)])


def grid_search(inst: ProblemInstance, resolution: int,
                refine_to: float | None = None, zoom_points: int = 21) -> OptimizeResult:
    """Brute-force maximum over the ordered lattice on ``[0, d_k v_bar]^k``.

    With ``refine_to`` the lattice is repeatedly re-centred on the incumbent
    with a finer step until the step is at most ``refine_to``. The reported
    ``lattice_gap`` is the largest revenue change between the winner and its
    axis neighbours at the final step, a bound on the lattice error scale.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    k = inst.k
    upper = inst.upper
    lows, highs = np.zeros(k), np.full(k, upper)
    pts = _ordered_lattice(lows, highs, resolution)
    vals = _batched_rev(pts, inst)
    evaluations = len(pts)
    best = int(np.argmax(vals))
    p, val = pts[best], float(vals[best])
    step = upper / (resolution - 1)
    while refine_to is not None and step > refine_to:
        half = 2.0 * step
        lows = np.clip(p - half, 0.0, upper)
        highs = np.clip(p + half, 0.0, upper)
        pts = _ordered_lattice(lows, highs, zoom_points)
        vals = _batched_rev(pts, inst)
        evaluations += len(pts)
        best = int(np.argmax(vals))
        if vals[best] >= val:
            p, val = pts[best], float(vals[best])
        step = 2.0 * half / (zoom_points - 1)
    neighbours = []
    for i in range(k):
        for s in (-step, step):
            q = p.copy()
            q[i] += s
            if np.all(q >= 0.0) and np.all(q <= upper) and np.all(np.diff(q) >= 0.0):
                neighbours.append(q)
    gap = 0.0
    if neighbours:
        gap = float(np.max(np.abs(rev(np.array(neighbours), inst) - val)))
    return OptimizeResult(
        p_star=tuple(float(x) for x in p),
        rev_star=val,
        iterations=evaluations,
        certificate=certificate(p, inst),
        certified=False,
        lattice_gap=gap,
    )
