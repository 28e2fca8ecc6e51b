"""Command-line interface.

Every subcommand reads a JSON instance file and prints a JSON report with
the command name, the SHA-256 of the instance file and a result payload.
Reports are byte-identical for identical inputs and seeds; ``--timing``
adds wall-clock time and so breaks that on purpose.

Exit codes: 0 success, 2 parse or validation error, 3 numerical failure.
Every option can also be set through an environment variable named
``MULTIUNIT_<COMMAND>_<OPTION>``, e.g. ``MULTIUNIT_SIMULATE_ROUNDS``.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import distributions as dist
from . import dynpricing, ktwo, oracle, optimizer, revenue
from .numerics import QuadratureError
from .simplex import LPError

TOP_KEYS = {"demands", "weights", "v_bar", "marginals", "discrete"}
CONTINUOUS_KEYS = {"demands", "weights", "v_bar", "marginals"}


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceFile:
    problem: dist.ProblemInstance | None
    discrete: oracle.DiscreteInstance | None
    digest: str


def parse_instance_text(text: str) -> InstanceFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InstanceError("instance file must hold a JSON object")
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise InstanceError(f"unknown keys: {sorted(unknown)}")
    problem = None
    present = CONTINUOUS_KEYS & set(raw)
    if present and present != CONTINUOUS_KEYS:
        raise InstanceError(f"missing keys: {sorted(CONTINUOUS_KEYS - present)}")
    try:
        if present:
            v_bar = float(raw["v_bar"])
            marginals = [dist.marginal_from_spec(m, v_bar) for m in raw["marginals"]]
            problem = dist.ProblemInstance(tuple(raw["demands"]), tuple(raw["weights"]),
                                           tuple(marginals), v_bar)
        disc = None
        if "discrete" in raw:
            block = raw["discrete"]
            if not isinstance(block, dict) or set(block) != {"types", "probs"}:
                raise InstanceError("discrete block needs exactly 'types' and 'probs'")
            disc = oracle.DiscreteInstance(tuple(tuple(t) for t in block["types"]),
                                           tuple(block["probs"]))
    except InstanceError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise InstanceError(str(exc)) from None
    if problem is None and disc is None:
        raise InstanceError("instance file has neither a continuous nor a discrete block")
    digest = hashlib.sha256(text.encode()).hexdigest()
    return InstanceFile(problem, disc, digest)


def instance_to_dict(problem: dist.ProblemInstance | None,
                     discrete: oracle.DiscreteInstance | None = None) -> dict:
    out: dict = {}
    if problem is not None:
        out.update({
            "demands": list(problem.demands),
            "weights": list(problem.weights),
            "v_bar": problem.v_bar,
            "marginals": [dist.marginal_to_spec(m) for m in problem.marginals],
        })
    if discrete is not None:
        out["discrete"] = {"types": [list(t) for t in discrete.types],
                           "probs": list(discrete.probs)}
    return out


def dump_instance(problem, discrete=None) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(instance_to_dict(problem, discrete), indent=2, sort_keys=True)


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def _emit(ctx: click.Context, command: str, inst: InstanceFile, payload: dict,
          out: str | None) -> None:
    report = {"command": command, "instance_sha256": inst.digest, "result": _clean(payload)}
    if ctx.obj.get("timing"):
        report["wall_time_s"] = time.perf_counter() - ctx.obj["t0"]
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _load(path: str) -> InstanceFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance_text(text)


def _need_problem(inst: InstanceFile) -> dist.ProblemInstance:
    if inst.problem is None:
        raise InstanceError("this command needs demands, weights, v_bar and marginals")
    return inst.problem


def _parse_prices(text: str, k: int) -> np.ndarray:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InstanceError(f"cannot parse prices {text!r}") from None
    if len(vals) != k:
        raise InstanceError(f"expected {k} prices, got {len(vals)}")
    p = np.array(vals)
    if p[0] < 0.0 or np.any(np.diff(p) < 0.0):
        raise InstanceError("prices must satisfy 0 <= p_1 <= ... <= p_k")
    return p


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except InstanceError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (QuadratureError, LPError, optimizer.NumericalError,
                dist.SingularityError, FloatingPointError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)


instance_opt = click.option("--instance", "instance_path", required=True,
                            type=click.Path(dir_okay=False), help="JSON instance file.")
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None,
                       help="Write the report here instead of stdout.")


@click.group(cls=_Group, context_settings={"auto_envvar_prefix": "MULTIUNIT"})
@click.option("--timing", is_flag=True, help="Include wall time in the report.")
@click.pass_context
def main(ctx: click.Context, timing: bool) -> None:
    """Revenue-optimal bundle pricing for a buyer with a private demand cap."""
    ctx.ensure_object(dict)
    ctx.obj["timing"] = timing
    ctx.obj["t0"] = time.perf_counter()


@main.command("check-dmr")
@instance_opt
@click.option("--grid-n", default=2001, show_default=True, type=int)
@out_opt
@click.pass_context
def check_dmr(ctx, instance_path, grid_n, out):
    """DMR and regularity verdict for each marginal."""
    inst = _load(instance_path)
    prob = _need_problem(inst)
    rows = []
    for d, m in zip(prob.demands, prob.marginals):
        verdict = dist.is_dmr(m, grid_n)
        rows.append({"demand": d, "kind": m.kind, "dmr": verdict.ok,
                     "witness": verdict.witness, "regular": dist.is_regular(m, grid_n)})
    _emit(ctx, "check-dmr", inst, {"marginals": rows}, out)


@main.command("revenue")
@instance_opt
@click.option("--prices", required=True, help="Comma-separated p_1..p_k.")
@out_opt
@click.pass_context
def revenue_cmd(ctx, instance_path, prices, out):
    """Expected revenue of a price vector, with its active region."""
    inst = _load(instance_path)
    prob = _need_problem(inst)
    p = _parse_prices(prices, prob.k)
    sig = revenue.assign_sigma(p, prob)
    value = revenue.rev(p, prob)
    check = revenue.rev_by_integration(p, prob)
    _emit(ctx, "revenue", inst, {
        "prices": p, "revenue": value, "sigma": list(sig.sigma),
        "paths": [list(x) for x in sig.paths],
        "integration_revenue": check, "integration_delta": abs(value - check),
    }, out)


@main.command("optimize")
@instance_opt
@click.option("--grid", is_flag=True, help="Brute-force lattice search instead of ascent.")
@click.option("--k2", is_flag=True, help="Use the two-demand closed form when k = 2.")
@click.option("--resolution", default=201, show_default=True, type=int)
@click.option("--tol", default=1e-12, show_default=True, type=float)
@click.option("--iters", default=400, show_default=True, type=int)
@click.option("--restarts", default=3, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@out_opt
@click.pass_context
def optimize_cmd(ctx, instance_path, grid, k2, resolution, tol, iters, restarts, seed, out):
    """Revenue-maximising price vector."""
    inst = _load(instance_path)
    prob = _need_problem(inst)
    if k2 and prob.k == 2:
        sol = ktwo.solve_k2(prob)
        payload = {"method": "k2", "prices": sol.prices, "revenue": sol.revenue,
                   "case_id": sol.case_id, "v1_star": sol.v1_star, "v2_star": sol.v2_star,
                   "candidates": [{"case_id": c.case_id, "v1": c.v1, "v2": c.v2,
                                   "revenue": c.revenue, "feasible": c.feasible}
                                  for c in sol.candidates]}
    elif grid:
        res = optimizer.grid_search(prob, resolution, refine_to=1e-6)
        payload = {"method": "grid", "prices": res.p_star, "revenue": res.rev_star,
                   "lattice_gap": res.lattice_gap, "evaluations": res.iterations}
    else:
        try:
            cfg = optimizer.OptimizeConfig(max_iters=iters, tol=tol, restarts=restarts, seed=seed)
        except ValueError as exc:
            raise InstanceError(str(exc)) from None
        res = optimizer.maximize(prob, cfg)
        payload = {"method": "ascent", "prices": res.p_star, "revenue": res.rev_star,
                   "certificate": res.certificate, "certified": res.certified,
                   "iterations": res.iterations}
    _emit(ctx, "optimize", inst, payload, out)


@main.command("oracle")
@instance_opt
@out_opt
@click.pass_context
def oracle_cmd(ctx, instance_path, out):
    """Optimal randomized and deterministic revenue on the discrete block."""
    inst = _load(instance_path)
    if inst.discrete is None:
        raise InstanceError("this command needs a 'discrete' block")
    try:
        mech, lp_rev = oracle.lp_optimal(inst.discrete)
        menu, det_rev = oracle.deterministic_optimal(inst.discrete)
    except oracle.SizeError as exc:
        raise InstanceError(str(exc)) from None
    _emit(ctx, "oracle", inst, {
        "lp_revenue": lp_rev, "deterministic_revenue": det_rev,
        "determinism_gap": lp_rev - det_rev,
        "mechanism": {"w": mech.w, "p": mech.p},
        "menu": {str(d): p for d, p in menu.items()},
    }, out)


@main.command("simulate")
@instance_opt
@click.option("--strategy", type=click.Choice(["fixed", "eps-grid", "two-point"]),
              default="two-point", show_default=True)
@click.option("--rounds", default=10_000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--prices", default=None, help="Prices for --strategy fixed (default: optimum).")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
              help="Write the per-round trace as CSV.")
@out_opt
@click.pass_context
def simulate_cmd(ctx, instance_path, strategy, rounds, seed, prices, trace_path, out):
    """Repeated posted pricing with bandit feedback and regret report."""
    inst = _load(instance_path)
    prob = _need_problem(inst)
    if rounds < 1:
        raise InstanceError("--rounds must be at least 1")
    best = optimizer.maximize(prob)
    if strategy == "fixed":
        p = _parse_prices(prices, prob.k) if prices else np.array(best.p_star)
        factory = dynpricing.strategy_fixed(p)
    elif strategy == "eps-grid":
        factory = dynpricing.strategy_eps_grid()
    else:
        factory = dynpricing.strategy_two_point()
    trace = dynpricing.simulate(prob, factory, rounds, seed)
    if trace_path:
        trace.to_csv(trace_path)
    rep = dynpricing.regret(trace, prob, rev_star=best.rev_star)
    _emit(ctx, "simulate", inst, {
        "strategy": strategy, "seed": seed, "rounds": rounds,
        "final_prices": trace.prices[-1],
        "cumulative_revenue": rep.cumulative_revenue, "rev_star": rep.rev_star,
        "average_regret": rep.average_regret,
        "average_regret_stderr": rep.average_regret_stderr,
        "expected_average_regret": rep.expected_average_regret,
    }, out)


if __name__ == "__main__":  # pragma: no cover
    main()
