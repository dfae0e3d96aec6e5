"""Seeded experiments: many random stream orders of one graph, with checks.

Each trial draws a fresh order from ``trial_seed(seed, i)``, runs the
streaming algorithm and the greedy baseline on that order, and compares
both against the exact matching number of the whole graph.  Trials can
run on a process pool; records are always gathered in trial order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .edcs import as_fraction, check_edcs
from .generators import GeneratorSpec, generate_graph
from .graph import Graph, as_given, make_graph, ordered_edges, permute, subgraph_union
from .matching import MatcherKind, greedy_maximal, max_matching, verify_matching
from .prng import trial_seed
from .stream import HALF, RunResult, check_epsilon, derive_params, run

log = logging.getLogger(__name__)

TIMING_KEYS = frozenset({"wall_time_s"})


@dataclass
class ExperimentConfig:
    """One experiment: a graph (generated or given), parameters and checks.

    ``overrides`` may hold ``lam``, ``beta``, ``alpha`` and ``gamma``.
    ``audit`` traces the potential on every move; ``verify`` runs the
    offline structural checks on every trial.
    """

    generator: GeneratorSpec | None = None
    epsilon: float = 0.1
    overrides: dict = field(default_factory=dict)
    trials: int = 1
    seed: int = 0
    matcher: str = "auto"
    order: str = "random"
    audit: bool = False
    verify: bool = True
    fallback_threshold: int | None = None
    x_cap: int | None = None
    x_policy: str = "grow"
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.order not in ("random", "as-given"):
            raise ValueError("order must be 'random' or 'as-given'")
        check_epsilon(self.epsilon)
        MatcherKind(self.matcher)
        unknown = set(self.overrides) - {"lam", "beta", "alpha", "gamma"}
        if unknown:
            raise ValueError(f"unknown overrides: {sorted(unknown)}")

    def as_dict(self) -> dict:
        out = asdict(self)
        out["generator"] = self.generator.as_dict() if self.generator else None
        out["overrides"] = {k: _jsonable(v) for k, v in sorted(self.overrides.items())}
        out.pop("workers")
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


@dataclass
class Report:
    config: dict
    trials: list[dict]
    aggregate: dict
    failures: list[dict] = field(default_factory=list)

    def as_dict(self, timing: bool = True) -> dict:
        out = {
            "config": self.config,
            "trials": self.trials,
            "aggregate": self.aggregate,
            "failures": self.failures,
        }
        return out if timing else strip_timing(out)

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.as_dict(timing), indent=2) + "\n"

    def to_csv(self, timing: bool = True) -> str:
        rows = [strip_timing(r) if not timing else r for r in self.trials]
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        return buf.getvalue()

    @property
    def checks_passed(self) -> bool:
        return not self.failures and all(not t["check_failures"] for t in self.trials)


def strip_timing(obj):
    """Copy of ``obj`` with every timing field removed, at any depth."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def structural_checks(g: Graph, order_edges: list, result: RunResult) -> list[str]:
    """Offline checks of one run; returns a description per failed check."""
    p = result.params
    n = g.n
    problems = []
    union = subgraph_union(result.h_edges, result.x_edges, n)
    if not verify_matching(union, result.matching):
        problems.append("matching is not a valid matching of H | X")
    if not set(union.edge_set) <= g.edge_set:
        problems.append("H | X contains edges outside G")
    if result.space_peak > n * p.beta / 2 + len(result.x_edges):
        problems.append(f"space_peak {result.space_peak} > n*beta/2 + |X|")
    if result.fallback_used:
        return problems

    bounded = check_edcs(result.h_edges, None, p.beta, p.lam)
    if not bounded.bounded:
        problems.append(f"H has {len(bounded.p1)} edges with degree > beta")
    deg = [0] * n
    for u, v in result.h_edges:
        deg[u] += 1
        deg[v] += 1
    if deg != result.h_degrees:
        problems.append("H degrees changed during Phase II")
    threshold = p.beta * (1 - p.lam)
    expected_x = [
        (u, v) for u, v in order_edges[result.phase1_end_index:] if deg[u] + deg[v] < threshold
    ]
    if expected_x != result.x_edges:
        problems.append("X differs from the offline replay of Phase II")
    if p.lam * p.beta >= 1:
        if result.moves > n * p.beta**2:
            problems.append(f"moves {result.moves} > n*beta^2")
        if result.epochs > n * p.beta**2 + 1:
            problems.append(f"epochs {result.epochs} > n*beta^2 + 1")
    if p.termination_guaranteed(n, g.m):
        if result.phase1_end_index > math.ceil(p.epsilon * g.m):
            problems.append("Phase I ran past ceil(eps*m) edges")
    return problems


def _trial(args) -> dict:
    g, cfg, params, mu, index = args
    seed = trial_seed(cfg.seed, index)
    order = permute(g.m, seed) if cfg.order == "random" else as_given(g.m)
    edges = ordered_edges(g, order)
    start = time.perf_counter()
    result = run(g.n, g.m, edges, params, cfg.matcher, audit=cfg.audit)
    elapsed = time.perf_counter() - start
    greedy = greedy_maximal(edges, g.n)
    checks = structural_checks(g, edges, result) if cfg.verify else []
    if cfg.verify and not verify_matching(g, greedy):
        checks.append("greedy output is not a matching")
    return {
        "trial": index,
        "seed": seed,
        "matching_size": result.size,
        "mu_exact": mu,
        "ratio": result.size / mu if mu else 1.0,
        "greedy_size": greedy.size,
        "greedy_ratio": greedy.size / mu if mu else 1.0,
        "h_size": len(result.h_edges),
        "x_size": len(result.x_edges),
        "x_within_gamma": len(result.x_edges) <= params.gamma,
        "epochs": result.epochs,
        "moves": result.moves,
        "phase1_end_index": result.phase1_end_index,
        "phase1_end_fraction": result.phase1_end_index / g.m if g.m else 0.0,
        "phase1_exhausted": result.phase1_exhausted,
        "space_peak": result.space_peak,
        "fallback_used": result.fallback_used,
        "x_budget_exceeded": result.x_budget_exceeded,
        "params_derived": params.derived,
        "check_failures": checks,
        "wall_time_s": elapsed,
    }


def _quantile(sorted_vals: list[float], q: float) -> float:
    # linear interpolation between closest ranks
    if len(sorted_vals) == 1:
        return sorted_vals[0]
    pos = q * (len(sorted_vals) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(sorted_vals) - 1)
    return sorted_vals[lo] + (sorted_vals[hi] - sorted_vals[lo]) * (pos - lo)


def aggregate(records: list[dict], wall_time: float) -> dict:
    if not records:
        return {"trials_ok": 0, "wall_time_s": wall_time}
    ratios = sorted(r["ratio"] for r in records)
    greedy = [r["greedy_ratio"] for r in records]
    return {
        "trials_ok": len(records),
        "ratio_min": ratios[0],
        "ratio_mean": statistics.fmean(ratios),
        "ratio_max": ratios[-1],
        "ratio_p10": _quantile(ratios, 0.1),
        "ratio_p50": _quantile(ratios, 0.5),
        "ratio_p90": _quantile(ratios, 0.9),
        "greedy_ratio_min": min(greedy),
        "greedy_ratio_mean": statistics.fmean(greedy),
        "greedy_ratio_max": max(greedy),
        "space_peak_max": max(r["space_peak"] for r in records),
        "epochs_max": max(r["epochs"] for r in records),
        "moves_max": max(r["moves"] for r in records),
        "x_size_max": max(r["x_size"] for r in records),
        "x_within_gamma_fraction": sum(r["x_within_gamma"] for r in records) / len(records),
        "checks_failed": sum(bool(r["check_failures"]) for r in records),
        "wall_time_s": wall_time,
    }


def build_params(cfg: ExperimentConfig, g: Graph):
    ov = cfg.overrides
    return derive_params(
        cfg.epsilon, max(g.n, 1), g.m,
        lam=ov.get("lam"), beta=ov.get("beta"), alpha=ov.get("alpha"), gamma=ov.get("gamma"),
        fallback_threshold=cfg.fallback_threshold,
        x_cap=cfg.x_cap,
        x_policy=cfg.x_policy,
    )


def run_experiment(cfg: ExperimentConfig, graph: Graph | None = None) -> Report:
    """Run ``cfg.trials`` seeded trials and summarize them.

    A trial that raises is recorded under ``failures`` with its seed and
    the remaining trials still run.
    """
    if graph is None:
        if cfg.generator is None:
            raise ValueError("need a generator spec or a graph")
        graph = generate_graph(cfg.generator)
    start = time.perf_counter()
    params = build_params(cfg, graph)
    mu = max_matching(graph).size
    jobs = [(graph, cfg, params, mu, i) for i in range(cfg.trials)]

    records: list[dict] = []
    failures: list[dict] = []

    def collect(index, fut_or_value):
        try:
            records.append(fut_or_value())
        except Exception as exc:  # noqa: BLE001 - recorded per trial
            log.warning("trial %d failed: %s", index, exc)
            failures.append({
                "trial": index,
                "seed": trial_seed(cfg.seed, index),
                "error": f"{type(exc).__name__}: {exc}",
            })

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_trial, job) for job in jobs]
            for i, fut in enumerate(futures):
                collect(i, fut.result)
    else:
        for i, job in enumerate(jobs):
            collect(i, lambda job=job: _trial(job))

    config = cfg.as_dict()
    config["graph"] = {"n": graph.n, "m": graph.m, "mu_exact": mu}
    config["params"] = params.as_dict()
    return Report(config, records, aggregate(records, time.perf_counter() - start), failures)


# -- concentration of the late part of the stream -----------------------------

def concentration_trials(g: Graph, epsilon, trials: int, seed: int, mu: int | None = None) -> list[dict]:
    """Per trial: split a random order at ceil(eps*m) and match the late part exactly."""
    eps = as_fraction(epsilon)
    if not 0 <= eps < HALF:
        raise ValueError("epsilon must be < 1/2")
    if mu is None:
        mu = max_matching(g).size
    if g.n > 1 and eps > 0 and mu < 20 * math.log(g.n) / float(eps) ** 2:
        log.warning(
            "mu(G)=%d is below 20 ln(n)/eps^2 = %.1f; the check is not meaningful",
            mu, 20 * math.log(g.n) / float(eps) ** 2,
        )
    split = math.ceil(eps * g.m)
    out = []
    for t in range(trials):
        s = trial_seed(seed, t)
        late = ordered_edges(g, permute(g.m, s))[split:]
        late_mu = max_matching(make_graph(g.n, late, sides=g.sides)).size
        out.append({
            "trial": t,
            "seed": s,
            "split": split,
            "mu_late": late_mu,
            "mu": mu,
            "passed": late_mu >= (1 - 2 * eps) * mu,
        })
    return out


def concentration_check(g: Graph, epsilon, trials: int, seed: int) -> float:
    """Fraction of trials with mu(G_late) >= (1 - 2 eps) mu(G)."""
    records = concentration_trials(g, epsilon, trials, seed)
    return sum(r["passed"] for r in records) / len(records)
