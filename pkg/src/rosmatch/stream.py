"""Single-pass (2/3 - eps)-approximate matching for random-order edge streams.

Phase I builds a bounded edge-degree subgraph H in epochs of ``alpha``
edges, inserting every underfull edge and rebalancing; it stops after the
first epoch that inserts nothing.  Phase II freezes H and collects the
remaining underfull edges into X.  The answer is an exact maximum
matching of ``H | X``.  Graphs with few edges are stored whole instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .edcs import EdcsState, InvariantError, as_fraction
from .graph import Edge, Graph, Matching, StreamOrder, as_given, subgraph_union
from .matching import MatcherKind, max_matching

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class BadEpsilon(ValueError):
    pass


class StreamLengthMismatch(ValueError):
    pass


class SpaceBudgetExceeded(RuntimeError):
    pass


def check_epsilon(epsilon) -> Fraction:
    eps = as_fraction(epsilon)
    if not 0 < eps < HALF:
        raise BadEpsilon("epsilon must be < 1/2" if eps >= HALF else "epsilon must be > 0")
    return eps


@dataclass(frozen=True)
class Params:
    """Algorithm parameters.

    ``derived`` is False as soon as any of ``lam``, ``beta``, ``alpha`` or
    ``gamma`` was supplied by the caller; the approximation and
    termination guarantees are then not claimed.

    ``fallback_threshold`` caps the edge count for store-everything mode
    (``None`` means no cap beyond the small-matching bound).  ``x_cap``
    limits ``|X|`` in Phase II (``None`` means ``4 * gamma``); when it is
    exceeded, ``x_policy="fail"`` raises and ``"grow"`` only flags it.
    """

    epsilon: Fraction
    lam: Fraction
    beta: int
    alpha: int
    gamma: int
    derived: bool = True
    fallback_threshold: int | None = None
    x_cap: int | None = None
    x_policy: str = "fail"

    @property
    def x_limit(self) -> int:
        return 4 * self.gamma if self.x_cap is None else self.x_cap

    def termination_guaranteed(self, n: int, m: int) -> bool:
        """Whether Phase I must end within the first ceil(eps*m) edges."""
        return self.derived and self.alpha * (n * self.beta**2 + 1) <= self.epsilon * m

    def as_dict(self) -> dict:
        return {
            "epsilon": float(self.epsilon),
            "lambda": float(self.lam),
            "lambda_exact": str(self.lam),
            "beta": self.beta,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "params_derived": self.derived,
            "fallback_threshold": self.fallback_threshold,
            "x_cap": self.x_limit,
            "x_policy": self.x_policy,
        }


def derived_beta(lam: Fraction) -> int:
    return math.ceil(16 * float(lam) ** -2 * math.log(1 / float(lam)))


def derived_alpha(epsilon: Fraction, n: int, m: int, beta: int) -> int:
    return max(1, math.floor(epsilon * m / (n * beta * beta + 1)))


def derived_gamma(n: int, m: int, alpha: int) -> int:
    return math.ceil(5 * math.log(n) * m / alpha) if n > 1 else 0


def derive_params(
    epsilon,
    n: int,
    m: int,
    *,
    lam=None,
    beta: int | None = None,
    alpha: int | None = None,
    gamma: int | None = None,
    fallback_threshold: int | None = None,
    x_cap: int | None = None,
    x_policy: str = "fail",
) -> Params:
    """Parameters for a stream of ``m`` edges on ``n`` vertices.

    Without overrides: ``lam = eps/128``, ``beta = ceil(16 lam^-2 ln(1/lam))``,
    ``alpha = max(1, floor(eps m / (n beta^2 + 1)))`` and
    ``gamma = ceil(5 ln(n) m / alpha)``.  An override replaces its value
    and the quantities computed from it (alpha uses the final beta, gamma
    the final alpha).  With any override active, ``fallback_threshold``
    defaults to 0 so the streaming path is exercised.
    """
    eps = check_epsilon(epsilon)
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    derived = lam is None and beta is None and alpha is None and gamma is None

    lam = eps / 128 if lam is None else as_fraction(lam)
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if beta is None:
        beta = derived_beta(lam)
    if int(beta) != beta or beta < 2:
        raise ValueError(f"beta must be an integer >= 2, got {beta}")
    if alpha is None:
        alpha = derived_alpha(eps, n, m, beta)
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if gamma is None:
        gamma = derived_gamma(n, m, alpha)
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if x_policy not in ("fail", "grow"):
        raise ValueError("x_policy must be 'fail' or 'grow'")
    if fallback_threshold is None and not derived:
        fallback_threshold = 0
    return Params(
        epsilon=eps,
        lam=lam,
        beta=int(beta),
        alpha=int(alpha),
        gamma=int(gamma),
        derived=derived,
        fallback_threshold=fallback_threshold,
        x_cap=x_cap,
        x_policy=x_policy,
    )


def fallback_bound(n: int, epsilon) -> float:
    """40 n ln(n) / eps^2: above this many edges mu(G) is large enough to stream."""
    eps = float(as_fraction(epsilon))
    return 40 * n * math.log(n) / (eps * eps) if n > 1 else 0.0


def small_graph_fallback(n: int, m: int, epsilon, threshold: int | None = None) -> bool:
    """True iff ``m <= min(40 n ln(n) eps^-2, threshold)``: store every edge instead."""
    if m == 0:
        return True
    limit = fallback_bound(n, epsilon)
    if threshold is not None:
        limit = min(limit, threshold)
    return m <= limit


@dataclass
class RunResult:
    """Outcome of one pass.

    ``phase1_end_index`` is the number of stream edges Phase I consumed;
    ``phase1_exhausted`` is set when the stream ran out before an epoch
    without insertions.  In fallback mode every edge is kept in
    ``x_edges`` and ``h_edges`` is empty.
    """

    n: int
    m: int
    params: Params
    matching: Matching
    h_edges: list[Edge]
    x_edges: list[Edge]
    phase1_end_index: int = 0
    phase1_exhausted: bool = False
    epochs: int = 0
    moves: int = 0
    fallback_used: bool = False
    space_peak: int = 0
    x_budget_exceeded: bool = False
    h_degrees: list[int] = field(default_factory=list, repr=False)

    @property
    def size(self) -> int:
        return self.matching.size

    def as_dict(self, include_edges: bool = True) -> dict:
        out = {
            "n": self.n,
            "m": self.m,
            "matching_size": self.size,
            "h_size": len(self.h_edges),
            "x_size": len(self.x_edges),
            "phase1_end_index": self.phase1_end_index,
            "phase1_end_fraction": self.phase1_end_index / self.m if self.m else 0.0,
            "phase1_exhausted": self.phase1_exhausted,
            "epochs": self.epochs,
            "moves": self.moves,
            "fallback_used": self.fallback_used,
            "space_peak": self.space_peak,
            "x_budget_exceeded": self.x_budget_exceeded,
            "params": self.params.as_dict(),
        }
        if include_edges:
            out["matching"] = [list(e) for e in self.matching.edges]
        return out


@dataclass
class Phase1Result:
    end_index: int
    epochs: int
    exhausted: bool


def run_phase1(stream: Iterator[Edge], params: Params, edcs: EdcsState) -> Phase1Result:
    """Consume epochs of ``alpha`` edges until one of them inserts nothing.

    A short final epoch (stream ends mid-epoch) follows the same rule.
    """
    alpha = params.alpha
    consumed = 0
    epochs = 0
    while True:
        epochs += 1
        found = False
        taken = 0
        for u, v in stream:
            consumed += 1
            taken += 1
            if edcs.is_underfull(u, v):
                edcs.insert_and_rebalance(u, v)
                found = True
            if taken == alpha:
                break
        if taken < alpha:
            if taken == 0:
                epochs -= 1
            return Phase1Result(consumed, epochs, exhausted=True)
        if not found:
            return Phase1Result(consumed, epochs, exhausted=False)


@dataclass
class Phase2Result:
    x_edges: list[Edge]
    consumed: int
    budget_exceeded: bool = False


def run_phase2(
    stream: Iterable[Edge],
    edcs: EdcsState,
    x_cap: int | None = None,
    policy: str = "fail",
) -> Phase2Result:
    """Collect every remaining edge that is underfull with respect to the frozen H."""
    x: list[Edge] = []
    consumed = 0
    exceeded = False
    limit = edcs.underfull_max
    deg = edcs.deg
    for u, v in stream:
        consumed += 1
        if deg[u] + deg[v] <= limit:
            x.append((u, v))
            if x_cap is not None and len(x) > x_cap and not exceeded:
                if policy == "fail":
                    raise SpaceBudgetExceeded(f"|X| exceeded the cap of {x_cap} edges")
                log.warning("|X| exceeded the cap of %d edges", x_cap)
                exceeded = True
    return Phase2Result(x, consumed, exceeded)


def finalize(
    h_edges: Iterable[Edge],
    x_edges: Iterable[Edge],
    n: int,
    matcher: MatcherKind | str = MatcherKind.AUTO,
) -> Matching:
    """Exact maximum matching of ``H | X``."""
    matcher = MatcherKind(matcher)
    if matcher in (MatcherKind.GREEDY, MatcherKind.BRUTE_FORCE):
        raise ValueError(f"finalize needs an exact matcher, not {matcher.value}")
    return max_matching(subgraph_union(h_edges, x_edges, n), matcher)


def run(
    n: int,
    m: int,
    stream: Iterable[Edge],
    params: Params,
    matcher: MatcherKind | str = MatcherKind.AUTO,
    audit: bool = False,
) -> RunResult:
    """Run the full algorithm over a stream of exactly ``m`` edges.

    With ``audit=True`` the EDCS engine checks its invariants after every
    move and Phase II is checked for leaving every degree untouched.
    """
    it = iter(stream)

    if small_graph_fallback(n, m, params.epsilon, params.fallback_threshold):
        stored = list(it)
        if len(stored) != m:
            raise StreamLengthMismatch(f"expected {m} edges, stream had {len(stored)}")
        matching = finalize([], stored, n, matcher)
        return RunResult(
            n, m, params, matching, [], stored,
            phase1_end_index=0, fallback_used=True, space_peak=m,
        )

    edcs = EdcsState(n, params.beta, params.lam, audit=audit)
    p1 = run_phase1(it, params, edcs)
    h_edges = edcs.edges()
    deg_before = list(edcs.deg)

    p2 = run_phase2(it, edcs, params.x_limit, params.x_policy)
    total = p1.end_index + p2.consumed
    if total != m:
        raise StreamLengthMismatch(f"expected {m} edges, stream had {total}")
    if audit and (edcs.deg != deg_before or edcs.edges() != h_edges):
        raise InvariantError("H changed during Phase II")

    matching = finalize(h_edges, p2.x_edges, n, matcher)
    space_peak = max(edcs.peak_edges, len(h_edges) + len(p2.x_edges))
    return RunResult(
        n, m, params, matching, h_edges, p2.x_edges,
        phase1_end_index=p1.end_index,
        phase1_exhausted=p1.exhausted,
        epochs=p1.epochs,
        moves=edcs.moves,
        space_peak=space_peak,
        x_budget_exceeded=p2.budget_exceeded,
        h_degrees=deg_before,
    )


def run_graph(
    g: Graph,
    params: Params,
    order: StreamOrder | None = None,
    matcher: MatcherKind | str = MatcherKind.AUTO,
    audit: bool = False,
) -> RunResult:
    """Convenience wrapper: stream ``g`` in ``order`` (as given by default)."""
    order = order if order is not None else as_given(g.m)
    return run(g.n, g.m, order.stream(g), params, matcher, audit=audit)
