"""A subgraph H with bounded edge-degree, maintained under insertions.

The degree of an edge ``(u, v)`` is ``deg(u) + deg(v)`` taken in H.  H is
*overfull* at an edge whose degree exceeds ``beta``; a non-H pair is
*underfull* when its degree is strictly below ``beta * (1 - lam)``.

Moves are tracked with the potential ``phi = phi1 - phi2`` where
``phi1 = (beta - 1/2) * sum(deg)`` and ``phi2`` sums the degrees of all
H-edges.  ``phi`` lies in ``[0, n * beta**2]`` and rises by at least one
per insertion of a pair of degree <= beta - 2 and per deletion of an
overfull edge, which caps the total number of moves at ``n * beta**2``.
Twice the potential is kept so that everything stays in integers.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import Edge, Graph, norm


class BadParams(ValueError):
    pass


class NotUnderfull(ValueError):
    pass


class AlreadyPresent(ValueError):
    pass


class NotOverfull(ValueError):
    pass


class HNotSubgraph(ValueError):
    pass


class InvariantError(AssertionError):
    """Raised in audit mode when a maintained invariant is broken."""


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats are read through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass
class RemovalTrace:
    inserted: Edge
    removed: list[Edge] = field(default_factory=list)

    @property
    def moves_used(self) -> int:
        return 1 + len(self.removed)


class EdcsState:
    """Mutable bounded edge-degree subgraph on ``n`` vertices.

    With ``audit=True`` every individual move is followed by a full
    overfull scan (after rebalancing), a from-scratch recomputation of the
    potential and a check that the potential rose by at least one.
    Failures raise :class:`InvariantError`.
    """

    def __init__(self, n: int, beta: int, lam, audit: bool = False):
        lam = as_fraction(lam)
        if n < 0:
            raise BadParams("n must be non-negative")
        if int(beta) != beta or beta < 2:
            raise BadParams(f"beta must be an integer >= 2, got {beta}")
        if not 0 < lam < 1:
            raise BadParams(f"lambda must lie in (0, 1), got {lam}")
        self.n = n
        self.beta = int(beta)
        self.lam = lam
        # largest integer edge-degree strictly below beta * (1 - lam)
        self.underfull_max = math.ceil(self.beta * (1 - lam)) - 1
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.deg = [0] * n
        self.edge_count = 0
        self.moves = 0
        self.phi2x = 0
        self.audit = audit
        self.peak_edges = 0

    # -- queries ---------------------------------------------------------

    @property
    def phi(self) -> Fraction:
        return Fraction(self.phi2x, 2)

    @property
    def move_bound(self) -> int:
        return self.n * self.beta * self.beta

    @property
    def move_bound_applies(self) -> bool:
        """Whether every underfull insertion has degree <= beta - 2.

        That holds iff ``beta * lam >= 1``; below it, an insertion at
        degree ``beta - 1`` lowers the potential and the move cap is void.
        """
        return self.underfull_max <= self.beta - 2

    def edge_degree(self, u: int, v: int) -> int:
        return self.deg[u] + self.deg[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def is_underfull(self, u: int, v: int) -> bool:
        return self.deg[u] + self.deg[v] <= self.underfull_max

    def edges(self) -> list[Edge]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def overfull_edges(self) -> list[Edge]:
        return [(u, v) for u, v in self.edges() if self.deg[u] + self.deg[v] > self.beta]

    def potential(self) -> Fraction:
        """Recompute phi1 - phi2 from the adjacency, ignoring the cached value."""
        total_deg = sum(len(a) for a in self.adj)
        phi2 = sum(len(self.adj[u]) + len(self.adj[v]) for u, v in self.edges())
        return (self.beta - Fraction(1, 2)) * total_deg - phi2

    # -- moves -----------------------------------------------------------

    def _add(self, u: int, v: int) -> None:
        du, dv = self.deg[u], self.deg[v]
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.deg[u] = du + 1
        self.deg[v] = dv + 1
        self.edge_count += 1
        self.moves += 1
        # 2*dphi1 = 2(2b-1); dphi2 = (2du+1) + (2dv+1)
        self.phi2x += 2 * (2 * self.beta - 1) - 2 * (2 * du + 2 * dv + 2)
        self.peak_edges = max(self.peak_edges, self.edge_count)

    def _remove(self, u: int, v: int) -> None:
        du, dv = self.deg[u], self.deg[v]
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.deg[u] = du - 1
        self.deg[v] = dv - 1
        self.edge_count -= 1
        self.moves += 1
        self.phi2x -= 2 * (2 * self.beta - 1) - 2 * (2 * du + 2 * dv - 2)

    def _check_move(self, before: int, insertion: bool) -> None:
        if 2 * self.potential() != self.phi2x:
            raise InvariantError("cached potential differs from recomputed potential")
        if insertion and not self.move_bound_applies:
            return
        if self.phi2x - before < 2:
            raise InvariantError(f"move raised 2*phi by {self.phi2x - before} < 2")
        if not self.move_bound_applies:
            return
        if not 0 <= self.phi2x <= 2 * self.move_bound:
            raise InvariantError(f"potential {self.phi} outside [0, n*beta^2]")
        if self.moves > self.move_bound:
            raise InvariantError(f"{self.moves} moves exceed n*beta^2 = {self.move_bound}")

    def _check_bounded(self) -> None:
        bad = self.overfull_edges()
        if bad:
            raise InvariantError(f"overfull edges remain after rebalancing: {bad[:5]}")

    def _validate_pair(self, u: int, v: int) -> None:
        if u == v or not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"invalid vertex pair ({u}, {v})")

    def insert_and_rebalance(self, u: int, v: int) -> RemovalTrace:
        """Add the underfull pair ``(u, v)`` and delete overfull edges until none remain.

        Overfull candidates are the edges at ``u`` then at ``v`` (each in
        ascending neighbour order), popped FIFO and re-checked at pop time.
        Deletions only lower degrees, so no other edge can become overfull.
        """
        self._validate_pair(u, v)
        if v in self.adj[u]:
            raise AlreadyPresent(f"edge ({u}, {v}) is already in H")
        if not self.is_underfull(u, v):
            raise NotUnderfull(f"edge ({u}, {v}) has degree {self.edge_degree(u, v)}")
        trace = RemovalTrace(norm(u, v))
        before = self.phi2x
        self._add(u, v)
        if self.audit:
            self._check_move(before, insertion=True)

        queue: deque[Edge] = deque()
        queued: set[Edge] = set()
        for x in (u, v):
            for y in sorted(self.adj[x]):
                e = norm(x, y)
                if e not in queued:
                    queued.add(e)
                    queue.append(e)
        beta = self.beta
        while queue:
            a, b = queue.popleft()
            if b in self.adj[a] and self.deg[a] + self.deg[b] > beta:
                before = self.phi2x
                self._remove(a, b)
                trace.removed.append((a, b))
                if self.audit:
                    self._check_move(before, insertion=False)
        if self.audit:
            self._check_bounded()
        return trace

    def insert(self, u: int, v: int) -> None:
        """A single insertion move with no rebalancing (for adversarial drivers)."""
        self._validate_pair(u, v)
        if v in self.adj[u]:
            raise AlreadyPresent(f"edge ({u}, {v}) is already in H")
        if not self.is_underfull(u, v):
            raise NotUnderfull(f"edge ({u}, {v}) has degree {self.edge_degree(u, v)}")
        before = self.phi2x
        self._add(u, v)
        if self.audit:
            self._check_move(before, insertion=True)

    def delete_overfull(self, u: int, v: int) -> None:
        """A single deletion move; the edge must currently be overfull."""
        if v not in self.adj[u]:
            raise ValueError(f"edge ({u}, {v}) is not in H")
        if self.deg[u] + self.deg[v] <= self.beta:
            raise NotOverfull(f"edge ({u}, {v}) has degree {self.edge_degree(u, v)}")
        before = self.phi2x
        self._remove(u, v)
        if self.audit:
            self._check_move(before, insertion=False)

    # -- output ----------------------------------------------------------

    def dump(self) -> str:
        """One ``u v deg(u) deg(v)`` line per edge and a ``moves=.. phi2x=..`` trailer."""
        lines = [f"{u} {v} {self.deg[u]} {self.deg[v]}" for u, v in self.edges()]
        lines.append(f"moves={self.moves} phi2x={self.phi2x}")
        return "\n".join(lines) + "\n"


def new_edcs(n: int, beta: int, lam, audit: bool = False) -> EdcsState:
    return EdcsState(n, beta, lam, audit=audit)


def is_underfull(s: EdcsState, u: int, v: int) -> bool:
    return s.is_underfull(u, v)


def insert_and_rebalance(s: EdcsState, u: int, v: int) -> RemovalTrace:
    return s.insert_and_rebalance(u, v)


def potential(s: EdcsState) -> Fraction:
    return s.potential()


@dataclass
class EdcsReport:
    """Violations of the two EDCS properties.

    ``p1`` holds H-edges with degree above beta; ``p2`` holds edges of G
    outside H whose degree is below ``beta * (1 - lam)``.
    """

    p1: list[Edge] = field(default_factory=list)
    p2: list[Edge] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.p1 and not self.p2

    @property
    def bounded(self) -> bool:
        return not self.p1


def check_edcs(
    h_edges: Iterable[Edge], g: Graph | None, beta: int, lam
) -> EdcsReport:
    """Check P1 (and P2 when ``g`` is given) for an explicit edge set ``h_edges``."""
    lam = as_fraction(lam)
    h = sorted({norm(u, v) for u, v in h_edges})
    n = g.n if g is not None else max((v for _, v in h), default=-1) + 1
    deg = [0] * n
    for u, v in h:
        deg[u] += 1
        deg[v] += 1
    report = EdcsReport()
    report.p1 = [(u, v) for u, v in h if deg[u] + deg[v] > beta]
    if g is not None:
        hset = set(h)
        missing = hset - g.edge_set
        if missing:
            raise HNotSubgraph(f"H has edges outside G: {sorted(missing)[:5]}")
        threshold = beta * (1 - lam)
        report.p2 = sorted(
            e for e in g.edge_set if e not in hset and deg[e[0]] + deg[e[1]] < threshold
        )
    return report


def verify_edcs(s: EdcsState, g: Graph) -> EdcsReport:
    """Check whether the state's H is a ``(beta, lam)``-EDCS of ``g``."""
    if s.n != g.n:
        raise HNotSubgraph(f"H has {s.n} vertices, G has {g.n}")
    return check_edcs(s.edges(), g, s.beta, s.lam)


def format_dump(h_edges: Iterable[Edge], n: int, beta: int, moves: int) -> str:
    """Dump format for an explicit edge set, with the potential computed from it."""
    h = sorted({norm(u, v) for u, v in h_edges})
    deg = [0] * n
    for u, v in h:
        deg[u] += 1
        deg[v] += 1
    phi2x = (2 * beta - 1) * sum(deg) - 2 * sum(deg[u] + deg[v] for u, v in h)
    lines = [f"{u} {v} {deg[u]} {deg[v]}" for u, v in h]
    lines.append(f"moves={moves} phi2x={phi2x}")
    return "\n".join(lines) + "\n"


def parse_dump(text: str) -> tuple[list[Edge], dict[int, int], int, int]:
    """Read a dump back into ``(edges, recorded degrees, moves, phi2x)``."""
    edges: list[Edge] = []
    degs: dict[int, int] = {}
    moves = phi2x = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("moves="):
            fields = dict(part.split("=", 1) for part in line.split())
            moves, phi2x = int(fields["moves"]), int(fields["phi2x"])
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 'u v deg(u) deg(v)'")
        u, v, du, dv = map(int, parts)
        for x, d in ((u, du), (v, dv)):
            if degs.setdefault(x, d) != d:
                raise ValueError(f"line {lineno}: inconsistent degree for vertex {x}")
        edges.append(norm(u, v))
    if moves is None:
        raise ValueError("dump has no 'moves=.. phi2x=..' trailer")
    return edges, degs, moves, phi2x
