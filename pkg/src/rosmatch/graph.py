"""Graphs, matchings, edge-list I/O and random stream orders.

Vertices are the dense integers ``0..n-1``.  Edges are stored as
normalized pairs ``(u, v)`` with ``u < v``; a :class:`Graph` is immutable
once built.  Use :func:`make_graph` to build a validated graph and
:func:`validate` to inspect an arbitrary one without raising.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence, TextIO

from .prng import XorShift64Star

Edge = tuple[int, int]

LEFT = 0
RIGHT = 1


class GraphError(ValueError):
    """Base class for invalid input graphs.

    Instances compare equal when they have the same type and arguments,
    so violation lists returned by :func:`validate` are easy to assert on.
    """

    def __eq__(self, other):
        return type(self) is type(other) and self.args == other.args

    def __hash__(self):
        return hash((type(self), self.args))


class MalformedLine(GraphError):
    def __init__(self, lineno: int, text: str = ""):
        super().__init__(lineno, text)
        self.lineno = lineno

    def __str__(self):
        return f"line {self.args[0]}: malformed edge-list line {self.args[1]!r}"


class SelfLoop(GraphError):
    def __init__(self, u: int):
        super().__init__(u)

    def __str__(self):
        return f"self-loop on vertex {self.args[0]}"


class DuplicateEdge(GraphError):
    def __init__(self, u: int, v: int):
        super().__init__(u, v)

    def __str__(self):
        return f"duplicate edge ({self.args[0]}, {self.args[1]})"


class EndpointOutOfRange(GraphError):
    def __init__(self, u: int, v: int, n: int):
        super().__init__(u, v, n)

    def __str__(self):
        u, v, n = self.args
        return f"edge ({u}, {v}) has an endpoint outside [0, {n})"


class PartitionViolation(GraphError):
    def __init__(self, u: int, v: int):
        super().__init__(u, v)

    def __str__(self):
        return f"edge ({self.args[0]}, {self.args[1]}) does not cross the bipartition"


def norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph on vertices ``0..n-1``.

    ``sides`` optionally labels every vertex ``LEFT`` (0) or ``RIGHT`` (1).
    """

    n: int
    edges: tuple[Edge, ...] = ()
    sides: tuple[int, ...] | None = field(default=None, compare=True)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(norm(u, v) for u, v in self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return norm(u, v) in self.edge_set

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


@dataclass(frozen=True)
class Matching:
    """A set of edges, expected to be vertex-disjoint (see ``verify_matching``)."""

    edges: tuple[Edge, ...] = ()

    @property
    def size(self) -> int:
        return len(self.edges)

    def __len__(self):
        return len(self.edges)

    def mate_map(self) -> dict[int, int]:
        mates = {}
        for u, v in self.edges:
            mates[u] = v
            mates[v] = u
        return mates


def validate(g: Graph) -> list[GraphError]:
    """Return every invariant violation of ``g``; an empty list means valid."""
    problems: list[GraphError] = []
    seen: set[Edge] = set()
    if g.sides is not None and len(g.sides) != g.n:
        problems.append(MalformedLine(0, f"sides has {len(g.sides)} labels for n={g.n}"))
    for u, v in g.edges:
        if u == v:
            problems.append(SelfLoop(u))
            continue
        if not (0 <= u < g.n and 0 <= v < g.n):
            problems.append(EndpointOutOfRange(u, v, g.n))
            continue
        key = norm(u, v)
        if key in seen:
            problems.append(DuplicateEdge(*key))
        seen.add(key)
        if g.sides is not None and len(g.sides) == g.n and g.sides[u] == g.sides[v]:
            problems.append(PartitionViolation(*key))
    return problems


def make_graph(
    n: int,
    edges: Iterable[Sequence[int]],
    sides: Sequence[int] | None = None,
    strict: bool = False,
) -> Graph:
    """Build a validated graph, normalizing every edge to ``u < v``.

    Duplicate edges raise :class:`DuplicateEdge` in strict mode and are
    silently dropped otherwise.  Every other violation always raises.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    out: list[Edge] = []
    seen: set[Edge] = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise SelfLoop(u)
        if not (0 <= u < n and 0 <= v < n):
            raise EndpointOutOfRange(u, v, n)
        key = norm(u, v)
        if key in seen:
            if strict:
                raise DuplicateEdge(*key)
            continue
        seen.add(key)
        out.append(key)
    g = Graph(n, tuple(out), tuple(sides) if sides is not None else None)
    if g.sides is not None:
        bad = validate(g)
        if bad:
            raise bad[0]
    return g


def subgraph_union(h: Iterable[Sequence[int]], x: Iterable[Sequence[int]], n: int) -> Graph:
    """Graph on ``n`` vertices whose edges are the deduplicated union of ``h`` and ``x``."""
    return make_graph(n, [*h, *x], strict=False)


# -- edge-list files ---------------------------------------------------------

_SIDES_TAG = "# sides:"


def parse_edge_list(
    text: str | TextIO,
    strict: bool = False,
    header: bool | None = None,
) -> Graph:
    """Parse the edge-list format into a validated :class:`Graph`.

    Lines are ``u v`` pairs; ``#`` starts a comment.  The first data line
    may be an ``n m`` header.  With ``header=None`` it is treated as one
    when exactly ``m`` edge lines follow and every endpoint is below ``n``;
    pass ``True``/``False`` to force the choice.  Without a header, ``n``
    is one more than the largest endpoint.

    A ``# sides: 0101...`` comment records a bipartition (0 = left).
    """
    if not isinstance(text, str):
        text = text.read()
    rows: list[tuple[int, int, int]] = []
    sides: tuple[int, ...] | None = None
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if line.startswith(_SIDES_TAG):
            labels = line[len(_SIDES_TAG):].strip()
            if any(c not in "01" for c in labels):
                raise MalformedLine(lineno, raw.rstrip("\r\n"))
            sides = tuple(int(c) for c in labels)
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLine(lineno, raw.rstrip("\r\n"))
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(lineno, raw.rstrip("\r\n")) from None
        rows.append((lineno, a, b))

    if header is None:
        header = _looks_like_header(rows)
    if header:
        if not rows:
            raise MalformedLine(0, "missing header")
        hline, n, m = rows[0]
        body = rows[1:]
        if n < 0 or m < 0 or len(body) != m:
            raise MalformedLine(hline, f"header says {m} edges, found {len(body)}")
    else:
        body = rows
        n = max((max(a, b) for _, a, b in body), default=-1) + 1
        if sides is not None:
            n = max(n, len(sides))
    for lineno, a, b in body:
        if a < 0 or b < 0:
            raise EndpointOutOfRange(a, b, n)
    return make_graph(n, [(a, b) for _, a, b in body], sides=sides, strict=strict)


def _looks_like_header(rows: list[tuple[int, int, int]]) -> bool:
    if not rows:
        return False
    _, n, m = rows[0]
    body = rows[1:]
    if len(body) != m:
        return False
    return all(0 <= a < n and 0 <= b < n for _, a, b in body)


def serialize_edge_list(g: Graph) -> str:
    """Inverse of :func:`parse_edge_list`; always writes the ``n m`` header."""
    lines = []
    if g.sides is not None:
        lines.append(_SIDES_TAG + " " + "".join(str(s) for s in g.sides))
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path, strict: bool = False) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, strict=strict)


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_edge_list(g))


# -- stream orders -------------------------------------------------------------

@dataclass(frozen=True)
class StreamOrder:
    """A permutation of edge indices; ``seed`` is 0 for the as-given order."""

    permutation: tuple[int, ...]
    seed: int = 0

    @property
    def m(self) -> int:
        return len(self.permutation)

    def stream(self, g: Graph) -> "EdgeStream":
        if g.m != self.m:
            raise ValueError(f"order covers {self.m} edges, graph has {g.m}")
        return EdgeStream(g, self)


class EdgeStream:
    """Iterator over a graph's edges in a given order, with a cursor.

    ``cursor`` counts the edges consumed so far, so after reading edge
    ``e_i`` (1-based) it equals ``i``.
    """

    def __init__(self, g: Graph, order: StreamOrder):
        self._edges = g.edges
        self._perm = order.permutation
        self.cursor = 0

    def __iter__(self) -> Iterator[Edge]:
        return self

    def __next__(self) -> Edge:
        if self.cursor >= len(self._perm):
            raise StopIteration
        e = self._edges[self._perm[self.cursor]]
        self.cursor += 1
        return e

    def __len__(self):
        return len(self._perm)


def permute(m: int, seed: int) -> StreamOrder:
    """Uniformly random order of ``m`` edges via Fisher-Yates on xorshift64*."""
    if m < 0:
        raise ValueError("m must be non-negative")
    perm = list(range(m))
    XorShift64Star(seed).shuffle(perm)
    return StreamOrder(tuple(perm), seed)


def as_given(m: int) -> StreamOrder:
    return StreamOrder(tuple(range(m)), 0)


def ordered_edges(g: Graph, order: StreamOrder) -> list[Edge]:
    return [g.edges[i] for i in order.permutation]
