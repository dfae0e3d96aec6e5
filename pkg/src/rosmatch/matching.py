"""Exact and baseline matching solvers.

``max_matching`` is the usual entry point: it picks Hopcroft-Karp when the
graph is bipartite (using its labels, or a 2-coloring found on the fly)
and Edmonds' blossom algorithm otherwise.  ``brute_force_mu`` is an
exhaustive oracle for tiny graphs and shares no code with the others.
"""

from __future__ import annotations

import enum
from collections import deque
from typing import Iterable, Sequence

from .graph import LEFT, Edge, Graph, Matching, norm

BRUTE_FORCE_CAP = 16


class NotBipartite(ValueError):
    pass


class TooLarge(ValueError):
    def __init__(self, n: int, cap: int = BRUTE_FORCE_CAP):
        super().__init__(f"brute force is limited to n <= {cap}, got n={n}")
        self.n = n


class MatcherKind(enum.Enum):
    AUTO = "auto"
    BIPARTITE = "bipartite"
    BLOSSOM = "blossom"
    GREEDY = "greedy"
    BRUTE_FORCE = "brute-force"


def greedy_maximal(edges: Iterable[Sequence[int]], n: int) -> Matching:
    """Take each edge, in the given order, whose endpoints are both still free."""
    free = [True] * n
    taken = []
    for u, v in edges:
        if free[u] and free[v]:
            free[u] = free[v] = False
            taken.append((u, v))
    return Matching(tuple(taken))


def two_coloring(g: Graph) -> tuple[int, ...] | None:
    """A proper 2-coloring of ``g`` (0 = left), or ``None`` if it has an odd cycle."""
    color = [-1] * g.n
    adj = g.adjacency
    for s in range(g.n):
        if color[s] != -1:
            continue
        color[s] = LEFT
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if color[w] == -1:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return None
    return tuple(color)


def _bipartition(g: Graph) -> tuple[int, ...]:
    if g.sides is not None:
        if len(g.sides) != g.n or any(g.sides[u] == g.sides[v] for u, v in g.edges):
            raise NotBipartite("bipartition labels are violated")
        return g.sides
    sides = two_coloring(g)
    if sides is None:
        raise NotBipartite("graph has an odd cycle")
    return sides


def max_matching_bipartite(g: Graph) -> Matching:
    """Maximum matching by Hopcroft-Karp (shortest augmenting paths in phases).

    Raises :class:`NotBipartite` when the labels are violated or, without
    labels, when the graph has an odd cycle.
    """
    sides = _bipartition(g)
    n = g.n
    left = [v for v in range(n) if sides[v] == LEFT]
    adj = g.adjacency
    mate = [-1] * n
    inf = n + 1
    dist = [inf] * n

    # greedy warm start
    for u in left:
        for v in adj[u]:
            if mate[v] == -1:
                mate[u], mate[v] = v, u
                break

    while True:
        queue = deque()
        for u in left:
            if mate[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        limit = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= limit:
                continue
            for v in adj[u]:
                w = mate[v]
                if w == -1:
                    if limit == inf:
                        limit = dist[u] + 1
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if limit == inf:
            break

        ptr = {u: 0 for u in left}
        for root in left:
            if mate[root] != -1:
                continue
            stack = [root]
            while stack:
                u = stack[-1]
                nbrs = adj[u]
                advanced = False
                while ptr[u] < len(nbrs):
                    v = nbrs[ptr[u]]
                    w = mate[v]
                    if w == -1:
                        if dist[u] + 1 == limit:
                            for x in stack:
                                y = adj[x][ptr[x]]
                                mate[x], mate[y] = y, x
                            stack = []
                            advanced = True
                            break
                    elif dist[w] == dist[u] + 1:
                        stack.append(w)
                        advanced = True
                        break
                    ptr[u] += 1
                if not advanced:
                    dist[u] = inf
                    stack.pop()
                    if stack:
                        ptr[stack[-1]] += 1

    return Matching(tuple(norm(u, mate[u]) for u in left if mate[u] != -1))


def max_matching_general(g: Graph) -> Matching:
    """Maximum matching in any graph by Edmonds' blossom algorithm.

    The O(V^3) array formulation: a BFS alternating tree is grown from each
    free vertex, odd cycles are contracted by relabelling their vertices
    with a common base, and the first augmenting path found is flipped.
    """
    n = g.n
    adj = g.adjacency
    mate = [-1] * n
    for u, v in g.edges:
        if mate[u] == -1 and mate[v] == -1:
            mate[u], mate[v] = v, u

    parent = [-1] * n
    base = list(range(n))

    def lca(a: int, b: int) -> int:
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[mate[b]]

    def mark_path(v: int, b: int, child: int, in_blossom: list[bool]) -> None:
        while base[v] != b:
            in_blossom[base[v]] = in_blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    def find_path(root: int) -> int:
        used = [False] * n
        for i in range(n):
            parent[i] = -1
            base[i] = i
        used[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    cur = lca(v, to)
                    in_blossom = [False] * n
                    mark_path(v, cur, to, in_blossom)
                    mark_path(to, cur, v, in_blossom)
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if mate[to] == -1:
                        return to
                    used[mate[to]] = True
                    queue.append(mate[to])
        return -1

    for root in range(n):
        if mate[root] != -1 or not adj[root]:
            continue
        v = find_path(root)
        while v != -1:
            pv = parent[v]
            nxt = mate[pv]
            mate[v], mate[pv] = pv, v
            v = nxt

    return Matching(tuple((u, mate[u]) for u in range(n) if mate[u] > u))


def brute_force_mu(g: Graph, cap: int = BRUTE_FORCE_CAP) -> int:
    """Exact matching number by branching on each edge (in / out)."""
    if g.n > cap:
        raise TooLarge(g.n, cap)
    edges = sorted({norm(u, v) for u, v in g.edges})
    m = len(edges)
    best = 0

    def rec(i: int, used: int, size: int) -> None:
        nonlocal best
        if size > best:
            best = size
        if i == m:
            return
        free = g.n - bin(used).count("1")
        if size + min(m - i, free // 2) <= best:
            return
        u, v = edges[i]
        if not (used >> u) & 1 and not (used >> v) & 1:
            rec(i + 1, used | (1 << u) | (1 << v), size + 1)
        rec(i + 1, used, size)

    rec(0, 0, 0)
    return best


def verify_matching(g: Graph, matching: Matching | Iterable[Edge]) -> bool:
    """True iff every edge is in ``g`` and no vertex is used twice."""
    edges = matching.edges if isinstance(matching, Matching) else tuple(matching)
    seen: set[int] = set()
    for u, v in edges:
        if u == v or not g.has_edge(u, v) or u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def max_matching(g: Graph, kind: MatcherKind | str = MatcherKind.AUTO) -> Matching:
    """Exact maximum matching with the requested solver.

    ``AUTO`` uses Hopcroft-Karp on bipartite graphs and the blossom solver
    otherwise.  ``BRUTE_FORCE`` only reports a size, so it is not accepted
    here, and ``GREEDY`` is not exact.
    """
    kind = MatcherKind(kind)
    if kind is MatcherKind.AUTO:
        if g.sides is not None or two_coloring(g) is not None:
            return max_matching_bipartite(g)
        return max_matching_general(g)
    if kind is MatcherKind.BIPARTITE:
        return max_matching_bipartite(g)
    if kind is MatcherKind.BLOSSOM:
        return max_matching_general(g)
    raise ValueError(f"{kind.value} is not an exact matcher that returns edges")
