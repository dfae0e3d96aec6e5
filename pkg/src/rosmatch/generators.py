"""Seeded graph generators for experiments and fixtures."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .graph import LEFT, RIGHT, Edge, Graph, make_graph, norm
from .prng import XorShift64Star

KINDS = (
    "bipartite-planted",
    "general-planted",
    "bipartite-trap",
    "erdos-renyi",
    "path",
    "cycle",
    "clique",
)


class BadSpec(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate.

    ``bipartite-trap`` plants a perfect matching ``A1-B2, A2-B1`` (quarters
    of size ``n/4``) plus a random core between ``A1`` and ``B1``; the core
    has ``extra_edges`` edges, or is complete when that is omitted.  Random
    greedy mostly matches core edges and ends near ``n/4``.

    Planted kinds take either ``avg_degree`` (target ``m = n * d / 2``) or
    ``extra_edges`` (random edges added on top of the perfect matching).
    ``erdos-renyi`` takes ``p``.  Fixtures (path, cycle, clique) only use ``n``.
    """

    kind: str
    n: int
    avg_degree: float | None = None
    extra_edges: int | None = None
    p: float | None = None
    seed: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def generate_graph(spec: GeneratorSpec) -> Graph:
    if spec.kind not in KINDS:
        raise BadSpec(f"unknown generator kind {spec.kind!r}; choose from {', '.join(KINDS)}")
    if spec.n < 0:
        raise BadSpec("n must be non-negative")
    rng = XorShift64Star(spec.seed)
    if spec.kind == "path":
        return make_graph(spec.n, [(i, i + 1) for i in range(spec.n - 1)])
    if spec.kind == "cycle":
        if spec.n < 3:
            raise BadSpec("a cycle needs n >= 3")
        return make_graph(spec.n, [(i, (i + 1) % spec.n) for i in range(spec.n)])
    if spec.kind == "clique":
        return make_graph(spec.n, [(u, v) for u in range(spec.n) for v in range(u + 1, spec.n)])
    if spec.kind == "erdos-renyi":
        return _erdos_renyi(spec, rng)
    if spec.kind == "bipartite-trap":
        return _trap(spec, rng)
    return _planted(spec, rng, bipartite=spec.kind == "bipartite-planted")


def _erdos_renyi(spec: GeneratorSpec, rng: XorShift64Star) -> Graph:
    if spec.p is None or not 0 <= spec.p <= 1:
        raise BadSpec("erdos-renyi needs 0 <= p <= 1")
    n, p = spec.n, spec.p
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return make_graph(n, edges)


def _planted(spec: GeneratorSpec, rng: XorShift64Star, bipartite: bool) -> Graph:
    n = spec.n
    if n % 2:
        raise BadSpec("planted perfect matching needs an even n")
    half = n // 2
    if bipartite:
        sides = tuple([LEFT] * half + [RIGHT] * half)
        capacity = half * half
    else:
        sides = None
        capacity = n * (n - 1) // 2

    if spec.avg_degree is not None and spec.extra_edges is not None:
        raise BadSpec("give avg_degree or extra_edges, not both")
    if spec.avg_degree is not None:
        target = round(n * spec.avg_degree / 2)
    elif spec.extra_edges is not None:
        target = half + spec.extra_edges
    else:
        target = half
    if target < half:
        raise BadSpec(f"{target} edges cannot contain a perfect matching on {n} vertices")
    if target > capacity:
        raise BadSpec(f"{target} edges requested but only {capacity} pairs exist")

    if bipartite:
        right = list(range(half, n))
        rng.shuffle(right)
        planted = [(i, right[i]) for i in range(half)]
    else:
        verts = list(range(n))
        rng.shuffle(verts)
        planted = [norm(verts[2 * i], verts[2 * i + 1]) for i in range(half)]

    chosen: set[Edge] = {norm(u, v) for u, v in planted}
    edges = list(planted)
    if 2 * target > capacity:
        # dense: shuffle the full candidate list instead of rejection sampling
        if bipartite:
            pool = [(u, v) for u in range(half) for v in range(half, n)]
        else:
            pool = [(u, v) for u in range(n) for v in range(u + 1, n)]
        pool = [e for e in pool if e not in chosen]
        rng.shuffle(pool)
        edges.extend(pool[: target - half])
    while len(edges) < target:
        if bipartite:
            e = norm(rng.below(half), half + rng.below(half))
        else:
            u, v = rng.below(n), rng.below(n)
            if u == v:
                continue
            e = norm(u, v)
        if e in chosen:
            continue
        chosen.add(e)
        edges.append(e)
    return make_graph(n, edges, sides=sides, strict=True)


def _trap(spec: GeneratorSpec, rng: XorShift64Star) -> Graph:
    n = spec.n
    if n % 4:
        raise BadSpec("bipartite-trap needs n divisible by 4")
    q = n // 4
    a1, a2, b1, b2 = 0, q, 2 * q, 3 * q
    planted = [(a1 + i, b2 + i) for i in range(q)] + [(a2 + i, b1 + i) for i in range(q)]
    core = [(a1 + i, b1 + j) for i in range(q) for j in range(q)]
    if spec.extra_edges is not None:
        if not 0 <= spec.extra_edges <= len(core):
            raise BadSpec(f"core holds at most {len(core)} edges")
        rng.shuffle(core)
        core = sorted(core[: spec.extra_edges])
    sides = tuple([LEFT] * (2 * q) + [RIGHT] * (2 * q))
    return make_graph(n, planted + core, sides=sides, strict=True)
