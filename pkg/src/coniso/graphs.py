"""Simple undirected graphs, a small isomorphism oracle, and the
preprocessing that pins down the graph pairs our encodings accept.

Preprocessing maps a pair (G, H) to a pair with equal vertex sets, equal
edge counts, minimum degree two, and no triangles, preserving isomorphism:
drop isolated vertices, join a fresh apex vertex to everything, then
replace every edge by a path of length two through a new vertex (the
vertex-edge incidence construction).  Pairs distinguished by vertex, edge
or isolated-vertex counts are rejected as non-isomorphic up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .instances import GuardExceeded


@dataclass(frozen=True)
class Graph:
    """Vertices 1..n; edges as lexicographically sorted unordered pairs,
    giving the fixed edge enumeration e_1, ..., e_m."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        for e in self.edges:
            i, j = e
            if not (1 <= i < j <= self.n):
                raise ValueError(f"bad edge {e} for n={self.n}")
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        if list(self.edges) != sorted(self.edges):
            raise ValueError("edges must be sorted lexicographically")

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * (self.n + 1)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg[1:]

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n + 1)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def isolated_vertices(self) -> list[int]:
        deg = self.degrees()
        return [v for v in range(1, self.n + 1) if deg[v - 1] == 0]

    def has_triangle(self) -> bool:
        adj = self.adjacency()
        return any(adj[i] & adj[j] for i, j in self.edges)


def graph(n: int, edges) -> Graph:
    """Normalize edge pairs into the canonical sorted enumeration."""
    norm = sorted({(min(i, j), max(i, j)) for i, j in edges})
    return Graph(n, tuple(norm))


def brute_force_graph_iso(g: Graph, h: Graph, *,
                          max_n: int = 10) -> Optional[dict[int, int]]:
    """A vertex bijection witnessing isomorphism, or None.  Backtracking
    over images in ascending order with degree pruning; test oracle only."""
    if g.n != h.n or g.m != h.m:
        return None
    if g.n > max_n:
        raise GuardExceeded(f"{g.n} vertices exceed the graph guard {max_n}")
    if sorted(g.degrees()) != sorted(h.degrees()):
        return None
    deg_g = g.degrees()
    deg_h = h.degrees()
    adj_g = g.adjacency()
    adj_h = h.adjacency()
    n = g.n
    image: dict[int, int] = {}
    used = set()

    def rec(v: int) -> bool:
        if v > n:
            return True
        for w in range(1, n + 1):
            if w in used or deg_g[v - 1] != deg_h[w - 1]:
                continue
            ok = True
            for u in range(1, v):
                if (u in adj_g[v]) != (image[u] in adj_h[w]):
                    ok = False
                    break
            if not ok:
                continue
            image[v] = w
            used.add(w)
            if rec(v + 1):
                return True
            del image[v]
            used.discard(w)
        return False

    return dict(image) if rec(1) else None


def _drop_isolated(g: Graph) -> Graph:
    keep = [v for v in range(1, g.n + 1)
            if v not in set(g.isolated_vertices())]
    rename = {v: i + 1 for i, v in enumerate(keep)}
    return graph(len(keep), [(rename[i], rename[j]) for i, j in g.edges])


def _add_apex(g: Graph) -> Graph:
    apex = g.n + 1
    edges = list(g.edges) + [(v, apex) for v in range(1, g.n + 1)]
    return graph(g.n + 1, edges)


def _subdivide(g: Graph) -> Graph:
    """Vertex-edge incidence graph: new vertices for edges, in the fixed
    edge enumeration order after the original vertices."""
    n3 = g.n + g.m
    edges = []
    for k, (i, j) in enumerate(g.edges):
        ev = g.n + 1 + k
        edges.append((i, ev))
        edges.append((j, ev))
    return graph(n3, edges)


def preprocess_pair(g: Graph, h: Graph) -> Optional[tuple[Graph, Graph]]:
    """Restrict to the graph class the encodings need, or decide early.

    Returns None when the counts already separate the inputs (provably not
    isomorphic), otherwise the transformed pair, with the guarantee that
    the inputs are isomorphic iff the outputs are.  Inputs with fewer than
    three non-isolated vertices are rejected; decide those by brute force.
    """
    if g.n != h.n or g.m != h.m:
        return None
    if len(g.isolated_vertices()) != len(h.isolated_vertices()):
        return None
    g1 = _drop_isolated(g)
    h1 = _drop_isolated(h)
    if g1.n < 3:
        raise ValueError(
            "preprocessing needs at least 3 non-isolated vertices")
    g3 = _subdivide(_add_apex(g1))
    h3 = _subdivide(_add_apex(h1))
    return g3, h3


def parse_graph(text: str) -> Graph:
    """`p <n> <m>` header, then `e <i> <j>` lines, 1-based."""
    n = None
    m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("c"):
            continue
        toks = line.split()
        if toks[0] == "p":
            if n is not None:
                raise ValueError(f"line {lineno}: duplicate header")
            if len(toks) != 3:
                raise ValueError(f"line {lineno}: expected `p <n> <m>`")
            n, m = int(toks[1]), int(toks[2])
        elif toks[0] == "e":
            if n is None:
                raise ValueError(f"line {lineno}: edge before header")
            if len(toks) != 3:
                raise ValueError(f"line {lineno}: expected `e <i> <j>`")
            i, j = int(toks[1]), int(toks[2])
            if i == j:
                raise ValueError(f"line {lineno}: self-loop {i}")
            edges.append((i, j))
        else:
            raise ValueError(f"line {lineno}: unknown record {toks[0]!r}")
    if n is None:
        raise ValueError("missing `p <n> <m>` header")
    out = graph(n, edges)
    if out.m != m:
        raise ValueError(f"header claims {m} edges, found {out.m} distinct")
    return out


def format_graph(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines.extend(f"e {i} {j}" for i, j in g.edges)
    return "\n".join(lines) + "\n"
