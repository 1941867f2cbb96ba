"""Social graphs: finite explicit graphs and procedurally defined infinite families.

Infinite families are never materialized. They answer ``neighbors(i)`` for any
vertex and declare a degree bound, which is all the simulator needs since an
update only reads distance-1 neighbors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

Edge = tuple[int, int]


class GraphError(ValueError):
    """Invalid graph parameters or a query outside the vertex set."""


def edge(i: int, j: int) -> Edge:
    """Normalize an unordered pair to ``(min, max)``."""
    if i == j:
        raise GraphError(f"self-loop ({i}, {j}) is not an edge")
    return (i, j) if i < j else (j, i)


def edge_set(pairs: Iterable[Iterable[int]]) -> frozenset[Edge]:
    return frozenset(edge(*p) for p in pairs)


def is_matching(edges: Iterable[Edge]) -> bool:
    seen: set[int] = set()
    for i, j in edges:
        if i == j or i in seen or j in seen:
            return False
        seen.add(i)
        seen.add(j)
    return True


@dataclass(frozen=True)
class SocialGraph:
    """Base class. Subclasses implement ``_neighbors`` and ``has_vertex``."""

    family: str = field(init=False, default="")
    degree_bound: int = field(init=False, default=1)

    # finite graphs return a sorted tuple, infinite ones None
    @property
    def vertices(self) -> tuple[int, ...] | None:
        return None

    @property
    def is_finite(self) -> bool:
        return self.vertices is not None

    def has_vertex(self, i: int) -> bool:
        raise NotImplementedError

    def _neighbors(self, i: int) -> tuple[int, ...]:
        raise NotImplementedError

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Sorted open neighborhood of ``i``."""
        if not self.has_vertex(i):
            raise GraphError(f"{i} is not a vertex of {self.family}")
        return self._neighbors(i)

    def closed_neighborhood(self, i: int) -> tuple[int, ...]:
        return tuple(sorted((i, *self.neighbors(i))))

    def adjacent(self, i: int, j: int) -> bool:
        return self.has_vertex(i) and j in self.neighbors(i)

    def edges_within(self, vertices: Iterable[int]) -> list[Edge]:
        """Social edges with both endpoints in ``vertices``, sorted."""
        vs = set(vertices)
        return sorted({edge(i, j) for i in vs for j in self.neighbors(i) if j in vs})

    def edge_orbit_representatives(self) -> list[Edge] | None:
        """One edge per orbit of the automorphism group, when the family is
        edge-orbit-finite. ``None`` means no certificate is available."""
        return None

    def describe(self) -> dict:
        return {"family": self.family}


@dataclass(frozen=True)
class HalfInfinitePath(SocialGraph):
    """Vertices 1, 2, 3, ... with edges (i, i+1)."""

    def __post_init__(self):
        object.__setattr__(self, "family", "path")
        object.__setattr__(self, "degree_bound", 2)

    def has_vertex(self, i: int) -> bool:
        return i >= 1

    def _neighbors(self, i: int) -> tuple[int, ...]:
        return (i + 1,) if i == 1 else (i - 1, i + 1)


@dataclass(frozen=True)
class BiInfinitePath(SocialGraph):
    """Vertices in Z with edges (i, i+1)."""

    def __post_init__(self):
        object.__setattr__(self, "family", "bipath")
        object.__setattr__(self, "degree_bound", 2)

    def has_vertex(self, i: int) -> bool:
        return True

    def _neighbors(self, i: int) -> tuple[int, ...]:
        return (i - 1, i + 1)

    def edge_orbit_representatives(self) -> list[Edge]:
        return [(0, 1)]


@dataclass(frozen=True)
class Circulant(SocialGraph):
    """Vertices in Z, i adjacent to i±1, ..., i±k."""

    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise GraphError(f"circulant needs k >= 1, got {self.k}")
        object.__setattr__(self, "family", "circulant")
        object.__setattr__(self, "degree_bound", 2 * self.k)

    def has_vertex(self, i: int) -> bool:
        return True

    def _neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(range(i - self.k, i)) + tuple(range(i + 1, i + self.k + 1))

    def edge_orbit_representatives(self) -> list[Edge]:
        # translations act transitively on edges of equal length only
        return [(0, s) for s in range(1, self.k + 1)]

    def describe(self) -> dict:
        return {"family": self.family, "k": self.k}


@dataclass(frozen=True, eq=False)
class FiniteGraph(SocialGraph):
    """Finite graph backed by an adjacency table."""

    adjacency: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    name: str = "explicit"
    params: Mapping[str, int] | None = None
    orbits: tuple[Edge, ...] | None = None

    def __post_init__(self):
        adj = {int(v): tuple(sorted({int(u) for u in nb})) for v, nb in self.adjacency.items()}
        if not adj:
            raise GraphError("graph needs at least one vertex")
        for v, nb in adj.items():
            for u in nb:
                if u == v:
                    raise GraphError(f"self-loop at {v}")
                if u not in adj or v not in adj[u]:
                    raise GraphError(f"adjacency not symmetric for ({v}, {u})")
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "family", self.name)
        object.__setattr__(self, "degree_bound", max(1, max(len(nb) for nb in adj.values())))
        object.__setattr__(self, "_vertices", tuple(sorted(adj)))

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    def has_vertex(self, i: int) -> bool:
        return i in self.adjacency

    def _neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def edge_orbit_representatives(self) -> list[Edge] | None:
        return None if self.orbits is None else list(self.orbits)

    def describe(self) -> dict:
        if self.params is not None:
            return {"family": self.family, **self.params}
        return {"family": "explicit", "adjacency": {str(v): list(nb) for v, nb in self.adjacency.items()}}


def complete_graph(n: int) -> FiniteGraph:
    if n < 1:
        raise GraphError(f"complete graph needs n >= 1, got {n}")
    vs = range(1, n + 1)
    return FiniteGraph(
        {v: tuple(u for u in vs if u != v) for v in vs},
        name="complete", params={"n": n}, orbits=((1, 2),) if n >= 2 else (),
    )


def cocktail_party(m: int) -> FiniteGraph:
    """K_{m x 2}: vertices 1..2m in groups {1,2}, {3,4}, ...; a vertex is
    adjacent to everything outside its own group."""
    if m < 1:
        raise GraphError(f"cocktail-party graph needs m >= 1, got {m}")
    vs = range(1, 2 * m + 1)
    grp = lambda v: (v - 1) // 2  # noqa: E731
    return FiniteGraph(
        {v: tuple(u for u in vs if grp(u) != grp(v)) for v in vs},
        name="cocktail", params={"m": m}, orbits=((1, 3),) if m >= 2 else (),
    )


def finite_path(n: int) -> FiniteGraph:
    if n < 1:
        raise GraphError(f"finite path needs n >= 1, got {n}")
    adj = {v: tuple(u for u in (v - 1, v + 1) if 1 <= u <= n) for v in range(1, n + 1)}
    return FiniteGraph(adj, name="finite_path", params={"n": n})


def make_graph(spec: Mapping) -> SocialGraph:
    """Build a graph from a JSON family descriptor."""
    family = spec.get("family")
    try:
        if family == "path":
            return HalfInfinitePath()
        if family == "bipath":
            return BiInfinitePath()
        if family == "complete":
            return complete_graph(int(spec["n"]))
        if family == "cocktail":
            return cocktail_party(int(spec["m"]))
        if family == "circulant":
            return Circulant(int(spec["k"]))
        if family == "finite_path":
            return finite_path(int(spec["n"]))
        if family == "explicit":
            adj = {int(v): tuple(int(u) for u in nb) for v, nb in spec["adjacency"].items()}
            return FiniteGraph(adj)
    except KeyError as exc:
        raise GraphError(f"family {family!r} is missing parameter {exc}") from None
    raise GraphError(f"unknown graph family {family!r}")


def ball(g: SocialGraph, targets: Iterable[int], radius: int) -> set[int]:
    """All vertices within graph distance ``radius`` of ``targets``."""
    frontier = set(targets)
    for v in frontier:
        if not g.has_vertex(v):
            raise GraphError(f"{v} is not a vertex of {g.family}")
    seen = set(frontier)
    for _ in range(radius):
        nxt = {u for v in frontier for u in g.neighbors(v)} - seen
        if not nxt:
            break
        seen |= nxt
        frontier = nxt
    return seen


def closed_neighborhood(g: SocialGraph, i: int) -> set[int]:
    return set(g.closed_neighborhood(i))


def distance_to_outside(g: SocialGraph, window: Iterable[int]) -> dict[int, float]:
    """Graph distance from each window vertex to the nearest vertex outside
    the window (``inf`` when the window is a whole finite graph)."""
    ws = set(window)
    dist: dict[int, float] = {}
    queue: deque[int] = deque()
    for v in ws:
        if any(u not in ws for u in g.neighbors(v)):
            dist[v] = 1
            queue.append(v)
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if u in ws and u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return {v: dist.get(v, float("inf")) for v in ws}


def regularity_margin(g: SocialGraph, sample_edges: Iterable[Edge] | None = None) -> tuple[int, int]:
    """Return ``(r, min 3|N_i ∩ N_j| - 2r)`` over the sampled edges, where N
    is the closed neighborhood and r = degree + 1.

    Without a sample, the family's edge-orbit representatives are used, which
    makes the minimum exact over all of E.
    """
    edges = list(sample_edges) if sample_edges is not None else g.edge_orbit_representatives()
    if not edges:
        raise GraphError("regularity_margin needs at least one edge")
    degrees = set()
    margin = None
    for i, j in edges:
        if not g.adjacent(i, j):
            raise GraphError(f"({i}, {j}) is not an edge")
        ni, nj = set(g.closed_neighborhood(i)), set(g.closed_neighborhood(j))
        degrees.update((len(ni), len(nj)))
        if len(degrees) > 1:
            raise GraphError(f"graph is not regular on the sampled vertices (closed sizes {sorted(degrees)})")
        r = len(ni)
        m = 3 * len(ni & nj) - 2 * r
        margin = m if margin is None else min(margin, m)
    return degrees.pop(), margin
