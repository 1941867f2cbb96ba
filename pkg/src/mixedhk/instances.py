"""Random finite instances for the randomized property suites."""

from __future__ import annotations

import numpy as np

from .engine import InitialRule, WorldConfig
from .graphs import FiniteGraph, edge
from .sampling import AlphaSchedule, MatchingSampler

# keeps pair rates (1 - alpha)/2 away from zero when alpha < 1
ALPHA_CAP = 1.0 - 2e-3


def random_graph(rng: np.random.Generator, n: int, p: float, connected: bool = False) -> FiniteGraph:
    edges = {edge(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < p}
    if connected:
        # random spanning tree: attach each vertex to an earlier one of a random order
        order = rng.permutation(np.arange(1, n + 1))
        for k in range(1, n):
            edges.add(edge(int(order[k]), int(order[rng.integers(0, k)])))
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    return FiniteGraph({v: tuple(nb) for v, nb in adj.items()})


def random_vertex_alpha(rng: np.random.Generator) -> AlphaSchedule:
    kind = rng.integers(0, 4)
    if kind == 0:
        return AlphaSchedule("constant", value=float(rng.uniform(0, ALPHA_CAP)))
    if kind == 1:
        return AlphaSchedule("two-point", a=float(rng.uniform(0, ALPHA_CAP)), b=1.0, p=float(rng.uniform(0.2, 1.0)))
    if kind == 2:
        return AlphaSchedule("uniform", low=0.0, high=ALPHA_CAP)
    return AlphaSchedule("periodic", values=tuple(float(v) for v in rng.uniform(0, ALPHA_CAP, size=rng.integers(1, 6))))


def random_instance(
    rng: np.random.Generator,
    mode: str,
    horizon: int,
    n_max: int = 40,
    d_max: int = 3,
    connected: bool = False,
    sampler: str | None = None,
    eps: float | None = None,
    monitors: tuple[str, ...] = (),
) -> WorldConfig:
    """A finite world with explicit random opinions in [0, 1]^d.

    Pair mode always gets equal stubbornness per matched pair.
    """
    n = int(rng.integers(2, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    g = random_graph(rng, n, float(rng.uniform(0.05, 0.6)), connected)
    x = rng.uniform(0.0, 1.0, size=(n, d))
    if eps is None:
        eps = float(rng.uniform(0.05, 1.2) * np.sqrt(d))
    if mode == "group":
        alpha, ms = random_vertex_alpha(rng), None
    else:
        alpha = AlphaSchedule("per-pair-constant", base=random_vertex_alpha(rng))
        kind = sampler or ("single-uniform-edge", "random-maximal-matching")[rng.integers(0, 2)]
        ms = MatchingSampler(kind)
        if not g.edges_within(g.vertices):
            g = FiniteGraph({**{v: () for v in range(3, n + 1)}, 1: (2,), 2: (1,)})
    return WorldConfig(
        graph=g,
        initial=InitialRule("explicit", values={v: tuple(x[v - 1]) for v in range(1, n + 1)}),
        epsilon=eps,
        mode=mode,
        alpha=alpha,
        sampler=ms,
        targets=tuple(range(1, n + 1)),
        horizon=horizon,
        seed=int(rng.integers(0, 2**63)),
        monitors=monitors,
    )
