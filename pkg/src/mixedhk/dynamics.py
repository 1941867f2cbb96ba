"""One step of the mixed Hegselmann-Krause rule, group and pair interaction.

    x_i(t+1) = alpha_i x_i + (1 - alpha_i) * mean_{k in N_i(t)} x_k

where N_i(t) is i together with its profile neighbors (social edges used for
the update that are also within opinion distance eps). The implementation
evaluates it as ``x + (1 - alpha) * (mean - x)``, which keeps fixed points
exact for every alpha. Neighborhood sums start from 0.0 and add members in
ascending vertex order, then divide once; the naive oracle does the same so
the two agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graphs import Edge, SocialGraph, edge, is_matching


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OpinionState:
    """Opinions of a finite, sorted set of active vertices; ``x[k]`` belongs
    to ``vertices[k]``."""

    vertices: tuple[int, ...]
    x: np.ndarray

    def __post_init__(self):
        vs = tuple(int(v) for v in self.vertices)
        if list(vs) != sorted(set(vs)):
            raise DynamicsError("vertices must be sorted and distinct")
        x = np.array(self.x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != len(vs):
            raise DynamicsError(f"{len(vs)} vertices but {x.shape[0]} opinions")
        if not np.all(np.isfinite(x)):
            raise DynamicsError("opinions must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "_index", {v: k for k, v in enumerate(vs)})

    @classmethod
    def from_dict(cls, opinions: Mapping[int, Sequence[float] | float]) -> OpinionState:
        vs = sorted(opinions)
        return cls(tuple(vs), np.array([np.atleast_1d(opinions[v]) for v in vs], dtype=np.float64))

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: int) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise DynamicsError(f"vertex {v} is not active") from None

    def __getitem__(self, v: int) -> np.ndarray:
        return self.x[self.index(v)]

    def __contains__(self, v: int) -> bool:
        return v in self._index

    def with_x(self, x: np.ndarray) -> OpinionState:
        return OpinionState(self.vertices, x)

    def to_dict(self) -> dict[int, np.ndarray]:
        return {v: self.x[k] for k, v in enumerate(self.vertices)}


def distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance, squares summed in coordinate order."""
    s = 0.0
    for c in range(len(a)):
        diff = float(a[c]) - float(b[c])
        s += diff * diff
    return math.sqrt(s)


def _sq_norm(diff: np.ndarray) -> np.ndarray:
    """Squared norm over the last axis, coordinates summed in order."""
    s = np.zeros(diff.shape[:-1])
    for c in range(diff.shape[-1]):
        s = s + diff[..., c] * diff[..., c]
    return s


def opinion_edges(s: OpinionState, eps: float, candidates: Iterable[Edge]) -> frozenset[Edge]:
    """Candidates whose endpoints are within opinion distance eps (inclusive)."""
    return frozenset(
        edge(i, j) for i, j in candidates if distance(s[i], s[j]) <= eps
    )


def profile(g: SocialGraph, update_edges: Iterable[Edge], s: OpinionState, eps: float) -> frozenset[Edge]:
    """Update edges that are social edges and opinion edges at the same time."""
    social = [e for e in update_edges if g.adjacent(*e)]
    return opinion_edges(s, eps, social)


class Neighborhoods:
    """Closed social neighborhoods restricted to an active vertex list, as a
    padded index table: ``idx[k]`` lists positions of N[v_k] in ascending
    vertex order, padded with -1."""

    def __init__(self, g: SocialGraph, vertices: Sequence[int]):
        pos = {v: k for k, v in enumerate(vertices)}
        rows = [[pos[u] for u in g.closed_neighborhood(v) if u in pos] for v in vertices]
        width = max((len(r) for r in rows), default=1)
        self.idx = np.full((len(rows), width), -1, dtype=np.int64)
        for k, r in enumerate(rows):
            self.idx[k, : len(r)] = r
        self.present = self.idx >= 0
        self.safe_idx = np.where(self.present, self.idx, np.arange(len(rows))[:, None])


def group_update(x: np.ndarray, nb: Neighborhoods, alpha: np.ndarray, eps: float) -> np.ndarray:
    """Vectorized group-interaction step on an (n, d) opinion array."""
    n, width = nb.idx.shape
    xj = x[nb.safe_idx]  # (n, width, d)
    inc = nb.present & (np.sqrt(_sq_norm(xj - x[:, None, :])) <= eps)
    # slot 0 stays 0.0 so the running sum starts from zero like the oracle
    terms = np.zeros((n, width + 1, x.shape[1]))
    terms[:, 1:] = np.where(inc[..., None], xj, 0.0)
    acc = np.add.accumulate(terms, axis=1)[:, -1]
    mean = acc / inc.sum(axis=1)[:, None]
    return x + (1.0 - alpha)[:, None] * (mean - x)


def pair_update(
    x: np.ndarray, pairs: Sequence[tuple[int, int]], alpha_a: Sequence[float], alpha_b: Sequence[float], eps: float
) -> tuple[np.ndarray, list[bool]]:
    """Pair-interaction step. ``pairs`` hold array positions ``(a, b)`` with
    a < b of matched social edges; returns the new array and which pairs
    were within threshold."""
    out = x.copy()
    fired = []
    for (a, b), aa, ab in zip(pairs, alpha_a, alpha_b):
        xa, xb = x[a], x[b]
        ok = distance(xa, xb) <= eps
        fired.append(ok)
        if ok:
            mean = (0.0 + xa + xb) / 2.0
            out[a] = xa + (1.0 - aa) * (mean - xa)
            out[b] = xb + (1.0 - ab) * (mean - xb)
    return out, fired


def _alpha_array(s: OpinionState, alpha, vertices: Iterable[int] | None = None) -> np.ndarray:
    if isinstance(alpha, Mapping):
        need = s.vertices if vertices is None else vertices
        missing = [v for v in need if v not in alpha]
        if missing:
            raise DynamicsError(f"no alpha for active vertices {missing[:5]}")
        a = np.array([float(alpha.get(v, 1.0)) for v in s.vertices])
    else:
        a = np.asarray(alpha, dtype=np.float64)
        if a.shape != (s.n,):
            raise DynamicsError(f"alpha has shape {a.shape}, expected ({s.n},)")
    if np.any((a < 0.0) | (a > 1.0)):
        raise DynamicsError("alpha values must lie in [0, 1]")
    return a


def step_group(s: OpinionState, g: SocialGraph, alpha, eps: float) -> OpinionState:
    """Group interaction: every vertex averages over its profile neighborhood
    within the active set. ``alpha`` is a vertex->value mapping or an array
    aligned with ``s.vertices``."""
    a = _alpha_array(s, alpha)
    return s.with_x(group_update(s.x, Neighborhoods(g, s.vertices), a, eps))


def step_pair(s: OpinionState, g: SocialGraph, m: Iterable[Edge], alpha: Mapping[int, float], eps: float) -> OpinionState:
    """Pair interaction over matching ``m``. Pairs that are not social edges
    or are out of threshold stay put, as do unmatched vertices."""
    m = [edge(*e) for e in m]
    if not is_matching(m):
        raise DynamicsError(f"{m} is not a matching")
    matched = [v for e in m for v in e]
    _alpha_array(s, alpha, matched)
    social = [e for e in m if g.adjacent(*e)]
    pairs = [(s.index(i), s.index(j)) for i, j in social]
    x, _ = pair_update(s.x, pairs, [alpha[i] for i, _ in social], [alpha[j] for _, j in social], eps)
    return s.with_x(x)


def deffuant_step(s: OpinionState, e: Edge, mu: float, eps: float, g: SocialGraph | None = None) -> OpinionState:
    """Classical Deffuant update of one edge at rate mu, via the pair rule
    with alpha = 1 - 2 mu on both endpoints."""
    if not 0.0 < mu <= 0.5:
        raise DynamicsError(f"mu must lie in (0, 1/2], got {mu}")
    i, j = edge(*e)
    a = 1.0 - 2.0 * mu
    if g is None:
        pairs = [(s.index(i), s.index(j))]
        x, _ = pair_update(s.x, pairs, [a], [a], eps)
        return s.with_x(x)
    if not g.adjacent(i, j):
        raise DynamicsError(f"({i}, {j}) is not a social edge")
    return step_pair(s, g, [(i, j)], {i: a, j: a}, eps)
