"""Seeded stochastic schedules: stubbornness draws, matchings, agent selection.

Every draw is a pure function of ``(seed, stream, words...)`` through a
counter-based hash (SplitMix64 finalizer chained over the key words). There is
no generator state, so a draw for vertex ``i`` at time ``t`` does not depend on
which other vertices are simulated. The light-cone engine relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graphs import Edge, SocialGraph, edge, is_matching

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


class Stream(IntEnum):
    ALPHA = 1
    PAIR_ALPHA = 2
    MATCHING = 3
    SELECT = 4
    INIT = 5


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def hash_words(seed: int, *words: int) -> int:
    h = _mix((seed + GOLDEN) & MASK)
    for w in words:
        h = _mix(h ^ _mix((w + GOLDEN) & MASK))
    return h


def uniform(seed: int, *words: int) -> float:
    """Uniform draw in [0, 1) with 53 random bits."""
    return (hash_words(seed, *words) >> 11) * 2.0**-53


def uniform_index(n: int, seed: int, *words: int) -> int:
    """Uniform integer in [0, n)."""
    return ((hash_words(seed, *words) >> 11) * n) >> 53


_U64 = np.uint64


def _as_u64(w) -> np.ndarray:
    a = np.asarray(w)
    if a.dtype == np.uint64:
        return a
    return a.astype(np.int64).view(np.uint64)


def _mix_arr(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _U64(_M1)
    z = (z ^ (z >> _U64(27))) * _U64(_M2)
    return z ^ (z >> _U64(31))


def hash_words_array(seed: int, *words) -> np.ndarray:
    """Vectorized ``hash_words``; array words broadcast together."""
    with np.errstate(over="ignore"):
        h = _mix_arr(np.asarray((seed + GOLDEN) & MASK, dtype=np.uint64))
        for w in words:
            h = _mix_arr(h ^ _mix_arr(_as_u64(w) + _U64(GOLDEN)))
    return h


def extend_hash_array(h: np.ndarray, *words) -> np.ndarray:
    """Continue a chained hash: ``extend(hash_words_array(s, a), b)`` equals
    ``hash_words_array(s, a, b)``."""
    with np.errstate(over="ignore"):
        for w in words:
            h = _mix_arr(h ^ _mix_arr(_as_u64(w) + _U64(GOLDEN)))
    return h


def to_unit(h: np.ndarray) -> np.ndarray:
    return (h >> _U64(11)).astype(np.float64) * 2.0**-53


def uniform_array(seed: int, *words) -> np.ndarray:
    return to_unit(hash_words_array(seed, *words))


# --- stubbornness schedules -------------------------------------------------

ALPHA_KINDS = ("constant", "two-point", "uniform01", "uniform", "periodic", "per-pair-constant")


@dataclass(frozen=True)
class AlphaSchedule:
    """Distribution of the stubbornness alpha_i(t).

    ``periodic`` depends on t only, so all agents share alpha_t. For
    ``per-pair-constant`` the ``base`` schedule is drawn once per matched pair
    and time step and both endpoints receive that value.
    """

    kind: str
    value: float = 0.0
    a: float = 0.0
    b: float = 1.0
    p: float = 0.5
    low: float = 0.0
    high: float = 1.0
    values: tuple[float, ...] = ()
    base: AlphaSchedule | None = None

    def __post_init__(self):
        if self.kind not in ALPHA_KINDS:
            raise ValueError(f"unknown alpha schedule {self.kind!r}")
        emitted = {
            "constant": [self.value],
            "two-point": [self.a, self.b],
            "uniform": [self.low, self.high],
            "periodic": list(self.values),
        }.get(self.kind, [])
        if self.kind == "periodic" and not self.values:
            raise ValueError("periodic schedule needs a non-empty value list")
        if any(not 0.0 <= v <= 1.0 for v in emitted):
            raise ValueError(f"alpha values must lie in [0, 1], got {emitted}")
        if self.kind == "two-point" and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"two-point probability must lie in [0, 1], got {self.p}")
        if self.kind == "uniform" and self.low > self.high:
            raise ValueError("uniform schedule needs low <= high")
        if self.kind == "per-pair-constant":
            if self.base is None or self.base.kind == "per-pair-constant":
                raise ValueError("per-pair-constant needs a vertex-level base schedule")

    @property
    def pairwise(self) -> bool:
        return self.kind == "per-pair-constant"

    def _from_uniform(self, u, t: int):
        k = self.kind
        if k == "constant":
            return np.full_like(u, self.value) if isinstance(u, np.ndarray) else self.value
        if k == "two-point":
            return np.where(u < self.p, self.a, self.b) if isinstance(u, np.ndarray) else (self.a if u < self.p else self.b)
        if k == "uniform01":
            return u
        if k == "uniform":
            return self.low + (self.high - self.low) * u
        if k == "periodic":
            v = self.values[t % len(self.values)]
            return np.full_like(u, v) if isinstance(u, np.ndarray) else v
        raise AssertionError(k)

    def draw(self, seed: int, i: int, t: int) -> float:
        if self.pairwise:
            raise ValueError("per-pair-constant draws need a pair; use draw_pair")
        return float(self._from_uniform(uniform(seed, Stream.ALPHA, i, t), t))

    @property
    def random(self) -> bool:
        return self.kind not in ("constant", "periodic")

    def vertex_prefix(self, seed: int, vertices) -> np.ndarray:
        """Hash state after (seed, stream, vertex); reusable across t."""
        return hash_words_array(seed, Stream.ALPHA, np.asarray(vertices, dtype=np.int64))

    def draw_many(self, seed: int, vertices, t: int, prefix: np.ndarray | None = None) -> np.ndarray:
        if self.pairwise:
            raise ValueError("per-pair-constant draws need pairs; use draw_pair")
        n = len(vertices)
        if not self.random:
            return np.full(n, self._from_uniform(0.0, t), dtype=np.float64)
        if prefix is None:
            prefix = self.vertex_prefix(seed, vertices)
        u = to_unit(extend_hash_array(prefix, t))
        return np.asarray(self._from_uniform(u, t), dtype=np.float64)

    def draw_pair(self, seed: int, i: int, j: int, t: int) -> tuple[float, float]:
        """Stubbornness of both endpoints of a matched pair."""
        if not self.pairwise:
            return self.draw(seed, i, t), self.draw(seed, j, t)
        lo, hi = (i, j) if i < j else (j, i)
        v = float(self.base._from_uniform(uniform(seed, Stream.PAIR_ALPHA, lo, hi, t), t))
        return v, v

    def to_dict(self) -> dict:
        k = self.kind
        if k == "constant":
            return {"kind": k, "value": self.value}
        if k == "two-point":
            return {"kind": k, "a": self.a, "b": self.b, "p": self.p}
        if k == "uniform":
            return {"kind": k, "low": self.low, "high": self.high}
        if k == "periodic":
            return {"kind": k, "values": list(self.values)}
        if k == "per-pair-constant":
            return {"kind": k, "base": self.base.to_dict()}
        return {"kind": k}

    @classmethod
    def from_dict(cls, d: Mapping) -> AlphaSchedule:
        d = dict(d)
        kind = d.pop("kind", None)
        if kind == "per-pair-constant":
            return cls(kind, base=cls.from_dict(d["base"]))
        if "values" in d:
            d["values"] = tuple(float(v) for v in d["values"])
        return cls(kind, **d)


def constant(c: float) -> AlphaSchedule:
    return AlphaSchedule("constant", value=c)


def draw_alpha(sched: AlphaSchedule, i: int, t: int, seed: int) -> float:
    return sched.draw(seed, i, t)


# --- U_t samplers -------------------------------------------------------------

SAMPLER_KINDS = ("single-uniform-edge", "random-maximal-matching", "fixed-cycle", "single-uniform-agent")


@dataclass(frozen=True)
class MatchingSampler:
    """Draws U_t: a matching (pair mode) or, for ``single-uniform-agent``, the
    set of non-stubborn agents in group mode (asynchronous HK)."""

    kind: str
    matchings: tuple[tuple[Edge, ...], ...] = field(default=())

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler {self.kind!r}")
        if self.kind == "fixed-cycle":
            if not self.matchings:
                raise ValueError("fixed-cycle needs at least one matching")
            norm = tuple(tuple(sorted(edge(*e) for e in m)) for m in self.matchings)
            for m in norm:
                if not is_matching(m):
                    raise ValueError(f"fixed-cycle entry {m} is not a matching")
            object.__setattr__(self, "matchings", norm)

    @property
    def selects_agents(self) -> bool:
        return self.kind == "single-uniform-agent"

    def draw(self, window_edges: Sequence[Edge], t: int, seed: int) -> tuple[Edge, ...]:
        """Matching over the given (sorted) social edges of the window."""
        k = self.kind
        if k == "single-uniform-edge":
            if not window_edges:
                raise ValueError("window has no internal social edge")
            return (window_edges[uniform_index(len(window_edges), seed, Stream.MATCHING, t)],)
        if k == "random-maximal-matching":
            if not window_edges:
                return ()
            e = np.asarray(window_edges, dtype=np.int64)
            prio = hash_words_array(seed, Stream.MATCHING, e[:, 0], e[:, 1], t)
            used: set[int] = set()
            out = []
            for idx in np.argsort(prio, kind="stable"):
                i, j = window_edges[idx]
                if i not in used and j not in used:
                    used.update((i, j))
                    out.append((i, j))
            return tuple(sorted(out))
        if k == "fixed-cycle":
            allowed = set(window_edges)
            return tuple(e for e in self.matchings[t % len(self.matchings)] if e in allowed)
        raise ValueError(f"{k} does not draw matchings")

    def select(self, window: Sequence[int], t: int, seed: int) -> tuple[int, ...]:
        """Non-stubborn agents at time t (asynchronous HK: one, uniform over window)."""
        if not self.selects_agents:
            raise ValueError(f"{self.kind} does not select agents")
        return (window[uniform_index(len(window), seed, Stream.SELECT, t)],)

    def to_dict(self) -> dict:
        if self.kind == "fixed-cycle":
            return {"kind": self.kind, "matchings": [[list(e) for e in m] for m in self.matchings]}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: Mapping) -> MatchingSampler:
        ms = tuple(tuple(tuple(e) for e in m) for m in d.get("matchings", ()))
        return cls(d["kind"], ms)


def draw_matching(ms: MatchingSampler, g: SocialGraph, window: Iterable[int], t: int, seed: int) -> tuple[Edge, ...]:
    return ms.draw(g.edges_within(window), t, seed)


# --- presets ------------------------------------------------------------------


@dataclass(frozen=True)
class Preset:
    mode: str
    alpha: AlphaSchedule
    sampler: MatchingSampler | None


def preset(name: str, mu: float | None = None) -> Preset:
    """The three classical models as special cases of the mixed rule."""
    if name == "synchronous_hk":
        return Preset("group", constant(0.0), None)
    if name == "asynchronous_hk":
        return Preset("group", constant(0.0), MatchingSampler("single-uniform-agent"))
    if name == "deffuant":
        if mu is None or not 0.0 < mu <= 0.5:
            raise ValueError(f"deffuant needs mu in (0, 1/2], got {mu}")
        return Preset("pair", constant(1.0 - 2.0 * mu), MatchingSampler("single-uniform-edge"))
    raise ValueError(f"unknown preset {name!r}")
