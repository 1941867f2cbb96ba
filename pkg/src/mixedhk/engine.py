"""Finite-horizon simulation on finite or infinite graphs by light-cone truncation.

A vertex's opinion at time t depends only on the initial opinions within graph
distance t. Simulating the window ``ball(targets, T)`` is therefore exact for
every vertex whose distance to the outside of the window exceeds t; in
particular for the targets up to the horizon T. Window boundary vertices use
their neighbors inside the window and stop being exact after the first step.

Light-cone exactness needs vertex-keyed randomness. Stubbornness schedules are
vertex-keyed; ``single-uniform-edge``, ``random-maximal-matching`` and
``single-uniform-agent`` draw over the whole window and are exact only when
the window is the whole (finite) graph.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import monitors as mon
from .dynamics import Neighborhoods, OpinionState, group_update, pair_update
from .graphs import Edge, GraphError, SocialGraph, ball, distance_to_outside, make_graph
from .sampling import AlphaSchedule, MatchingSampler, Stream, preset, uniform_array

MODES = ("group", "pair")


class ConfigError(ValueError):
    """Invalid or inconsistent world configuration."""


@dataclass(frozen=True)
class InitialRule:
    """Closed-form initial opinions.

    kinds: ``harmonic`` (1/i), ``identity`` (i), ``explicit`` (vertex -> vector),
    ``uniform_box`` (seeded, uniform in [low, high]^d per vertex).
    """

    kind: str
    values: Mapping[int, tuple[float, ...]] | None = None
    low: float = 0.0
    high: float = 1.0
    d: int = 1

    def __post_init__(self):
        if self.kind not in ("harmonic", "identity", "explicit", "uniform_box"):
            raise ConfigError(f"unknown initial rule {self.kind!r}")
        if self.kind == "explicit" and not self.values:
            raise ConfigError("explicit initial rule needs values")

    @property
    def dim(self) -> int:
        if self.kind == "explicit":
            return len(next(iter(self.values.values())))
        return self.d if self.kind == "uniform_box" else 1

    def evaluate(self, vertices: Sequence[int], seed: int) -> np.ndarray:
        vs = np.asarray(vertices, dtype=np.int64)
        if self.kind == "harmonic":
            if np.any(vs == 0):
                raise ConfigError("rule x_i = 1/i is undefined at vertex 0")
            return (1.0 / vs.astype(np.float64))[:, None]
        if self.kind == "identity":
            return vs.astype(np.float64)[:, None]
        if self.kind == "uniform_box":
            u = uniform_array(seed, Stream.INIT, vs[:, None], np.arange(self.d)[None, :])
            return self.low + (self.high - self.low) * u
        missing = [v for v in vertices if v not in self.values]
        if missing:
            raise ConfigError(f"initial opinions undefined on window vertices {missing[:5]}")
        x = np.array([self.values[v] for v in vertices], dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ConfigError("explicit opinions must all have the same dimension")
        return x

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"rule": "explicit", "values": {str(v): list(x) for v, x in self.values.items()}}
        if self.kind == "uniform_box":
            return {"rule": "uniform_box", "low": self.low, "high": self.high, "d": self.d}
        return {"rule": self.kind}

    @classmethod
    def from_dict(cls, d: Mapping) -> InitialRule:
        d = dict(d)
        kind = d.pop("rule", None)
        if kind == "explicit":
            raw = d["values"]
            if isinstance(raw, list):
                raise ConfigError("explicit values must map vertex ids to opinions")
            vals = {int(v): tuple(float(c) for c in np.atleast_1d(x)) for v, x in raw.items()}
            return cls(kind, values=vals)
        return cls(kind, **d)


@dataclass(frozen=True, eq=False)
class WorldConfig:
    graph: SocialGraph
    initial: InitialRule
    epsilon: float
    mode: str
    alpha: AlphaSchedule
    targets: tuple[int, ...]
    horizon: int
    sampler: MatchingSampler | None = None
    seed: int = 0
    monitors: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.targets:
            raise ConfigError("targets must be non-empty")
        if self.horizon < 0:
            raise ConfigError("horizon must be >= 0")
        if not self.epsilon >= 0:
            raise ConfigError("epsilon must be >= 0")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.mode == "pair":
            if self.sampler is None or self.sampler.selects_agents:
                raise ConfigError("pair mode needs a matching sampler")
        else:
            if self.sampler is not None and not self.sampler.selects_agents:
                raise ConfigError(f"group mode cannot use sampler {self.sampler.kind!r}")
            if self.alpha.pairwise:
                raise ConfigError("per-pair-constant stubbornness only applies to pair mode")
        for v in self.targets:
            if not self.graph.has_vertex(v):
                raise ConfigError(f"target {v} is not a vertex of {self.graph.family}")
        unknown = set(self.monitors) - set(mon.MONITORS)
        if unknown:
            raise ConfigError(f"unknown monitors {sorted(unknown)}")
        object.__setattr__(self, "targets", tuple(sorted(set(self.targets))))

    def replace(self, **kw) -> WorldConfig:
        return dataclasses.replace(self, **kw)

    @classmethod
    def from_dict(cls, d: Mapping) -> WorldConfig:
        try:
            graph = make_graph(d["graph"])
            mode = d.get("mode", "group")
            alpha = AlphaSchedule.from_dict(d.get("alpha", {"kind": "constant", "value": 0.0}))
            sampler = MatchingSampler.from_dict(d["sampler"]) if d.get("sampler") else None
            if d.get("preset"):
                p = preset(d["preset"]["name"], d["preset"].get("mu"))
                mode, alpha, sampler = p.mode, p.alpha, p.sampler
            targets = d["targets"]
            if isinstance(targets, Mapping):
                targets = range(int(targets["range"][0]), int(targets["range"][1]) + 1)
            return cls(
                graph=graph,
                initial=InitialRule.from_dict(d["initial"]),
                epsilon=float(d["epsilon"]),
                mode=mode,
                alpha=alpha,
                sampler=sampler,
                targets=tuple(int(v) for v in targets),
                horizon=int(d["horizon"]),
                seed=int(d.get("seed", 0)),
                monitors=tuple(d.get("monitors", ())),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, GraphError) as exc:
            raise ConfigError(f"bad config: {exc!r}") from exc

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.describe(),
            "initial": self.initial.to_dict(),
            "epsilon": self.epsilon,
            "mode": self.mode,
            "alpha": self.alpha.to_dict(),
            "sampler": None if self.sampler is None else self.sampler.to_dict(),
            "targets": list(self.targets),
            "horizon": self.horizon,
            "seed": self.seed,
            "monitors": list(self.monitors),
        }


@dataclass(frozen=True, eq=False)
class Layout:
    """Window structure shared by every World of one run."""

    window: tuple[int, ...]
    nb: Neighborhoods
    edges: list[Edge]
    pos: dict[int, int]
    dist_out: np.ndarray
    target_pos: np.ndarray
    alpha_prefix: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class World:
    cfg: WorldConfig
    layout: Layout
    x: np.ndarray
    t: int = 0
    last_alpha: np.ndarray | None = None
    last_matching: tuple[Edge, ...] | None = None

    @property
    def window(self) -> tuple[int, ...]:
        return self.layout.window

    @property
    def state(self) -> OpinionState:
        return OpinionState(self.layout.window, self.x)

    @property
    def valid_radius(self) -> int:
        return self.cfg.horizon - self.t

    def valid_mask(self) -> np.ndarray:
        return self.layout.dist_out > self.t

    def valid_vertices(self) -> tuple[int, ...]:
        m = self.valid_mask()
        return tuple(v for v, ok in zip(self.layout.window, m) if ok)


def init(cfg: WorldConfig, extra_radius: int = 0) -> World:
    """Materialize ``ball(targets, T + extra_radius)`` and the initial opinions."""
    window = tuple(sorted(ball(cfg.graph, cfg.targets, cfg.horizon + extra_radius)))
    pos = {v: k for k, v in enumerate(window)}
    dist = distance_to_outside(cfg.graph, window)
    layout = Layout(
        window=window,
        nb=Neighborhoods(cfg.graph, window),
        edges=cfg.graph.edges_within(window),
        pos=pos,
        dist_out=np.array([dist[v] for v in window], dtype=np.float64),
        target_pos=np.array([pos[v] for v in cfg.targets], dtype=np.int64),
        alpha_prefix=(
            cfg.alpha.vertex_prefix(cfg.seed, window)
            if cfg.mode == "group" and cfg.sampler is None and cfg.alpha.random
            else None
        ),
    )
    x = cfg.initial.evaluate(window, cfg.seed)
    if not np.all(np.isfinite(x)):
        raise ConfigError("initial opinions must be finite")
    return World(cfg, layout, x, 0)


def draw_alpha_group(w: World) -> np.ndarray:
    cfg, lay = w.cfg, w.layout
    if cfg.sampler is not None:
        alpha = np.ones(len(lay.window))
        for v in cfg.sampler.select(lay.window, w.t, cfg.seed):
            alpha[lay.pos[v]] = cfg.alpha.draw(cfg.seed, v, w.t)
        return alpha
    return cfg.alpha.draw_many(cfg.seed, lay.window, w.t, prefix=lay.alpha_prefix)


def step(w: World) -> World:
    cfg, lay = w.cfg, w.layout
    if w.t >= cfg.horizon:
        raise RuntimeError(f"cannot step past the horizon T={cfg.horizon}")
    if cfg.mode == "group":
        alpha = draw_alpha_group(w)
        x = group_update(w.x, lay.nb, alpha, cfg.epsilon)
        return World(cfg, lay, x, w.t + 1, alpha, None)
    m = cfg.sampler.draw(lay.edges, w.t, cfg.seed)
    pairs = [(lay.pos[i], lay.pos[j]) for i, j in m]
    drawn = [cfg.alpha.draw_pair(cfg.seed, i, j, w.t) for i, j in m]
    x, _ = pair_update(w.x, pairs, [a for a, _ in drawn], [b for _, b in drawn], cfg.epsilon)
    alpha = np.ones(len(lay.window))
    for (a, b), (aa, ab) in zip(pairs, drawn):
        alpha[a], alpha[b] = aa, ab
    return World(cfg, lay, x, w.t + 1, alpha, m)


@dataclass
class Trace:
    targets: tuple[int, ...]
    x: np.ndarray  # (T+1, |targets|, d)
    valid: np.ndarray  # (T+1, |targets|)
    monitors: list[tuple[int, str, float]] = field(default_factory=list)
    alphas: list[np.ndarray] = field(default_factory=list)
    matchings: list[tuple[Edge, ...] | None] = field(default_factory=list)
    window: tuple[int, ...] = ()
    states: list[np.ndarray] | None = None

    def __len__(self) -> int:
        return self.x.shape[0]

    def series(self, v: int) -> np.ndarray:
        return self.x[:, self.targets.index(v)]

    def monitor(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        rows = [(t, val) for t, n, val in self.monitors if n == name]
        return np.array([t for t, _ in rows], dtype=np.int64), np.array([v for _, v in rows])

    def write_csv(self, path: str | Path) -> None:
        d = self.x.shape[2]
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["t", "vertex", "valid", *(f"x{c}" for c in range(d))])
            for t in range(self.x.shape[0]):
                for k, v in enumerate(self.targets):
                    out.writerow([t, v, int(self.valid[t, k]), *(repr(float(c)) for c in self.x[t, k])])

    def write_monitor_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["t", "monitor", "value"])
            for t, name, val in self.monitors:
                out.writerow([t, name, repr(float(val))])


def run(
    cfg: WorldConfig,
    extra_radius: int = 0,
    keep_states: bool = False,
    record_draws: bool = True,
    observer=None,
) -> Trace:
    """Run T steps from ``init(cfg)``.

    ``extra_radius`` enlarges the window beyond ``ball(targets, T)``;
    ``observer(prev, next)`` is called after every step with consecutive Worlds.
    """
    w = init(cfg, extra_radius)
    lay = w.layout
    T = cfg.horizon
    tx = np.empty((T + 1, len(cfg.targets), w.x.shape[1]))
    tv = np.empty((T + 1, len(cfg.targets)), dtype=bool)
    trace = Trace(cfg.targets, tx, tv, window=lay.window, states=[w.x] if keep_states else None)
    tracker = mon.MonitorSet(cfg.monitors, cfg.graph, lay.window, cfg.epsilon, cfg.mode) if cfg.monitors else None

    def record(world: World, prev: World | None):
        tx[world.t] = world.x[lay.target_pos]
        tv[world.t] = lay.dist_out[lay.target_pos] > world.t
        if tracker is not None:
            trace.monitors.extend((world.t, n, v) for n, v in tracker.values(world.x, None if prev is None else prev.x))

    record(w, None)
    for _ in range(T):
        nxt = step(w)
        record(nxt, w)
        if record_draws:
            trace.alphas.append(nxt.last_alpha)
            trace.matchings.append(nxt.last_matching)
        if keep_states:
            trace.states.append(nxt.x)
        if observer is not None:
            observer(w, nxt)
        w = nxt
    return trace
