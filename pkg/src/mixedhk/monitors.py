"""Quantities the convergence arguments reason about, and per-step contracts.

Z sums run over ordered pairs (i, j), i != j. With unordered pairs the factor
4 in the decrease inequality fails for a two-agent midpoint step; with ordered
pairs that step makes it an equality. On infinite graphs everything here is a
window quantity: it is computed on whatever finite state it is handed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .dynamics import OpinionState, distance
from .graphs import Edge, GraphError, SocialGraph, regularity_margin

MONITORS = (
    "z_pair",
    "z_group",
    "max_edge_gap",
    "max_pairwise_gap",
    "max_displacement",
    "displacement_sq_sum",
    "residual",
)

CONTRACTS = ("profile_preserved", "order_preserved", "regular_bound", "delta_trivial", "supermartingale")

RESIDUAL_RTOL = 1e-9
BOUND_RTOL = 1e-12
# gaps below ~1e-4 |x| carry rounding error far above BOUND_RTOL * A_t
BOUND_ULPS = 16.0
DELTA_ATOL = 1e-12


class ContractError(ValueError):
    """A contract was requested in a context where it does not apply."""


def _sq_dist_matrix(x: np.ndarray) -> np.ndarray:
    d2 = np.zeros((x.shape[0], x.shape[0]))
    for c in range(x.shape[1]):
        diff = x[:, c, None] - x[None, :, c]
        d2 += diff * diff
    return d2


def adjacency_matrix(g: SocialGraph, vertices: Sequence[int]) -> np.ndarray:
    pos = {v: k for k, v in enumerate(vertices)}
    adj = np.zeros((len(vertices), len(vertices)), dtype=bool)
    for k, v in enumerate(vertices):
        for u in g.neighbors(v):
            if u in pos:
                adj[k, pos[u]] = True
    return adj


def _edge_positions(g: SocialGraph, vertices: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    pos = {v: k for k, v in enumerate(vertices)}
    es = g.edges_within(vertices)
    a = np.array([pos[i] for i, _ in es], dtype=np.int64)
    b = np.array([pos[j] for _, j in es], dtype=np.int64)
    return a, b


def _z_pair_x(x: np.ndarray) -> float:
    return float(_sq_dist_matrix(x).sum())


def _z_group_x(x: np.ndarray, adj: np.ndarray, eps: float) -> float:
    d2 = _sq_dist_matrix(x)
    e2 = eps * eps
    terms = np.where(adj, np.minimum(d2, e2), e2)
    np.fill_diagonal(terms, 0.0)
    return float(terms.sum())


def z_pair(s: OpinionState) -> float:
    """Sum over ordered pairs of squared opinion distances."""
    return _z_pair_x(s.x)


def z_group(s: OpinionState, g: SocialGraph, eps: float) -> float:
    """Ordered-pair sum of min(gap^2, eps^2) on social edges, eps^2 off them."""
    return _z_group_x(s.x, adjacency_matrix(g, s.vertices), eps)


def displacement_sq_sum(prev: OpinionState, nxt: OpinionState) -> float:
    _same_support(prev, nxt)
    dx = nxt.x - prev.x
    return float((dx * dx).sum())


def _same_support(prev: OpinionState, nxt: OpinionState) -> None:
    if prev.vertices != nxt.vertices:
        raise ValueError("states have different active sets")


def supermartingale_residual(prev: OpinionState, nxt: OpinionState, mode: str, g: SocialGraph, eps: float) -> float:
    """Z(t) - Z(t+1) - 4 * sum_i |x_i(t) - x_i(t+1)|^2, with Z = Z_pair in
    pair mode and Z_group in group mode. Nonnegative up to rounding."""
    _same_support(prev, nxt)
    if mode == "pair":
        z0, z1 = z_pair(prev), z_pair(nxt)
    elif mode == "group":
        adj = adjacency_matrix(g, prev.vertices)
        z0, z1 = _z_group_x(prev.x, adj, eps), _z_group_x(nxt.x, adj, eps)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return z0 - z1 - 4.0 * displacement_sq_sum(prev, nxt)


def residual_ok(residual: float, z_before: float) -> bool:
    return residual >= -RESIDUAL_RTOL * max(1.0, z_before)


def max_edge_gap(s: OpinionState, edges: Iterable[Edge]) -> float:
    gaps = [distance(s[i], s[j]) for i, j in edges]
    return max(gaps, default=0.0)


def max_pairwise_gap(s: OpinionState) -> float:
    if s.n < 2:
        return 0.0
    return float(np.sqrt(_sq_dist_matrix(s.x).max()))


class MonitorSet:
    """Per-step monitor evaluation over a fixed vertex window."""

    def __init__(self, names: Iterable[str], g: SocialGraph, vertices: Sequence[int], eps: float, mode: str):
        self.names = tuple(names)
        self.eps = eps
        self.mode = mode
        need_adj = {"z_group", "residual"} & set(self.names)
        self.adj = adjacency_matrix(g, vertices) if need_adj else None
        self.ea, self.eb = _edge_positions(g, vertices) if "max_edge_gap" in self.names else (None, None)

    def _z(self, x: np.ndarray) -> float:
        return _z_pair_x(x) if self.mode == "pair" else _z_group_x(x, self.adj, self.eps)

    def values(self, x: np.ndarray, prev: np.ndarray | None) -> list[tuple[str, float]]:
        out = []
        for name in self.names:
            if name == "z_pair":
                out.append((name, _z_pair_x(x)))
            elif name == "z_group":
                out.append((name, _z_group_x(x, self.adj, self.eps)))
            elif name == "max_edge_gap":
                diff = x[self.ea] - x[self.eb]
                out.append((name, float(np.sqrt((diff * diff).sum(axis=1)).max(initial=0.0))))
            elif name == "max_pairwise_gap":
                out.append((name, float(np.sqrt(_sq_dist_matrix(x).max())) if len(x) > 1 else 0.0))
            elif prev is not None:
                dx = x - prev
                sq = (dx * dx).sum(axis=1)
                if name == "max_displacement":
                    out.append((name, float(np.sqrt(sq.max()))))
                elif name == "displacement_sq_sum":
                    out.append((name, float(sq.sum())))
                elif name == "residual":
                    out.append((name, self._z(prev) - self._z(x) - 4.0 * float(sq.sum())))
        return out


# --- step contracts -------------------------------------------------------------


@dataclass
class StepContext:
    """What is known about one step, and which contracts to evaluate.

    ``valid_before`` / ``valid_after`` restrict path and order checks to the
    exact region of a windowed run (default: every active vertex). ``alpha``
    is the common stubbornness alpha_t for ``regular_bound``.
    """

    graph: SocialGraph
    eps: float
    contracts: Sequence[str]
    mode: str = "group"
    t: int = 0
    alpha: float | None = None
    delta: float | None = None
    valid_before: Sequence[int] | None = None
    valid_after: Sequence[int] | None = None
    _margin: tuple[int, int] | None = field(default=None, repr=False)

    def margin(self) -> tuple[int, int]:
        if self._margin is None:
            self._margin = regularity_margin(self.graph)
        return self._margin


def _result(name: str, t: int, ok: bool, detail: str) -> dict:
    return {"contract": name, "t": t, "pass": bool(ok), "detail": detail}


def _profile_is_social(s: OpinionState, g: SocialGraph, vertices: Sequence[int], eps: float) -> tuple[bool, float]:
    worst = max_edge_gap(s, g.edges_within(vertices))
    return worst <= eps, worst


def _monotone_direction(vals: np.ndarray) -> str | None:
    d = np.diff(vals)
    if np.all(d >= 0):
        return "nondecreasing"
    if np.all(d <= 0):
        return "nonincreasing"
    return None


_PATH_FAMILIES = ("path", "bipath", "finite_path")


def check_step_contracts(prev: OpinionState, nxt: OpinionState, ctx: StepContext) -> list[dict]:
    """Evaluate the requested contracts for the step ``prev -> nxt``.

    A contract whose hypothesis fails at ``prev`` passes vacuously and says so
    in its detail string.
    """
    _same_support(prev, nxt)
    g, t = ctx.graph, ctx.t
    before = list(ctx.valid_before if ctx.valid_before is not None else prev.vertices)
    after = list(ctx.valid_after if ctx.valid_after is not None else nxt.vertices)
    out = []
    for name in ctx.contracts:
        if name == "profile_preserved":
            hyp, _ = _profile_is_social(prev, g, before, ctx.eps)
            if not hyp:
                out.append(_result(name, t, True, "hypothesis not met: profile != G at t"))
                continue
            ok, worst = _profile_is_social(nxt, g, after, ctx.eps)
            out.append(_result(name, t, ok, f"max edge gap at t+1 = {worst!r}, eps = {ctx.eps!r}"))
        elif name == "order_preserved":
            if prev.d != 1:
                raise ContractError("order contract needs one-dimensional opinions")
            if g.family not in _PATH_FAMILIES:
                raise ContractError(f"order contract needs a path, got {g.family!r}")
            x0 = np.array([prev[v][0] for v in before])
            direction = _monotone_direction(x0)
            hyp, _ = _profile_is_social(prev, g, before, ctx.eps)
            if direction is None or not hyp:
                out.append(_result(name, t, True, "hypothesis not met: not monotone or profile != G"))
                continue
            x1 = np.array([nxt[v][0] for v in after])
            d1 = np.diff(x1)
            ok = bool(np.all(d1 >= 0) if direction == "nondecreasing" else np.all(d1 <= 0))
            out.append(_result(name, t, ok, f"{direction} at t, preserved={ok}"))
        elif name == "regular_bound":
            if ctx.alpha is None:
                raise ContractError("regular_bound needs a common alpha_t")
            try:
                r, margin = ctx.margin()
            except GraphError as exc:
                raise ContractError(str(exc)) from None
            edges = g.edges_within(before)
            a0 = max_edge_gap(prev, edges)
            hyp = a0 <= ctx.eps
            if not hyp:
                out.append(_result(name, t, True, "hypothesis not met: profile != G"))
                continue
            a1 = max_edge_gap(nxt, g.edges_within(after))
            floor = BOUND_ULPS * np.finfo(float).eps * float(np.abs(prev.x).max(initial=0.0))
            bound = a0 / r * (r - margin * (1.0 - ctx.alpha)) + BOUND_RTOL * a0 + floor
            out.append(_result(name, t, a1 <= bound, f"A_t={a0!r} A_t+1={a1!r} bound={bound!r}"))
        elif name == "delta_trivial":
            if ctx.delta is None:
                raise ContractError("delta_trivial needs delta")
            sub0 = OpinionState(tuple(before), np.array([prev[v] for v in before]))
            if max_pairwise_gap(sub0) > ctx.delta:
                out.append(_result(name, t, True, "hypothesis not met: not delta-trivial at t"))
                continue
            sub1 = OpinionState(tuple(after), np.array([nxt[v] for v in after]))
            gap = max_pairwise_gap(sub1)
            out.append(_result(name, t, gap <= ctx.delta + DELTA_ATOL, f"max gap at t+1 = {gap!r}, delta = {ctx.delta!r}"))
        elif name == "supermartingale":
            z0 = z_pair(prev) if ctx.mode == "pair" else z_group(prev, g, ctx.eps)
            res = supermartingale_residual(prev, nxt, ctx.mode, g, ctx.eps)
            out.append(_result(name, t, residual_ok(res, z0), f"residual={res!r} Z(t)={z0!r}"))
        else:
            raise ContractError(f"unknown contract {name!r}")
    return out
