"""Randomized property suites over many seeded instances.

Each suite returns a :class:`SuiteResult`; the CLI exposes them as scenarios
of kind ``randomized`` and the acceptance tests call them directly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import monitors as mon
from .dynamics import OpinionState, deffuant_step, step_group, step_pair
from .engine import InitialRule, WorldConfig, run
from .graphs import BiInfinitePath, Circulant, HalfInfinitePath, ball, complete_graph, finite_path
from .instances import random_graph, random_instance, random_vertex_alpha
from .oracle import DenseInstance, naive_step
from .sampling import AlphaSchedule, MatchingSampler, constant, preset


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[dict] = field(default_factory=list)
    elapsed: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.cases > 0 and not self.failures

    def fail(self, **info) -> None:
        self.failures.append(info)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = " ".join(f"{k}={v}" for k, v in self.stats.items())
        return f"{status} {self.name}: {self.cases} cases, {len(self.failures)} failures, {self.elapsed:.2f}s {extra}".rstrip()

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "pass": self.passed,
            "cases": self.cases,
            "failures": self.failures[:20],
            "elapsed": round(self.elapsed, 3),
            "stats": self.stats,
        }


class _timed:
    def __init__(self, res: SuiteResult):
        self.res = res

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.res

    def __exit__(self, *exc):
        self.res.elapsed = time.perf_counter() - self.t0


def supermartingale_suite(trials: int = 500, seed: int = 1, steps: int = 20) -> SuiteResult:
    """Z(t) - Z(t+1) >= 4 sum |dx|^2 (up to 1e-9 max(1, Z)) on every step of
    ``trials`` random finite instances per mode."""
    res = SuiteResult("supermartingale")
    worst = 0.0
    with _timed(res):
        for mode in ("group", "pair"):
            zname = "z_group" if mode == "group" else "z_pair"
            rng = np.random.default_rng([seed, 0 if mode == "group" else 1])
            for k in range(trials):
                cfg = random_instance(rng, mode, steps, monitors=(zname, "residual"))
                tr = run(cfg, record_draws=False)
                _, z = tr.monitor(zname)
                _, r = tr.monitor("residual")
                rel = r / np.maximum(1.0, z[:-1])
                worst = min(worst, float(rel.min()))
                bad = np.flatnonzero(rel < -mon.RESIDUAL_RTOL)
                if bad.size:
                    res.fail(mode=mode, trial=k, t=int(bad[0]), residual=float(r[bad[0]]), z=float(z[bad[0]]))
                res.cases += 1
        # two agents, midpoint step: equality case of the inequality
        s0 = OpinionState((1, 2), np.array([[0.0], [1.0]]))
        s1 = deffuant_step(s0, (1, 2), 0.5, 1.0)
        tight = mon.supermartingale_residual(s0, s1, "pair", complete_graph(2), 1.0)
        res.cases += 1
        if abs(tight) > 1e-12:
            res.fail(case="two-agent tightness", residual=tight)
    res.stats = {"worst_rel_residual": worst, "tight_residual": tight}
    return res


def displacement_instances(trials: int = 100, seed: int = 1, horizon: int = 2000) -> list[WorldConfig]:
    """Supermartingale-suite pair instances on connected graphs with the
    single-uniform-edge sampler."""
    rng = np.random.default_rng([seed, 1])
    return [random_instance(rng, "pair", horizon, connected=True, sampler="single-uniform-edge") for _ in range(trials)]


def last_displacement(cfg: WorldConfig) -> float:
    tr = run(cfg, record_draws=False)
    return float(np.sqrt(((tr.x[-1] - tr.x[-2]) ** 2).sum(axis=1)).max())


def displacement_suite(trials: int = 100, seed: int = 1, horizon: int = 2000, tol: float = 1e-6) -> SuiteResult:
    """Pair mode on connected random graphs, single-uniform-edge sampler:
    the last-step displacement max_i |x_i(T) - x_i(T-1)| is below ``tol``."""
    res = SuiteResult("vanishing_displacement")
    worst = 0.0
    with _timed(res):
        for k, cfg in enumerate(displacement_instances(trials, seed, horizon)):
            disp = last_displacement(cfg)
            worst = max(worst, disp)
            if not disp < tol:
                res.fail(trial=k, displacement=disp, n=len(cfg.targets))
            res.cases += 1
    res.stats = {"worst_displacement": worst}
    return res


def thm3_config(rng: np.random.Generator, n: int, seed: int) -> WorldConfig:
    g = random_graph(rng, n, float(rng.uniform(0.1, 0.4)), connected=True)
    d = int(rng.integers(1, 4))
    n_edges = len(g.edges_within(g.vertices))
    return WorldConfig(
        graph=g,
        initial=InitialRule("uniform_box", d=d),
        epsilon=float(np.sqrt(d)),  # unit box is eps-trivial, so every edge stays in threshold
        mode="pair",
        alpha=AlphaSchedule("per-pair-constant", base=AlphaSchedule("two-point", a=0.8, b=1.0, p=0.5)),
        sampler=MatchingSampler("single-uniform-edge"),
        targets=tuple(g.vertices),
        horizon=200 * n * n_edges,
        seed=seed,
    )


def consensus_suite(sizes=(4, 8, 12, 16, 20), seed: int = 42, tol: float = 1e-4) -> SuiteResult:
    """Connected graphs under pair interaction reach consensus: max pairwise
    gap below ``tol`` at T = 200 n |E|."""
    res = SuiteResult("pair_consensus")
    rng = np.random.default_rng(seed)
    gaps = []
    with _timed(res):
        for n in sizes:
            cfg = thm3_config(rng, n, seed)
            tr = run(cfg, record_draws=False)
            gap = mon.max_pairwise_gap(OpinionState(cfg.targets, tr.x[-1]))
            gaps.append(gap)
            if not gap < tol:
                res.fail(n=n, horizon=cfg.horizon, gap=gap)
            res.cases += 1
    res.stats = {"max_gap": max(gaps)}
    return res


def _monotone_values(rng: np.random.Generator, count: int, eps: float) -> np.ndarray:
    steps = rng.uniform(0.0, 0.95 * eps, size=count - 1)
    vals = rng.uniform(-1, 1) + np.concatenate([[0.0], np.cumsum(steps)])
    return vals if rng.random() < 0.5 else vals[::-1]


def path_order_suite(trials: int = 200, seed: int = 1, steps: int = 20) -> SuiteResult:
    """Paths with profile = G and monotone opinions keep both properties
    on the exact region, for random stubbornness."""
    res = SuiteResult("path_order")
    rng = np.random.default_rng([seed, 3])
    with _timed(res):
        for k in range(trials):
            eps = float(rng.uniform(0.05, 1.0))
            family = ("finite_path", "path", "bipath")[k % 3]
            if family == "finite_path":
                g = finite_path(int(rng.integers(2, 51)))
                targets = tuple(g.vertices)
            else:
                g = HalfInfinitePath() if family == "path" else BiInfinitePath()
                lo = int(rng.integers(1, 30)) if family == "path" else int(rng.integers(-30, 30))
                targets = tuple(range(lo, lo + int(rng.integers(1, 6))))
            window = sorted(ball(g, targets, steps))
            vals = _monotone_values(rng, len(window), eps)
            cfg = WorldConfig(
                graph=g,
                initial=InitialRule("explicit", values={v: (float(x),) for v, x in zip(window, vals)}),
                epsilon=eps,
                mode="group",
                alpha=random_vertex_alpha(rng) if rng.random() < 0.5 else AlphaSchedule("uniform01"),
                targets=targets,
                horizon=steps,
                seed=int(rng.integers(0, 2**63)),
            )
            problems = []

            def observe(prev, nxt):
                ctx = mon.StepContext(
                    g, eps, ("profile_preserved", "order_preserved"), t=prev.t,
                    valid_before=prev.valid_vertices(), valid_after=nxt.valid_vertices(),
                )
                for r in mon.check_step_contracts(prev.state, nxt.state, ctx):
                    if not r["pass"] or r["detail"].startswith("hypothesis"):
                        problems.append(r)

            run(cfg, observer=observe, record_draws=False)
            if problems:
                res.fail(trial=k, family=family, first=problems[0])
            res.cases += 1
    return res


def regular_suite(horizon: int = 500, seed: int = 1, decay_tol: float = 1e-8, rounding_slack: bool = False) -> SuiteResult:
    """K_n (n = 3..8) and K_{3x2} under a shared periodic alpha_t: profile
    stays complete, the per-step gap bound holds, and A_T < decay_tol.

    With ``rounding_slack`` the bound gets the contract's float-resolution
    slack; without it the tolerance is the bare 1e-12 A_t.
    """
    from .graphs import cocktail_party, regularity_margin

    res = SuiteResult("regular_decay" + ("_rounding_aware" if rounding_slack else ""))
    sched = AlphaSchedule("periodic", values=(0.9, 0.9, 0.9, 0.9, 0.2))
    worst_excess = 0.0
    with _timed(res):
        for g in [complete_graph(n) for n in range(3, 9)] + [cocktail_party(3)]:
            r, margin = regularity_margin(g)
            cfg = WorldConfig(
                graph=g, initial=InitialRule("uniform_box", d=2), epsilon=1.5, mode="group",
                alpha=sched, targets=tuple(g.vertices), horizon=horizon, seed=seed,
                monitors=("max_edge_gap",),
            )
            tr = run(cfg, keep_states=True, record_draws=False)
            _, A = tr.monitor("max_edge_gap")
            first_bad = None
            for t in range(horizon):
                a_t = sched.values[t % len(sched.values)]
                bound = A[t] / r * (r - margin * (1.0 - a_t)) + mon.BOUND_RTOL * A[t]
                if rounding_slack:
                    bound += mon.BOUND_ULPS * np.finfo(float).eps * np.abs(tr.states[t]).max()
                worst_excess = max(worst_excess, A[t + 1] - bound)
                if A[t + 1] > bound and first_bad is None:
                    first_bad = (t, float(A[t]), float(A[t + 1]), float(bound))
                if A[t + 1] > cfg.epsilon:
                    res.fail(graph=g.describe(), t=t, reason="profile no longer complete")
                    break
            if first_bad is not None:
                res.fail(graph=g.describe(), reason="per-step bound", t=first_bad[0], A_t=first_bad[1],
                         A_next=first_bad[2], bound=first_bad[3])
            if not A[-1] < decay_tol:
                res.fail(graph=g.describe(), reason="no decay", A_T=float(A[-1]))
            res.cases += 1
    res.stats = {"worst_bound_excess": worst_excess}
    return res


def oracle_suite(trials: int = 100, seed: int = 1, steps: int = 20) -> SuiteResult:
    """Engine trajectories equal repeated naive_step bit for bit."""
    res = SuiteResult("oracle_equivalence")
    rng = np.random.default_rng([seed, 4])
    with _timed(res):
        for k in range(trials):
            mode = ("group", "pair")[k % 2]
            cfg = random_instance(rng, mode, steps)
            tr = run(cfg, keep_states=True)
            vs = tr.window
            pos = {v: i for i, v in enumerate(vs)}
            adj = mon.adjacency_matrix(cfg.graph, vs).tolist()
            x = tr.states[0].tolist()
            for t in range(steps):
                m = None if mode == "group" else [(pos[i], pos[j]) for i, j in tr.matchings[t]]
                x = naive_step(DenseInstance(adj, x, tr.alphas[t].tolist(), cfg.epsilon, m))
                if not np.array_equal(np.array(x), tr.states[t + 1]):
                    res.fail(trial=k, mode=mode, t=t)
                    break
            res.cases += 1
    return res


def light_cone_suite(trials: int = 100, seed: int = 1, extra: int = 10) -> SuiteResult:
    """Target trajectories from ball(targets, T) and ball(targets, T + extra)
    are bitwise identical."""
    res = SuiteResult("light_cone")
    rng = np.random.default_rng([seed, 5])
    with _timed(res):
        for k in range(trials):
            family = ("path", "bipath", "circulant")[k % 3]
            g = {"path": HalfInfinitePath(), "bipath": BiInfinitePath()}.get(family) or Circulant(int(rng.integers(1, 4)))
            lo = int(rng.integers(1, 20)) if family == "path" else int(rng.integers(-20, 20))
            targets = tuple(range(lo, lo + int(rng.integers(1, 5))))
            horizon = int(rng.integers(0, 25))
            d = int(rng.integers(1, 4))
            init = InitialRule("uniform_box", d=d, low=-1.0, high=1.0) if rng.random() < 0.7 else InitialRule("identity")
            if init.kind == "identity":
                d = 1
            eps = float(rng.uniform(0.1, 2.0) * np.sqrt(d))
            if rng.random() < 0.7:
                mode, alpha, sampler = "group", random_vertex_alpha(rng), None
            else:
                # fixed matchings are vertex-keyed, hence window-independent
                cover = sorted(ball(g, targets, horizon + extra))
                es = g.edges_within(cover)
                ms = []
                for _ in range(int(rng.integers(1, 4))):
                    used, m = set(), []
                    for e in rng.permutation(len(es)):
                        i, j = es[e]
                        if i not in used and j not in used and rng.random() < 0.6:
                            used.update((i, j))
                            m.append((i, j))
                    ms.append(tuple(m) or (es[0],))
                mode, alpha, sampler = "pair", AlphaSchedule("per-pair-constant", base=random_vertex_alpha(rng)), MatchingSampler("fixed-cycle", tuple(ms))
            cfg = WorldConfig(
                graph=g, initial=init, epsilon=eps, mode=mode, alpha=alpha, sampler=sampler,
                targets=targets, horizon=horizon, seed=int(rng.integers(0, 2**63)),
            )
            a = run(cfg, record_draws=False)
            b = run(cfg, extra_radius=extra, record_draws=False)
            if not (np.array_equal(a.x, b.x) and a.x.tobytes() == b.x.tobytes()):
                res.fail(trial=k, family=family, mode=mode)
            res.cases += 1
    return res


def delta_trivial_suite(trials: int = 200, seed: int = 1) -> SuiteResult:
    """On a complete social graph, a delta-trivial state with delta <= eps
    stays delta-trivial after one step of either mode."""
    res = SuiteResult("delta_trivial")
    rng = np.random.default_rng([seed, 6])
    with _timed(res):
        for k in range(trials):
            n, d = int(rng.integers(2, 30)), int(rng.integers(1, 4))
            g = complete_graph(n)
            x = rng.uniform(-1, 1, size=(n, d))
            s = OpinionState(tuple(range(1, n + 1)), x)
            delta = mon.max_pairwise_gap(s)
            eps = delta * float(rng.uniform(1.0, 2.0))
            alpha = {v: float(a) for v, a in zip(s.vertices, rng.uniform(0, 1, size=n))}
            if k % 2 == 0:
                nxt = step_group(s, g, alpha, eps)
            else:
                perm = [int(v) for v in rng.permutation(s.vertices)]
                m = [(perm[i], perm[i + 1]) for i in range(0, n - 1, 2) if rng.random() < 0.7]
                a = {v: alpha[min(e)] for e in m for v in e}  # equal rate per pair
                nxt = step_pair(s, g, m, a, eps)
            gap = mon.max_pairwise_gap(nxt)
            if gap > delta + mon.DELTA_ATOL:
                res.fail(trial=k, delta=delta, gap=gap)
            res.cases += 1
    return res


def preset_suite(trials: int = 100, seed: int = 1) -> SuiteResult:
    """Deffuant preset equals step_pair with alpha = 1 - 2 mu; synchronous HK
    preset equals step_group with alpha = 0. Bitwise."""
    res = SuiteResult("preset_equivalence")
    rng = np.random.default_rng([seed, 7])
    with _timed(res):
        for k in range(trials):
            n, d = int(rng.integers(2, 25)), int(rng.integers(1, 4))
            g = random_graph(rng, n, float(rng.uniform(0.2, 0.8)), connected=True)
            x = rng.uniform(0, 1, size=(n, d))
            s = OpinionState(tuple(g.vertices), x)
            eps = float(rng.uniform(0.2, 1.5))
            mu = float(rng.uniform(1e-3, 0.5))
            steps = 10
            p = preset("deffuant", mu)
            cfg = WorldConfig(
                graph=g, initial=InitialRule("explicit", values={v: tuple(x[v - 1]) for v in g.vertices}),
                epsilon=eps, mode=p.mode, alpha=p.alpha, sampler=p.sampler, targets=tuple(g.vertices),
                horizon=steps, seed=int(rng.integers(0, 2**63)),
            )
            tr = run(cfg, keep_states=True)
            cur, cur_d = s, s
            ok = True
            for t in range(steps):
                m = tr.matchings[t]
                a = 1.0 - 2.0 * mu
                cur = step_pair(cur, g, m, {v: a for e in m for v in e}, eps)
                cur_d = deffuant_step(cur_d, m[0], mu, eps, g)
                ok &= np.array_equal(cur.x, tr.states[t + 1]) and np.array_equal(cur_d.x, cur.x)
            p = preset("synchronous_hk")
            sync = run(cfg.replace(mode=p.mode, alpha=p.alpha, sampler=p.sampler), keep_states=True)
            cur = s
            for t in range(steps):
                cur = step_group(cur, g, np.zeros(n), eps)
                ok &= np.array_equal(cur.x, sync.states[t + 1])
            if not ok:
                res.fail(trial=k)
            res.cases += 1
    return res


SUITES = {
    "supermartingale": supermartingale_suite,
    "vanishing_displacement": displacement_suite,
    "pair_consensus": consensus_suite,
    "path_order": path_order_suite,
    "regular_decay": regular_suite,
    "oracle_equivalence": oracle_suite,
    "light_cone": light_cone_suite,
    "delta_trivial": delta_trivial_suite,
    "preset_equivalence": preset_suite,
}
