import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from mixedhk.dynamics import (
    DynamicsError,
    OpinionState,
    deffuant_step,
    opinion_edges,
    profile,
    step_group,
    step_pair,
)
from mixedhk.graphs import BiInfinitePath, FiniteGraph, complete_graph, finite_path
from mixedhk.oracle import DenseInstance, naive_step


def state(*vals):
    return OpinionState(tuple(range(1, len(vals) + 1)), np.array(vals, dtype=float)[:, None])


def test_threshold_is_inclusive():
    eps = 0.3
    s = OpinionState((1, 2), np.array([[0.0], [eps]]))
    assert opinion_edges(s, eps, [(1, 2)]) == {(1, 2)}
    assert opinion_edges(state(0.7, 0.7), 0.0, [(1, 2)]) == {(1, 2)}
    s = OpinionState((1, 2), np.array([[0.0], [eps * (1 + 1e-9)]]))
    assert opinion_edges(s, eps, [(1, 2)]) == frozenset()


def test_profile_examples():
    g = finite_path(3)
    assert profile(g, [(1, 2), (2, 3)], state(0, 0.4, 0.9), 0.5) == {(1, 2), (2, 3)}
    assert profile(g, [(1, 2), (2, 3)], state(0, 0.4, 1.5), 0.5) == {(1, 2)}
    assert profile(g, [(1, 2), (2, 3)], state(0, 0.1, 0.2), 1.0) == {(1, 2), (2, 3)}


def test_step_group_path_example():
    out = step_group(state(0, 0.5, 1), finite_path(3), np.zeros(3), 1.0)
    assert out.x[:, 0].tolist() == [0.25, 0.5, 0.75]


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.77, 1.0])
def test_counterexample_fixed_point(alpha):
    vs = tuple(range(-10, 11))
    s = OpinionState(vs, np.array(vs, dtype=float)[:, None])
    out = step_group(s, BiInfinitePath(), np.full(len(vs), alpha), 1.0)
    # boundary vertices -10 and 10 see a one-sided window
    assert np.array_equal(out.x[1:-1], s.x[1:-1])


def test_stubborn_agents_do_not_move():
    s = state(0, 0.5, 1)
    assert np.array_equal(step_group(s, finite_path(3), np.ones(3), 1.0).x, s.x)
    assert np.array_equal(step_pair(s, finite_path(3), [(1, 2)], {1: 1.0, 2: 1.0}, 1.0).x, s.x)


def test_step_group_requires_alpha_everywhere():
    with pytest.raises(DynamicsError):
        step_group(state(0, 1), finite_path(2), {1: 0.0}, 1.0)


def test_step_pair_examples():
    g = finite_path(2)
    assert step_pair(state(0, 1), g, [(1, 2)], {1: 0.0, 2: 0.0}, 1.0).x[:, 0].tolist() == [0.5, 0.5]
    assert step_pair(state(0, 1), g, [(1, 2)], {1: 0.5, 2: 0.5}, 1.0).x[:, 0].tolist() == [0.25, 0.75]
    assert step_pair(state(0, 1), g, [(1, 2)], {1: 0.0, 2: 0.0}, 0.5).x[:, 0].tolist() == [0.0, 1.0]


def test_step_pair_one_stubborn_endpoint():
    out = step_pair(state(0, 1), finite_path(2), [(1, 2)], {1: 1.0, 2: 0.0}, 1.0)
    assert out.x[:, 0].tolist() == [0.0, 0.5]


def test_step_pair_rejects_non_matching():
    with pytest.raises(DynamicsError):
        step_pair(state(0, 1, 2), finite_path(3), [(1, 2), (2, 3)], {1: 0.0, 2: 0.0, 3: 0.0}, 1.0)


def test_non_social_pairs_are_ignored():
    s = state(0, 0.5, 1)
    assert np.array_equal(step_pair(s, finite_path(3), [(1, 3)], {1: 0.0, 3: 0.0}, 2.0).x, s.x)


def test_deffuant_examples():
    assert deffuant_step(state(0, 1), (1, 2), 0.5, 1.0).x[:, 0].tolist() == [0.5, 0.5]
    assert deffuant_step(state(0, 1), (1, 2), 0.25, 2.0).x[:, 0].tolist() == [0.25, 0.75]
    for mu in (0.0, 0.51, -1.0):
        with pytest.raises(DynamicsError):
            deffuant_step(state(0, 1), (1, 2), mu, 1.0)


def test_state_validation():
    with pytest.raises(DynamicsError):
        OpinionState((2, 1), np.zeros((2, 1)))
    with pytest.raises(DynamicsError):
        OpinionState((1, 2), np.array([[0.0], [np.nan]]))
    with pytest.raises(DynamicsError):
        state(0, 1)[3]


def test_oracle_examples():
    adj = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    assert naive_step(DenseInstance(adj, [[0.0], [0.5], [1.0]], [0.0] * 3, 1.0)) == [[0.25], [0.5], [0.75]]
    x = [[0.1], [0.9], [0.3]]
    assert naive_step(DenseInstance(adj, x, [1.0] * 3, 1.0)) == x


# --- properties -----------------------------------------------------------------

opinions = st.integers(2, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.integers(1, 3).flatmap(lambda d: hnp.arrays(np.float64, (n, d), elements=st.floats(-5, 5))),
    )
)


def _random_graph(n, bits):
    adj = {v: [] for v in range(1, n + 1)}
    k = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if bits >> (k % 60) & 1:
                adj[i].append(j)
                adj[j].append(i)
            k += 1
    return FiniteGraph({v: tuple(nb) for v, nb in adj.items()})


@settings(max_examples=150, deadline=None)
@given(opinions, st.integers(0, 2**60), st.floats(0, 4), st.lists(st.floats(0, 1), min_size=12, max_size=12))
def test_group_step_convexity(nx, bits, eps, alphas):
    n, x = nx
    g = _random_graph(n, bits)
    s = OpinionState(tuple(range(1, n + 1)), x)
    out = step_group(s, g, np.array(alphas[:n]), eps)
    for k, v in enumerate(s.vertices):
        nb = [u for u in g.closed_neighborhood(v) if np.sqrt(((s[u] - s[v]) ** 2).sum()) <= eps]
        lo, hi = x[[u - 1 for u in nb]].min(axis=0), x[[u - 1 for u in nb]].max(axis=0)
        tol = 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(x).max())
        assert np.all(out.x[k] >= lo - tol) and np.all(out.x[k] <= hi + tol)
    # global per-coordinate bounds never expand
    assert np.all(out.x.min(axis=0) >= x.min(axis=0) - 1e-12) and np.all(out.x.max(axis=0) <= x.max(axis=0) + 1e-12)


@settings(max_examples=200)
@given(hnp.arrays(np.float64, (2, 3), elements=st.floats(-1e3, 1e3)), st.floats(0, 1))
def test_pair_conservation(x, a):
    s = OpinionState((1, 2), x)
    out = step_pair(s, finite_path(2), [(1, 2)], {1: a, 2: a}, 1e9)
    before, after = x.sum(axis=0), out.x.sum(axis=0)
    ulp = np.spacing(np.maximum(np.abs(x).max(axis=0), 1e-300))
    assert np.all(np.abs(after - before) <= 2 * ulp)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.floats(-100, 100), st.floats(0, 1), st.integers(0, 2**60))
def test_uniform_state_is_fixed(n, c, a, bits):
    g = _random_graph(n, bits)
    s = OpinionState(tuple(range(1, n + 1)), np.full((n, 2), c))
    out = step_group(s, g, np.full(n, a), 0.0)
    # the neighborhood sum divided by its size may round away from c by an ulp
    assert np.all(np.abs(out.x - c) <= 4 * np.spacing(abs(c)))
    m = [(1, 2)] if g.adjacent(1, 2) else []
    assert np.array_equal(step_pair(s, g, m, {1: a, 2: a}, 0.0).x, s.x)


@settings(max_examples=100, deadline=None)
@given(opinions, st.integers(0, 2**60), st.floats(0, 3))
def test_profile_containment(nx, bits, eps):
    n, x = nx
    g = _random_graph(n, bits)
    s = OpinionState(tuple(range(1, n + 1)), x)
    cand = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    p = profile(g, cand, s, eps)
    assert all(g.adjacent(*e) for e in p)
    assert p <= opinion_edges(s, eps, cand)


@settings(max_examples=100, deadline=None)
@given(opinions, st.integers(0, 2**60), st.floats(0.01, 3))
def test_group_step_agrees_with_oracle(nx, bits, eps):
    n, x = nx
    assume(np.all(np.isfinite(x)))
    g = _random_graph(n, bits)
    s = OpinionState(tuple(range(1, n + 1)), x)
    alpha = np.linspace(0, 1, n)
    adj = [[int(g.adjacent(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]
    ref = naive_step(DenseInstance(adj, x.tolist(), alpha.tolist(), eps))
    assert np.array_equal(step_group(s, g, alpha, eps).x, np.array(ref))


def test_delta_triviality_example():
    g = complete_graph(4)
    s = state(0.0, 0.2, 0.3, 0.5)
    out = step_group(s, g, np.array([0.1, 0.5, 0.9, 0.0]), 0.5)
    gap = out.x.max() - out.x.min()
    assert gap <= 0.5 + 1e-12
