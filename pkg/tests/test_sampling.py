import math

import numpy as np
import pytest

from mixedhk.graphs import finite_path, is_matching
from mixedhk.sampling import (
    AlphaSchedule,
    MatchingSampler,
    constant,
    draw_alpha,
    draw_matching,
    hash_words,
    hash_words_array,
    preset,
    uniform,
    uniform_array,
)


def test_alpha_examples():
    assert draw_alpha(constant(0.0), 7, 123, seed=5) == 0.0
    per = AlphaSchedule("periodic", values=(0.9, 0.9, 0.9, 0.9, 0.2))
    assert draw_alpha(per, 3, 4, seed=0) == 0.2
    assert draw_alpha(per, 3, 9, seed=0) == 0.2
    u = AlphaSchedule("uniform01")
    assert draw_alpha(u, 11, 3, seed=9) == draw_alpha(u, 11, 3, seed=9)
    assert draw_alpha(u, 11, 3, seed=9) != draw_alpha(u, 11, 4, seed=9)


def test_scalar_and_array_hashes_agree():
    vs = np.array([-5, 0, 1, 2**40])
    arr = hash_words_array(3, 1, vs, 17)
    assert [int(h) for h in arr] == [hash_words(3, 1, int(v), 17) for v in vs]
    assert np.array_equal(uniform_array(3, 1, vs, 17), [uniform(3, 1, int(v), 17) for v in vs])


def test_draw_many_matches_draw():
    for sched in (AlphaSchedule("uniform01"), AlphaSchedule("two-point", a=0.2, b=1.0, p=0.3), AlphaSchedule("uniform", low=0.1, high=0.4)):
        vs = list(range(-3, 20))
        many = sched.draw_many(42, vs, 8)
        assert many.tolist() == [sched.draw(42, v, 8) for v in vs]
        assert np.all((many >= 0) & (many <= 1))


def test_two_point_frequency():
    s = AlphaSchedule("two-point", a=0.0, b=1.0, p=0.3)
    draws = s.draw_many(1, list(range(20000)), 0)
    frac = float(np.mean(draws == 0.0))
    sigma = math.sqrt(0.3 * 0.7 / 20000)
    assert abs(frac - 0.3) < 3 * sigma


def test_per_pair_constant_gives_equal_rates():
    s = AlphaSchedule("per-pair-constant", base=AlphaSchedule("uniform01"))
    a, b = s.draw_pair(5, 7, 3, 11)
    assert a == b
    assert s.draw_pair(5, 3, 7, 11) == (a, b)
    with pytest.raises(ValueError):
        s.draw(5, 3, 11)


def test_alpha_validation():
    with pytest.raises(ValueError):
        AlphaSchedule("constant", value=1.5)
    with pytest.raises(ValueError):
        AlphaSchedule("periodic")
    with pytest.raises(ValueError):
        AlphaSchedule("bogus")
    d = AlphaSchedule("per-pair-constant", base=AlphaSchedule("periodic", values=(0.5, 1.0))).to_dict()
    assert AlphaSchedule.from_dict(d).to_dict() == d


def test_single_uniform_edge_frequency():
    """Finite path 1-2-3: each edge with probability 1/2 over 10^4 seeds."""
    g, ms = finite_path(3), MatchingSampler("single-uniform-edge")
    n = 10_000
    hits = sum(draw_matching(ms, g, g.vertices, 0, seed) == ((1, 2),) for seed in range(n))
    assert abs(hits - n / 2) <= 3 * math.sqrt(n / 4)


def test_single_uniform_edge_needs_edges():
    with pytest.raises(ValueError):
        MatchingSampler("single-uniform-edge").draw([], 0, 0)


def test_fixed_cycle():
    ms = MatchingSampler("fixed-cycle", (((1, 2),), ((2, 3),)))
    g = finite_path(3)
    assert draw_matching(ms, g, g.vertices, 3, 0) == ((2, 3),)
    assert draw_matching(ms, g, g.vertices, 0, 0) == ((1, 2),)
    with pytest.raises(ValueError):
        MatchingSampler("fixed-cycle", (((1, 2), (2, 3)),))


@pytest.mark.parametrize("seed", range(30))
def test_random_maximal_matching_is_maximal(seed):
    rng = np.random.default_rng(seed)
    n = 15
    edges = sorted({(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < 0.3})
    m = MatchingSampler("random-maximal-matching").draw(edges, int(rng.integers(0, 100)), seed)
    assert is_matching(m) and set(m) <= set(edges)
    covered = {v for e in m for v in e}
    assert all(i in covered or j in covered for i, j in edges)


def test_agent_selection_is_uniform_over_window():
    ms = MatchingSampler("single-uniform-agent")
    window = (1, 2, 3, 4)
    counts = np.zeros(4)
    for t in range(8000):
        (v,) = ms.select(window, t, 3)
        counts[v - 1] += 1
    assert np.all(np.abs(counts - 2000) < 3 * math.sqrt(8000 * 0.25 * 0.75))


def test_presets():
    p = preset("synchronous_hk")
    assert p.mode == "group" and p.alpha.value == 0.0 and p.sampler is None
    p = preset("asynchronous_hk")
    assert p.mode == "group" and p.sampler.selects_agents
    p = preset("deffuant", 0.25)
    assert p.mode == "pair" and p.alpha.value == 0.5 and p.sampler.kind == "single-uniform-edge"
    for mu in (0.0, 0.6, None):
        with pytest.raises(ValueError):
            preset("deffuant", mu)
