"""Seed sweep for pair gossip on connected random graphs.

For each seed, runs single-uniform-edge pair dynamics from an eps-trivial start
and reports the first step at which the max pairwise gap drops below --tol.
"""

import argparse

import numpy as np

from mixedhk.engine import run
from mixedhk.suites import thm3_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--tol", type=float, default=1e-4)
    args = ap.parse_args()

    hits = []
    print("seed  |E|   T_budget  first_t_below_tol")
    for seed in range(args.seeds):
        cfg = thm3_config(np.random.default_rng(seed), args.n, seed)
        cfg = cfg.replace(monitors=("max_pairwise_gap",))
        ts, gap = run(cfg, record_draws=False).monitor("max_pairwise_gap")
        below = np.flatnonzero(gap < args.tol)
        first = int(ts[below[0]]) if below.size else None
        hits.append(first)
        n_edges = len(cfg.graph.edges_within(cfg.graph.vertices))
        print(f"{seed:<5d} {n_edges:<5d} {cfg.horizon:<9d} {first}")
    done = [h for h in hits if h is not None]
    print(f"converged {len(done)}/{len(hits)}; median first time {np.median(done) if done else float('nan'):.0f}")


if __name__ == "__main__":
    main()
