"""Edge-gap decay on regular graphs against the per-step regularity bound.

Prints, per graph, the observed contraction A_{t+1}/A_t next to the predicted
factor [r - margin (1 - alpha_t)] / r while A_t is far above rounding level.
"""

import argparse

import numpy as np

from mixedhk.engine import InitialRule, WorldConfig, run
from mixedhk.graphs import cocktail_party, complete_graph, regularity_margin
from mixedhk.sampling import AlphaSchedule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    sched = AlphaSchedule("periodic", values=(0.9, 0.9, 0.9, 0.9, 0.2))
    for g in [complete_graph(n) for n in (3, 5, 8)] + [cocktail_party(3)]:
        r, margin = regularity_margin(g)
        cfg = WorldConfig(g, InitialRule("uniform_box", d=2), 1.5, "group", sched, g.vertices, args.steps,
                          seed=args.seed, monitors=("max_edge_gap",))
        _, A = run(cfg, record_draws=False).monitor("max_edge_gap")
        live = np.flatnonzero(A[:-1] > 1e-6)
        ratio = A[live + 1] / A[live]
        pred = np.array([(r - margin * (1 - sched.values[t % 5])) / r for t in live])
        print(f"{g.describe()}: r={r} margin={margin} A_T={A[-1]:.2e} "
              f"max(observed/predicted)={float((ratio / pred).max()):.6f} over {live.size} steps")


if __name__ == "__main__":
    main()
