"""Synchronous HK on the half-infinite path from x_i(0) = 1/i.

Prints x_1..x_k at a few times and the largest last-step increment, so the
limit behaviour of the first agents can be read off directly.
"""

import argparse

import numpy as np

from mixedhk.engine import InitialRule, WorldConfig, run
from mixedhk.graphs import HalfInfinitePath
from mixedhk.sampling import constant


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=300)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--show", type=int, default=5, help="number of leading agents to print")
    args = ap.parse_args()

    cfg = WorldConfig(HalfInfinitePath(), InitialRule("harmonic"), args.eps, "group", constant(0.0),
                      tuple(range(1, args.show + 1)), args.steps)
    tr = run(cfg)
    x = tr.x[:, :, 0]
    marks = sorted({0, 1, 2, 5, 10, 50, 100, args.steps} & set(range(args.steps + 1)))
    print("t      " + "  ".join(f"x_{i:<8d}" for i in range(1, args.show + 1)))
    for t in marks:
        print(f"{t:<6d} " + "  ".join(f"{v:.8f}" for v in x[t]))
    if args.steps:
        print(f"max |x_i(T) - x_i(T-1)| = {np.abs(x[-1] - x[-2]).max():.3e}")
    print(f"x_1 nonincreasing: {bool(np.all(np.diff(x[:, 0]) <= 0))}")


if __name__ == "__main__":
    main()
