"""Deliberately naive reference for one update on a finite dense instance.

No code is shared with :mod:`mixedhk.dynamics`: neighborhoods are found by
scanning every j, and arithmetic is done on Python floats. The neighborhood
sum starts at 0.0 and adds members in ascending index order, so agreement
with the vectorized step is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass
class DenseInstance:
    adjacency: Sequence[Sequence[bool]]
    opinions: Sequence[Sequence[float]]
    alpha: Sequence[float]
    eps: float
    matching: Sequence[tuple[int, int]] | None = None  # None means group mode

    def __post_init__(self):
        n = len(self.opinions)
        for i in range(n):
            if self.adjacency[i][i]:
                raise ValueError("adjacency must have a zero diagonal")
            for j in range(n):
                if bool(self.adjacency[i][j]) != bool(self.adjacency[j][i]):
                    raise ValueError("adjacency must be symmetric")


def naive_step(inst: DenseInstance) -> list[list[float]]:
    n = len(inst.opinions)
    d = len(inst.opinions[0]) if n else 0
    x = [[float(v) for v in row] for row in inst.opinions]

    if inst.matching is None:
        update = [[bool(inst.adjacency[i][j]) for j in range(n)] for i in range(n)]
    else:
        update = [[False] * n for _ in range(n)]
        for i, j in inst.matching:
            if inst.adjacency[i][j]:
                update[i][j] = update[j][i] = True

    new = []
    for i in range(n):
        acc = [0.0] * d
        count = 0
        for j in range(n):
            if j != i:
                if not update[i][j]:
                    continue
                sq = 0.0
                for c in range(d):
                    diff = x[i][c] - x[j][c]
                    sq += diff * diff
                if not math.sqrt(sq) <= inst.eps:
                    continue
            for c in range(d):
                acc[c] += x[j][c]
            count += 1
        a = float(inst.alpha[i])
        new.append([x[i][c] + (1.0 - a) * (acc[c] / count - x[i][c]) for c in range(d)])
    return new
