"""Running-maximum exceedance probabilities of fair ±1 random walks.

``prob(k, M)`` is the probability that a walk of k independent fair ±1
steps ever has a partial sum strictly greater than M.  Levels below -1
are exceeded with certainty and answered without storage; levels M >= k
are unreachable and answered as 0.  The table is filled by the level
recurrence P(k, M) = (P(k-1, M-1) + P(k-1, M+1)) / 2 for M >= 0, which
is a convex combination of values in [0, 1] and therefore forward
stable; values stay exact dyadic rationals up to the double-precision
mantissa width.
"""

from __future__ import annotations

import numpy as np


class TableRangeError(ValueError):
    """Queried walk length not covered by the table."""


class WalkTable:
    """Dense table of exceedance probabilities, immutable after build.

    ``values[k, j]`` holds the probability for walk length k and level
    M = j - 1, so column 0 is the always-exceeded level -1.
    """

    def __init__(self, max_k: int, values: np.ndarray):
        self.max_k = max_k
        self.values = values
        self.values.setflags(write=False)

    def prob(self, k: int, level: int) -> float:
        if not 0 <= k <= self.max_k:
            raise TableRangeError(f"walk length {k} outside table range 0..{self.max_k}")
        if level < 0:
            return 1.0
        if level >= k:
            return 0.0
        return float(self.values[k, level + 1])

    def rows(self):
        """Yield (k, M, p) for every stored meaningful entry."""
        for k in range(self.max_k + 1):
            for level in range(-1, k + 1):
                yield k, level, self.prob(k, level)


def build_walk_table(max_k: int) -> WalkTable:
    """Fill the table up to walk length ``max_k`` by the level recurrence."""
    if max_k < 0:
        raise ValueError("max_k must be non-negative")
    width = max_k + 2
    vals = np.zeros((max_k + 1, width), dtype=np.float64)
    vals[:, 0] = 1.0  # level -1 is exceeded by the empty walk already
    for k in range(1, max_k + 1):
        prev = vals[k - 1]
        cur = vals[k]
        cur[1 : width - 1] = 0.5 * (prev[: width - 2] + prev[2:])
        cur[width - 1] = 0.5 * prev[width - 2]
    return WalkTable(max_k, vals)


def p_max_exceed(table: WalkTable, k: int, level: int) -> float:
    """Probability that a k-step walk's running maximum exceeds ``level``."""
    return table.prob(k, level)
