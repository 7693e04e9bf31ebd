"""Random-graph and random-play references for the perfect-play results.

Both samplers are seeded through ``numpy``'s SeedSequence with the
sample index as spawn key, so any recorded (seed, samples) pair
reproduces the statistics exactly, in any order of evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .game import GameConfig, edge_count

GENERATOR_NAME = "numpy-pcg64"


@dataclass(frozen=True)
class BaselineStats:
    """Summary of max-degree samples from one baseline experiment."""

    kind: str
    n: int
    q: Optional[int]
    m: Optional[int]
    samples: int
    mean: float
    stddev: float
    minimum: int
    maximum: int
    seed: int
    generator: str = GENERATOR_NAME

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "q": self.q,
            "m": self.m,
            "samples": self.samples,
            "mean": self.mean,
            "stddev": self.stddev,
            "min": self.minimum,
            "max": self.maximum,
            "seed": self.seed,
            "generator": self.generator,
        }


def _sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _stats(kind: str, n: int, q, m, values, seed: int) -> BaselineStats:
    arr = np.asarray(values, dtype=np.float64)
    return BaselineStats(
        kind=kind,
        n=n,
        q=q,
        m=m,
        samples=len(values),
        mean=float(arr.mean()),
        stddev=float(arr.std()),
        minimum=int(arr.min()),
        maximum=int(arr.max()),
        seed=seed,
    )


def gnm_max_degree(n: int, m: int, seed: int, samples: int) -> BaselineStats:
    """Max degree of uniformly random m-edge graphs on n vertices."""
    total = edge_count(n)
    if not 0 <= m <= total:
        raise ValueError(f"m must lie in [0, {total}], got {m}")
    us, vs = np.triu_indices(n, k=1)
    values = []
    for i in range(samples):
        rng = _sample_rng(seed, i)
        if m == 0:
            values.append(0)
            continue
        ids = rng.choice(total, size=m, replace=False)
        deg = np.bincount(us[ids], minlength=n) + np.bincount(vs[ids], minlength=n)
        values.append(int(deg.max()))
    return _stats("gnm", n, None, m, values, seed)


def random_play(config: GameConfig, seed: int, samples: int) -> BaselineStats:
    """Client max degree when the waiter offers random (q+1)-subsets of
    the free edges and the client keeps a uniform element.

    Sampling without replacement round by round is the same as chunking
    one uniform permutation of the edges, which is what is done here;
    the leftover chunk shorter than q+1 is the waiter's final sweep.
    """
    n, q = config.n, config.q
    total = edge_count(n)
    q1 = q + 1
    rounds = total // q1
    us, vs = np.triu_indices(n, k=1)
    values = []
    for i in range(samples):
        rng = _sample_rng(seed, i)
        if rounds == 0:
            values.append(0)
            continue
        perm = rng.permutation(total)
        chunks = perm[: rounds * q1].reshape(rounds, q1)
        picks = rng.integers(0, q1, size=rounds)
        client = chunks[np.arange(rounds), picks]
        deg = np.bincount(us[client], minlength=n) + np.bincount(vs[client], minlength=n)
        values.append(int(deg.max()))
    return _stats("randomplay", n, q, None, values, seed)
