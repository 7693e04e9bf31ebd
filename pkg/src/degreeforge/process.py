"""Deterministic balls-in-boxes diffusion.

Boxes are indexed by integers, all b balls start in box 0.  Each round,
every box sends half of its balls (rounded down) one box left and the
same number one box right; an odd leftover ball stays put.  The process
models how per-vertex advantages spread under paired offers, and its
exact counts are used as ground truth by the staged waiter strategy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ProcessState:
    """Counts after ``round_index`` of ``rounds`` scheduled rounds."""

    balls: int
    rounds: int
    round_index: int = 0
    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.counts:
            self.counts = {0: self.balls}


def start_process(balls: int, rounds: int) -> ProcessState:
    if balls < 1:
        raise ValueError("need at least one ball")
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    return ProcessState(balls=balls, rounds=rounds)


def step_counts(counts: dict[int, int]) -> dict[int, int]:
    """One round of the diffusion on a sparse count map."""
    out: dict[int, int] = {}
    get = out.get
    for i, c in counts.items():
        if c >= 2:
            half = c >> 1
            out[i - 1] = get(i - 1, 0) + half
            out[i + 1] = get(i + 1, 0) + half
        if c & 1:
            out[i] = get(i, 0) + 1
    return out


def process_step(state: ProcessState) -> ProcessState:
    """Advance one round; refuses to step past the scheduled horizon."""
    if state.round_index >= state.rounds:
        raise ValueError(f"process already ran its {state.rounds} rounds")
    return ProcessState(
        balls=state.balls,
        rounds=state.rounds,
        round_index=state.round_index + 1,
        counts=step_counts(state.counts),
    )


def _array_step(arr: np.ndarray, lo: int) -> tuple[np.ndarray, int]:
    half = arr >> 1
    odd = arr & 1
    out = np.zeros(arr.size + 2, dtype=np.int64)
    out[:-2] += half
    out[2:] += half
    out[1:-1] += odd
    lo -= 1
    nz = np.flatnonzero(out)
    first, last = int(nz[0]), int(nz[-1])
    return out[first : last + 1], lo + first


def iter_process(balls: int, rounds: int):
    """Yield (round_index, counts) after each round, via a windowed array."""
    if balls < 1:
        raise ValueError("need at least one ball")
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    arr = np.array([balls], dtype=np.int64)
    lo = 0
    for j in range(1, rounds + 1):
        arr, lo = _array_step(arr, lo)
        yield j, {lo + i: int(c) for i, c in enumerate(arr) if c}


def run_process(balls: int, rounds: int) -> dict[int, int]:
    """Final counts after running the whole process."""
    if balls < 1:
        raise ValueError("need at least one ball")
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    arr = np.array([balls], dtype=np.int64)
    lo = 0
    for _ in range(rounds):
        arr, lo = _array_step(arr, lo)
    return {lo + i: int(c) for i, c in enumerate(arr) if c}


def moved_ball_count(counts: dict[int, int]) -> int:
    """Balls that leave their box in the next round: twice the sum of halves."""
    return sum(2 * (c >> 1) for c in counts.values())


def second_moment(counts: dict[int, int]) -> int:
    return sum(i * i * c for i, c in counts.items())


def support_radius(counts: dict[int, int]) -> int:
    return max(abs(i) for i, c in counts.items() if c)


def fraction_at_least(counts: dict[int, int], balls: int, threshold: float) -> float:
    return sum(c for i, c in counts.items() if i >= threshold) / balls


def process_stats(counts: dict[int, int], balls: int, rounds: int, threshold: float) -> dict:
    """Summary statistics of a finished run."""
    smr = second_moment(counts) / (balls * rounds) if rounds > 0 else 0.0
    return {
        "threshold": threshold,
        "fraction_at_least": fraction_at_least(counts, balls, threshold),
        "second_moment_ratio": smr,
        "support_radius": support_radius(counts),
    }
