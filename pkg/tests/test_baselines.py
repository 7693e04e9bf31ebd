"""Baseline sampler tests: edge cases, reproducibility, forced outcomes."""

import pytest

from degreeforge.baselines import gnm_max_degree, random_play
from degreeforge.game import GameConfig, edge_count


def test_gnm_edge_cases():
    empty = gnm_max_degree(30, 0, seed=1, samples=5)
    assert empty.mean == 0.0 and empty.maximum == 0
    full = gnm_max_degree(30, edge_count(30), seed=1, samples=5)
    assert full.mean == 29.0 and full.minimum == 29
    with pytest.raises(ValueError):
        gnm_max_degree(10, edge_count(10) + 1, seed=0, samples=1)


def test_gnm_reasonable_midpoint():
    stats = gnm_max_degree(200, edge_count(200) // 2, seed=4, samples=20)
    assert 100 <= stats.mean <= 140  # half density: max degree around n/2 plus spread


def test_random_play_forced():
    stats = random_play(GameConfig(3, 1), seed=2, samples=10)
    assert stats.mean == 1.0 and stats.minimum == stats.maximum == 1


def test_random_play_counts():
    stats = random_play(GameConfig(40, 3), seed=3, samples=8)
    assert stats.samples == 8
    assert stats.minimum <= stats.mean <= stats.maximum
    assert stats.q == 3 and stats.n == 40


def test_seeded_reproducibility():
    a = gnm_max_degree(60, 500, seed=99, samples=12)
    b = gnm_max_degree(60, 500, seed=99, samples=12)
    assert a == b
    c = random_play(GameConfig(25, 2), seed=7, samples=9)
    d = random_play(GameConfig(25, 2), seed=7, samples=9)
    assert c == d
    e = random_play(GameConfig(25, 2), seed=8, samples=9)
    assert e != c


def test_as_dict_round_trip_fields():
    stats = random_play(GameConfig(12, 1), seed=5, samples=4)
    d = stats.as_dict()
    assert d["kind"] == "randomplay"
    assert d["generator"] == "numpy-pcg64"
    assert set(d) >= {"mean", "stddev", "min", "max", "seed", "samples"}
