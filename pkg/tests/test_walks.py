"""Walk-table unit tests against an independent enumeration oracle."""

import math
from fractions import Fraction

import numpy as np
import pytest

from degreeforge.walks import TableRangeError, build_walk_table, p_max_exceed


def enumerate_exceed(k: int, level: int) -> Fraction:
    """Exceedance probability by brute force over all 2^k sign sequences."""
    if k == 0:
        return Fraction(1) if level < 0 else Fraction(0)
    masks = np.arange(2**k, dtype=np.uint32)
    steps = ((masks[:, None] >> np.arange(k)) & 1).astype(np.int64) * 2 - 1
    running = np.cumsum(steps, axis=1)
    peak = np.maximum(running.max(axis=1), 0)
    return Fraction(int((peak > level).sum()), 2**k)


@pytest.fixture(scope="module")
def table():
    return build_walk_table(64)


def test_base_cases(table):
    assert table.prob(0, 0) == 0.0
    for k in range(0, 20):
        assert table.prob(k, -1) == 1.0
        assert p_max_exceed(table, k, -3) == 1.0


def test_hand_checked_values(table):
    assert table.prob(2, 0) == 0.5
    assert table.prob(3, 1) == 0.25
    assert table.prob(1, 0) == 0.5
    assert table.prob(5, 5) == 0.0
    assert p_max_exceed(table, 4, -3) == 1.0


def test_out_of_range_k(table):
    with pytest.raises(TableRangeError):
        table.prob(65, 3)
    with pytest.raises(TableRangeError):
        table.prob(-1, 0)


@pytest.mark.parametrize("k", range(0, 13))
def test_matches_enumeration_exactly(table, k):
    for level in range(-1, k + 1):
        got = Fraction(table.prob(k, level))
        assert got == enumerate_exceed(k, level), (k, level)


def test_recurrence_identity(table):
    vals = table.values
    for k in range(1, table.max_k + 1):
        for level in range(0, k):
            lhs = vals[k, level + 1]
            left = 1.0 if level - 1 < 0 else vals[k - 1, level]
            right = vals[k - 1, level + 2] if level + 2 < vals.shape[1] else 0.0
            assert lhs == 0.5 * left + 0.5 * right


def test_monotone_in_level_and_length(table):
    slack = 2.0**-40
    for k in range(0, table.max_k + 1):
        for level in range(-1, k):
            assert table.prob(k, level) >= table.prob(k, level + 1) - slack
    for level in range(-1, 20):
        for k in range(0, table.max_k):
            assert table.prob(k + 1, level) >= table.prob(k, level) - slack
    for k in range(2, table.max_k + 1):
        for level in range(-1, k + 1):
            assert table.prob(k - 2, level) <= table.prob(k, level) + slack


def test_tail_bound_small(table):
    for k in range(1, table.max_k + 1):
        for level in range(0, k):
            assert table.prob(k, level) <= 2.0 * math.exp(-(level**2) / (2.0 * k)) + 1e-12


def test_values_lie_in_unit_interval(table):
    assert (table.values >= 0.0).all()
    assert (table.values <= 1.0).all()


def test_rows_iteration():
    t = build_walk_table(3)
    rows = list(t.rows())
    assert (0, -1, 1.0) in rows
    assert (3, 1, 0.25) in rows
    ks = {k for k, _, _ in rows}
    assert ks == {0, 1, 2, 3}
