"""Balancing strategy tests: weights, the choice rule, and the K_n client."""

import math

import numpy as np
import pytest

from degreeforge.balancer import (
    BalancerClient,
    LabeledElement,
    TableTooSmall,
    UBInstance,
    balancer_choose,
    balancer_client_strategy,
    candidate_totals,
    max_degree_threshold,
    max_degree_ub_instance,
    ub_apply,
    ub_init,
)
from degreeforge.game import GameConfig, InvalidConfig, edge_count, new_game, run_match
from degreeforge.strategies import GreedyWaiter, RandomWaiter
from degreeforge.walks import build_walk_table


@pytest.fixture(scope="module")
def table():
    return build_walk_table(64)


def test_init_weights_hand_checked(table):
    inst = UBInstance(2, ((0, 1),), (2,), (2,))
    state = ub_init(inst, table)
    assert state.total == 0.0  # a 2-step walk never exceeds level 2
    assert state.initially_winning

    inst = UBInstance(1, ((0,),), (0,), (0,))
    state = ub_init(inst, table)
    assert state.total == 1.0  # both sides weigh 1/2
    assert not state.initially_winning

    state = ub_init(UBInstance(3, (), (), ()), table)
    assert state.total == 0.0


def test_table_too_small():
    small = build_walk_table(1)
    with pytest.raises(TableTooSmall):
        ub_init(UBInstance(3, ((0, 1, 2),), (1,), (1,)), small)


def test_choose_rules(table):
    # elements in no hyperedge: weights unaffected, tie falls to x
    state = ub_init(UBInstance(4, ((2, 3),), (1,), (1,)), table)
    assert balancer_choose(state, 0, 1) == 0
    wx, wy = candidate_totals(state, 0, 1)
    assert wx == wy == state.total

    # symmetric membership: both choices identical, tie falls to x
    state = ub_init(UBInstance(3, ((0, 1, 2),), (1,), (1,)), table)
    wx, wy = candidate_totals(state, 0, 1)
    assert wx == wy
    assert balancer_choose(state, 0, 1) == 0

    # one element inside, one outside: chosen branch never raises the total
    state = ub_init(UBInstance(3, ((0, 2),), (1,), (1,)), table)
    wx, wy = candidate_totals(state, 0, 1)
    assert min(wx, wy) <= state.total + 1e-15


def test_apply_updates(table):
    inst = UBInstance(5, ((0, 1, 2),), (2,), (2,))
    state = ub_init(inst, table)
    w0 = state.total
    ub_apply(state, 3, 4)  # untouched hyperedge
    assert state.total == w0
    assert state.k[0] == 3 and state.d[0] == 0

    state = ub_init(inst, table)
    ub_apply(state, 0, 1)  # both inside: free count falls by 2, sum unchanged
    assert state.k[0] == 1 and state.d[0] == 0

    state = ub_init(inst, table)
    ub_apply(state, 0, 3)  # one inside
    assert state.k[0] == 2 and state.d[0] == 1
    with pytest.raises(LabeledElement):
        ub_apply(state, 0, 4)


def test_halving_identity_one_sided(table):
    # with exactly one offered element inside a hyperedge whose positive
    # weight is below 1, the current weight is the mean of both branches
    inst = UBInstance(4, ((0, 2, 3),), (1,), (1,))
    state = ub_init(inst, table)
    wx, wy = candidate_totals(state, 0, 1)
    assert state.total == pytest.approx(0.5 * (wx + wy), rel=2.0**-30)


def test_weight_mean_inequality_random_games(table):
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = int(rng.integers(1, 5))
        size = int(rng.integers(6, 12))
        edges = tuple(
            tuple(sorted(rng.choice(size, size=int(rng.integers(2, 5)), replace=False).tolist()))
            for _ in range(m)
        )
        ls = tuple(int(rng.integers(1, 4)) for _ in range(m))
        hs = tuple(int(rng.integers(1, 4)) for _ in range(m))
        state = ub_init(UBInstance(size, edges, ls, hs), table)
        order = rng.permutation(size).tolist()
        while len(order) >= 2:
            x, y = order.pop(), order.pop()
            before = state.total
            wx, wy = candidate_totals(state, x, y)
            assert before >= 0.5 * (wx + wy) - 1e-12 or before >= 1.0
            pick = balancer_choose(state, x, y)
            other = y if pick == x else x
            ub_apply(state, pick, other)
            fresh = state.recompute_total()
            assert state.total == pytest.approx(fresh, rel=2.0**-30, abs=1e-12)


def test_endgame_soundness_small(table):
    # whenever the start weight is below 1, final label sums stay inside
    # the thresholds, for any opponent order
    rng = np.random.default_rng(3)
    inst = UBInstance(8, ((0, 1, 2, 3), (2, 3, 4, 5), (4, 5, 6, 7)), (4, 4, 4), (4, 4, 4))
    for trial in range(30):
        state = ub_init(inst, table)
        assert state.initially_winning
        order = rng.permutation(8).tolist()
        while len(order) >= 2:
            x, y = order.pop(), order.pop()
            pick = balancer_choose(state, x, y)
            other = y if pick == x else x
            ub_apply(state, pick, other)
        for j in range(3):
            assert -inst.lower[j] <= state.d[j] <= inst.upper[j]


def test_max_degree_instance_shape():
    inst = max_degree_ub_instance(4)
    assert len(inst.hyperedges) == 4
    assert all(len(e) == 3 for e in inst.hyperedges)
    assert inst.universe_size == 6
    counts = [0] * 6
    for e in inst.hyperedges:
        for x in e:
            counts[x] += 1
    assert counts == [2] * 6  # an edge touches exactly two vertices


def test_threshold_values():
    assert max_degree_threshold(100) == 35
    assert max_degree_threshold(50) == 23
    # construction asserts the exponential criterion for every n here
    for n in range(3, 260):
        max_degree_ub_instance(n)


def test_client_requires_unbiased_game(table):
    client = balancer_client_strategy(6)
    board = new_game(GameConfig(6, 2))
    with pytest.raises(InvalidConfig):
        client.choose(board, ((0, 1), (0, 2), (1, 2)))


@pytest.mark.parametrize("waiter_kind", ["random", "greedy"])
def test_client_bound_small_boards(waiter_kind):
    n = 30
    h = max_degree_threshold(n)
    for seed in range(5):
        if waiter_kind == "random":
            waiter = RandomWaiter(np.random.default_rng(seed))
        else:
            waiter = GreedyWaiter(by="advantage")
        client = balancer_client_strategy(n)
        rec = run_match(GameConfig(n, 1, seed=seed), waiter, client, record_transcript=False)
        board = rec.final_board
        disc = np.abs(board.client_degrees - board.waiter_degrees)
        assert int(disc.max()) <= h
        assert rec.client_max_degree <= (n - 1 + h) // 2
        # the client's ledger agrees with the board before the sweep:
        # every hyperedge ended inside its thresholds
        for j in range(n):
            assert -h <= client.state.d[j] <= h
