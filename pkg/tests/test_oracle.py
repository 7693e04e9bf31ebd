"""Minimax solver tests: frozen values, cross-checks, optimality directions."""

import numpy as np
import pytest

from degreeforge.balancer import balancer_client_strategy
from degreeforge.biased import es_client_strategy, smallest_certified_degree
from degreeforge.game import GameConfig, edge_count, run_match
from degreeforge.oracle import (
    GameSolver,
    InstanceTooLarge,
    UnsolvedInstance,
    exact_game_value,
    oracle_strategy,
    solve_with_report,
)
from degreeforge.strategies import FirstEdgeClient, GreedyWaiter, LexWaiter, RandomClient, RandomWaiter

# solver outputs frozen as regression anchors after plain/canonical and
# unmemoised cross-checks
FROZEN_VALUES = {(3, 1): 1, (4, 1): 2, (5, 1): 3, (4, 2): 1, (5, 3): 2}


@pytest.fixture(scope="module")
def solvers():
    out = {}
    for (n, q), expected in FROZEN_VALUES.items():
        solver = GameSolver(n, q)
        assert solver.solve() == expected
        out[(n, q)] = solver
    return out


def test_trivial_value(solvers):
    assert exact_game_value(3, 1) == 1


def test_counting_floor(solvers):
    for (n, q), value in FROZEN_VALUES.items():
        rounds = edge_count(n) // (q + 1)
        assert value >= -(-2 * rounds // n)


def test_canonicalized_agrees(solvers):
    for (n, q), expected in FROZEN_VALUES.items():
        assert exact_game_value(n, q, canonicalize=True) == expected


def test_canonicalization_shrinks_search():
    plain = GameSolver(5, 1)
    plain.solve()
    canon = GameSolver(5, 1, canonicalize=True)
    canon.solve()
    assert canon.states_visited < plain.states_visited


def test_instance_cap():
    with pytest.raises(InstanceTooLarge):
        exact_game_value(7, 1)
    # the cap is configurable
    GameSolver(7, 1, max_edges=21)


def test_oracle_vs_oracle(solvers):
    for (n, q), value in FROZEN_VALUES.items():
        solver = solvers[(n, q)]
        rec = run_match(
            GameConfig(n, q), oracle_strategy(n, q, "waiter", solver), oracle_strategy(n, q, "client", solver)
        )
        assert rec.client_max_degree == value


def test_any_client_vs_oracle_waiter(solvers):
    for (n, q), value in FROZEN_VALUES.items():
        solver = solvers[(n, q)]
        waiter = oracle_strategy(n, q, "waiter", solver)
        for seed in range(3):
            rec = run_match(GameConfig(n, q, seed=seed), waiter, RandomClient(np.random.default_rng(seed)))
            assert rec.client_max_degree >= value


def test_any_waiter_vs_oracle_client(solvers):
    for (n, q), value in FROZEN_VALUES.items():
        solver = solvers[(n, q)]
        client = oracle_strategy(n, q, "client", solver)
        for seed in range(3):
            rec = run_match(GameConfig(n, q, seed=seed), RandomWaiter(np.random.default_rng(seed)), client)
            assert rec.client_max_degree <= value
        rec = run_match(GameConfig(n, q), LexWaiter(), client)
        assert rec.client_max_degree <= value
        rec = run_match(GameConfig(n, q), GreedyWaiter(by="advantage"), client)
        assert rec.client_max_degree <= value


def test_strategic_clients_bracket_value(solvers):
    for (n, q), value in FROZEN_VALUES.items():
        solver = solvers[(n, q)]
        waiter = oracle_strategy(n, q, "waiter", solver)
        if q == 1:
            client = balancer_client_strategy(n) if n >= 3 else FirstEdgeClient()
        else:
            client = es_client_strategy(n, q, smallest_certified_degree(n, q))
        rec = run_match(GameConfig(n, q), waiter, client)
        assert rec.client_max_degree >= value


def test_solver_shape_guard(solvers):
    solver = solvers[(4, 1)]
    from degreeforge.game import new_game

    with pytest.raises(UnsolvedInstance):
        solver.value_of(new_game(GameConfig(5, 1)))


def test_report_fields():
    report = solve_with_report(4, 1)
    assert report.value == 2
    assert report.states_visited > 0
    assert report.seconds >= 0.0
