"""Offer/claim maximum-degree games on complete graphs.

A (1:q) offer game engine with pluggable strategies, exact random-walk
tables, a discrepancy-balancing client, a staged degree-forcing waiter,
biased-game potential strategies, threshold functions, a minimax oracle
for small boards and randomised baselines.
"""

from .game import (
    Board,
    GameConfig,
    GameError,
    InvalidConfig,
    MatchFault,
    MatchRecord,
    client_max_degree,
    edge_count,
    edge_index,
    endgame_sweep,
    match_record_from_json,
    new_game,
    play_round,
    replay_match,
    run_match,
)
from .walks import WalkTable, build_walk_table, p_max_exceed
from .process import (
    ProcessState,
    process_stats,
    process_step,
    run_process,
    start_process,
)
from .balancer import (
    BalancerClient,
    UBInstance,
    UBState,
    balancer_choose,
    balancer_client_strategy,
    max_degree_threshold,
    max_degree_ub_instance,
    ub_apply,
    ub_init,
)
from .forcing import (
    EmptySurvivorSet,
    LowerBoundWaiter,
    PairingEndgameWaiter,
    SingleStageWaiter,
    advantage,
    advantage_restricted,
    lower_bound_waiter,
    pairing_endgame_waiter,
    run_single_stage,
    single_stage_waiter,
)
from .biased import (
    BiasThresholds,
    CriterionFails,
    ESClient,
    MegaRoundWaiter,
    NoValidParameters,
    SmallBiasClient,
    SmallBiasParams,
    bias_thresholds,
    es_client_strategy,
    mega_round_waiter,
    small_bias_client_strategy,
    small_bias_params,
)
from .oracle import GameSolver, InstanceTooLarge, exact_game_value, oracle_strategy
from .baselines import BaselineStats, gnm_max_degree, random_play
from .strategies import FirstEdgeClient, GreedyWaiter, LexWaiter, RandomClient, RandomWaiter

__version__ = "0.1.0"
