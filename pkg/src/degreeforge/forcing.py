"""Waiter machinery for forcing a high client degree in the unbiased game.

Three layers build on each other:

* advantage accounting: the client's degree lead at a vertex,
  optionally restricted to edges into a given vertex set;
* the pairing endgame: once a vertex holds advantage a, offering its
  free edges in pairs locks in a final client degree of at least
  ceil(n/2 + a/2) - 1;
* the staged strategy: reserved vertex blocks are consumed one block
  per stage, each stage replaying the balls-in-boxes diffusion on the
  survivors' advantages exactly, so that after the last stage some
  vertex carries a large advantage and the pairing endgame finishes
  the job.
"""

from __future__ import annotations

import math

import numpy as np

from .game import (
    CLIENT,
    FREE,
    WAITER,
    Board,
    GameError,
    InvalidConfig,
    edge_index,
    edge_index_array,
)
from .process import run_process


class StagePlanError(GameError):
    """Board too small to reserve the stage blocks."""


class EmptySurvivorSet(GameError):
    """A stage filter left no vertices; possible at small n."""


def advantage(board: Board, v: int) -> int:
    """Client degree minus waiter degree at v."""
    return board.client_degree(v) - board.waiter_degree(v)


def advantage_restricted(board: Board, v: int, others) -> int:
    """Advantage at v counting only edges from v into ``others``."""
    others = np.asarray(list(others), dtype=np.int64)
    if others.size == 0:
        return 0
    ids = edge_index_array(board.n, np.full(others.size, v, dtype=np.int64), others)
    states = board.edge_states[ids]
    return int(np.count_nonzero(states == CLIENT)) - int(np.count_nonzero(states == WAITER))


def _filler_batch(board: Board) -> np.ndarray | None:
    q1 = board.q + 1
    free = board.free_edge_ids()
    rounds = free.size // q1
    if rounds == 0:
        return None
    return free[: rounds * q1].reshape(rounds, q1)


class PairingEndgameWaiter:
    """Locks in a target vertex's accumulated advantage.

    Built from the current board: pairs up the free edges at v two per
    offer (the client must keep one v-edge per round, so the advantage
    at v never drops), pairs an odd leftover v-edge with an arbitrary
    free edge elsewhere, then plays out the rest of the board in
    lexicographic pairs.
    """

    def __init__(self, board: Board, v: int):
        if board.q != 1:
            raise InvalidConfig("pairing endgame is for two-edge offers only")
        self.v = v
        self.invocation_advantage = advantage(board, v)
        ids = board.free_edge_ids_at(v)
        k = ids.size
        rows = [ids[: 2 * (k // 2)].reshape(-1, 2)]
        if k % 2 == 1:
            leftover = int(ids[-1])
            mate = self._free_mate(board, leftover)
            if mate is not None:
                rows.append(np.array([[leftover, mate]], dtype=np.int64))
            # no free non-v edge: the leftover goes to the final sweep
        self._queue = np.concatenate(rows)
        self._qpos = 0

    def _free_mate(self, board: Board, leftover: int) -> int | None:
        for e in board.free_edge_ids():
            e = int(e)
            if e == leftover:
                continue
            a, b = board.endpoints_of(e)
            if a != self.v and b != self.v:
                return e
        return None

    def offer_batch(self, board: Board) -> np.ndarray | None:
        if self._qpos < len(self._queue):
            out = self._queue[self._qpos :]
            self._qpos = len(self._queue)
            return out
        return _filler_batch(board)

    def offer(self, board: Board):
        if self._qpos < len(self._queue):
            row = self._queue[self._qpos]
            self._qpos += 1
        else:
            free = board.free_edge_ids()
            if free.size < 2:
                raise GameError("no offers left")
            row = free[:2]
        us, vs = board.endpoints_array(row)
        return tuple((int(us[i]), int(vs[i])) for i in range(len(row)))


def pairing_endgame_waiter(board: Board, v: int) -> PairingEndgameWaiter:
    return PairingEndgameWaiter(board, v)


class SingleStageWaiter:
    """Plays one diffusion stage between a block B and a reserve block R.

    Phase p uses only edges into the p-th reserve vertex: the block is
    grouped by current advantage, each group offers its members in pairs
    (skipping the highest-indexed vertex of an odd group), so whatever
    the client does, the advantage counts evolve exactly like the
    deterministic balls-in-boxes process with b=|B|, r=|R|.
    """

    def __init__(self, b_vertices, r_vertices):
        self.b = np.asarray(list(b_vertices), dtype=np.int64)
        self.r = [int(u) for u in r_vertices]
        if np.intersect1d(self.b, np.asarray(self.r)).size:
            raise InvalidConfig("stage blocks must be disjoint")
        self.adv = np.zeros(self.b.size, dtype=np.int64)
        self._phase = 0
        self._pending_pos: np.ndarray | None = None
        self._pending_ids: np.ndarray | None = None

    @property
    def done(self) -> bool:
        return self._phase >= len(self.r) and self._pending_pos is None

    @property
    def advantages(self) -> np.ndarray:
        return self.adv

    def _observe(self, board: Board) -> None:
        if self._pending_pos is None:
            return
        states = board.edge_states[self._pending_ids]
        kept = states == CLIENT
        if not ((kept.sum(axis=1) == 1).all() and ((states == WAITER).sum(axis=1) == 1).all()):
            raise GameError("pending stage offers were not fully resolved")
        self.adv[self._pending_pos[kept]] += 1
        self.adv[self._pending_pos[~kept]] -= 1
        self._pending_pos = None
        self._pending_ids = None

    def next_phase(self, board: Board) -> np.ndarray | None:
        """Offers of the next phase as an (pairs, 2) id array; None when done."""
        self._observe(board)
        if self._phase >= len(self.r):
            return None
        u = self.r[self._phase]
        self._phase += 1
        order = np.lexsort((self.b, self.adv))
        adv_sorted = self.adv[order]
        if adv_sorted.size == 0:
            return np.empty((0, 2), dtype=np.int64)
        change = np.flatnonzero(np.diff(adv_sorted)) + 1
        starts = np.concatenate([[0], change])
        lengths = np.diff(np.concatenate([starts, [adv_sorted.size]]))
        pos_in_group = np.arange(adv_sorted.size) - np.repeat(starts, lengths)
        lens_rep = np.repeat(lengths, lengths)
        keep = pos_in_group < (lens_rep - (lens_rep % 2))
        kept_pos = order[keep]
        pairs_pos = kept_pos.reshape(-1, 2)
        eids = edge_index_array(
            board.n, self.b[pairs_pos], np.full(pairs_pos.shape, u, dtype=np.int64)
        )
        self._pending_pos = pairs_pos
        self._pending_ids = eids
        return eids


def single_stage_waiter(board: Board, b_vertices, r_vertices) -> SingleStageWaiter:
    """Validated stage constructor: every B-R edge must still be free."""
    stage = SingleStageWaiter(b_vertices, r_vertices)
    if board.q != 1:
        raise InvalidConfig("stages are played with two-edge offers")
    bb = stage.b
    for u in stage.r:
        ids = edge_index_array(board.n, bb, np.full(bb.size, u, dtype=np.int64))
        if not (board.edge_states[ids] == FREE).all():
            raise InvalidConfig("some block-to-reserve edge is already claimed")
    return stage


def run_single_stage(board: Board, stage: SingleStageWaiter, client, phase_log=None) -> SingleStageWaiter:
    """Drive a stage to completion against ``client`` on ``board``."""
    choose_batch = getattr(client, "choose_batch", None)
    phase_no = 0
    while True:
        offers = stage.next_phase(board)
        if offers is None:
            return stage
        phase_no += 1
        if phase_log is not None:
            phase_log.append((phase_no, offers.copy()))
        if offers.shape[0] == 0:
            continue
        if choose_batch is not None:
            cols = client.choose_batch(board, offers)
            board.apply_offer_batch(offers, cols)
        else:
            us, vs = board.endpoints_array(offers.reshape(-1))
            for i in range(offers.shape[0]):
                pair0 = (int(us[2 * i]), int(vs[2 * i]))
                pair1 = (int(us[2 * i + 1]), int(vs[2 * i + 1]))
                choice = client.choose(board, (pair0, pair1))
                col = 0 if tuple(choice) == pair0 else 1
                board.apply_offer_batch(offers[i : i + 1], [col])


class LowerBoundWaiter:
    """Staged waiter for the unbiased game on K_n.

    Reserves s = ceil(ln n / 15) disjoint blocks of ceil(n / ln n)
    vertices, runs one diffusion stage per block, keeps the vertices
    whose stage advantage reached t = 0.1 * sqrt(n / ln n), and finally
    hands the surviving target vertex to the pairing endgame.  Stage
    survivor counts are recorded together with the exact process
    prediction in ``stage_reports``.
    """

    def __init__(self, n: int):
        ln_n = math.log(n)
        if ln_n <= 0:
            raise StagePlanError("board too small for staging")
        self.n = n
        self.stage_count = math.ceil(ln_n / 15.0)
        self.block_size = math.ceil(n / ln_n)
        reserved = self.stage_count * self.block_size
        if reserved >= n:
            raise StagePlanError(
                f"{self.stage_count} blocks of {self.block_size} vertices do not fit in n={n}"
            )
        self.threshold = 0.1 * math.sqrt(n / ln_n)
        self.r_blocks = [
            list(range(j * self.block_size, (j + 1) * self.block_size))
            for j in range(self.stage_count)
        ]
        self.initial_block = list(range(reserved, n))
        self.stage_reports: list[dict] = []
        self.target_vertex: int | None = None
        self._stage_idx = 0
        self._current = list(self.initial_block)
        self._stage = SingleStageWaiter(self._current, self.r_blocks[0])
        self._endgame: PairingEndgameWaiter | None = None

    def _finish_stage(self, board: Board) -> None:
        stage = self._stage
        adv = stage.advantages
        survivors = [int(stage.b[i]) for i in range(adv.size) if adv[i] >= self.threshold]
        predicted_counts = run_process(len(self._current), self.block_size)
        predicted = sum(c for i, c in predicted_counts.items() if i >= self.threshold)
        self.stage_reports.append(
            {
                "stage": self._stage_idx + 1,
                "survivors": len(survivors),
                "threshold": self.threshold,
                "process_predicted_survivors": predicted,
            }
        )
        self._stage_idx += 1
        if self._stage_idx < self.stage_count:
            if not survivors:
                raise EmptySurvivorSet(f"stage {self._stage_idx} left no survivors")
            self._current = survivors
            self._stage = SingleStageWaiter(survivors, self.r_blocks[self._stage_idx])
            return
        if not survivors:
            raise EmptySurvivorSet(f"stage {self._stage_idx} left no survivors")
        self.target_vertex = survivors[0]
        self._endgame = PairingEndgameWaiter(board, self.target_vertex)

    def offer_batch(self, board: Board) -> np.ndarray | None:
        if board.q != 1:
            raise InvalidConfig("staged waiter plays two-edge offers only")
        while self._endgame is None:
            offers = self._stage.next_phase(board)
            if offers is None:
                self._finish_stage(board)
                continue
            if offers.shape[0] == 0:
                continue
            return offers
        return self._endgame.offer_batch(board)


def lower_bound_waiter(n: int) -> LowerBoundWaiter:
    return LowerBoundWaiter(n)
