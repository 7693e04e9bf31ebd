"""Generic waiter and client strategies: random, greedy, lexicographic.

The random waiter draws one uniformly random permutation of all edge
ids up front and offers consecutive chunks; since every claimed edge was
previously offered by the waiter itself, this is exactly sequential
uniform sampling without replacement from the free edges.
"""

from __future__ import annotations

import numpy as np

from .game import CLIENT, FREE, Board, Edge, InvalidConfig, Offer


def _pairs_of(board: Board, eids) -> tuple[Edge, ...]:
    us, vs = board.pair_lists()
    return tuple((us[e], vs[e]) for e in eids)


class RandomWaiter:
    """Offers uniformly random (q+1)-subsets of the free edges."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self._order: np.ndarray | None = None
        self._order_list: list | None = None
        self._pos = 0

    def _ensure(self, board: Board):
        if self._order is None:
            self._order = self.rng.permutation(board.num_edges)
            self._order_list = self._order.tolist()

    def offer(self, board: Board) -> Offer:
        self._ensure(board)
        q1 = board.q + 1
        ids = self._order_list[self._pos : self._pos + q1]
        self._pos += q1
        return _pairs_of(board, ids)

    def offer_batch(self, board: Board) -> np.ndarray:
        self._ensure(board)
        q1 = board.q + 1
        rounds = board.free_count // q1
        take = rounds * q1
        out = self._order[self._pos : self._pos + take].reshape(rounds, q1)
        self._pos += take
        return out


class RandomClient:
    """Keeps a uniformly random edge of every offer."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def choose(self, board: Board, offer: Offer) -> Edge:
        return offer[int(self.rng.integers(len(offer)))]

    def choose_batch(self, board: Board, offers: np.ndarray) -> np.ndarray:
        return self.rng.integers(0, offers.shape[1], size=offers.shape[0])


class FirstEdgeClient:
    """Adversarially predictable: always keeps the lexicographically first edge."""

    def choose(self, board: Board, offer: Offer) -> Edge:
        return min(offer)

    def choose_batch(self, board: Board, offers: np.ndarray) -> np.ndarray:
        # edge ids are ordered exactly like (min, max) pairs
        return np.argmin(offers, axis=1)


class LexWaiter:
    """Offers the first q+1 free edges in lexicographic order."""

    def offer(self, board: Board) -> Offer:
        ids = board.free_edge_ids()[: board.q + 1]
        return _pairs_of(board, ids.tolist())

    def offer_batch(self, board: Board) -> np.ndarray:
        q1 = board.q + 1
        free = board.free_edge_ids()
        rounds = free.size // q1
        return free[: rounds * q1].reshape(rounds, q1)


class GreedyWaiter:
    """Concentrates offers on the currently most threatened vertex.

    ``by="advantage"`` targets the vertex (with free edges left)
    maximising the client's degree lead over the waiter; ``by="degree"``
    targets maximum client degree.  When the target holds fewer than
    q+1 free edges the offer is padded with the lexicographically first
    other free edges.

    The waiter shadows both degree vectors itself (every claimed edge
    passed through one of its own offers), so target maintenance is
    O(1) per round in the common case; full rescans happen only when
    the cached maximum drops or its vertex runs out of free edges.
    """

    def __init__(self, by: str = "advantage"):
        if by not in ("advantage", "degree"):
            raise InvalidConfig(f"unknown greedy mode {by!r}")
        self.by = by
        self._cd: list[int] | None = None
        self._wd: list[int] | None = None
        self._pending: list[tuple[int, int, int]] = []  # (edge id, u, v)
        self._best_v = 0
        self._best_val = 0
        self._target: int | None = None
        self._queue: list[int] = []
        self._qpos = 0
        self._lex_ptr = 0  # monotone cursor for padding; edges behind it are claimed

    def _metric_at(self, v: int) -> int:
        if self.by == "advantage":
            return self._cd[v] - self._wd[v]
        return self._cd[v]

    def _free_at(self, v: int, n: int) -> int:
        return n - 1 - self._cd[v] - self._wd[v]

    def _rescan(self, n: int) -> None:
        best_v = -1
        best_val = 0
        for v in range(n):
            if self._free_at(v, n) == 0:
                continue
            m = self._metric_at(v)
            if best_v < 0 or m > best_val:
                best_val = m
                best_v = v
        self._best_v, self._best_val = best_v, best_val

    def _sync(self, board: Board) -> None:
        if self._cd is None:
            self._cd = board.client_degrees.tolist()
            self._wd = board.waiter_degrees.tolist()
            self._rescan(board.n)
            return
        if not self._pending:
            return
        st = board.edge_states
        touched = []
        for eid, u, v in self._pending:
            s = int(st[eid])
            if s == CLIENT:
                self._cd[u] += 1
                self._cd[v] += 1
            else:
                self._wd[u] += 1
                self._wd[v] += 1
            touched.append(u)
            touched.append(v)
        self._pending = []
        n = board.n
        if self._best_v < 0 or self._free_at(self._best_v, n) == 0 or self._metric_at(self._best_v) < self._best_val:
            self._rescan(n)
            return
        self._best_val = self._metric_at(self._best_v)
        for v in touched:
            if self._free_at(v, n) > 0:
                m = self._metric_at(v)
                if m > self._best_val:
                    self._best_val = m
                    self._best_v = v

    def offer(self, board: Board) -> Offer:
        q1 = board.q + 1
        self._sync(board)
        target = self._best_v
        ids: list[int] = []
        st = board._state
        if target >= 0:
            if target != self._target:
                self._target = target
                self._queue = board.free_edge_ids_at(target).tolist()
                self._qpos = 0
            queue = self._queue
            while self._qpos < len(queue) and len(ids) < q1:
                e = queue[self._qpos]
                self._qpos += 1
                if st[e] == FREE:  # may have been claimed through another target
                    ids.append(e)
        if len(ids) < q1:
            have = set(ids)
            ptr = self._lex_ptr
            num = board.num_edges
            while len(ids) < q1 and ptr < num:
                if st[ptr] == FREE and ptr not in have:
                    ids.append(ptr)
                    have.add(ptr)
                ptr += 1
            # everything behind the cursor is claimed or part of this offer
            self._lex_ptr = ptr
            self._target = None
        us, vs = board.pair_lists()
        self._pending = [(e, us[e], vs[e]) for e in ids]
        return tuple((us[e], vs[e]) for e in ids)
