"""Offer/claim game engine on the edge set of a complete graph.

Each round one player (the waiter) offers q+1 previously unclaimed edges
of K_n, the other player (the client) keeps exactly one and the waiter
claims the rest.  When fewer than q+1 free edges remain, the waiter
sweeps them all and the game ends.  The board tracks per-edge ownership
and per-vertex degree counters for both players.

Strategies see the full board (perfect information) but must not mutate
it; all mutation goes through :func:`play_round`, the batch appliers and
:func:`endgame_sweep`.  For long matches, strategies may implement the
optional batch hooks ``offer_batch`` / ``choose_batch`` (edge-id arrays)
which the match runner uses when available; the per-round semantics are
unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np

FREE = 0
CLIENT = 1
WAITER = 2

Edge = tuple[int, int]
Offer = tuple[Edge, ...]


class GameError(Exception):
    """Base class for rule violations and configuration errors."""


class InvalidConfig(GameError):
    pass


class WrongOfferSize(GameError):
    pass


class NonFreeEdgeInOffer(GameError):
    pass


class ChoiceNotInOffer(GameError):
    pass


class SweepTooEarly(GameError):
    pass


class MatchFault(GameError):
    """Illegal strategy move.  Aborts the match, attributed to one side."""

    def __init__(self, side: str, reason: str, round_index: int):
        super().__init__(f"{side} fault in round {round_index}: {reason}")
        self.side = side
        self.reason = reason
        self.round_index = round_index


def edge_count(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(n: int, u: int, v: int) -> int:
    """Id of edge {u, v} of K_n in lexicographic (min, max) order."""
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def edge_index_array(n: int, us, vs) -> np.ndarray:
    """Vectorised :func:`edge_index` for arrays of endpoints."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    lo = np.minimum(us, vs)
    hi = np.maximum(us, vs)
    return lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


def edge_endpoints(n: int, eid: int) -> Edge:
    """Invert the lexicographic edge numbering."""
    if not 0 <= eid < edge_count(n):
        raise ValueError(f"edge id {eid} out of range for n={n}")
    u = (2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * eid)) // 2
    # isqrt rounding can land one row off at triangular boundaries
    while u * (2 * n - u - 1) // 2 > eid:
        u -= 1
    while (u + 1) * (2 * n - u - 2) // 2 <= eid:
        u += 1
    v = eid - u * (2 * n - u - 1) // 2 + u + 1
    return (int(u), int(v))


@dataclass(frozen=True)
class GameConfig:
    """Match parameters: board size n, bias q and the master seed."""

    n: int
    q: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidConfig(f"need at least 2 vertices, got n={self.n}")
        if self.q < 1:
            raise InvalidConfig(f"bias must be at least 1, got q={self.q}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must fit in 64 unsigned bits")


class Board:
    """Mutable game position: per-edge ownership plus degree counters.

    Edges are stored canonically as (min, max) vertex pairs over ids
    0..n-1 and addressed internally by their lexicographic index.
    """

    def __init__(self, n: int, q: int):
        if n < 2:
            raise InvalidConfig(f"need at least 2 vertices, got n={n}")
        if q < 1:
            raise InvalidConfig(f"bias must be at least 1, got q={q}")
        self.n = n
        self.q = q
        self.num_edges = edge_count(n)
        us = np.arange(n, dtype=np.int64)
        self._off = us * (2 * n - us - 1) // 2  # row starts of the numbering
        self._state = np.zeros(self.num_edges, dtype=np.int8)
        # degree counters live in python lists: scalar updates dominate
        # the per-round path and are several times faster than numpy here
        self._cdeg = [0] * n
        self._wdeg = [0] * n
        self.free_count = self.num_edges
        self.round_index = 0
        self._pair_lists: Optional[tuple[list, list]] = None

    # ------------------------------------------------------------------
    # read-only access
    # ------------------------------------------------------------------
    @property
    def edge_states(self) -> np.ndarray:
        view = self._state.view()
        view.flags.writeable = False
        return view

    @property
    def client_degrees(self) -> np.ndarray:
        return np.array(self._cdeg, dtype=np.int64)

    @property
    def waiter_degrees(self) -> np.ndarray:
        return np.array(self._wdeg, dtype=np.int64)

    def client_degree(self, v: int) -> int:
        return self._cdeg[v]

    def waiter_degree(self, v: int) -> int:
        return self._wdeg[v]

    def edge_id(self, u: int, v: int) -> int:
        if u == v or not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"not an edge of K_{self.n}: ({u}, {v})")
        return edge_index(self.n, u, v)

    def state_of(self, u: int, v: int) -> int:
        return int(self._state[self.edge_id(u, v)])

    def endpoints_of(self, eid: int) -> Edge:
        return edge_endpoints(self.n, eid)

    def endpoints_array(self, eids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        eids = np.asarray(eids, dtype=np.int64)
        # closed-form row from the triangular numbering; float sqrt can be
        # off by one at row boundaries, so nudge against the offsets
        m = 2 * self.n - 1
        us = ((m - np.sqrt(m * m - 8.0 * eids)) // 2).astype(np.int64)
        np.clip(us, 0, self.n - 2, out=us)
        off = self._off
        us[off[us] > eids] -= 1
        us[off[us + 1] <= eids] += 1
        vs = eids - off[us] + us + 1
        return us, vs

    def pair_lists(self) -> tuple[list, list]:
        """Cached python lists mapping edge id -> endpoints (small boards)."""
        if self._pair_lists is None:
            eids = np.arange(self.num_edges, dtype=np.int64)
            us, vs = self.endpoints_array(eids)
            self._pair_lists = (us.tolist(), vs.tolist())
        return self._pair_lists

    def free_edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self._state == FREE)

    def vertex_edge_ids(self, v: int) -> np.ndarray:
        """Ids of all n-1 edges incident to v, by increasing neighbour."""
        lower = np.arange(0, v, dtype=np.int64)
        upper = np.arange(v + 1, self.n, dtype=np.int64)
        ids_lo = self._off[lower] + (v - lower - 1)
        ids_hi = self._off[v] + (upper - v - 1)
        return np.concatenate([ids_lo, ids_hi])

    def free_edge_ids_at(self, v: int) -> np.ndarray:
        ids = self.vertex_edge_ids(v)
        return ids[self._state[ids] == FREE]

    # ------------------------------------------------------------------
    # mutation (used by play_round / run_match / sweeps)
    # ------------------------------------------------------------------
    def _apply_round(self, pairs: Sequence[Edge], ids: Sequence[int], choice_pos: int) -> None:
        st = self._state
        cd = self._cdeg
        wd = self._wdeg
        for i, e in enumerate(ids):
            if i == choice_pos:
                st[e] = CLIENT
                u, v = pairs[i]
                cd[u] += 1
                cd[v] += 1
            else:
                st[e] = WAITER
                u, v = pairs[i]
                wd[u] += 1
                wd[v] += 1
        self.free_count -= len(ids)
        self.round_index += 1

    def apply_offer_batch(self, offers, cols, validate: bool = True) -> np.ndarray:
        """Apply many rounds at once.

        ``offers`` is a (rounds, q+1) array of distinct free edge ids,
        ``cols`` the client's column choice per round.  Returns the array
        of chosen (client) edge ids.
        """
        offers = np.ascontiguousarray(offers, dtype=np.int64)
        if offers.ndim != 2 or offers.shape[1] != self.q + 1:
            raise WrongOfferSize(f"batch must be (rounds, {self.q + 1}), got {offers.shape}")
        rounds, width = offers.shape
        flat = offers.reshape(-1)
        cols = np.asarray(cols, dtype=np.int64)
        st = self._state
        if validate:
            if flat.size == 0:
                raise WrongOfferSize("empty batch")
            if int(flat.min()) < 0 or int(flat.max()) >= self.num_edges:
                raise NonFreeEdgeInOffer("edge id out of range")
            if not (st[flat] == FREE).all():
                raise NonFreeEdgeInOffer("batch contains a non-free edge")
            if flat.size <= 100_000:
                if np.unique(flat).size != flat.size:
                    raise NonFreeEdgeInOffer("duplicate edge inside batch")
                dup_by_recount = False
            else:
                dup_by_recount = True  # cheaper than sorting huge batches
            if cols.shape != (rounds,) or (cols < 0).any() or (cols >= width).any():
                raise ChoiceNotInOffer("choice column out of range")
        else:
            dup_by_recount = False
        chosen = offers[np.arange(rounds), cols]
        st[flat] = WAITER
        st[chosen] = CLIENT
        if dup_by_recount:
            # a duplicate would have claimed fewer distinct cells than offered
            left = int(np.count_nonzero(st == FREE))
            if self.free_count - flat.size != left:
                raise NonFreeEdgeInOffer("duplicate edge inside batch")
        au, av = self.endpoints_array(flat)
        bc_all = np.bincount(au, minlength=self.n) + np.bincount(av, minlength=self.n)
        cu, cv = self.endpoints_array(chosen)
        bc_ch = np.bincount(cu, minlength=self.n) + np.bincount(cv, minlength=self.n)
        new_w = np.asarray(self._wdeg, dtype=np.int64) + bc_all - bc_ch
        new_c = np.asarray(self._cdeg, dtype=np.int64) + bc_ch
        self._wdeg = new_w.tolist()
        self._cdeg = new_c.tolist()
        self.free_count -= int(flat.size)
        self.round_index += int(rounds)
        return chosen

    def __eq__(self, other) -> bool:
        if not isinstance(other, Board):
            return NotImplemented
        return (
            self.n == other.n
            and self.q == other.q
            and self.free_count == other.free_count
            and self.round_index == other.round_index
            and np.array_equal(self._state, other._state)
            and self._cdeg == other._cdeg
            and self._wdeg == other._wdeg
        )


class WaiterStrategy(Protocol):
    def offer(self, board: Board) -> Sequence[Edge]: ...


class ClientStrategy(Protocol):
    def choose(self, board: Board, offer: Offer) -> Edge: ...


# ----------------------------------------------------------------------
# core operations
# ----------------------------------------------------------------------

def new_game(config: GameConfig) -> Board:
    """Fresh board: every edge free, all counters zero."""
    return Board(config.n, config.q)


def _canon_edge(n: int, edge) -> Edge:
    u, v = edge
    u = int(u)
    v = int(v)
    if u == v or not (0 <= u < n and 0 <= v < n):
        raise NonFreeEdgeInOffer(f"not an edge of K_{n}: ({u}, {v})")
    return (u, v) if u < v else (v, u)


def _validated_offer_ids(board: Board, pairs: Sequence[Edge]) -> list[int]:
    if len(pairs) != board.q + 1:
        raise WrongOfferSize(f"offer must contain {board.q + 1} edges, got {len(pairs)}")
    ids = [edge_index(board.n, u, v) for (u, v) in pairs]
    if len(set(ids)) != len(ids):
        raise NonFreeEdgeInOffer("duplicate edge in offer")
    st = board._state
    for e in ids:
        if st[e] != FREE:
            raise NonFreeEdgeInOffer(f"edge id {e} is not free")
    return ids


def play_round(board: Board, offer, choice) -> Board:
    """Client keeps ``choice``; the waiter claims the rest of the offer."""
    pairs = [_canon_edge(board.n, e) for e in offer]
    ids = _validated_offer_ids(board, pairs)
    c = _canon_edge(board.n, choice)
    try:
        pos = pairs.index(c)
    except ValueError:
        raise ChoiceNotInOffer(f"choice {c} not among offered edges") from None
    board._apply_round(pairs, ids, pos)
    return board


def endgame_sweep(board: Board) -> Board:
    """Waiter claims every remaining free edge (fewer than q+1 left)."""
    if board.free_count >= board.q + 1:
        raise SweepTooEarly(f"{board.free_count} free edges left, offers still possible")
    ids = board.free_edge_ids()
    if ids.size:
        board._state[ids] = WAITER
        us, vs = board.endpoints_array(ids)
        extra = np.bincount(us, minlength=board.n) + np.bincount(vs, minlength=board.n)
        board._wdeg = (np.asarray(board._wdeg, dtype=np.int64) + extra).tolist()
        board.free_count = 0
    return board


def client_max_degree(board: Board) -> int:
    return max(board._cdeg)


# ----------------------------------------------------------------------
# match runner
# ----------------------------------------------------------------------

@dataclass
class MatchRecord:
    """Full transcript of one match, replayable bit-for-bit."""

    config: GameConfig
    rounds: Optional[list[tuple[Offer, Edge]]]
    final_board: Board
    client_max_degree: int
    seed: int

    def to_json_dict(self) -> dict:
        rounds = None
        if self.rounds is not None:
            rounds = [
                {"offer": [[u, v] for (u, v) in offer], "choice": [c0, c1]}
                for offer, (c0, c1) in self.rounds
            ]
        return {
            "n": self.config.n,
            "q": self.config.q,
            "seed": self.seed,
            "rounds": rounds,
            "client_max_degree": self.client_max_degree,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def replay_match(config: GameConfig, rounds: Sequence[tuple[Offer, Edge]]) -> Board:
    """Rebuild the final board from a transcript (then sweep)."""
    board = new_game(config)
    for offer, choice in rounds:
        play_round(board, offer, choice)
    endgame_sweep(board)
    return board


def match_record_from_json(text: str) -> MatchRecord:
    obj = json.loads(text)
    config = GameConfig(n=obj["n"], q=obj["q"], seed=obj["seed"])
    if obj["rounds"] is None:
        raise ValueError("record has no transcript; cannot reconstruct the board")
    rounds = [
        (tuple((int(u), int(v)) for u, v in r["offer"]), (int(r["choice"][0]), int(r["choice"][1])))
        for r in obj["rounds"]
    ]
    board = replay_match(config, rounds)
    record = MatchRecord(config, rounds, board, client_max_degree(board), config.seed)
    if record.client_max_degree != obj["client_max_degree"]:
        raise ValueError("stored client_max_degree does not match the replayed board")
    return record


def _single_round(board: Board, waiter, client, rounds) -> None:
    try:
        raw = waiter.offer(board)
        pairs = tuple(_canon_edge(board.n, e) for e in raw)
        ids = _validated_offer_ids(board, pairs)
    except GameError as exc:
        raise MatchFault("waiter", str(exc), board.round_index) from exc
    try:
        choice = _canon_edge(board.n, client.choose(board, pairs))
        pos = pairs.index(choice)
    except (GameError, ValueError) as exc:
        raise MatchFault("client", str(exc), board.round_index) from exc
    board._apply_round(pairs, ids, pos)
    if rounds is not None:
        rounds.append((pairs, pairs[pos]))


def _record_batch(board: Board, offers: np.ndarray, chosen: np.ndarray, rounds) -> None:
    us, vs = board.endpoints_array(offers.reshape(-1))
    width = offers.shape[1]
    cu, cv = board.endpoints_array(chosen)
    for r in range(offers.shape[0]):
        base = r * width
        offer = tuple((int(us[base + i]), int(vs[base + i])) for i in range(width))
        rounds.append((offer, (int(cu[r]), int(cv[r]))))


def run_match(config: GameConfig, waiter, client, record_transcript: bool = True) -> MatchRecord:
    """Play a full match: rounds until fewer than q+1 free edges, then sweep.

    Strategy violations raise :class:`MatchFault` attributed to the side
    that broke the rules; the match is aborted rather than repaired.
    """
    board = new_game(config)
    q1 = config.q + 1
    rounds: Optional[list] = [] if record_transcript else None
    offer_batch = getattr(waiter, "offer_batch", None)
    choose_batch = getattr(client, "choose_batch", None)
    while board.free_count >= q1:
        batch = None
        if offer_batch is not None:
            try:
                batch = offer_batch(board)
            except GameError as exc:
                raise MatchFault("waiter", str(exc), board.round_index) from exc
        if batch is None:
            _single_round(board, waiter, client, rounds)
            continue
        batch = np.asarray(batch, dtype=np.int64)
        if batch.ndim != 2 or batch.shape[0] == 0 or batch.shape[1] != q1:
            raise MatchFault("waiter", f"malformed offer batch of shape {batch.shape}", board.round_index)
        if choose_batch is not None:
            cols = np.asarray(client.choose_batch(board, batch), dtype=np.int64)
            try:
                chosen = board.apply_offer_batch(batch, cols)
            except ChoiceNotInOffer as exc:
                raise MatchFault("client", str(exc), board.round_index) from exc
            except GameError as exc:
                raise MatchFault("waiter", str(exc), board.round_index) from exc
            if rounds is not None:
                _record_batch(board, batch, chosen, rounds)
        else:
            us, vs = board.endpoints_array(batch.reshape(-1))
            us = us.tolist()
            vs = vs.tolist()
            id_rows = batch.tolist()
            st = board._state
            base = 0
            for ids in id_rows:
                pairs = tuple((us[base + i], vs[base + i]) for i in range(q1))
                base += q1
                if len(set(ids)) != q1:
                    raise MatchFault("waiter", "duplicate edge in batch row", board.round_index)
                for e in ids:
                    if st[e] != FREE:
                        raise MatchFault("waiter", f"edge id {e} is not free", board.round_index)
                raw = client.choose(board, pairs)
                try:
                    pos = pairs.index(raw)
                except ValueError:
                    try:
                        pos = pairs.index(_canon_edge(board.n, raw))
                    except (GameError, ValueError) as exc:
                        raise MatchFault("client", str(exc), board.round_index) from exc
                board._apply_round(pairs, ids, pos)
                if rounds is not None:
                    rounds.append((pairs, pairs[pos]))
    endgame_sweep(board)
    return MatchRecord(config, rounds, board, client_max_degree(board), config.seed)
