"""Exact minimax solving of small boards and oracle strategies.

Positions are encoded as one base-3 digit per edge in lexicographic
edge order; values are memoised on this encoding (optionally on its
minimum over all vertex relabelings, which collapses isomorphic
positions).  The waiter maximises the client's final maximum degree,
the client minimises it; both loops carry safe early cutoffs: a
client reply matching the current maximum degree cannot be improved,
and a waiter offer reaching the degree ceiling ends the search.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .game import (
    CLIENT,
    FREE,
    WAITER,
    Board,
    GameConfig,
    GameError,
    edge_count,
    edge_endpoints,
)


class InstanceTooLarge(GameError):
    pass


class UnsolvedInstance(GameError):
    pass


class GameSolver:
    """Memoised minimax over all lines of play of the (1:q) game on K_n."""

    def __init__(self, n: int, q: int, canonicalize: bool = False, max_edges: int = 15):
        edges = edge_count(n)
        if edges > max_edges:
            raise InstanceTooLarge(
                f"{edges} edges exceed the cap of {max_edges}; the memo could need "
                f"up to 3^{edges} entries"
            )
        self.n = n
        self.q = q
        self.num_edges = edges
        self.canonicalize = canonicalize
        self.pow3 = [3**e for e in range(edges)]
        self.pairs = [edge_endpoints(n, e) for e in range(edges)]
        self.memo: dict[int, int] = {}
        self.states_visited = 0
        self._trits = [FREE] * edges
        self._cdeg = [0] * n
        if canonicalize:
            self.perm_maps = self._edge_permutations()

    def _edge_permutations(self) -> list[list[int]]:
        maps = []
        for perm in itertools.permutations(range(self.n)):
            emap = [0] * self.num_edges
            for e, (u, v) in enumerate(self.pairs):
                a, b = perm[u], perm[v]
                if a > b:
                    a, b = b, a
                emap[e] = a * (2 * self.n - a - 1) // 2 + (b - a - 1)
            maps.append(emap)
        return maps

    def _key(self) -> int:
        trits = self._trits
        pow3 = self.pow3
        if not self.canonicalize:
            return sum(trits[e] * pow3[e] for e in range(self.num_edges))
        best = None
        for emap in self.perm_maps:
            enc = 0
            for e in range(self.num_edges):
                enc += trits[e] * pow3[emap[e]]
            if best is None or enc < best:
                best = enc
        return best

    def _value(self) -> int:
        trits = self._trits
        cdeg = self._cdeg
        free = [e for e in range(self.num_edges) if trits[e] == FREE]
        current_max = max(cdeg)
        q1 = self.q + 1
        if len(free) < q1:
            return current_max  # the sweep only feeds the waiter
        key = self._key()
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        self.states_visited += 1
        rounds_left = len(free) // q1
        ceiling = min(self.n - 1, current_max + rounds_left)
        pairs = self.pairs
        best = -1
        for offer in itertools.combinations(free, q1):
            worst = None
            for e in offer:
                for x in offer:
                    trits[x] = WAITER
                trits[e] = CLIENT
                u, v = pairs[e]
                cdeg[u] += 1
                cdeg[v] += 1
                val = self._value()
                cdeg[u] -= 1
                cdeg[v] -= 1
                for x in offer:
                    trits[x] = FREE
                if worst is None or val < worst:
                    worst = val
                if worst == current_max:
                    break  # the client cannot do better than no growth
            if worst > best:
                best = worst
            if best >= ceiling:
                break  # no offer can beat the reachable ceiling
        self.memo[key] = best
        return best

    # ------------------------------------------------------------------
    def _load(self, board: Board) -> None:
        if board.n != self.n or board.q != self.q:
            raise UnsolvedInstance("board shape does not match this solver")
        states = board.edge_states
        self._trits = [int(states[e]) for e in range(self.num_edges)]
        cdeg = [0] * self.n
        for e, s in enumerate(self._trits):
            if s == CLIENT:
                u, v = self.pairs[e]
                cdeg[u] += 1
                cdeg[v] += 1
        self._cdeg = cdeg

    def solve(self) -> int:
        """Value of the fresh board under optimal play by both sides."""
        self._trits = [FREE] * self.num_edges
        self._cdeg = [0] * self.n
        return self._value()

    def value_of(self, board: Board) -> int:
        self._load(board)
        return self._value()

    def best_offer(self, board: Board):
        """A value-maximising offer from the given position, lexicographic first."""
        self._load(board)
        trits = self._trits
        cdeg = self._cdeg
        free = [e for e in range(self.num_edges) if trits[e] == FREE]
        q1 = self.q + 1
        if len(free) < q1:
            raise UnsolvedInstance("no full offer possible from this position")
        best_val = None
        best_offer = None
        for offer in itertools.combinations(free, q1):
            worst = None
            for e in offer:
                for x in offer:
                    trits[x] = WAITER
                trits[e] = CLIENT
                u, v = self.pairs[e]
                cdeg[u] += 1
                cdeg[v] += 1
                val = self._value()
                cdeg[u] -= 1
                cdeg[v] -= 1
                for x in offer:
                    trits[x] = FREE
                if worst is None or val < worst:
                    worst = val
            if best_val is None or worst > best_val:
                best_val = worst
                best_offer = offer
        return tuple(self.pairs[e] for e in best_offer)

    def best_choice(self, board: Board, offer):
        """A value-minimising reply to the offer, first offered on ties."""
        self._load(board)
        trits = self._trits
        cdeg = self._cdeg
        ids = []
        for (u, v) in offer:
            a, b = (u, v) if u < v else (v, u)
            ids.append(a * (2 * self.n - a - 1) // 2 + (b - a - 1))
        best_val = None
        best_pos = 0
        for pos, e in enumerate(ids):
            for x in ids:
                trits[x] = WAITER
            trits[e] = CLIENT
            u, v = self.pairs[e]
            cdeg[u] += 1
            cdeg[v] += 1
            val = self._value()
            cdeg[u] -= 1
            cdeg[v] -= 1
            for x in ids:
                trits[x] = FREE
            if best_val is None or val < best_val:
                best_val = val
                best_pos = pos
        return offer[best_pos]


@dataclass
class SolveReport:
    value: int
    states_visited: int
    seconds: float


def exact_game_value(n: int, q: int, canonicalize: bool = False, max_edges: int = 15) -> int:
    """Client's final maximum degree under optimal play by both sides."""
    return GameSolver(n, q, canonicalize=canonicalize, max_edges=max_edges).solve()


def solve_with_report(n: int, q: int, canonicalize: bool = False, max_edges: int = 15) -> SolveReport:
    solver = GameSolver(n, q, canonicalize=canonicalize, max_edges=max_edges)
    start = time.perf_counter()
    value = solver.solve()
    return SolveReport(value=value, states_visited=solver.states_visited, seconds=time.perf_counter() - start)


class OracleWaiter:
    def __init__(self, solver: GameSolver):
        self.solver = solver

    def offer(self, board: Board):
        return self.solver.best_offer(board)


class OracleClient:
    def __init__(self, solver: GameSolver):
        self.solver = solver

    def choose(self, board: Board, offer):
        return self.solver.best_choice(board, offer)


def oracle_strategy(n: int, q: int, side: str, solver: GameSolver | None = None):
    """Value-optimal strategy for either side, backed by a shared solver."""
    if solver is None:
        solver = GameSolver(n, q)
        solver.solve()
    if side == "waiter":
        return OracleWaiter(solver)
    if side == "client":
        return OracleClient(solver)
    raise ValueError(f"side must be 'waiter' or 'client', got {side!r}")
