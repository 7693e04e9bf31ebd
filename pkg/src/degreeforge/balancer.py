"""Discrepancy balancing for two-element offer games on hypergraphs.

Each round the opponent offers two unclaimed elements; the balancer
labels the element it keeps +1 and concedes the other as -1, aiming to
keep every hyperedge's label sum within [-l_j, h_j].  The strategy
assigns each hyperedge a pair of weights taken from the random-walk
exceedance table (one per threshold side) and always picks the element
minimising the updated total weight.  If the total starts below 1 it
never increases, which pins every final discrepancy inside the
thresholds.

The max-degree instance views the edges of K_n as the universe with one
hyperedge per vertex (all edges touching it); a client using it in a
two-edge offer game keeps every vertex's kept/conceded split within
±h, bounding its maximum degree by (n-1+h)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .game import GameError, InvalidConfig, edge_count, edge_index
from .walks import WalkTable, build_walk_table

_REL_SLACK = 2.0**-30
_SYNC_INTERVAL = 256


class BalancerError(GameError):
    pass


class TableTooSmall(BalancerError):
    pass


class LabeledElement(BalancerError):
    pass


class BalanceViolation(BalancerError):
    """Total weight increased in a round although it started below 1."""


@dataclass(frozen=True)
class UBInstance:
    """Hypergraph with per-edge discrepancy thresholds [-l_j, h_j]."""

    universe_size: int
    hyperedges: tuple[tuple[int, ...], ...]
    lower: tuple[int, ...]
    upper: tuple[int, ...]

    def __post_init__(self):
        if len(self.hyperedges) != len(self.lower) or len(self.lower) != len(self.upper):
            raise InvalidConfig("threshold vectors must match the hyperedge list")
        for e in self.hyperedges:
            for x in e:
                if not 0 <= x < self.universe_size:
                    raise InvalidConfig(f"element {x} outside universe of size {self.universe_size}")
        for t in (*self.lower, *self.upper):
            if t < 0:
                raise InvalidConfig("thresholds must be non-negative")


class UBState:
    """Labels plus incrementally maintained per-edge weights.

    For hyperedge j with k_j unlabeled elements and label sum d_j the
    weights are prob(k_j, h_j - d_j) and prob(k_j, d_j + l_j); the total
    is their sum over all hyperedges.
    """

    def __init__(self, instance: UBInstance, table: WalkTable):
        max_size = max((len(e) for e in instance.hyperedges), default=0)
        if table.max_k < max_size:
            raise TableTooSmall(f"table covers k <= {table.max_k}, need {max_size}")
        self.instance = instance
        self.table = table
        self._rows = table.values.tolist()  # python lists: fast scalar lookups
        self.labels = [0] * instance.universe_size
        self.incidence: list[list[int]] = [[] for _ in range(instance.universe_size)]
        for j, e in enumerate(instance.hyperedges):
            for x in e:
                self.incidence[x].append(j)
        self.k = [len(e) for e in instance.hyperedges]
        self.d = [0] * len(instance.hyperedges)
        self.upper = list(instance.upper)
        self.lower = list(instance.lower)
        self.w_plus = [self._prob(self.k[j], self.upper[j]) for j in range(len(self.k))]
        self.w_minus = [self._prob(self.k[j], self.lower[j]) for j in range(len(self.k))]
        self.total = sum(self.w_plus) + sum(self.w_minus)
        self.initially_winning = self.total < 1.0
        self._since_sync = 0

    def _prob(self, k: int, level: int) -> float:
        if level < 0:
            return 1.0
        if level >= k:
            return 0.0
        return self._rows[k][level + 1]

    def weight_pair(self, j: int) -> tuple[float, float]:
        return self.w_plus[j], self.w_minus[j]

    def recompute_total(self) -> float:
        table = self._prob
        total = 0.0
        for j in range(len(self.k)):
            total += table(self.k[j], self.upper[j] - self.d[j])
            total += table(self.k[j], self.d[j] + self.lower[j])
        return total


def ub_init(instance: UBInstance, table: WalkTable) -> UBState:
    return UBState(instance, table)


def _scenario_total(state: UBState, plus: int, minus: int) -> float:
    """Total weight after labelling ``plus`` +1 and ``minus`` -1."""
    touched: dict[int, tuple[int, int]] = {}
    for j in state.incidence[plus]:
        touched[j] = (1, 0)
    for j in state.incidence[minus]:
        p, _ = touched.get(j, (0, 0))
        touched[j] = (p, 1)
    total = state.total
    prob = state._prob
    for j, (in_plus, in_minus) in touched.items():
        nk = state.k[j] - in_plus - in_minus
        nd = state.d[j] + in_plus - in_minus
        total += prob(nk, state.upper[j] - nd) - state.w_plus[j]
        total += prob(nk, nd + state.lower[j]) - state.w_minus[j]
    return total


def candidate_totals(state: UBState, x: int, y: int) -> tuple[float, float]:
    """Updated totals for keeping x (and conceding y) and vice versa."""
    if x == y:
        raise LabeledElement("offered elements must be distinct")
    if state.labels[x] != 0 or state.labels[y] != 0:
        raise LabeledElement("offered element already labeled")
    return _scenario_total(state, x, y), _scenario_total(state, y, x)


def balancer_choose(state: UBState, x: int, y: int) -> int:
    """Element whose keeping yields the smaller total weight; ties pick x."""
    wx, wy = candidate_totals(state, x, y)
    return x if wx <= wy else y


def ub_apply(state: UBState, balancer_elem: int, unbalancer_elem: int) -> UBState:
    """Record one round: balancer keeps one element, the other is conceded."""
    if balancer_elem == unbalancer_elem:
        raise LabeledElement("round must involve two distinct elements")
    if state.labels[balancer_elem] != 0 or state.labels[unbalancer_elem] != 0:
        raise LabeledElement("element already labeled")
    state.labels[balancer_elem] = 1
    state.labels[unbalancer_elem] = -1
    touched: dict[int, tuple[int, int]] = {}
    for j in state.incidence[balancer_elem]:
        touched[j] = (1, 0)
    for j in state.incidence[unbalancer_elem]:
        p, _ = touched.get(j, (0, 0))
        touched[j] = (p, 1)
    prob = state._prob
    for j, (in_plus, in_minus) in touched.items():
        state.k[j] -= in_plus + in_minus
        state.d[j] += in_plus - in_minus
        wp = prob(state.k[j], state.upper[j] - state.d[j])
        wm = prob(state.k[j], state.d[j] + state.lower[j])
        state.total += wp - state.w_plus[j] + wm - state.w_minus[j]
        state.w_plus[j] = wp
        state.w_minus[j] = wm
    state._since_sync += 1
    if state._since_sync >= _SYNC_INTERVAL:
        state.total = sum(state.w_plus) + sum(state.w_minus)
        state._since_sync = 0
    return state


# ----------------------------------------------------------------------
# the max-degree instance on K_n
# ----------------------------------------------------------------------

def max_degree_threshold(n: int) -> int:
    """Discrepancy threshold h for the K_n max-degree instance."""
    return int(math.floor(math.sqrt(2.0 * math.log(4.0 * n) * (n - 1)))) + 1


def max_degree_ub_instance(n: int) -> UBInstance:
    """One hyperedge per vertex: the n-1 edges of K_n touching it."""
    if n < 3:
        raise InvalidConfig("max-degree instance needs n >= 3")
    h = max_degree_threshold(n)
    # sufficient winning condition: sum of exponential weight bounds < 1/2
    bound = 2.0 * n * math.exp(-h * h / (2.0 * (n - 1)))
    if not bound < 0.5:
        raise BalancerError(f"threshold criterion failed at n={n}: {bound:.4f} >= 0.5")
    hyperedges = tuple(
        tuple(edge_index(n, v, u) for u in range(n) if u != v) for v in range(n)
    )
    return UBInstance(edge_count(n), hyperedges, (h,) * n, (h,) * n)


class BalancerClient:
    """Client for two-edge offers that balances every vertex's split.

    Guaranteed: whenever the initial total weight is below 1, every
    vertex ends with |kept - conceded| incident edges at most h, hence
    client max degree at most (n - 1 + h) / 2 before the sweep.
    """

    def __init__(self, n: int, table: WalkTable | None = None):
        if table is None:
            table = build_walk_table(n - 1)
        self.n = n
        self.threshold = max_degree_threshold(n)
        self.instance = max_degree_ub_instance(n)
        self.state = ub_init(self.instance, table)

    def choose(self, board, offer):
        if board.q != 1:
            raise InvalidConfig("balancer client plays two-edge offers only")
        (a, b) = offer
        x = board.edge_id(*a)
        y = board.edge_id(*b)
        state = self.state
        before = state.total
        wx, wy = candidate_totals(state, x, y)
        pick_x = wx <= wy
        after = wx if pick_x else wy
        if before < 1.0 and after > before * (1.0 + _REL_SLACK) + 1e-15:
            raise BalanceViolation(f"weight rose {before!r} -> {after!r}")
        if pick_x:
            ub_apply(state, x, y)
            return a
        ub_apply(state, y, x)
        return b


def balancer_client_strategy(n: int) -> BalancerClient:
    """Client strategy for the unbiased max-degree game on K_n."""
    return BalancerClient(n)
