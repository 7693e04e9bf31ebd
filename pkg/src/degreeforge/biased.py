"""Strategies and threshold functions for the biased game.

Covers three regimes of the bias q:

* large bias: a client potential built from the count of still-alive
  degree-d stars (weighted by how many of their edges are still free)
  keeps the client's maximum degree below d whenever the starting
  potential is below 1; the opposing waiter plays "mega rounds" that
  shrink a candidate set by a factor r while raising every survivor's
  client degree by one;
* small bias: a multiplicative per-vertex potential with parameters
  (epsilon, alpha, beta) chosen from two runtime-verified sufficient
  conditions caps the client's degree at (1+epsilon)(n-1)/(q+1);
* the integer threshold functions separating the regimes, computed by
  exact big-integer search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .game import FREE, Board, GameError, InvalidConfig, edge_index, edge_index_array

_REL_SLACK = 2.0**-30


class CriterionFails(GameError):
    """The star-count criterion does not certify a client win."""


class NoValidParameters(GameError):
    """No potential parameters satisfy both sufficient conditions."""


class MegaRoundUnavailable(GameError):
    """(n, q) outside the regime where mega rounds are defined."""


class PotentialViolation(GameError):
    """A potential that must never increase went up."""


# ----------------------------------------------------------------------
# threshold functions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class BiasThresholds:
    """Integer degree thresholds d <= f <= D for the game on K_n with bias q."""

    f: int
    D: int
    d: int


def _search_max(predicate, stop_scanning) -> int:
    """Largest d >= 1 satisfying ``predicate``; 0 if none.

    The satisfying set is an integer interval (the defining comparison
    is log-convex in d), so we scan upward and stop once the predicate
    fails beyond the convexity dip.
    """
    best = 0
    d = 1
    while True:
        if predicate(d):
            best = d
        elif stop_scanning(d):
            return best
        d += 1


def f_threshold(n: int, q: int) -> int:
    """sup{d : (d(q+1))^d < n^(d+1)}, exact in big integers."""
    return _search_max(
        lambda d: (d * (q + 1)) ** d < n ** (d + 1),
        lambda d: d * (q + 1) >= n,
    )


def d_threshold(n: int, q: int) -> int:
    """max{d : 3(4d(q+1))^d < n^(d+1)}, exact in big integers."""
    return _search_max(
        lambda d: 3 * (4 * d * (q + 1)) ** d < n ** (d + 1),
        lambda d: 4 * d * (q + 1) >= n,
    )


def _exceeds_scaled(d: int, q: int, n: int) -> bool:
    """(d(q+1)/e)^d > n^(d+1), via logs with a high-precision fallback."""
    margin = d * (math.log(d) + math.log(q + 1) - 1.0) - (d + 1) * math.log(n)
    scale = abs(d * (math.log(d) + math.log(q + 1) + 1.0)) + abs((d + 1) * math.log(n)) + 1.0
    if abs(margin) >= 1e-9 * scale:
        return margin > 0
    import mpmath

    with mpmath.workdps(60):
        m = d * (mpmath.log(d) + mpmath.log(q + 1) - 1) - (d + 1) * mpmath.log(n)
        return m > 0


def big_d_threshold(n: int, q: int) -> int:
    """min{d : (d(q+1)/e)^d > n^(d+1)}."""
    d = 1
    while not _exceeds_scaled(d, q, n):
        d += 1
    return d


def bias_thresholds(n: int, q: int) -> BiasThresholds:
    if n < 2 or q < 1:
        raise InvalidConfig("need n >= 2 and q >= 1")
    return BiasThresholds(f=f_threshold(n, q), D=big_d_threshold(n, q), d=d_threshold(n, q))


# ----------------------------------------------------------------------
# star-count potential client (large bias)
# ----------------------------------------------------------------------

class ESClient:
    """Client avoiding degree d by minimising the alive-star potential.

    A degree-d star at a vertex is alive while the waiter holds none of
    its edges; its weight is (q+1)^-(free edges of the star).  The per
    vertex sum has the closed form
        sum_j C(c, j) * C(f, d-j) * (q+1)^-(d-j)
    over the client count c and free count f at the vertex, so no star
    is ever materialised.  Construction requires the total starting
    weight n*C(n-1,d)*(q+1)^-d below 1 (checked in exact integers),
    after which the minimising choice never lets the total grow and the
    final client degrees all stay below d.
    """

    def __init__(self, n: int, q: int, d: int):
        if d < 1 or d > n - 1:
            raise CriterionFails(f"target degree {d} out of range for n={n}")
        if n * comb(n - 1, d) >= (q + 1) ** d:
            raise CriterionFails(
                f"star-count criterion fails: {n}*C({n - 1},{d}) >= (q+1)^{d}"
            )
        self.n = n
        self.q = q
        self.d = d
        self._pw = [(q + 1) ** -j for j in range(d + 1)]
        self.phi = n * comb(n - 1, d) * self._pw[d]
        self.initial_phi = self.phi

    def _phi_vertex(self, c: int, f: int) -> float:
        d = self.d
        pw = self._pw
        total = 0.0
        for j in range(max(0, d - f), min(d, c) + 1):
            total += comb(c, j) * comb(f, d - j) * pw[d - j]
        return total

    def recompute_phi(self, board: Board) -> float:
        n1 = self.n - 1
        return sum(
            self._phi_vertex(board.client_degree(v), n1 - board.client_degree(v) - board.waiter_degree(v))
            for v in range(self.n)
        )

    def choose(self, board: Board, offer):
        n1 = self.n - 1
        counts: dict[int, int] = {}
        for (u, v) in offer:
            counts[u] = counts.get(u, 0) + 1
            counts[v] = counts.get(v, 0) + 1
        base_delta = 0.0
        gain: dict[int, float] = {}
        for w, cnt in counts.items():
            c = board.client_degree(w)
            f = n1 - c - board.waiter_degree(w)
            f_new = f - cnt
            base_delta += self._phi_vertex(c, f_new) - self._phi_vertex(c, f)
            gain[w] = self._phi_vertex(c + 1, f_new) - self._phi_vertex(c, f_new)
        deltas = [gain[u] + gain[v] for (u, v) in offer]
        tol = _REL_SLACK * max(1.0, self.phi)
        round_sum = len(offer) * base_delta + sum(deltas)
        if round_sum > tol:
            raise PotentialViolation(
                f"candidate potentials sum above (q+1)*phi by {round_sum!r}"
            )
        best = min(range(len(offer)), key=deltas.__getitem__)
        new_phi = self.phi + base_delta + deltas[best]
        if new_phi > self.phi * (1.0 + _REL_SLACK) + 1e-18:
            raise PotentialViolation(f"potential rose {self.phi!r} -> {new_phi!r}")
        self.phi = new_phi
        return offer[best]


def es_client_strategy(n: int, q: int, d: int) -> ESClient:
    return ESClient(n, q, d)


def smallest_certified_degree(n: int, q: int) -> int:
    """Smallest d whose star-count criterion certifies a client win."""
    for d in range(1, n):
        if n * comb(n - 1, d) < (q + 1) ** d:
            return d
    raise CriterionFails(f"no degree certified for n={n}, q={q}")


# ----------------------------------------------------------------------
# mega-round waiter (large bias)
# ----------------------------------------------------------------------

class MegaRoundWaiter:
    """Forces client degree d = d_threshold(n, q) via shrinking rounds.

    A candidate set of r^d vertices is split into groups of r; each
    group receives one offer spreading ceil((q+1)/r) fresh edges into
    the complement per group vertex (truncated to exactly q+1).  The
    client's kept edge elects one survivor per group, so d mega rounds
    leave one vertex whose client degree grew every round.  When
    d(q+1) <= n the average client degree already exceeds d-1 and any
    offers do; in that degenerate regime the waiter plays
    lexicographically.
    """

    def __init__(self, n: int, q: int):
        d = d_threshold(n, q)
        if d < 1:
            raise MegaRoundUnavailable(f"d_threshold({n}, {q}) = 0")
        self.n = n
        self.q = q
        self.d = d
        self.invariant_log: list[dict] = []
        self.degenerate = d * (q + 1) <= n
        if self.degenerate:
            return
        r = math.ceil(3 * d * (q + 1) / n)
        if r**d >= n / 3:
            raise MegaRoundUnavailable(f"candidate set r^d = {r**d} too large for n={n}")
        self.r = r
        self.b_start = r**d
        self.per_vertex = math.ceil((q + 1) / r)
        self.mega_index = 1
        self._active = list(range(self.b_start))
        self._groups: list[list[int]] = []
        self._round_active = False
        self._survivors: list[int] = []
        self._cursor = [self.b_start] * self.b_start  # next fresh complement vertex per candidate
        self._pending: list[tuple[int, int]] | None = None  # (edge id, owner vertex)
        self._done = False

    # -- bookkeeping ----------------------------------------------------
    def _resolve_pending(self, board: Board) -> None:
        if self._pending is None:
            return
        st = board.edge_states
        owner = None
        for eid, v in self._pending:
            if st[eid] == 1:  # CLIENT
                owner = v
                break
        if owner is None:
            raise GameError("client claimed no edge of the pending mega offer")
        self._survivors.append(owner)
        self._pending = None

    def _check_invariants(self, board: Board) -> None:
        i = self.mega_index
        active = self._active
        entry = {
            "mega_round": i,
            "active": len(active),
            "expected_active": self.r ** (self.d - i + 1),
        }
        size_ok = len(active) == entry["expected_active"]
        need_free = (self.n / (2 * self.d)) * (self.d - i + 1)
        st = board.edge_states
        comp = np.arange(self.b_start, self.n, dtype=np.int64)
        free_ok = True
        deg_ok = True
        cd = board.client_degrees
        for v in active:
            ids = edge_index_array(board.n, np.full(comp.size, v, dtype=np.int64), comp)
            if int((st[ids] == FREE).sum()) < need_free:
                free_ok = False
            if int(cd[v]) < i - 1:
                deg_ok = False
        entry.update({"size_ok": size_ok, "free_edges_ok": free_ok, "degree_ok": deg_ok})
        self.invariant_log.append(entry)
        if not (size_ok and free_ok and deg_ok):
            raise GameError(f"mega-round invariant broken before round {i}: {entry}")

    def _start_round(self, board: Board) -> None:
        if self.mega_index > 1:
            self._active = self._survivors
            self._survivors = []
        self._check_invariants(board)
        r = self.r
        self._groups = [self._active[j : j + r] for j in range(0, len(self._active), r)]
        self._round_active = True

    def _lex_offer(self, board: Board):
        ids = board.free_edge_ids()[: board.q + 1]
        us, vs = board.endpoints_array(ids)
        return tuple((int(us[i]), int(vs[i])) for i in range(ids.size))

    # -- strategy interface ---------------------------------------------
    def offer(self, board: Board):
        if self.degenerate or self._done:
            return self._lex_offer(board)
        self._resolve_pending(board)
        if not self._groups:
            if self._round_active:
                self.mega_index += 1
                self._round_active = False
            if self.mega_index > self.d:
                self._done = True
                return self._lex_offer(board)
            self._start_round(board)
        group = self._groups.pop(0)
        st = board.edge_states
        n = self.n
        picked: list[tuple[int, int]] = []
        for v in group:
            got = 0
            cur = self._cursor[v]
            while got < self.per_vertex:
                if cur >= n:
                    raise GameError(f"vertex {v} ran out of fresh complement edges")
                eid = edge_index(n, v, cur)
                cur += 1
                if st[eid] == FREE:
                    picked.append((eid, v))
                    got += 1
            self._cursor[v] = cur
        picked = picked[: self.q + 1]  # drop the tail surplus
        self._pending = picked
        pairs = []
        for eid, v in picked:
            a, b = board.endpoints_of(eid)
            pairs.append((a, b))
        return tuple(pairs)

    def offer_batch(self, board: Board) -> np.ndarray | None:
        if self.degenerate or self._done:
            return _lex_batch(board)
        if not self._groups and self._pending is not None:
            self._resolve_pending(board)
            if self._round_active:
                self.mega_index += 1
                self._round_active = False
            if self.mega_index > self.d:
                self._done = True
                return _lex_batch(board)
        return None


def _lex_batch(board: Board) -> np.ndarray | None:
    q1 = board.q + 1
    free = board.free_edge_ids()
    rounds = free.size // q1
    if rounds == 0:
        return None
    return free[: rounds * q1].reshape(rounds, q1)


def mega_round_waiter(n: int, q: int) -> MegaRoundWaiter:
    return MegaRoundWaiter(n, q)


# ----------------------------------------------------------------------
# small-bias potential client
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SmallBiasParams:
    """Parameters of the multiplicative per-vertex potential."""

    n: int
    q: int
    epsilon: float
    alpha: float
    beta: float
    alpha_multiplier: float
    e_plus: float
    e_minus: float
    psi0: float
    cap: float  # client degree bound (1+epsilon)(n-1)/(q+1)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "beta": self.beta,
            "alpha_multiplier": self.alpha_multiplier,
            "e_plus": self.e_plus,
            "e_minus": self.e_minus,
            "q_e_minus": self.q * self.e_minus,
            "psi0": self.psi0,
            "cap": self.cap,
        }


def _offer_series(q: int, alpha: float, beta: float) -> tuple[float, float]:
    """Per-round potential drift coefficients for the kept / conceded sides.

    Terms decay geometrically (beta*q < 1 in the valid regime); the sums
    stop once a term drops below 1e-18 of the running value.
    """
    half = q // 2
    b2 = beta * beta
    c = 1.0  # C(q, 2k) * beta^(2k), k = 0
    plus = 1.0
    for k in range(1, half + 1):
        c *= b2 * (q - 2 * k + 2) * (q - 2 * k + 1) / ((2 * k - 1) * (2 * k))
        term = c / (2 * k + 1)
        plus += term
        if term < 1e-18 * plus:
            break
    e_plus = alpha * plus
    e_minus = beta
    if half >= 1:
        cb = (q - 1) * b2  # C(q-1, 2k-1) * beta^(2k), k = 1
        s_even = cb / 2.0
        s_odd = cb / 3.0
        for k in range(2, half + 1):
            cb *= b2 * (q - 2 * k + 2) * (q - 2 * k + 1) / ((2 * k - 2) * (2 * k - 1))
            t_even = cb / (2 * k)
            t_odd = cb / (2 * k + 1)
            s_even += t_even
            s_odd += t_odd
            if t_even < 1e-18 * s_even and t_odd < 1e-18 * max(s_odd, 1e-300):
                break
        e_minus = beta - s_even - alpha * s_odd
    return e_plus, e_minus


def small_bias_params(n: int, q: int) -> SmallBiasParams:
    """Pick (epsilon, alpha, beta) and verify both sufficient conditions.

    alpha starts at (q+1)/(5q+1) * epsilon; if either the drift
    condition e_plus <= q*e_minus or the starting potential psi0 < 1
    fails, the alpha multiplier is scanned over [0.5, 1.5] in steps of
    0.01 and the first passing value is taken.
    """
    if n < 3 or q < 1:
        raise NoValidParameters(f"no potential parameters for n={n}, q={q}")
    epsilon = 4.0 * math.sqrt((q + 1) * math.log(n) / n)
    if epsilon >= 1.0:
        raise NoValidParameters(f"epsilon = {epsilon:.4f} >= 1 at n={n}, q={q}")
    base_alpha = (q + 1) / (5.0 * q + 1.0) * epsilon
    last = None
    for mult in [1.0] + [0.5 + 0.01 * i for i in range(101)]:
        alpha = mult * base_alpha
        beta = (alpha + 2.0 * alpha * alpha) / q
        if beta >= 1.0 or beta * q >= 1.0:
            last = (mult, float("nan"), float("nan"), float("nan"))
            continue
        e_plus, e_minus = _offer_series(q, alpha, beta)
        psi0 = n * math.exp(
            -((n - 1) / (q + 1)) * ((1 + epsilon) * math.log1p(alpha) + (q - epsilon) * math.log1p(-beta))
        )
        last = (mult, e_plus, q * e_minus, psi0)
        if e_plus <= q * e_minus and psi0 < 1.0:
            return SmallBiasParams(
                n=n,
                q=q,
                epsilon=epsilon,
                alpha=alpha,
                beta=beta,
                alpha_multiplier=mult,
                e_plus=e_plus,
                e_minus=e_minus,
                psi0=psi0,
                cap=(1 + epsilon) * (n - 1) / (q + 1),
            )
    raise NoValidParameters(
        f"no multiplier passed at n={n}, q={q}; last tried {last[0]:.2f}: "
        f"e_plus={last[1]!r} vs q*e_minus={last[2]!r}, psi0={last[3]!r}"
    )


class SmallBiasClient:
    """Client keeping every degree below (1+epsilon)(n-1)/(q+1).

    Every vertex carries a multiplicative potential that gains a factor
    (1+alpha) per kept incident edge and (1-beta) per conceded one;
    each round the client keeps the offered edge whose two endpoint
    potentials sum smallest.  Under the construction-time conditions
    the total potential never increases, and since a vertex at the
    degree cap would push its own term to 1, the cap holds at the end.
    """

    def __init__(self, n: int, q: int, params: SmallBiasParams | None = None):
        if params is None:
            params = small_bias_params(n, q)
        self.n = n
        self.q = q
        self.params = params
        per_vertex = params.psi0 / n
        self.psi = [per_vertex] * n
        self.total = params.psi0
        self.up = 1.0 + params.alpha
        self.down = 1.0 - params.beta
        self._alpha = params.alpha
        self._beta = params.beta
        self._since_sync = 0

    def recompute_total(self, board: Board) -> float:
        cd = board.client_degrees
        wd = board.waiter_degrees
        base = self.params.psi0 / self.n
        return float(
            np.sum(base * np.power(self.up, cd.astype(float)) * np.power(self.down, wd.astype(float)))
        )

    def choose(self, board: Board, offer):
        psi = self.psi
        best = math.inf
        bi = 0
        for i, (u, v) in enumerate(offer):
            s = psi[u] + psi[v]
            if s < best:
                best = s
                bi = i
        old = self.total
        tot = old
        a = self._alpha
        b = self._beta
        up = self.up
        down = self.down
        for i, (u, v) in enumerate(offer):
            pu = psi[u]
            pv = psi[v]
            if i == bi:
                psi[u] = pu * up
                psi[v] = pv * up
                tot += (pu + pv) * a
            else:
                psi[u] = pu * down
                psi[v] = pv * down
                tot -= (pu + pv) * b
        if tot > old * (1.0 + _REL_SLACK) + 1e-18:
            raise PotentialViolation(f"potential rose {old!r} -> {tot!r}")
        self._since_sync += 1
        if self._since_sync >= 1024:
            self.total = math.fsum(psi)
            self._since_sync = 0
        else:
            self.total = tot
        return offer[bi]


def small_bias_client_strategy(n: int, q: int, params: SmallBiasParams | None = None) -> SmallBiasClient:
    return SmallBiasClient(n, q, params)
