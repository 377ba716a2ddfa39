"""First-move rules evaluated exactly on winrate tables.

For one pair of players (strong vs weak) a :class:`WinrateTable` gives, for
every opening ``i``, the strong player's winrate ``p`` when it plays Black
(moves 3, 5, ...) and ``q`` when it plays White (moves 2, 4, ...).  Roles are
drawn at random, so each rule's success rate averages the two role draws:

* ``RDR+GFM(i)``: the rules fix opening ``i``; ``w = (p_i + q_i) / 2``.
* ``RDR``: the first mover picks the opening; ``w = (max p + min q) / 2``.
* ``RDR+PR``: the first mover picks the opening, the opponent may swap roles;
  ``w = (min_i max(p_i, q_i) + max_i min(p_i, q_i)) / 2``.

Ties between equally rational openings go to the lowest index.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .elo import clamp_probability, elo_gap
from .errors import ConfigError

RDR = "RDR"
PR = "RDR+PR"
GFM = "RDR+GFM"


@dataclass(frozen=True)
class Opening:
    id: str
    p: float
    q: float
    n_p: int = 0
    n_q: int = 0


@dataclass(frozen=True)
class WinrateTable:
    openings: tuple[Opening, ...]
    pair: tuple[str, str] = ("strong", "weak")

    def __post_init__(self):
        object.__setattr__(self, "openings", tuple(self.openings))
        object.__setattr__(self, "pair", tuple(self.pair))
        if not self.openings:
            raise ConfigError("a winrate table needs at least one opening")
        for o in self.openings:
            if not (0.0 <= o.p <= 1.0 and 0.0 <= o.q <= 1.0):
                raise ConfigError(f"opening {o.id}: winrates must lie in [0, 1]")
            if o.n_p < 0 or o.n_q < 0:
                raise ConfigError(f"opening {o.id}: counts must be non-negative")

    @property
    def K(self) -> int:
        return len(self.openings)

    @property
    def p(self) -> list[float]:
        return [o.p for o in self.openings]

    @property
    def q(self) -> list[float]:
        return [o.q for o in self.openings]

    @property
    def low_count(self) -> bool:
        """True when some cell rests on a single game."""
        return any(c == 1 for o in self.openings for c in (o.n_p, o.n_q))

    @classmethod
    def from_pq(cls, pq: Iterable[tuple[float, float]], ids: Sequence[str] | None = None,
                pair=("strong", "weak")) -> "WinrateTable":
        pq = list(pq)
        ids = list(ids) if ids else [chr(ord("A") + i) if i < 26 else f"m{i}" for i in range(len(pq))]
        return cls(tuple(Opening(i, float(p), float(q)) for i, (p, q) in zip(ids, pq)), pair)

    def swapped(self, index: int) -> "WinrateTable":
        """The same table with ``p`` and ``q`` exchanged for one opening."""
        ops = list(self.openings)
        o = ops[index]
        ops[index] = Opening(o.id, o.q, o.p, o.n_q, o.n_p)
        return WinrateTable(tuple(ops), self.pair)

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "openings": [{"id": o.id, "p": o.p, "q": o.q, "n_p": o.n_p, "n_q": o.n_q} for o in self.openings],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WinrateTable":
        if not isinstance(d, dict) or not isinstance(d.get("openings"), list):
            raise ConfigError("winrate table JSON needs an 'openings' list")
        ops = []
        for k, o in enumerate(d["openings"]):
            try:
                ops.append(Opening(str(o.get("id", k)), float(o["p"]), float(o["q"]),
                                   int(o.get("n_p", 0)), int(o.get("n_q", 0))))
            except (KeyError, TypeError, ValueError, AttributeError):
                raise ConfigError(f"opening #{k}: needs numeric 'p' and 'q'") from None
        return cls(tuple(ops), tuple(d.get("pair", ("strong", "weak"))))


@dataclass(frozen=True)
class RuleOutcome:
    """Success rate ``w`` of the strong player under one rule.

    ``games`` counts the games behind ``w`` (0 for analytic tables); it drives clamping.
    """

    rule: str
    w: float
    chosen_opening: str | None = None
    swap: bool | None = None
    games: int = 0

    @property
    def gap(self) -> float:
        return elo_gap(clamp_probability(self.w, self.games))


def _argmax(values):
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def _argmin(values):
    return _argmax([-v for v in values])


def w_gfm(t: WinrateTable, i: int) -> RuleOutcome:
    if not 0 <= i < t.K:
        raise IndexError(f"opening index {i} out of range for K={t.K}")
    o = t.openings[i]
    return RuleOutcome(f"{GFM}({i})", (o.p + o.q) / 2, o.id, None, o.n_p + o.n_q)


def w_rdr(t: WinrateTable) -> RuleOutcome:
    i = _argmax(t.p)
    j = _argmin(t.q)
    games = t.openings[i].n_p + t.openings[j].n_q
    return RuleOutcome(RDR, (t.openings[i].p + t.openings[j].q) / 2, t.openings[i].id, None, games)


def _pr_choices(t: WinrateTable):
    hi = [max(o.p, o.q) for o in t.openings]
    lo = [min(o.p, o.q) for o in t.openings]
    return _argmax(lo), _argmin(hi), lo, hi


def w_pr(t: WinrateTable) -> RuleOutcome:
    """Success rate with the pie rule when every choice is rational.

    ``chosen_opening`` is the strong player's opening; ``swap`` tells whether
    the weak player, choosing sides, leaves the strong player as White.
    """
    i_strong, i_weak, lo, hi = _pr_choices(t)
    a, b = t.openings[i_strong], t.openings[i_weak]
    games = (a.n_p if a.p <= a.q else a.n_q) + (b.n_p if b.p >= b.q else b.n_q)
    return RuleOutcome(PR, (hi[i_weak] + lo[i_strong]) / 2, a.id, a.q < a.p, games)


def pr_decision(t: WinrateTable, mover_is_stronger: bool) -> tuple[str, bool]:
    """Rational opening and side assignment under the pie rule.

    Returns ``(opening id, strong player ends as White)``.  The strong mover
    picks the opening maximising ``min(p, q)`` and the weak opponent gives it
    the worse side; the weak mover picks the opening minimising ``max(p, q)``
    and the strong opponent takes the better side.  Equal sides leave the
    strong player as Black.
    """
    i_strong, i_weak, _, _ = _pr_choices(t)
    if mover_is_stronger:
        o = t.openings[i_strong]
        return o.id, o.q < o.p
    o = t.openings[i_weak]
    return o.id, o.q > o.p


def verify_theorem1(t: WinrateTable) -> bool:
    return w_pr(t).w <= max((o.p + o.q) / 2 for o in t.openings) + 1e-12


def rule_outcome(t: WinrateTable, rule: str, index: int | None = None) -> RuleOutcome:
    if rule == RDR:
        return w_rdr(t)
    if rule == PR:
        return w_pr(t)
    if rule == GFM:
        if index is None:
            raise ConfigError("RDR+GFM needs an opening index")
        return w_gfm(t, index)
    raise ConfigError(f"unknown rule {rule!r}")


@dataclass
class RulePlc:
    rule: str
    outcomes: list[RuleOutcome]
    gaps: list[float]
    plc: float


@dataclass
class GfmPlc:
    """PLC with a fixed opening shared by every pair, for each opening index."""

    per_index: list[RulePlc]
    best: RulePlc
    worst: RulePlc
    envelope: RulePlc = field(repr=False)

    @property
    def best_index(self) -> int:
        return self.per_index.index(self.best)


def _pool_plc(rule: str, outcomes: list[RuleOutcome]) -> RulePlc:
    gaps = [o.gap for o in outcomes]
    return RulePlc(rule, outcomes, gaps, math.fsum(gaps))


def plc_under_rule(pool: Sequence[WinrateTable], rule: str):
    """PLC of a ladder given the tables of its adjacent pairs, weakest pair first.

    ``RDR`` and ``RDR+PR`` give a :class:`RulePlc`.  ``RDR+GFM`` gives a
    :class:`GfmPlc`: one opening index is used by every pair, and ``envelope``
    lets each pair use its own best opening (an upper bound, not a rule).
    """
    if not pool:
        raise ConfigError("plc_under_rule needs at least one table")
    if rule in (RDR, PR):
        return _pool_plc(rule, [rule_outcome(t, rule) for t in pool])
    if rule != GFM:
        raise ConfigError(f"unknown rule {rule!r}")
    K = pool[0].K
    if any(t.K != K for t in pool):
        raise ConfigError("RDR+GFM needs the same openings in every table")
    per_index = [_pool_plc(f"{GFM}({i})", [w_gfm(t, i) for t in pool]) for i in range(K)]
    best = per_index[_argmax([r.plc for r in per_index])]
    worst = per_index[_argmin([r.plc for r in per_index])]
    envelope = _pool_plc(f"{GFM}(per-pair)", [max((w_gfm(t, i) for i in range(K)), key=lambda o: o.w)
                                              for t in pool])
    return GfmPlc(per_index, best, worst, envelope)


@dataclass
class SearchHit:
    trial: int
    pool: list[WinrateTable]
    plc_pr: float
    plc_gfm_best: float

    @property
    def margin(self) -> float:
        return self.plc_pr - self.plc_gfm_best


HIT_TOLERANCE = 1e-9


def pr_superiority(pool: Sequence[WinrateTable]) -> float:
    """PR PLC minus the best shared-fixed-opening PLC (positive means PR is deeper)."""
    return plc_under_rule(pool, PR).plc - plc_under_rule(pool, GFM).best.plc


def random_table(rng: np.random.Generator, K: int, pair=("strong", "weak")) -> WinrateTable:
    """Independent uniform winrates per (opening, side)."""
    return WinrateTable.from_pq(rng.random((K, 2)).tolist(), pair=pair)


def search_pr_superiority(n_players: int = 3, K: int = 2, trials: int = 10_000, seed: int = 0) -> list[SearchHit]:
    """Random pools where the pie rule yields a larger PLC than any fixed opening."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if n_players < 2:
        raise ConfigError("a pool needs at least 2 players")
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = []
    for trial in range(trials):
        pool = [random_table(rng, K, (f"p{k + 1}", f"p{k}")) for k in range(n_players - 1)]
        pr_plc = plc_under_rule(pool, PR).plc
        gfm_best = plc_under_rule(pool, GFM).best.plc
        if pr_plc - gfm_best > HIT_TOLERANCE:
            hits.append(SearchHit(trial, pool, pr_plc, gfm_best))
    return hits


FIXTURES: dict[str, list[WinrateTable]] = {
    "table3a": [WinrateTable.from_pq([(1.0, 0.9), (0.5, 0.9)], pair=("1", "2"))],
    "table3b": [WinrateTable.from_pq([(1.0, 0.5), (1.0, 0.0001)], pair=("1", "2"))],
    # two adjacent pairs of a three-player pool; the "2 vs 3" pair is listed first
    "table3c": [
        WinrateTable.from_pq([(0.37, 0.67), (0.68, 0.94)], pair=("2", "3")),
        WinrateTable.from_pq([(0.96, 0.99), (0.71, 0.95)], pair=("1", "2")),
    ],
}


def fixture(name: str) -> list[WinrateTable]:
    try:
        return list(FIXTURES[name])
    except KeyError:
        raise ConfigError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}") from None


def load_pool(text: str) -> list[WinrateTable]:
    """Parse a single table object or a list of tables (a pool) from JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if isinstance(data, dict) and "pool" in data:
        data = data["pool"]
    items = data if isinstance(data, list) else [data]
    if not items:
        raise ConfigError("empty pool")
    return [WinrateTable.from_dict(d) for d in items]
