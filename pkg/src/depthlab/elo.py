"""Elo win-probability model, playing-level complexity (PLC) and game depth.

PLC is the Elo spread of a player pool.  It is computed either as the sum of
the Elo gaps between consecutive players (``plc_chain``) or directly from the
strongest-vs-weakest probability (``plc_extremes``); the two agree only when
the Elo model holds exactly.  Depth is the longest chain of players in which
each beats the next with probability at least 60%.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import ConfigError, DomainError

DEPTH_THRESHOLD = 0.6


def elo_win_prob(ra: float, rb: float) -> float:
    """Probability that a player rated ``ra`` beats one rated ``rb``."""
    return 1.0 / (1.0 + 10.0 ** ((rb - ra) / 400.0))


def elo_gap(p: float) -> float:
    """Rating difference implied by win probability ``p``."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"Elo gap is infinite for probability {p!r}")
    return -400.0 * math.log10(1.0 / p - 1.0)


LEVEL_RATIO = elo_gap(DEPTH_THRESHOLD)


def clamp_probability(p: float, games: int, scale: float = 2.0) -> float:
    """Pull an empirical winrate away from 0/1 by ``1/(scale*games)``.

    Analytic probabilities (``games == 0``) are returned unchanged.
    """
    if games <= 0:
        return p
    eps = 1.0 / (scale * games)
    return min(max(p, eps), 1.0 - eps)


def plc_extremes(p_strong_vs_weak: float) -> float:
    return elo_gap(p_strong_vs_weak)


def depth_from_plc(plc: float) -> tuple[float, int]:
    """``(plc / LEVEL_RATIO, 1 + floor of that)``."""
    if plc < 0:
        raise DomainError(f"PLC must be non-negative, got {plc}")
    frac = plc / LEVEL_RATIO
    return frac, 1 + math.floor(frac)


@dataclass
class WinMatrix:
    """Pairwise win probabilities; ``p[i][j]`` is the chance that ``i`` beats ``j``.

    ``counts[i][j]`` is the number of games behind ``p[i][j]`` (0 for analytic values).
    """

    labels: list[str]
    p: list[list[float]]
    counts: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.labels)
        if n < 1:
            raise ConfigError("a WinMatrix needs at least one player")
        if len(self.p) != n or any(len(row) != n for row in self.p):
            raise ConfigError("p must be an n x n matrix")
        if not self.counts:
            self.counts = [[0] * n for _ in range(n)]
        elif len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ConfigError("counts must be an n x n matrix")
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.p[i][j], self.p[j][i]
                if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
                    raise ConfigError(f"probabilities out of [0,1] at ({i},{j})")
                if abs(a + b - 1.0) > 1e-9:
                    raise ConfigError(f"p[{i}][{j}] + p[{j}][{i}] must equal 1")

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def from_ratings(cls, ratings: Sequence[float], labels: Sequence[str] | None = None) -> "WinMatrix":
        n = len(ratings)
        labels = list(labels) if labels else [f"p{i}" for i in range(n)]
        p = [[0.5 if i == j else elo_win_prob(ratings[i], ratings[j]) for j in range(n)] for i in range(n)]
        return cls(labels, p)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "p": self.p, "counts": self.counts}

    @classmethod
    def from_dict(cls, d: dict) -> "WinMatrix":
        try:
            return cls(list(d["labels"]), [list(map(float, r)) for r in d["p"]],
                       [list(map(int, r)) for r in d.get("counts", [])])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed WinMatrix: {exc}") from None

    def strength_order(self) -> list[int]:
        """Players weakest to strongest by mean winrate against the rest; ties by label."""
        n = self.n

        def score(i):
            others = [self.p[i][j] for j in range(n) if j != i]
            return sum(others) / len(others) if others else 0.0

        return sorted(range(n), key=lambda i: (score(i), self.labels[i]))


@dataclass
class ChainGaps:
    gaps: list[float]
    plc: float
    clamped: list[bool]
    low: float
    high: float


def _gap_with_envelope(p: float, games: int) -> tuple[float, bool, float, float]:
    """Clamped gap, whether clamping applied, and the gap range over clamp scales 1 and 4."""
    q = clamp_probability(p, games)
    gap = elo_gap(q)
    if games <= 0:
        return gap, False, gap, gap
    alt = [elo_gap(clamp_probability(p, games, s)) for s in (1.0, 4.0)]
    return gap, q != p, min(alt + [gap]), max(alt + [gap])


def plc_chain(m: WinMatrix, order: Sequence[int] | None = None) -> ChainGaps:
    """Sum of Elo gaps between consecutive players in ``order`` (weakest first).

    Degenerate 0/1 empirical probabilities are clamped (see ``clamp_probability``);
    ``low``/``high`` give the PLC range under a looser and a tighter clamp.
    """
    order = list(order) if order is not None else m.strength_order()
    gaps, flags, lows, highs = [], [], [], []
    for prev, nxt in zip(order, order[1:]):
        gap, flag, lo, hi = _gap_with_envelope(m.p[nxt][prev], m.counts[nxt][prev])
        gaps.append(gap)
        flags.append(flag)
        lows.append(lo)
        highs.append(hi)
    return ChainGaps(gaps, sum(gaps), flags, sum(lows), sum(highs))


def depth_chain(m: WinMatrix, threshold: float = DEPTH_THRESHOLD) -> tuple[int, list[int]]:
    """Longest sequence of distinct players each beating the next with probability >= threshold.

    Returned strongest first.  The beats-relation may contain cycles with noisy
    data, so this is an exact longest-simple-path search: dynamic programming
    when the relation is acyclic, otherwise depth-first enumeration pruned by
    the number of players still reachable.
    """
    n = m.n
    succ = [[j for j in range(n) if j != i and m.p[i][j] >= threshold] for i in range(n)]
    topo = _topological_order(succ)
    if topo is not None:
        best_len = [1] * n
        best_next = [-1] * n
        for i in reversed(topo):
            for j in succ[i]:
                if best_len[j] + 1 > best_len[i] or (best_len[j] + 1 == best_len[i] and j < best_next[i]):
                    best_len[i] = best_len[j] + 1
                    best_next[i] = j
        start = max(range(n), key=lambda i: (best_len[i], -i))
        chain = [start]
        while best_next[chain[-1]] >= 0:
            chain.append(best_next[chain[-1]])
        return len(chain), chain
    return _longest_simple_path(succ)


def _topological_order(succ):
    n = len(succ)
    indeg = [0] * n
    for i in range(n):
        for j in succ[i]:
            indeg[j] += 1
    ready = [i for i in range(n) if indeg[i] == 0]
    out = []
    while ready:
        i = ready.pop(0)
        out.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return out if len(out) == n else None


def _longest_simple_path(succ):
    n = len(succ)
    best: list[int] = [0]

    def reach_count(node, visited):
        seen = {node}
        stack = [node]
        while stack:
            for j in succ[stack.pop()]:
                if j not in seen and not visited >> j & 1:
                    seen.add(j)
                    stack.append(j)
        return len(seen)

    def dfs(path, visited):
        nonlocal best
        if len(path) > len(best):
            best = list(path)
        if len(best) == n:
            return
        last = path[-1]
        if len(path) - 1 + reach_count(last, visited & ~(1 << last)) <= len(best):
            return
        for j in succ[last]:
            if not visited >> j & 1:
                path.append(j)
                dfs(path, visited | 1 << j)
                path.pop()

    for start in range(n):
        dfs([start], 1 << start)
    return len(best), best


@dataclass
class DepthReport:
    plc_chain: float
    plc_extremes: float
    depth_fractional: float
    depth_integer: int
    chain: list[int]
    order: list[int]
    gaps: list[float]
    clamped: list[bool]
    plc_chain_low: float
    plc_chain_high: float

    def to_dict(self) -> dict:
        return asdict(self)


def depth_report(m: WinMatrix, threshold: float = DEPTH_THRESHOLD) -> DepthReport:
    """PLC both ways, depth from PLC and the explicit 60% chain of a win matrix."""
    order = m.strength_order()
    chain_gaps = plc_chain(m, order)
    weak, strong = order[0], order[-1]
    if m.n > 1:
        extremes = elo_gap(clamp_probability(m.p[strong][weak], m.counts[strong][weak]))
    else:
        extremes = 0.0
    frac, integer = depth_from_plc(max(chain_gaps.plc, 0.0))
    _, chain = depth_chain(m, threshold)
    return DepthReport(chain_gaps.plc, extremes, frac, integer, chain, order, chain_gaps.gaps,
                       chain_gaps.clamped, chain_gaps.low, chain_gaps.high)
