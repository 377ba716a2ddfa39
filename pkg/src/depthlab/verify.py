"""Property suites shared by the ``verify`` command and the test suite."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pie
from .errors import ConfigError
from .games import (GameState, apply_symmetry, get_geometry, initial_state, is_terminal, legal_moves, play,
                    serialize, winner)
from .rng import make_generator


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.checked} checked, {len(self.failures)} violations"


def theorem1(n: int, seed: int) -> SuiteResult:
    """Pie-rule success rate never exceeds the best fixed opening on random tables."""
    res = SuiteResult("theorem1")
    rng = make_generator(seed)
    ks = rng.integers(1, 7, n)
    values = rng.random((n, 6, 2)).tolist()
    for k, pq in zip(ks.tolist(), values):
        t = pie.WinrateTable.from_pq(pq[:k])
        res.checked += 1
        if not pie.verify_theorem1(t):
            res.failures.append(f"w_pr={pie.w_pr(t).w} exceeds max gfm on {t.to_dict()}")
    return res


def random_state(game: str, size: int, rng: np.random.Generator) -> GameState:
    """A position reached by a uniformly random number of uniformly random moves."""
    s = initial_state(game, size)
    depth = int(rng.integers(0, get_geometry(game, size).n_cells + 1))
    for _ in range(depth):
        if is_terminal(s):
            break
        moves = legal_moves(s)
        s = play(s, moves[int(rng.integers(len(moves)))])
    return s


def symmetry(game: str, size: int, n: int, seed: int) -> SuiteResult:
    """play and winner commute with every board symmetry."""
    res = SuiteResult(f"symmetry {game} {size}")
    rng = make_generator(seed)
    geo = get_geometry(game, size)
    for _ in range(n):
        s = random_state(game, size, rng)
        for g in geo.symmetries:
            gs = apply_symmetry(s, g)
            res.checked += 1
            if winner(gs) != winner(s):
                res.failures.append(f"winner changes under {g.name} at {serialize(s)}")
                continue
            if is_terminal(s):
                continue
            moves = legal_moves(s)
            if sorted(g(m, geo) for m in moves) != sorted(legal_moves(gs)):
                res.failures.append(f"legal moves not equivariant under {g.name} at {serialize(s)}")
                continue
            m = moves[int(rng.integers(len(moves)))]
            if apply_symmetry(play(s, m), g) != play(gs, g(m, geo)):
                res.failures.append(f"play not equivariant under {g.name} at {serialize(s)} move {m}")
    return res


def iter_leaves(s: GameState):
    """Every terminal position of the full game tree below ``s`` (with repetitions)."""
    if is_terminal(s):
        yield s
        return
    moves = legal_moves(s)
    if not moves:
        yield s
        return
    for m in moves:
        yield from iter_leaves(play(s, m))


def nodraws(game: str, size: int, n: int = 10_000, seed: int | None = None) -> SuiteResult:
    """Every finished game has exactly one winner.

    Sizes whose tree is small (Y up to 3, NoGo up to 2) are searched exhaustively;
    larger ones use ``n`` random playouts and need a seed.
    """
    exhaustive = size <= (3 if game == "y" else 2)
    res = SuiteResult(f"nodraws {game} {size} ({'exhaustive' if exhaustive else 'random'})")
    geo = get_geometry(game, size)
    if exhaustive:
        for leaf in iter_leaves(initial_state(game, size)):
            res.checked += 1
            if winner(leaf) is None:
                res.failures.append(f"drawn leaf {serialize(leaf)}")
        return res
    if seed is None:
        raise ConfigError("random no-draw check needs a seed")
    rng = make_generator(seed)
    for _ in range(n):
        s = initial_state(game, size)
        while not is_terminal(s):
            if s.move_count > geo.n_cells:
                break
            moves = legal_moves(s)
            s = play(s, moves[int(rng.integers(len(moves)))])
        res.checked += 1
        if winner(s) is None:
            res.failures.append(f"playout ended without a winner at {serialize(s)}")
    return res


def replay_log(path: str | Path) -> SuiteResult:
    from .harness import MatchLog, replay

    res = SuiteResult(f"replay {path}")
    for rec in MatchLog(Path(path)).load():
        res.checked += 1
        try:
            w = replay(rec).name.lower()
        except Exception as exc:  # any rule violation counts as a failed replay
            res.failures.append(f"cell {list(rec.cell)}: {exc}")
            continue
        if w != rec.winner:
            res.failures.append(f"cell {list(rec.cell)}: recorded {rec.winner}, replay gives {w}")
    return res
