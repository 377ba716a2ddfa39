"""Players: a budgeted UCT Monte-Carlo tree search agent and a uniform-random agent."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, UsageError
from .games import GameState, Move, is_terminal, legal_moves
from .games.fast import fast_rules
from .rng import make_generator

KINDS = ("mcts", "random")


@dataclass(frozen=True)
class PlayerSpec:
    kind: str = "mcts"
    simulations: int = 1
    exploration: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown player kind {self.kind!r}")
        if not isinstance(self.simulations, int) or self.simulations < 1:
            raise ConfigError(f"simulations must be a positive integer, got {self.simulations!r}")
        if not self.exploration > 0:
            raise ConfigError(f"exploration must be positive, got {self.exploration!r}")
        if not self.label:
            default = f"mcts-{self.simulations}" if self.kind == "mcts" else "random"
            object.__setattr__(self, "label", default)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PlayerSpec":
        unknown = set(d) - {"kind", "simulations", "exploration", "label"}
        if unknown:
            raise ConfigError(f"unknown PlayerSpec fields {sorted(unknown)}")
        return cls(**d)


def ladder(n: int, base: int, step: str = "geometric", factor: int | None = None) -> list[PlayerSpec]:
    """Budget ladder of ``n`` MCTS players.

    ``linear``: base, 2*base, ..., n*base.
    ``geometric``: base * factor**i for i = 0..n-1, or base**i when ``factor`` is None.
    """
    if n < 2:
        raise ConfigError("a ladder needs at least 2 players")
    if base < 1:
        raise ConfigError("ladder base must be positive")
    if step == "linear":
        budgets = [base * (i + 1) for i in range(n)]
    elif step == "geometric":
        budgets = [base ** i if factor is None else base * factor ** i for i in range(n)]
    else:
        raise ConfigError(f"unknown ladder step {step!r}")
    return [PlayerSpec("mcts", b) for b in budgets]


class _Node:
    __slots__ = ("cell", "mover", "parent", "children", "untried", "visits", "wins", "winner")

    def __init__(self, cell, mover, parent, untried, winner):
        self.cell = cell
        self.mover = mover
        self.parent = parent
        self.children: list[_Node] = []
        self.untried = untried
        self.visits = 0
        self.wins = 0
        self.winner = winner


class Agent:
    """A player bound to its own generator.  Not safe to share between workers."""

    def __init__(self, spec: PlayerSpec, seed: int):
        self.spec = spec
        self.seed = seed
        self.rng = make_generator(seed)
        self.last_playouts = 0

    def select_move(self, s: GameState) -> Move:
        if is_terminal(s):
            raise UsageError("select_move called on a terminal state")
        if self.spec.kind == "random":
            moves = legal_moves(s)
            return moves[int(self.rng.integers(len(moves)))]
        return self._search(s)

    def _search(self, s: GameState) -> Move:
        rules = fast_rules(s.game, s.size)
        root_board = np.array(s.board, dtype=np.int8)
        to_move = int(s.to_move)
        root = _Node(-1, 3 - to_move, None, rules.legal(root_board, to_move), 0)
        root.untried.reverse()
        c = self.spec.exploration
        stream = np.array([self.rng.integers(0, 2**64, dtype=np.uint64)], dtype=np.uint64)
        playouts = 0
        for _ in range(self.spec.simulations):
            node = root
            board = root_board.copy()
            color = to_move
            while not node.winner and not node.untried and node.children:
                log_n = math.log(node.visits)
                best = None
                best_value = -1.0
                for child in node.children:
                    value = child.wins / child.visits + c * math.sqrt(log_n / child.visits)
                    if value > best_value:
                        best, best_value = child, value
                node = best
                board[node.cell] = color
                color = 3 - color
            if not node.winner and node.untried:
                cell = node.untried.pop()
                board[cell] = color
                won, nxt = rules.after_move(board, cell, color)
                nxt.reverse()
                child = _Node(cell, color, node, nxt, won)
                node.children.append(child)
                node = child
                color = 3 - color
            result = node.winner or rules.playout(board, color, stream)
            playouts += 1
            while node is not None:
                node.visits += 1
                if node.mover == result:
                    node.wins += 1
                node = node.parent
        self.last_playouts = playouts
        best = max(root.children, key=lambda ch: ch.visits)
        return s.geometry.move_of(best.cell)


def make_agent(spec: PlayerSpec, seed: int) -> Agent:
    return Agent(spec, seed)
