"""Game-independent position, move and symmetry types plus the public rules API.

Boards are flat tuples indexed in row-major order: cell 0 is row 0, column 0.
Each game supplies a :class:`Geometry` that knows its coordinates, adjacency,
symmetry group and rules; geometries are cached per (game, size).
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, RuleViolation, UsageError

EMPTY = 0


class Color(enum.IntEnum):
    BLACK = 1
    WHITE = 2

    @property
    def opponent(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK

    @property
    def letter(self) -> str:
        return "B" if self is Color.BLACK else "W"

    @classmethod
    def parse(cls, text: str) -> "Color":
        key = text.strip().lower()
        if key in ("b", "black"):
            return cls.BLACK
        if key in ("w", "white"):
            return cls.WHITE
        raise ValueError(f"not a colour: {text!r}")


@dataclass(frozen=True, order=True)
class Move:
    """A stone placement.  ``cell`` is ``(row, column)`` for both games."""

    cell: tuple[int, int]

    def __str__(self) -> str:
        return f"{self.cell[0]},{self.cell[1]}"


@dataclass(frozen=True)
class Symmetry:
    """A board automorphism, stored as a permutation of cell indices."""

    name: str
    perm: tuple[int, ...]

    def __call__(self, move: Move, geometry: "Geometry") -> Move:
        return geometry.move_of(self.perm[geometry.index_of(move)])

    def compose(self, other: "Symmetry") -> "Symmetry":
        """``self ∘ other``: apply ``other`` first."""
        return Symmetry(f"{self.name}*{other.name}", tuple(self.perm[i] for i in other.perm))


class Geometry:
    """Board layout and rules of one game at one size."""

    game: str = ""
    max_size: int = 0
    max_neighbors: int = 0

    def __init__(self, size: int):
        self.size = size
        self.coords: tuple[tuple[int, int], ...] = tuple(self._make_coords())
        self._index = {rc: i for i, rc in enumerate(self.coords)}
        self.neighbors: tuple[tuple[int, ...], ...] = tuple(
            tuple(self._index[rc] for rc in self._neighbor_coords(*c) if rc in self._index)
            for c in self.coords
        )
        nbr = np.full((len(self.coords), self.max_neighbors), -1, dtype=np.int64)
        for i, ns in enumerate(self.neighbors):
            nbr[i, : len(ns)] = ns
        self.nbr_array = nbr
        self.symmetries: tuple[Symmetry, ...] = tuple(self._make_symmetries())

    # -- layout hooks -------------------------------------------------------
    def _make_coords(self):
        raise NotImplementedError

    def _neighbor_coords(self, r: int, c: int):
        raise NotImplementedError

    def _make_symmetries(self):
        raise NotImplementedError

    # -- rules hooks --------------------------------------------------------
    def violation(self, board: tuple[int, ...], cell: int, color: Color) -> str | None:
        """Name of the rule broken by ``color`` playing ``cell``, or None if legal."""
        raise NotImplementedError

    def compute_winner(self, state: "GameState") -> Color | None:
        raise NotImplementedError

    def opening_cells(self) -> list[int]:
        raise NotImplementedError

    # -- helpers ------------------------------------------------------------
    @property
    def n_cells(self) -> int:
        return len(self.coords)

    def index_of(self, move: Move) -> int:
        try:
            return self._index[tuple(move.cell)]
        except KeyError:
            raise RuleViolation("off-board", f"{move.cell} is not on the {self.game} board of size {self.size}") from None

    def move_of(self, cell: int) -> Move:
        return Move(self.coords[cell])

    def legal_cells(self, board: tuple[int, ...], color: Color) -> list[int]:
        return [i for i in range(self.n_cells) if self.violation(board, i, color) is None]

    def orbits(self) -> list[list[int]]:
        """Cells grouped by orbit under the symmetry group, each sorted, ordered by representative."""
        seen: set[int] = set()
        out = []
        for i in range(self.n_cells):
            if i in seen:
                continue
            orbit = sorted({g.perm[i] for g in self.symmetries})
            seen.update(orbit)
            out.append(orbit)
        return out


_REGISTRY: dict[str, type[Geometry]] = {}


def register(cls: type[Geometry]) -> type[Geometry]:
    _REGISTRY[cls.game] = cls
    return cls


def supported_games() -> list[str]:
    return sorted(_REGISTRY)


@functools.lru_cache(maxsize=None)
def get_geometry(game: str, size: int) -> Geometry:
    cls = _REGISTRY.get(game)
    if cls is None:
        raise ConfigError(f"unsupported game {game!r}; expected one of {supported_games()}")
    if not isinstance(size, int) or not 1 <= size <= cls.max_size:
        raise ConfigError(f"{game} supports sizes 1-{cls.max_size}, got {size!r}")
    return cls(size)


@dataclass(frozen=True)
class GameState:
    """Immutable position.  ``play`` returns a new state."""

    game: str
    size: int
    board: tuple[int, ...]
    to_move: Color = Color.BLACK
    move_count: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def geometry(self) -> Geometry:
        return get_geometry(self.game, self.size)

    def stones(self) -> dict[tuple[int, int], Color]:
        coords = self.geometry.coords
        return {coords[i]: Color(v) for i, v in enumerate(self.board) if v != EMPTY}

    def __str__(self) -> str:
        return render(self)


def initial_state(game: str, size: int) -> GameState:
    geo = get_geometry(game, size)
    return GameState(game, size, (EMPTY,) * geo.n_cells)


def winner(s: GameState) -> Color | None:
    if "winner" not in s._cache:
        s._cache["winner"] = s.geometry.compute_winner(s)
    return s._cache["winner"]


def is_terminal(s: GameState) -> bool:
    return winner(s) is not None


def _legal_cells(s: GameState) -> list[int]:
    if "legal" not in s._cache:
        s._cache["legal"] = s.geometry.legal_cells(s.board, s.to_move)
    return s._cache["legal"]


def legal_moves(s: GameState) -> list[Move]:
    """Legal moves for the side to move, in row-major order."""
    if is_terminal(s):
        raise UsageError("legal_moves called on a terminal state")
    geo = s.geometry
    return [geo.move_of(i) for i in _legal_cells(s)]


def play(s: GameState, m: Move) -> GameState:
    geo = s.geometry
    cell = geo.index_of(m)
    if is_terminal(s):
        raise UsageError("play called on a terminal state")
    rule = geo.violation(s.board, cell, s.to_move)
    if rule is not None:
        raise RuleViolation(rule, f"{s.to_move.name} {m} is illegal ({rule})")
    board = list(s.board)
    board[cell] = int(s.to_move)
    return GameState(s.game, s.size, tuple(board), s.to_move.opponent, s.move_count + 1)


def symmetries(game: str, size: int) -> tuple[Symmetry, ...]:
    return get_geometry(game, size).symmetries


def apply_symmetry(s: GameState, g: Symmetry) -> GameState:
    board = [EMPTY] * len(s.board)
    for i, v in enumerate(s.board):
        board[g.perm[i]] = v
    return GameState(s.game, s.size, tuple(board), s.to_move, s.move_count)


def canonical_openings(game: str, size: int) -> list[Move]:
    geo = get_geometry(game, size)
    return [geo.move_of(i) for i in geo.opening_cells()]


def render(s: GameState) -> str:
    """Monospace diagram; ``X`` black, ``O`` white, ``.`` empty."""
    geo = s.geometry
    glyph = {EMPTY: ".", Color.BLACK: "X", Color.WHITE: "O"}
    rows: dict[int, list[str]] = {}
    for i, (r, _c) in enumerate(geo.coords):
        rows.setdefault(r, []).append(glyph[s.board[i]])
    width = max(len(v) for v in rows.values())
    lines = []
    for r in sorted(rows):
        pad = " " * (width - len(rows[r])) if s.game == "y" else ""
        lines.append(pad + " ".join(rows[r]))
    lines.append(f"{s.to_move.name.lower()} to move, move {s.move_count}")
    return "\n".join(lines)


def serialize(s: GameState) -> str:
    """Compact form ``game:size:to_move:cells`` with cells as B/W/. in row-major order."""
    cells = "".join(".BW"[v] for v in s.board)
    return f"{s.game}:{s.size}:{s.to_move.letter}:{cells}"


def deserialize(text: str) -> GameState:
    try:
        game, size_txt, mover, cells = text.strip().split(":")
        size = int(size_txt)
    except ValueError:
        raise ConfigError(f"malformed state string {text!r}") from None
    geo = get_geometry(game, size)
    if len(cells) != geo.n_cells or set(cells) - set(".BW"):
        raise ConfigError(f"state string has wrong cell list for {game} size {size}")
    board = tuple(".BW".index(ch) for ch in cells)
    n_stones = sum(1 for v in board if v)
    return GameState(game, size, board, Color.parse(mover), n_stones)
