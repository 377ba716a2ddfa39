"""NoGo: Go placement rules where captures and suicides are illegal.

The side to move loses as soon as it has no legal placement.  There is no
passing, so the game always ends before the board is full.
"""
from __future__ import annotations

from .core import EMPTY, Color, GameState, Geometry, Symmetry, register


def _group_and_liberties(board, start, neighbors):
    color = board[start]
    group = {start}
    liberties = set()
    frontier = [start]
    while frontier:
        cell = frontier.pop()
        for nb in neighbors[cell]:
            v = board[nb]
            if v == EMPTY:
                liberties.add(nb)
            elif v == color and nb not in group:
                group.add(nb)
                frontier.append(nb)
    return group, liberties


@register
class NoGoGeometry(Geometry):
    game = "nogo"
    max_size = 9
    max_neighbors = 4

    def _make_coords(self):
        n = self.size
        return [(r, c) for r in range(n) for c in range(n)]

    def _neighbor_coords(self, r, c):
        return [(r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)]

    def _make_symmetries(self):
        n = self.size - 1
        maps = {
            "identity": lambda r, c: (r, c),
            "rot90": lambda r, c: (c, n - r),
            "rot180": lambda r, c: (n - r, n - c),
            "rot270": lambda r, c: (n - c, r),
            "flip_rows": lambda r, c: (n - r, c),
            "flip_cols": lambda r, c: (r, n - c),
            "transpose": lambda r, c: (c, r),
            "antitranspose": lambda r, c: (n - c, n - r),
        }
        return [
            Symmetry(name, tuple(self._index[f(r, c)] for r, c in self.coords))
            for name, f in maps.items()
        ]

    def violation(self, board, cell, color):
        if board[cell] != EMPTY:
            return "occupied"
        after = list(board)
        after[cell] = int(color)
        opp = int(Color(color).opponent)
        for nb in self.neighbors[cell]:
            if after[nb] == opp and not _group_and_liberties(after, nb, self.neighbors)[1]:
                return "capture"
        if not _group_and_liberties(after, cell, self.neighbors)[1]:
            return "suicide"
        return None

    def compute_winner(self, state: GameState):
        for cell in range(self.n_cells):
            if self.violation(state.board, cell, state.to_move) is None:
                return None
        return state.to_move.opponent

    def opening_cells(self):
        return [orbit[0] for orbit in self.orbits()]
