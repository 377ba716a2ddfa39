"""The game of Y on a straight triangular board with hexagonal adjacency.

Row ``r`` (0 at the apex) holds cells ``(r, 0) .. (r, r)``.  The three sides
are column 0 (left), the diagonal ``c == r`` (right) and the last row
(bottom); each corner lies on two sides.  A player wins by owning one
connected group that touches all three sides.  A full board always has
exactly one such player, so the game cannot end in a draw.
"""
from __future__ import annotations

from itertools import permutations

from .core import EMPTY, Color, GameState, Geometry, Symmetry, register

LEFT, RIGHT, BOTTOM = 1, 2, 4
ALL_SIDES = LEFT | RIGHT | BOTTOM


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


@register
class YGeometry(Geometry):
    game = "y"
    max_size = 8
    max_neighbors = 6

    def __init__(self, size):
        super().__init__(size)
        self.sides = tuple(self._side_mask(r, c) for r, c in self.coords)

    def _make_coords(self):
        return [(r, c) for r in range(self.size) for c in range(r + 1)]

    def _neighbor_coords(self, r, c):
        return [(r - 1, c - 1), (r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c), (r + 1, c + 1)]

    def _side_mask(self, r, c):
        mask = 0
        if c == 0:
            mask |= LEFT
        if c == r:
            mask |= RIGHT
        if r == self.size - 1:
            mask |= BOTTOM
        return mask

    def _make_symmetries(self):
        # barycentric coordinates (distance to bottom, to left, to right) sum to size - 1
        n = self.size - 1
        out = []
        for order in permutations(range(3)):
            name = "identity" if order == (0, 1, 2) else "bary" + "".join(map(str, order))
            perm = []
            for r, c in self.coords:
                bary = (n - r, c, r - c)
                a, b, _ = (bary[k] for k in order)
                perm.append(self._index[(n - a, b)])
            out.append(Symmetry(name, tuple(perm)))
        return out

    def violation(self, board, cell, color):
        return "occupied" if board[cell] != EMPTY else None

    def compute_winner(self, state: GameState):
        # Side nodes shared by every stone would join distinct groups that touch a
        # common side, so sides are tracked as a bitmask per union-find root instead.
        board = state.board
        uf = UnionFind(self.n_cells)
        for i, v in enumerate(board):
            if v != EMPTY:
                for nb in self.neighbors[i]:
                    if nb < i and board[nb] == v:
                        uf.union(i, nb)
        touched: dict[int, int] = {}
        for i, v in enumerate(board):
            if v != EMPTY:
                root = uf.find(i)
                touched[root] = touched.get(root, 0) | self.sides[i]
                if touched[root] == ALL_SIDES:
                    return Color(v)
        return None

    def opening_cells(self):
        return list(range(self.n_cells))
