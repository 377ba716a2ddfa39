"""Array-board adapters over the compiled kernels, one per game.

The search agents work on int8 board copies instead of :class:`GameState`
objects; these adapters give them a uniform interface.
"""
from __future__ import annotations

import functools

import numpy as np

from . import _kernels as K
from .core import get_geometry


class FastRules:
    def __init__(self, game: str, size: int):
        self.geometry = get_geometry(game, size)
        self.nbr = self.geometry.nbr_array

    def legal(self, board: np.ndarray, color: int) -> list[int]:
        raise NotImplementedError

    def after_move(self, board: np.ndarray, cell: int, mover: int) -> tuple[int, list[int]]:
        """``(winner, legal cells for the next player)`` once ``mover`` has played ``cell``.

        ``winner`` is 0 when the game goes on; the list is empty when it is over.
        """
        raise NotImplementedError

    def playout(self, board: np.ndarray, to_move: int, state: np.ndarray) -> int:
        raise NotImplementedError


class FastNoGo(FastRules):
    def legal(self, board, color):
        return K.nogo_legal_cells(board, color, self.nbr).tolist()

    def after_move(self, board, cell, mover):
        nxt = K.nogo_legal_cells(board, 3 - mover, self.nbr).tolist()
        return (0 if nxt else mover), nxt

    def playout(self, board, to_move, state):
        return K.nogo_playout(board, to_move, self.nbr, state)


class FastY(FastRules):
    def __init__(self, game, size):
        super().__init__(game, size)
        self.sides = np.array(self.geometry.sides, dtype=np.int64)

    def legal(self, board, color):
        return np.flatnonzero(board == 0).tolist()

    def after_move(self, board, cell, mover):
        if K.y_wins_with(board, cell, self.nbr, self.sides):
            return mover, []
        return 0, np.flatnonzero(board == 0).tolist()

    def playout(self, board, to_move, state):
        return K.y_playout(board, to_move, self.nbr, self.sides, state)


@functools.lru_cache(maxsize=None)
def fast_rules(game: str, size: int) -> FastRules:
    return {"nogo": FastNoGo, "y": FastY}[game](game, size)
