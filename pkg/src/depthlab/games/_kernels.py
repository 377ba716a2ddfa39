"""Compiled move generation and random playouts used by the search agents.

Boards are int8 arrays (0 empty, 1 black, 2 white) in the same cell order as
the pure-Python geometries; ``nbr`` is the padded neighbour table
(``Geometry.nbr_array``).  These kernels must agree exactly with the
reference rules in ``nogo.py`` / ``y.py``; the test suite checks that.

Randomness comes from SplitMix64 on a one-element uint64 state array, so the
stream is fully determined by the seed the caller writes into it.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True)
def splitmix64(state):
    state[0] += _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def randbelow(state, n):
    return np.int64(splitmix64(state) % np.uint64(n))


@njit(cache=True)
def _has_liberty_except(board, start, skip, nbr, mark, stack):
    """True if the group containing ``start`` has an empty neighbour other than ``skip``."""
    color = board[start]
    mark[:] = False
    mark[start] = True
    stack[0] = start
    top = 1
    while top > 0:
        top -= 1
        cell = stack[top]
        for k in range(nbr.shape[1]):
            nb = nbr[cell, k]
            if nb < 0:
                break
            v = board[nb]
            if v == 0:
                if nb != skip:
                    return True
            elif v == color and not mark[nb]:
                mark[nb] = True
                stack[top] = nb
                top += 1
    return False


@njit(cache=True)
def nogo_is_legal(board, cell, color, nbr, mark, stack):
    if board[cell] != 0:
        return False
    opp = 3 - color
    free = False
    for k in range(nbr.shape[1]):
        nb = nbr[cell, k]
        if nb < 0:
            break
        v = board[nb]
        if v == 0:
            free = True
        elif v == opp:
            if not _has_liberty_except(board, nb, cell, nbr, mark, stack):
                return False
    if free:
        return True
    for k in range(nbr.shape[1]):
        nb = nbr[cell, k]
        if nb < 0:
            break
        if board[nb] == color and _has_liberty_except(board, nb, cell, nbr, mark, stack):
            return True
    return False


@njit(cache=True)
def nogo_legal_cells(board, color, nbr):
    n = board.shape[0]
    mark = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    count = 0
    for cell in range(n):
        if nogo_is_legal(board, cell, color, nbr, mark, stack):
            out[count] = cell
            count += 1
    return out[:count]


@njit(cache=True)
def nogo_playout(board, to_move, nbr, state):
    """Play uniformly random legal moves until the mover is stuck; return the winner.

    A cell that is illegal for a colour stays illegal for that colour (stones are
    never removed), so each colour keeps a candidate list and drops cells as soon
    as they are found occupied or illegal.  Rejection from the list is uniform
    over the remaining legal cells.  ``board`` is modified in place.
    """
    n = board.shape[0]
    mark = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    cand = np.empty((2, n), dtype=np.int64)
    size = np.zeros(2, dtype=np.int64)
    for cell in range(n):
        if board[cell] == 0:
            cand[0, size[0]] = cell
            cand[1, size[1]] = cell
            size[0] += 1
            size[1] += 1
    color = to_move
    while True:
        side = color - 1
        played = False
        while size[side] > 0:
            j = randbelow(state, size[side])
            cell = cand[side, j]
            size[side] -= 1
            cand[side, j] = cand[side, size[side]]
            if nogo_is_legal(board, cell, color, nbr, mark, stack):
                board[cell] = color
                played = True
                break
        if not played:
            return 3 - color
        color = 3 - color


@njit(cache=True)
def y_group_sides(board, start, nbr, sides, mark, stack):
    color = board[start]
    mark[:] = False
    mark[start] = True
    stack[0] = start
    top = 1
    touched = 0
    while top > 0:
        top -= 1
        cell = stack[top]
        touched |= sides[cell]
        for k in range(nbr.shape[1]):
            nb = nbr[cell, k]
            if nb < 0:
                break
            if board[nb] == color and not mark[nb]:
                mark[nb] = True
                stack[top] = nb
                top += 1
    return touched


@njit(cache=True)
def y_wins_with(board, cell, nbr, sides):
    """True if the stone on ``cell`` belongs to a group touching all three sides."""
    n = board.shape[0]
    mark = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    return y_group_sides(board, cell, nbr, sides, mark, stack) == 7


@njit(cache=True)
def y_playout(board, to_move, nbr, sides, state):
    """Random playout of Y; returns the winner.

    Filling every empty cell in random alternating order and scoring the full
    board gives the same winner as stopping at the first connection: a winning
    group never disappears and two winners cannot coexist.  ``board`` is
    modified in place.
    """
    n = board.shape[0]
    empty = np.empty(n, dtype=np.int64)
    m = 0
    for cell in range(n):
        if board[cell] == 0:
            empty[m] = cell
            m += 1
    for i in range(m - 1, 0, -1):
        j = randbelow(state, i + 1)
        tmp = empty[i]
        empty[i] = empty[j]
        empty[j] = tmp
    color = to_move
    for i in range(m):
        board[empty[i]] = color
        color = 3 - color
    mark = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    # a winning black group must touch the left side
    for cell in range(n):
        if board[cell] == 1 and sides[cell] & 1:
            if y_group_sides(board, cell, nbr, sides, mark, stack) == 7:
                return 1
    return 2
