import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthlab.errors import ConfigError, RuleViolation, UsageError
from depthlab.games import (Color, Move, apply_symmetry, canonical_openings, deserialize, get_geometry,
                            initial_state, is_terminal, legal_moves, play, render, serialize, symmetries, winner)
from depthlab.games import _kernels as K
from depthlab.verify import iter_leaves, nodraws, random_state, symmetry


def test_initial_state_nogo():
    s = initial_state("nogo", 5)
    assert s.to_move is Color.BLACK and s.move_count == 0
    assert len(s.board) == 25 and not any(s.board)


def test_initial_state_y_has_triangular_cell_count():
    for n in range(1, 9):
        assert len(initial_state("y", n).board) == n * (n + 1) // 2
    assert len(initial_state("y", 4).board) == 10


@pytest.mark.parametrize("game,size", [("nogo", 0), ("nogo", 10), ("y", 0), ("y", 9), ("go", 9), ("nogo", 2.5)])
def test_initial_state_rejects_bad_config(game, size):
    with pytest.raises(ConfigError):
        initial_state(game, size)


def test_nogo_1x1_has_no_legal_move_and_white_wins():
    s = initial_state("nogo", 1)
    assert winner(s) is Color.WHITE
    assert s.geometry.legal_cells(s.board, Color.BLACK) == []
    with pytest.raises(UsageError):
        legal_moves(s)


def test_y_size2_all_cells_legal():
    assert legal_moves(initial_state("y", 2)) == [Move((0, 0)), Move((1, 0)), Move((1, 1))]


def test_nogo_2x2_after_two_stones_both_remaining_cells_legal():
    s = initial_state("nogo", 2)
    s = play(s, Move((0, 0)))
    s = play(s, Move((1, 1)))
    assert legal_moves(s) == [Move((0, 1)), Move((1, 0))]


def test_play_y_corner():
    s = play(initial_state("y", 2), Move((0, 0)))
    assert s.to_move is Color.WHITE and s.move_count == 1
    assert s.stones() == {(0, 0): Color.BLACK}


def test_play_occupied():
    s = play(initial_state("nogo", 3), Move((1, 1)))
    with pytest.raises(RuleViolation) as exc:
        play(s, Move((1, 1)))
    assert exc.value.rule == "occupied"


def test_play_capture_is_illegal():
    # White (1,0) has its last liberty at (0,0) because Black holds (1,1)
    s = deserialize("nogo:2:B:..WB")
    with pytest.raises(RuleViolation) as exc:
        play(s, Move((0, 0)))
    assert exc.value.rule == "capture"


def test_play_suicide_is_illegal():
    s = deserialize("nogo:3:B:.W.W.....")
    with pytest.raises(RuleViolation) as exc:
        play(s, Move((0, 0)))
    assert exc.value.rule == "suicide"


def test_play_off_board():
    with pytest.raises(RuleViolation) as exc:
        play(initial_state("y", 3), Move((0, 1)))
    assert exc.value.rule == "off-board"


def test_play_does_not_mutate():
    s = initial_state("nogo", 3)
    before = s.board
    play(s, Move((0, 0)))
    assert s.board == before


def test_y_winner_examples():
    s = play(initial_state("y", 1), Move((0, 0)))
    assert winner(s) is Color.BLACK
    s = initial_state("y", 2)
    s = play(s, Move((0, 0)))
    s = play(s, Move((1, 0)))
    s = play(s, Move((1, 1)))
    assert winner(s) is Color.BLACK


def test_y_groups_sharing_a_side_are_not_connected():
    # two white corners on the left side, separated by black stones
    s = deserialize("y:3:B:WBBW..")
    assert winner(s) is None


def test_y_winner_needs_all_three_sides():
    s = deserialize("y:4:W:.B.B......")  # black on (1,0) and (2,0): left side only
    assert winner(s) is None
    s = deserialize("y:4:W:BB.B..B...")  # the whole left side, corners included
    assert winner(s) is Color.BLACK


@pytest.mark.parametrize("n,expected", [(5, 6), (6, 6), (7, 10)])
def test_canonical_openings_counts(n, expected):
    assert len(canonical_openings("nogo", n)) == expected


def _orbit_count_bruteforce(n):
    grid = np.arange(n * n).reshape(n, n)
    images = []
    for k in range(4):
        r = np.rot90(grid, k)
        images += [r, np.fliplr(r)]
    seen = set()
    orbits = 0
    for cell in range(n * n):
        if cell in seen:
            continue
        orbits += 1
        pos = np.argwhere(grid == cell)[0]
        for img in images:
            seen.add(int(img[pos[0], pos[1]]))
            seen.add(int(np.argwhere(img == cell)[0] @ [n, 1]))
    return orbits


@pytest.mark.parametrize("n", range(1, 10))
def test_canonical_openings_match_orbit_count(n):
    moves = canonical_openings("nogo", n)
    assert len(moves) == _orbit_count_bruteforce(n) == (n // 2 + n % 2) * (n // 2 + n % 2 + 1) // 2
    assert moves == sorted(moves)


def test_canonical_openings_y_are_all_cells():
    assert len(canonical_openings("y", 4)) == 10


def test_identity_symmetry():
    s = random_state("nogo", 5, np.random.Generator(np.random.PCG64(1)))
    ident = next(g for g in symmetries("nogo", 5) if g.name == "identity")
    assert apply_symmetry(s, ident) == s


def test_rotation_moves_stone():
    s = play(initial_state("nogo", 5), Move((0, 1)))
    rot = next(g for g in symmetries("nogo", 5) if g.name == "rot90")
    out = apply_symmetry(s, rot)
    assert out.stones() == {(1, 4): Color.BLACK}
    assert out.to_move is Color.WHITE
    again = out
    for _ in range(3):
        again = apply_symmetry(again, rot)
    assert again == s


def test_y_reflection_is_involution():
    s = play(initial_state("y", 4), Move((2, 0)))
    refl = next(g for g in symmetries("y", 4) if g.name == "bary021")
    assert apply_symmetry(s, refl) != s
    assert apply_symmetry(apply_symmetry(s, refl), refl) == s


@pytest.mark.parametrize("game,size,order", [("nogo", 5, 8), ("nogo", 4, 8), ("y", 4, 6), ("y", 5, 6)])
def test_symmetry_group_axioms(game, size, order):
    geo = get_geometry(game, size)
    perms = {g.perm for g in geo.symmetries}
    assert len(perms) == order
    assert tuple(range(geo.n_cells)) in perms
    for g in geo.symmetries:
        assert sorted(g.perm) == list(range(geo.n_cells))
        for h in geo.symmetries:
            assert g.compose(h).perm in perms
    # automorphisms preserve adjacency
    for g in geo.symmetries:
        for i, ns in enumerate(geo.neighbors):
            assert {g.perm[j] for j in ns} == set(geo.neighbors[g.perm[i]])


@pytest.mark.parametrize("game,size", [("nogo", 4), ("nogo", 5), ("y", 4), ("y", 5)])
def test_symmetry_equivariance(game, size):
    res = symmetry(game, size, 150, seed=size)
    assert res.ok, res.failures[:3]


@pytest.mark.parametrize("size", [1, 2, 3])
def test_y_exhaustive_no_draws(size):
    res = nodraws("y", size)
    assert res.ok and res.checked > 0


@pytest.mark.parametrize("size", [4, 5])
def test_y_random_playouts_no_draws(size):
    res = nodraws("y", size, 10_000, seed=size)
    assert res.ok and res.checked == 10_000


def test_termination_bound():
    rng = np.random.Generator(np.random.PCG64(3))
    for game, size in [("nogo", 5), ("y", 5), ("nogo", 3)]:
        n_cells = get_geometry(game, size).n_cells
        for _ in range(200):
            s = initial_state(game, size)
            while not is_terminal(s):
                moves = legal_moves(s)
                assert len(moves) <= n_cells - s.move_count
                s = play(s, moves[int(rng.integers(len(moves)))])
            assert s.move_count <= n_cells
            assert winner(s) is not None


def test_nogo_exhaustive_small_boards_have_a_winner():
    for size in (1, 2):
        leaves = list(iter_leaves(initial_state("nogo", size)))
        assert leaves and all(winner(s) is not None for s in leaves)


def test_nogo_monotonicity():
    """A placement never makes a cell legal for either colour."""
    rng = np.random.Generator(np.random.PCG64(11))
    samples = 0
    while samples < 10_000:
        size = int(rng.integers(2, 6))
        s = random_state("nogo", size, rng)
        if is_terminal(s):
            continue
        geo = s.geometry
        moves = legal_moves(s)
        m = moves[int(rng.integers(len(moves)))]
        t = play(s, m)
        cell = geo.index_of(m)
        for color in Color:
            before = set(geo.legal_cells(s.board, color)) - {cell}
            after = set(geo.legal_cells(t.board, color))
            assert after <= before, (serialize(s), m, color)
        samples += 1


def test_move_count_parity_invariant():
    rng = np.random.Generator(np.random.PCG64(5))
    for game in ("nogo", "y"):
        s = random_state(game, 5, rng)
        assert (s.to_move is Color.BLACK) == (s.move_count % 2 == 0)
        assert s.move_count == sum(1 for v in s.board if v)


def test_serialize_round_trip_and_render():
    rng = np.random.Generator(np.random.PCG64(9))
    for game in ("nogo", "y"):
        s = random_state(game, 5, rng)
        assert deserialize(serialize(s)) == s
        text = render(s)
        assert text.count("X") == sum(1 for v in s.board if v == 1)


@pytest.mark.parametrize("bad", ["nogo:5:B:...", "chess:5:B:", "nogo:x:B:.", "y:2:Q:..."])
def test_deserialize_rejects_garbage(bad):
    with pytest.raises((ConfigError, ValueError)):
        deserialize(bad)


# -- compiled kernels agree with the reference rules ------------------------


@pytest.mark.parametrize("size", [1, 2, 3, 4, 5, 7, 9])
def test_nogo_kernel_legality_matches_reference(size):
    rng = np.random.Generator(np.random.PCG64(size))
    geo = get_geometry("nogo", size)
    for _ in range(300):
        s = random_state("nogo", size, rng)
        board = np.array(s.board, dtype=np.int8)
        for color in Color:
            assert K.nogo_legal_cells(board, int(color), geo.nbr_array).tolist() == geo.legal_cells(s.board, color)


@pytest.mark.parametrize("size", [1, 2, 3, 5, 8])
def test_y_kernel_win_check_matches_reference(size):
    rng = np.random.Generator(np.random.PCG64(size))
    geo = get_geometry("y", size)
    sides = np.array(geo.sides, dtype=np.int64)
    for _ in range(300):
        s = random_state("y", size, rng)
        board = np.array(s.board, dtype=np.int8)
        kernel = None
        for i, v in enumerate(s.board):
            if v and K.y_wins_with(board, i, geo.nbr_array, sides):
                kernel = Color(v)
        assert kernel == winner(s)


@given(st.integers(0, 2**63), st.sampled_from([("nogo", 3), ("nogo", 5), ("y", 3), ("y", 5)]))
@settings(max_examples=200, deadline=None)
def test_kernel_playouts_reach_reference_terminal(seed, gs):
    game, size = gs
    geo = get_geometry(game, size)
    board = np.zeros(geo.n_cells, dtype=np.int8)
    state = np.array([seed], dtype=np.uint64)
    if game == "nogo":
        won = K.nogo_playout(board, 1, geo.nbr_array, state)
        loser = Color(3 - won)
        final = tuple(int(v) for v in board)
        assert geo.legal_cells(final, loser) == []
        n_black = sum(1 for v in final if v == 1)
        n_white = sum(1 for v in final if v == 2)
        # the loser is the side to move: black moves when the counts are equal
        assert (loser is Color.BLACK) == (n_black == n_white)
    else:
        won = K.y_playout(board, 1, geo.nbr_array, np.array(geo.sides, dtype=np.int64), state)
        final = deserialize(f"y:{size}:B:" + "".join(".BW"[v] for v in board))
        assert winner(final) is Color(won)
        assert 0 not in board


def test_kernel_playout_is_deterministic():
    geo = get_geometry("nogo", 5)
    results = []
    for _ in range(2):
        board = np.zeros(25, dtype=np.int8)
        K.nogo_playout(board, 1, geo.nbr_array, np.array([42], dtype=np.uint64))
        results.append(board.tolist())
    assert results[0] == results[1]


def _splitmix64_py(x):
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31), x


def test_splitmix64_matches_pure_python():
    for seed in (0, 1234567, 2**64 - 1):
        state = np.array([seed], dtype=np.uint64)
        x = seed
        for _ in range(5):
            expected, x = _splitmix64_py(x)
            assert int(K.splitmix64(state)) == expected


def test_randbelow_is_uniform():
    state = np.array([7], dtype=np.uint64)
    trials = 18_000
    counts = np.bincount([K.randbelow(state, 9) for _ in range(trials)], minlength=9)
    expected = trials / 9
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 26.1  # 99.9% quantile, 8 dof
