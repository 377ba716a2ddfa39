"""Two-player placement games: NoGo and Y."""
from . import nogo, y  # noqa: F401  (registers the geometries)
from .core import (
    EMPTY,
    Color,
    GameState,
    Geometry,
    Move,
    Symmetry,
    apply_symmetry,
    canonical_openings,
    deserialize,
    get_geometry,
    initial_state,
    is_terminal,
    legal_moves,
    play,
    render,
    serialize,
    supported_games,
    symmetries,
    winner,
)

__all__ = [
    "EMPTY",
    "Color",
    "GameState",
    "Geometry",
    "Move",
    "Symmetry",
    "apply_symmetry",
    "canonical_openings",
    "deserialize",
    "get_geometry",
    "initial_state",
    "is_terminal",
    "legal_moves",
    "play",
    "render",
    "serialize",
    "supported_games",
    "symmetries",
    "winner",
]
