from .maze import (
    DEFAULT_LEVEL_COUNT,
    DIRECTIONS,
    GameComplete,
    LevelAdvance,
    MazeError,
    MazeGameState,
    MazeLevel,
    MoveResult,
    advance_clock,
    generate_maze,
    grid_size,
    maze_move,
    new_game,
    resolve_bonus,
    resolve_key,
    try_exit,
)
from .narrative import QUEST_COUNT, SCENE_COUNT, NarrativeError, NarrativeState, narrative_advance

__all__ = [
    "DEFAULT_LEVEL_COUNT",
    "DIRECTIONS",
    "GameComplete",
    "LevelAdvance",
    "MazeError",
    "MazeGameState",
    "MazeLevel",
    "MoveResult",
    "NarrativeError",
    "NarrativeState",
    "QUEST_COUNT",
    "SCENE_COUNT",
    "advance_clock",
    "generate_maze",
    "grid_size",
    "maze_move",
    "narrative_advance",
    "new_game",
    "resolve_bonus",
    "resolve_key",
    "try_exit",
]
