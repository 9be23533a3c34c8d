import pytest
from hypothesis import given, settings, strategies as st

from qcm.cards import AnswerOutcome
from qcm.games import (
    GameComplete,
    LevelAdvance,
    MazeError,
    NarrativeError,
    NarrativeState,
    advance_clock,
    generate_maze,
    grid_size,
    maze_move,
    narrative_advance,
    new_game,
    resolve_bonus,
    resolve_key,
    try_exit,
)
from qcm.games.maze import step_toward
from qcm.metrics import EventId

from maze_oracle import is_perfect, open_neighbours, reachable, targets_reachable

OK = AnswerOutcome(True)
KO = AnswerOutcome(False)


# narrative ------------------------------------------------------------------


@given(st.lists(st.booleans(), min_size=6, max_size=6))
def test_story_always_ends_with_literal_grade(outcomes):
    state = NarrativeState()
    scenes = []
    for ok in outcomes:
        assert not state.ended
        scenes.append(state.scene)
        state = narrative_advance(state, ok)
    assert scenes == [1, 2, 3, 4, 5, 6]
    assert state.ended and state.in_final_scene
    assert state.ending_grade == sum(outcomes)


def test_story_all_failed_still_ends():
    state = NarrativeState()
    for _ in range(6):
        state = narrative_advance(state, False)
    assert state.ended and state.ending_grade == 0


def test_advance_after_end():
    state = NarrativeState(scene=7, quest_results=(True,) * 6, ended=True)
    with pytest.raises(NarrativeError):
        narrative_advance(state, True)


# maze generation ------------------------------------------------------------


@pytest.mark.parametrize("level", [1, 2, 3, 4, 5])
def test_level_shape(level):
    m = generate_maze(42, level)
    assert m.width == m.height == grid_size(level)
    assert len(m.key_positions) == level
    assert m.door != m.spawn
    placed = [m.door, m.bonus_position, *m.key_positions]
    assert len(set(placed)) == len(placed)
    assert m.spawn not in placed
    assert is_perfect(m) and targets_reachable(m)


def test_grid_grows_from_9_to_17():
    assert [grid_size(n) for n in range(1, 6)] == [9, 11, 13, 15, 17]


def test_generation_is_deterministic():
    assert generate_maze(7, 3) == generate_maze(7, 3)
    assert generate_maze(7, 3) != generate_maze(8, 3)


@pytest.mark.parametrize("level, count", [(0, 5), (6, 5), (5, 4)])
def test_level_out_of_range(level, count):
    with pytest.raises(MazeError):
        generate_maze(1, level, count)


def test_door_is_farthest_cell():
    m = generate_maze(3, 2)
    dist = m.distances(m.spawn)
    assert dist[m.door] == max(dist.values())


def test_graph_matches_wall_set():
    m = generate_maze(5, 4)
    for y in range(m.height):
        for x in range(m.width):
            assert set(m.neighbors((x, y))) == set(open_neighbours(m, (x, y)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 5))
def test_any_seed_gives_a_safe_level(seed, level):
    m = generate_maze(seed, level)
    assert is_perfect(m) and targets_reachable(m)


# play -----------------------------------------------------------------------


def _walk_to(game, target):
    events = []
    route = game.current_level.path(game.avatar, target)
    for nxt in route[1:]:
        result = maze_move(game, step_toward(game.avatar, nxt))
        assert result.moved
        events += result.events
    return events, result


def test_blocked_move_is_a_no_op():
    game = new_game(9)
    level = game.current_level
    x, y = game.avatar
    for name, (dx, dy) in {"N": (0, -1), "S": (0, 1), "E": (1, 0), "W": (-1, 0)}.items():
        if level.blocked((x, y), (x + dx, y + dy)):
            result = maze_move(game, name)
            assert not result.moved and result.events == [] and game.avatar == (x, y)
            return
    pytest.fail("spawn has no wall around it")


def test_unknown_direction():
    with pytest.raises(ValueError):
        maze_move(new_game(1), "NE")


def test_key_pickup_and_relocation():
    game = new_game(21)
    (key,) = game.keys
    events, result = _walk_to(game, key)
    assert result.trigger == "key"
    assert events[-1] == (EventId.LABYRINTHE_KEY, {"value": True})
    resolve_key(game, [OK, KO])
    assert game.keys_held == 0 and len(game.keys) == 1
    (moved,) = game.keys
    assert moved != key and moved in reachable(game.current_level, game.avatar)
    _walk_to(game, moved)
    resolve_key(game, [OK, OK])
    assert game.keys_held == 1 and not game.keys


def test_relocation_is_seeded():
    cells = []
    for _ in range(2):
        game = new_game(21)
        (key,) = game.keys
        _walk_to(game, key)
        resolve_key(game, [KO])
        cells.append(set(game.keys))
    assert cells[0] == cells[1]


def test_resolve_off_target():
    game = new_game(4)
    with pytest.raises(MazeError):
        resolve_key(game, [OK])
    with pytest.raises(MazeError):
        resolve_bonus(game, [OK, OK])


def test_bonus_needs_every_answer_right():
    game = new_game(33)
    spot = game.bonus
    _, result = _walk_to(game, spot)
    assert result.trigger == "bonus"
    resolve_bonus(game, [OK, KO])
    assert game.bonus == spot and not game.collected_bonuses
    resolve_bonus(game, [OK, OK])
    assert game.bonus is None and game.collected_bonuses == {"bonus-1"}


def test_door_without_keys_keeps_level():
    game = new_game(12)
    events, result = _walk_to(game, game.current_level.door)
    assert result.trigger == "door"
    assert (EventId.LABYRINTHE_DOOR, {"value": True}) in events
    before = game.current_level
    assert try_exit(game) is game
    assert game.current_level is before and game.per_level_times == []


def test_full_run_records_five_level_times():
    game = new_game(5)
    results = []
    for level in range(1, 6):
        assert game.level_number == level
        while game.keys:
            _walk_to(game, game.current_level.nearest(game.avatar, game.keys))
            resolve_key(game, [OK, OK])
        assert game.keys_held == level
        advance_clock(game, 1000 * level)
        _walk_to(game, game.current_level.door)
        results.append(try_exit(game))
    assert all(isinstance(r, LevelAdvance) for r in results[:4])
    assert isinstance(results[-1], GameComplete)
    assert results[-1].per_level_times == (1000, 2000, 3000, 4000, 5000)
    with pytest.raises(MazeError):
        maze_move(game, "N")


def test_chronometer_only_counts_up():
    game = new_game(1)
    advance_clock(game, 10)
    with pytest.raises(MazeError):
        advance_clock(game, -1)
    assert game.chronometer_ms == 10
