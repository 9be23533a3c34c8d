"""Procedural labyrinth game.

Levels are perfect mazes carved by a seeded depth-first backtracker; level
``n`` hides ``n`` keys, one bonus and a door. The door only opens once every
key of the level is held. Failing the questions of a key teleports it to
another free cell.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from ..cards import AnswerOutcome
from ..metrics.events import EventId, PayloadValue
from ..seeding import derive_seed

Cell = tuple[int, int]
Wall = tuple[Cell, Cell]
GameEvent = tuple[EventId, dict[str, PayloadValue]]

DEFAULT_LEVEL_COUNT = 5
MAX_LEVEL_COUNT = 5
DIRECTIONS: dict[str, Cell] = {"N": (0, -1), "S": (0, 1), "E": (1, 0), "W": (-1, 0)}


class MazeError(Exception):
    pass


def grid_size(level_number: int) -> int:
    """Side length in cells: 9 at level 1, growing by 2 per level."""
    return 7 + 2 * level_number


def _edge(a: Cell, b: Cell) -> Wall:
    return (a, b) if a <= b else (b, a)


def _lattice_edges(width: int, height: int) -> list[Wall]:
    edges = []
    for y in range(height):
        for x in range(width):
            if x + 1 < width:
                edges.append(((x, y), (x + 1, y)))
            if y + 1 < height:
                edges.append(((x, y), (x, y + 1)))
    return edges


@dataclass(frozen=True)
class MazeLevel:
    level_number: int
    width: int
    height: int
    walls: frozenset[Wall]
    spawn: Cell
    door: Cell
    key_positions: frozenset[Cell]
    bonus_position: Cell | None
    seed: int
    style: int = 0
    _open: dict[Cell, tuple[Cell, ...]] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self._open:
            return
        adj: dict[Cell, list[Cell]] = {(x, y): [] for y in range(self.height) for x in range(self.width)}
        for a, b in _lattice_edges(self.width, self.height):
            if (a, b) not in self.walls:
                adj[a].append(b)
                adj[b].append(a)
        self._open.update({c: tuple(sorted(n)) for c, n in adj.items()})

    def cells(self) -> list[Cell]:
        return [(x, y) for y in range(self.height) for x in range(self.width)]

    def neighbors(self, cell: Cell) -> tuple[Cell, ...]:
        """Cells reachable from ``cell`` in one step (no wall in between)."""
        return self._open[cell]

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def blocked(self, a: Cell, b: Cell) -> bool:
        return not self.in_bounds(b) or _edge(a, b) in self.walls

    def distances(self, start: Cell) -> dict[Cell, int]:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for n in self._open[c]:
                if n not in dist:
                    dist[n] = dist[c] + 1
                    queue.append(n)
        return dist

    def nearest(self, start: Cell, targets: set[Cell] | frozenset[Cell]) -> Cell:
        """Closest of ``targets`` by maze distance; ties go to the smallest (y, x)."""
        if start in targets:
            return start
        seen = {start}
        frontier = [start]
        while frontier:
            layer = []
            for c in frontier:
                for n in self._open[c]:
                    if n not in seen:
                        seen.add(n)
                        layer.append(n)
            hits = [c for c in layer if c in targets]
            if hits:
                return min(hits, key=lambda c: (c[1], c[0]))
            frontier = layer
        raise MazeError(f"none of {sorted(targets)} reachable from {start}")

    def path(self, start: Cell, goal: Cell) -> list[Cell]:
        """Shortest route from ``start`` to ``goal``, both included."""
        prev: dict[Cell, Cell | None] = {start: None}
        queue = deque([start])
        while queue and goal not in prev:
            c = queue.popleft()
            for n in self._open[c]:
                if n not in prev:
                    prev[n] = c
                    queue.append(n)
        if goal not in prev:
            raise MazeError(f"{goal} unreachable from {start}")
        out: list[Cell] = []
        node: Cell | None = goal
        while node is not None:
            out.append(node)
            node = prev[node]
        return out[::-1]


def generate_maze(seed: int, level_number: int, level_count: int = DEFAULT_LEVEL_COUNT) -> MazeLevel:
    if not 1 <= level_count <= MAX_LEVEL_COUNT:
        raise MazeError(f"level_count {level_count} outside 1..{MAX_LEVEL_COUNT}")
    if not 1 <= level_number <= level_count:
        raise MazeError(f"level_number {level_number} outside 1..{level_count}")
    rng = random.Random(derive_seed(seed, "maze", level_number))
    width = height = grid_size(level_number)
    n_cells = width * height

    # carve on flat indices (i = y * width + x) for speed
    links: list[list[int]] = [[] for _ in range(n_cells)]
    visited = bytearray(n_cells)
    start = rng.randrange(n_cells)
    visited[start] = 1
    stack = [start]
    while stack:
        c = stack[-1]
        x, y = c % width, c // width
        options = []
        if y > 0 and not visited[c - width]:
            options.append(c - width)
        if y < height - 1 and not visited[c + width]:
            options.append(c + width)
        if x < width - 1 and not visited[c + 1]:
            options.append(c + 1)
        if x > 0 and not visited[c - 1]:
            options.append(c - 1)
        if not options:
            stack.pop()
            continue
        nxt = options[rng.randrange(len(options))]
        links[c].append(nxt)
        links[nxt].append(c)
        visited[nxt] = 1
        stack.append(nxt)

    spawn_i = rng.randrange(n_cells)
    dist = [-1] * n_cells
    dist[spawn_i] = 0
    queue = deque([spawn_i])
    while queue:
        c = queue.popleft()
        for nb in links[c]:
            if dist[nb] < 0:
                dist[nb] = dist[c] + 1
                queue.append(nb)
    # farthest cell; the flat index order breaks ties by (y, x)
    door_i = dist.index(max(dist))

    cells = [(x, y) for y in range(height) for x in range(width)]
    open_map: dict[Cell, tuple[Cell, ...]] = {}
    walls: list[Wall] = []
    for i, here in enumerate(cells):
        linked = links[i]
        # W, N, S, E is ascending tuple order
        open_map[here] = tuple(cells[j] for j in (i - 1, i - width, i + width, i + 1) if j in linked)
        if here[0] + 1 < width and i + 1 not in linked:
            walls.append((here, cells[i + 1]))
        if here[1] + 1 < height and i + width not in linked:
            walls.append((here, cells[i + width]))
    free = [c for i, c in enumerate(cells) if i != spawn_i and i != door_i]
    picks = rng.sample(free, level_number + 1)
    return MazeLevel(
        level_number=level_number,
        width=width,
        height=height,
        walls=frozenset(walls),
        spawn=cells[spawn_i],
        door=cells[door_i],
        key_positions=frozenset(picks[:level_number]),
        bonus_position=picks[level_number],
        seed=seed,
        style=level_number - 1,
        _open=open_map,
    )


@dataclass(frozen=True)
class LevelAdvance:
    level_number: int


@dataclass(frozen=True)
class GameComplete:
    per_level_times: tuple[int, ...]
    collected_bonuses: frozenset[str]


@dataclass
class MazeGameState:
    current_level: MazeLevel
    keys: set[Cell]
    bonus: Cell | None
    avatar: Cell
    seed: int
    level_count: int = DEFAULT_LEVEL_COUNT
    keys_held: int = 0
    chronometer_ms: int = 0
    per_level_times: list[int] = field(default_factory=list)
    collected_bonuses: set[str] = field(default_factory=set)
    finished: bool = False
    rng: random.Random = field(default_factory=random.Random, repr=False)

    @property
    def level_number(self) -> int:
        return self.current_level.level_number

    @property
    def door_open(self) -> bool:
        return self.keys_held == self.level_number


def _enter_level(state: MazeGameState, level: MazeLevel) -> None:
    state.current_level = level
    state.keys = set(level.key_positions)
    state.bonus = level.bonus_position
    state.avatar = level.spawn
    state.keys_held = 0
    state.chronometer_ms = 0
    state.rng = random.Random(derive_seed(state.seed, "relocate", level.level_number))


def new_game(seed: int, level_count: int = DEFAULT_LEVEL_COUNT) -> MazeGameState:
    level = generate_maze(seed, 1, level_count)
    state = MazeGameState(current_level=level, keys=set(), bonus=None, avatar=level.spawn, seed=seed, level_count=level_count)
    _enter_level(state, level)
    return state


def advance_clock(state: MazeGameState, elapsed_ms: int) -> None:
    if elapsed_ms < 0:
        raise MazeError("chronometer only counts up")
    state.chronometer_ms += elapsed_ms


@dataclass
class MoveResult:
    moved: bool
    events: list[GameEvent]
    # which pickup the caller must now resolve: "key", "bonus", "door" or None
    trigger: str | None = None


def maze_move(state: MazeGameState, direction: str) -> MoveResult:
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    if state.finished:
        raise MazeError("game already complete")
    dx, dy = DIRECTIONS[direction]
    target = (state.avatar[0] + dx, state.avatar[1] + dy)
    if state.current_level.blocked(state.avatar, target):
        return MoveResult(False, [])
    state.avatar = target
    if target in state.keys:
        return MoveResult(True, [(EventId.LABYRINTHE_KEY, {"value": True})], "key")
    if target == state.bonus:
        return MoveResult(True, [(EventId.LABYRINTHE_BONUS, {"value": True})], "bonus")
    if target == state.current_level.door:
        return MoveResult(True, [(EventId.LABYRINTHE_DOOR, {"value": True})], "door")
    return MoveResult(True, [])


def step_toward(a: Cell, b: Cell) -> str:
    delta = (b[0] - a[0], b[1] - a[1])
    for name, d in DIRECTIONS.items():
        if d == delta:
            return name
    raise MazeError(f"{a} and {b} are not adjacent")


def resolve_key(state: MazeGameState, answer_outcomes: list[AnswerOutcome]) -> MazeGameState:
    if state.avatar not in state.keys:
        raise MazeError(f"no key at {state.avatar}")
    if not answer_outcomes:
        raise MazeError("a key needs at least one answer")
    if all(o.correct for o in answer_outcomes):
        state.keys.discard(state.avatar)
        state.keys_held += 1
        return state
    occupied = state.keys | {state.current_level.door, state.current_level.spawn, state.avatar}
    if state.bonus is not None:
        occupied.add(state.bonus)
    reachable = state.current_level.distances(state.avatar)
    candidates = sorted((c for c in reachable if c not in occupied), key=lambda c: (c[1], c[0]))
    state.keys.discard(state.avatar)
    state.keys.add(state.rng.choice(candidates))
    return state


def bonus_id(level_number: int) -> str:
    return f"bonus-{level_number}"


def resolve_bonus(state: MazeGameState, answer_outcomes: list[AnswerOutcome]) -> MazeGameState:
    if state.bonus is None or state.avatar != state.bonus:
        raise MazeError(f"no bonus at {state.avatar}")
    if not answer_outcomes:
        raise MazeError("a bonus needs at least one answer")
    if all(o.correct for o in answer_outcomes):
        state.collected_bonuses.add(bonus_id(state.level_number))
        state.bonus = None
    return state


def try_exit(state: MazeGameState) -> MazeGameState | LevelAdvance | GameComplete:
    if state.avatar != state.current_level.door:
        raise MazeError("avatar is not on the door")
    if not state.door_open:
        return state
    state.per_level_times.append(state.chronometer_ms)
    if state.level_number >= state.level_count:
        state.finished = True
        return GameComplete(tuple(state.per_level_times), frozenset(state.collected_bonuses))
    _enter_level(state, generate_maze(state.seed, state.level_number + 1, state.level_count))
    return LevelAdvance(state.level_number)
