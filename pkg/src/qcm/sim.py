"""Seeded synthetic players.

A profile fixes how a player answers (accuracy falling with card rank,
a carelessness multiplier in game context, log-normal response times)
and how they play (game preference, replay propensity, pauses, bonus
hunting). Simulation walks the real game state machines and the card
scheduler and emits the same metric stream a tablet would.

Seeds: the player seed is ``derive_seed(master_seed, player_id)`` and the
session seed is ``derive_seed(player_seed, session_index)``; every other
stream is derived from the session seed, so results do not depend on the
order in which players or sessions are simulated.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import os
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

from .cards import (
    FILE_LEVELS,
    AnswerOutcome,
    Card,
    NoCard,
    PaperRecord,
    SchedulerError,
    SchedulerState,
    next_card,
    promote,
    record_answer,
    replay_card,
    synthetic_deck,
)
from .games.maze import (
    DEFAULT_LEVEL_COUNT,
    MAX_LEVEL_COUNT,
    GameComplete,
    LevelAdvance,
    MazeGameState,
    advance_clock,
    maze_move,
    new_game,
    resolve_bonus,
    resolve_key,
    step_toward,
    try_exit,
)
from .games.narrative import SCENE_COUNT, NarrativeState, narrative_advance
from .metrics.events import EventId, LogDocument, MetricEvent, PayloadValue
from .seeding import derive_seed


DEFAULT_SEED = 0


class ConfigError(ValueError):
    """Invalid simulation configuration; the message names the field."""


class GameKind(str, enum.Enum):
    NARRATIF = "narratif"
    LUDIQUE = "ludique"


class Context(str, enum.Enum):
    TABLET = "tablet"
    PAPER = "paper"


EPSILON_WEIGHTS = 1e-9


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class PlayerProfile:
    player_id: str
    group: str = "A"
    p_correct_base: float = 0.85
    # subtracted once per rank of difficulty (rank 0 = first card of file 2)
    p_correct_slope: float = 0.0
    response_median_s: float = 20.0
    response_dispersion: float = 0.5
    preference: dict[str, float] = field(default_factory=lambda: {"narratif": 0.5, "ludique": 0.5})
    replay_propensity: float = 0.8
    # multiplies p_correct when answering inside a game
    carelessness_factor: float = 1.0
    pause_rate: float = 0.0
    bonus_propensity: float = 0.85
    attendance: float = 1.0
    step_ms: int = 400

    def __post_init__(self) -> None:
        if not self.player_id:
            raise ConfigError("player_id must be non-empty")
        who = f"profile {self.player_id!r}"
        for name in ("p_correct_base", "replay_propensity", "bonus_propensity", "attendance"):
            _check_prob(f"{who}: {name}", getattr(self, name))
        if not 0.0 <= self.carelessness_factor <= 1.0:
            raise ConfigError(f"{who}: carelessness_factor must be in [0, 1], got {self.carelessness_factor}")
        if self.p_correct_slope < 0:
            raise ConfigError(f"{who}: p_correct_slope must be >= 0")
        if not self.response_median_s > 0:
            raise ConfigError(f"{who}: response_median_s must be > 0")
        if self.response_dispersion < 0:
            raise ConfigError(f"{who}: response_dispersion must be >= 0")
        if self.pause_rate < 0:
            raise ConfigError(f"{who}: pause_rate must be >= 0")
        if self.step_ms <= 0:
            raise ConfigError(f"{who}: step_ms must be > 0")
        unknown = set(self.preference) - {k.value for k in GameKind}
        if unknown:
            raise ConfigError(f"{who}: preference has unknown games {sorted(unknown)}")
        for k, w in self.preference.items():
            _check_prob(f"{who}: preference[{k}]", w)
        if abs(sum(self.preference.values()) - 1.0) > EPSILON_WEIGHTS:
            raise ConfigError(f"{who}: preference weights must sum to 1, got {sum(self.preference.values())}")

    def p_correct(self, card: Card, context: Context = Context.TABLET) -> float:
        rank = (card.file_level - FILE_LEVELS[0]) * 48 + card.index_in_file - 1
        p = self.p_correct_base - self.p_correct_slope * rank
        if context is Context.TABLET:
            p *= self.carelessness_factor
        return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class SessionSpec:
    index: int
    start_ms: int
    duration_min: float
    games: tuple[GameKind, ...] = (GameKind.NARRATIF, GameKind.LUDIQUE)
    context: Context = Context.TABLET
    groups: tuple[str, ...] | None = None
    # autonomy slots: each player joins with probability
    # profile.attendance * attendance
    optional: bool = False
    week: int = 1
    attendance: float = 1.0

    def applies_to(self, profile: PlayerProfile) -> bool:
        return self.groups is None or profile.group in self.groups


@dataclass(frozen=True)
class SimConfig:
    master_seed: int
    profiles: tuple[PlayerProfile, ...]
    sessions: tuple[SessionSpec, ...]
    questions_per_pickup: int = 2
    level_count: int = DEFAULT_LEVEL_COUNT
    try_both_first: bool = True
    emit_moves: bool = False
    deck_seed: int = 0
    paper_overhead_s: float = 30.0

    def __post_init__(self) -> None:
        ids = [p.player_id for p in self.profiles]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ConfigError(f"profiles: duplicate player_id {dupes}")
        idx = [s.index for s in self.sessions]
        if len(set(idx)) != len(idx):
            raise ConfigError("sessions: duplicate session index")
        for s in self.sessions:
            if not 0.0 <= s.attendance <= 1.0:
                raise ConfigError(f"sessions[{s.index}].attendance must be in [0, 1]")
            if s.duration_min < 0:
                raise ConfigError(f"sessions[{s.index}].duration_min must be >= 0")
            if not s.games and s.context is Context.TABLET:
                raise ConfigError(f"sessions[{s.index}].games must not be empty")
        if self.questions_per_pickup < 1:
            raise ConfigError("questions_per_pickup must be >= 1")
        if not 1 <= self.level_count <= MAX_LEVEL_COUNT:
            raise ConfigError(f"level_count must be in 1..{MAX_LEVEL_COUNT}")

    @property
    def group_map(self) -> dict[str, str]:
        return {p.player_id: p.group for p in self.profiles}


@dataclass
class SessionLimits:
    max_duration_ms: int
    games: tuple[GameKind, ...] = (GameKind.NARRATIF, GameKind.LUDIQUE)
    try_both: bool = False
    questions_per_pickup: int = 2
    level_count: int = DEFAULT_LEVEL_COUNT
    emit_moves: bool = False


@dataclass
class PlayerState:
    """Everything about a player that persists from one session to the next."""

    profile: PlayerProfile
    scheduler: SchedulerState
    narrative: NarrativeState = field(default_factory=NarrativeState)
    next_seq: int = 1
    clock_ms: int = 0
    tablet_sessions: int = 0
    collected_bonuses: set[str] = field(default_factory=set)


@dataclass
class SessionResult:
    events: list[MetricEvent]
    player: PlayerState
    paper_records: list[PaperRecord] = field(default_factory=list)


class _Outcome(enum.Enum):
    COMPLETED = "completed"
    TIMEOUT = "timeout"
    NO_CARDS = "no-cards"
    ABANDONED = "abandoned"


class _Run:
    """One sitting: clock, event buffer and the random stream."""

    def __init__(self, player: PlayerState, session_index: int, start_ms: int, limits: SessionLimits, rng: random.Random):
        self.player = player
        self.profile = player.profile
        self.session_index = session_index
        self.now = max(start_ms, player.clock_ms)
        self.deadline = self.now + limits.max_duration_ms
        self.limits = limits
        self.rng = rng
        self.events: list[MetricEvent] = []
        self.maze: MazeGameState | None = None

    def emit(self, event_id: EventId, payload: dict[str, PayloadValue] | None = None) -> None:
        p = self.player
        self.events.append(MetricEvent(self.now, p.next_seq, p.profile.player_id, event_id, payload or {"value": True}))
        p.next_seq += 1

    def wait(self, ms: int, chrono: bool = True) -> None:
        self.now += ms
        if chrono and self.maze is not None:
            advance_clock(self.maze, ms)

    def timed_out(self) -> bool:
        return self.now >= self.deadline

    def lognormal_ms(self, median_s: float, sigma: float, floor_ms: int = 500) -> int:
        return max(floor_ms, int(round(1000 * median_s * math.exp(sigma * self.rng.gauss(0.0, 1.0)))))

    def maybe_pause(self, elapsed_ms: int) -> None:
        rate = self.profile.pause_rate
        if rate <= 0 or elapsed_ms <= 0:
            return
        if self.rng.random() < 1.0 - math.exp(-rate * elapsed_ms / 60_000):
            self.emit(EventId.GAME_PAUSE, {"value": True})
            self.wait(self.lognormal_ms(15.0, 0.5), chrono=False)
            self.emit(EventId.GAME_PAUSE, {"value": False})

    def ask(self) -> AnswerOutcome | None:
        sched = self.player.scheduler
        card = next_card(sched, self.session_index)
        if isinstance(card, NoCard):
            card = replay_card(sched, self.session_index)
            if card is None:
                return None
        total = self.lognormal_ms(self.profile.response_median_s, self.profile.response_dispersion, floor_ms=1500)
        example_ms = total * 35 // 100
        qcm_ms = total * 15 // 100
        self.emit(EventId.QUESTION_START)
        self.wait(example_ms)
        self.emit(EventId.QUESTION_EXAMPLE, {"image": card.example_ref})
        self.wait(qcm_ms)
        self.emit(EventId.QUESTION_QCM)
        self.wait(total - example_ms - qcm_ms)
        if self.rng.random() < self.profile.p_correct(card, Context.TABLET):
            choice = card.correct_choice
        else:
            choice = self.rng.choice([c for c in range(1, card.num_choices + 1) if c != card.correct_choice])
        outcome = record_answer(sched, card, choice)
        self.emit(EventId.QUESTION_ANSWER, {"card": card.card_id, "choice": choice, "correct": outcome.correct})
        return outcome

    def ask_series(self, n: int) -> list[AnswerOutcome] | None:
        out = []
        for _ in range(n):
            o = self.ask()
            if o is None:
                return None
            out.append(o)
        return out

    # narrative --------------------------------------------------------

    def play_narrative(self, abandon_after: int | None) -> _Outcome:
        self.emit(EventId.STORY_START)
        if self.player.narrative.ended:
            self.player.narrative = NarrativeState()
        asked = 0
        while not self.player.narrative.ended:
            if self.timed_out():
                return _Outcome.TIMEOUT
            if abandon_after is not None and asked >= abandon_after:
                return _Outcome.ABANDONED
            scene = self.player.narrative.scene
            scene_start = self.now
            self.emit(EventId.STORY_SCENE_START, {"scene": scene})
            self.wait(self.lognormal_ms(25.0, 0.3))
            outcome = self.ask()
            if outcome is None:
                return _Outcome.NO_CARDS
            asked += 1
            self.player.narrative = narrative_advance(self.player.narrative, outcome.correct)
            self.wait(self.lognormal_ms(6.0, 0.3))
            self.emit(EventId.STORY_SCENE_END, {"scene": scene})
            self.maybe_pause(self.now - scene_start)
        self.emit(EventId.STORY_SCENE_START, {"scene": SCENE_COUNT})
        self.wait(self.lognormal_ms(40.0, 0.2))
        self.emit(EventId.STORY_SCENE_END, {"scene": SCENE_COUNT})
        self.emit(EventId.STORY_END_SEQUENCE)
        return _Outcome.COMPLETED

    # labyrinth --------------------------------------------------------

    def _enter_level(self, game: MazeGameState) -> bool:
        self.emit(EventId.LABYRINTHE_LEVEL, {"level": game.level_number})
        if game.bonus is not None:
            self.emit(EventId.LABYRINTHE_BONUS_SPAWN)
        if self.limits.emit_moves:
            self.emit(EventId.MOVE, {"x": game.avatar[0], "y": game.avatar[1]})
        return self.rng.random() < self.profile.bonus_propensity

    def play_maze(self, abandon_after: int | None) -> _Outcome:
        self.emit(EventId.LABYRINTHE_START)
        game = new_game(self.rng.getrandbits(64), self.limits.level_count)
        self.maze = game
        try:
            return self._maze_loop(game, abandon_after)
        finally:
            self.player.collected_bonuses |= game.collected_bonuses
            self.maze = None

    def _maze_loop(self, game: MazeGameState, abandon_after: int | None) -> _Outcome:
        qpp = self.limits.questions_per_pickup
        wants_bonus = self._enter_level(game)
        pickups = 0
        while True:
            if self.timed_out():
                return _Outcome.TIMEOUT
            if abandon_after is not None and pickups >= abandon_after:
                return _Outcome.ABANDONED
            level = game.current_level
            if game.keys:
                target = level.nearest(game.avatar, game.keys)
            elif wants_bonus and game.bonus is not None and game.bonus != game.avatar:
                target = game.bonus
            else:
                target = level.door
            if target == game.avatar == level.door:
                result = try_exit(game)
                if isinstance(result, GameComplete):
                    self.emit(EventId.LABYRINTHE_END)
                    return _Outcome.COMPLETED
                if isinstance(result, LevelAdvance):
                    wants_bonus = self._enter_level(game)
                continue
            segment_start = self.now
            route = level.path(game.avatar, target)
            for nxt in route[1:]:
                self.wait(self.profile.step_ms)
                move = maze_move(game, step_toward(game.avatar, nxt))
                if self.limits.emit_moves:
                    self.emit(EventId.MOVE, {"x": game.avatar[0], "y": game.avatar[1]})
                for event_id, payload in move.events:
                    self.emit(event_id, payload)
                if move.trigger == "key":
                    outcomes = self.ask_series(qpp)
                    if outcomes is None:
                        return _Outcome.NO_CARDS
                    resolve_key(game, outcomes)
                    pickups += 1
                    break
                if move.trigger == "bonus":
                    outcomes = self.ask_series(qpp)
                    if outcomes is None:
                        return _Outcome.NO_CARDS
                    resolve_bonus(game, outcomes)
                    # one deliberate attempt per level
                    wants_bonus = False
                    pickups += 1
                    break
                if move.trigger == "door":
                    result = try_exit(game)
                    if isinstance(result, GameComplete):
                        self.wait(self.lognormal_ms(8.0, 0.2), chrono=False)
                        self.emit(EventId.LABYRINTHE_END)
                        return _Outcome.COMPLETED
                    if isinstance(result, LevelAdvance):
                        wants_bonus = self._enter_level(game)
                        break
                if self.timed_out():
                    return _Outcome.TIMEOUT
            self.maybe_pause(self.now - segment_start)


def _draw_game(rng: random.Random, profile: PlayerProfile, allowed: tuple[GameKind, ...]) -> GameKind:
    weights = [profile.preference.get(k.value, 0.0) for k in allowed]
    if sum(weights) <= 0:
        weights = [1.0] * len(allowed)
    return rng.choices(allowed, weights=weights, k=1)[0]


def simulate_session(
    profile: PlayerProfile,
    player: PlayerState,
    game_choice: GameKind,
    seed: int,
    limits: SessionLimits,
    *,
    start_ms: int = 0,
    session_index: int = 1,
) -> SessionResult:
    """Play one tablet sitting starting with ``game_choice``.

    After finishing a game the player picks another one (the untried game
    first when ``limits.try_both`` is set, otherwise by preference with
    probability ``replay_propensity``) until time runs out.
    """
    if player.profile is not profile:
        player.profile = profile
    rng = random.Random(seed)
    run = _Run(player, session_index, start_ms, limits, rng)
    run.emit(EventId.GAME_START)
    if limits.max_duration_ms <= 0:
        run.emit(EventId.GAME_END)
        player.clock_ms = run.now + 1
        return SessionResult(run.events, player)

    played: list[GameKind] = []
    kind = game_choice
    # when trying both, some players leave the first game early to look at the other
    abandon_first = limits.try_both and len(limits.games) > 1 and rng.random() < 0.5
    run.emit(EventId.MAIN_MENU_START)
    run.wait(run.lognormal_ms(5.0, 0.4))
    while True:
        run.emit(EventId.MAIN_MENU_QUIT)
        abandon_after = rng.randint(1, 3) if abandon_first and not played else None
        if kind is GameKind.NARRATIF:
            outcome = run.play_narrative(abandon_after)
        else:
            outcome = run.play_maze(abandon_after)
        played.append(kind)
        if outcome in (_Outcome.TIMEOUT, _Outcome.NO_CARDS):
            break
        run.wait(run.lognormal_ms(2.0, 0.3))
        run.emit(EventId.MAIN_MENU_START)
        run.wait(run.lognormal_ms(5.0, 0.4))
        if run.timed_out():
            break
        untried = [k for k in limits.games if k not in played]
        if limits.try_both and untried:
            kind = untried[0]
        elif outcome is _Outcome.ABANDONED or rng.random() < profile.replay_propensity:
            kind = _draw_game(rng, profile, limits.games)
        else:
            break
    run.wait(run.lognormal_ms(2.0, 0.3), chrono=False)
    run.emit(EventId.GAME_END)
    player.clock_ms = run.now + 1
    player.tablet_sessions += 1
    return SessionResult(run.events, player)


def simulate_paper_session(
    profile: PlayerProfile,
    player: PlayerState,
    seed: int,
    max_duration_ms: int,
    *,
    session_index: int = 1,
    overhead_s: float = 30.0,
) -> list[PaperRecord]:
    """Plain-context work on the paper file: no events, only answer records."""
    rng = random.Random(seed)
    sched = player.scheduler
    elapsed = 0
    records: list[PaperRecord] = []
    while elapsed < max_duration_ms:
        card = next_card(sched, session_index)
        if isinstance(card, NoCard):
            break
        elapsed += max(1500, int(1000 * (profile.response_median_s * math.exp(profile.response_dispersion * rng.gauss(0, 1)) + overhead_s)))
        if rng.random() < profile.p_correct(card, Context.PAPER):
            choice = card.correct_choice
        else:
            choice = rng.choice([c for c in range(1, card.num_choices + 1) if c != card.correct_choice])
        outcome = record_answer(sched, card, choice)
        records.append(PaperRecord(profile.player_id, card.card_id, outcome.correct, session_index))
    return records


@dataclass
class CohortRun:
    log: LogDocument
    paper_records: list[PaperRecord]
    per_player: dict[str, list[MetricEvent]]
    group_map: dict[str, str]
    # attended autonomy slots per (group, week)
    activity: dict[tuple[str, int], int] = field(default_factory=dict)

    @property
    def line_count(self) -> int:
        return len(self.log.events)


def new_player(profile: PlayerProfile, deck_seed: int = 0) -> PlayerState:
    decks = [synthetic_deck(level, deck_seed) for level in FILE_LEVELS]
    return PlayerState(profile=profile, scheduler=SchedulerState.fresh(profile.player_id, decks))


@dataclass
class PlayerRun:
    events: list[MetricEvent] = field(default_factory=list)
    paper_records: list[PaperRecord] = field(default_factory=list)
    # week of every optional slot the player took part in
    autonomy_weeks: list[int] = field(default_factory=list)


def simulate_player(config: SimConfig, profile: PlayerProfile) -> PlayerRun:
    player_seed = derive_seed(config.master_seed, profile.player_id)
    player = new_player(profile, config.deck_seed)
    out = PlayerRun()
    for spec in sorted(config.sessions, key=lambda s: (s.start_ms, s.index)):
        if not spec.applies_to(profile):
            continue
        session_seed = derive_seed(player_seed, spec.index)
        rng = random.Random(derive_seed(session_seed, "plan"))
        if spec.optional:
            if rng.random() >= profile.attendance * spec.attendance:
                continue
            out.autonomy_weeks.append(spec.week)
        # a finished file is swapped for the next level before the sitting
        if player.scheduler.file_complete:
            try:
                promote(player.scheduler)
            except SchedulerError:
                pass
        duration_ms = int(round(spec.duration_min * 60_000))
        if spec.context is Context.PAPER:
            out.paper_records += simulate_paper_session(
                profile, player, derive_seed(session_seed, "paper"), duration_ms,
                session_index=spec.index, overhead_s=config.paper_overhead_s,
            )
            continue
        try_both = config.try_both_first and player.tablet_sessions == 0
        limits = SessionLimits(
            max_duration_ms=duration_ms,
            games=spec.games,
            try_both=try_both,
            questions_per_pickup=config.questions_per_pickup,
            level_count=config.level_count,
            emit_moves=config.emit_moves,
        )
        first = _draw_game(rng, profile, spec.games)
        result = simulate_session(
            profile, player, first, derive_seed(session_seed, "play"), limits,
            start_ms=spec.start_ms, session_index=spec.index,
        )
        out.events += result.events
    return out


def simulate_cohort(config: SimConfig) -> CohortRun:
    per_player: dict[str, list[MetricEvent]] = {}
    records: list[PaperRecord] = []
    activity: dict[tuple[str, int], int] = {}
    for profile in sorted(config.profiles, key=lambda p: p.player_id):
        run = simulate_player(config, profile)
        per_player[profile.player_id] = run.events
        records += run.paper_records
        for week in run.autonomy_weeks:
            key = (profile.group, week)
            activity[key] = activity.get(key, 0) + 1
    merged = [e for pid in sorted(per_player) for e in per_player[pid]]
    return CohortRun(
        LogDocument(merged, source="simulation"), records, per_player, config.group_map, dict(sorted(activity.items()))
    )


# configuration files -------------------------------------------------------

_PROFILE_KEYS = {f for f in PlayerProfile.__dataclass_fields__}
_SESSION_KEYS = {
    "index", "start", "start_ms", "duration_min", "games", "context", "groups", "optional", "week", "attendance",
}
_TOP_KEYS = {
    "master_seed", "profiles", "sessions", "questions_per_pickup", "level_count",
    "try_both_first", "emit_moves", "deck_seed", "paper_overhead_s", "defaults",
}


def _parse_start(value: Any, where: str) -> int:
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{where}.start must be an ISO-8601 string or integer milliseconds")
    try:
        dt = datetime.fromisoformat(value)
    except ValueError:
        raise ConfigError(f"{where}.start: not an ISO-8601 datetime: {value!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp() * 1000)


def _build(cls, raw: dict[str, Any], where: str):
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data: dict[str, Any]) -> SimConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level fields: {sorted(unknown)}")
    for required in ("profiles", "sessions"):
        if required not in data:
            raise ConfigError(f"missing field {required!r}")
    data = {"master_seed": DEFAULT_SEED, **data}
    if not isinstance(data["master_seed"], int) or isinstance(data["master_seed"], bool):
        raise ConfigError("master_seed must be an integer")
    defaults = data.get("defaults", {})
    profiles = []
    for i, raw in enumerate(data["profiles"]):
        where = f"profiles[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where} must be an object")
        merged = {**defaults, **raw}
        bad = set(merged) - _PROFILE_KEYS
        if bad:
            raise ConfigError(f"{where}: unknown fields {sorted(bad)}")
        profiles.append(_build(PlayerProfile, merged, where))
    sessions = []
    for i, raw in enumerate(data["sessions"]):
        where = f"sessions[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where} must be an object")
        bad = set(raw) - _SESSION_KEYS
        if bad:
            raise ConfigError(f"{where}: unknown fields {sorted(bad)}")
        raw = dict(raw)
        if "start" in raw:
            raw["start_ms"] = _parse_start(raw.pop("start"), where)
        if "start_ms" not in raw:
            raise ConfigError(f"{where}: missing field 'start'")
        try:
            if "games" in raw:
                raw["games"] = tuple(GameKind(g) for g in raw["games"])
            if "context" in raw:
                raw["context"] = Context(raw["context"])
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        if raw.get("groups") is not None:
            raw["groups"] = tuple(raw["groups"])
        raw.setdefault("index", i + 1)
        sessions.append(_build(SessionSpec, raw, where))
    top = {k: data[k] for k in _TOP_KEYS - {"profiles", "sessions", "defaults"} if k in data}
    return SimConfig(profiles=tuple(profiles), sessions=tuple(sessions), **top)


def load_config(path: str | os.PathLike[str], seed_override: int | None = None) -> SimConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{os.fspath(path)}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if seed_override is not None:
        data["master_seed"] = seed_override
    return config_from_dict(data)


def write_paper_records(records: list[PaperRecord], path: str | os.PathLike[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["player_id", "card_id", "correct", "session_index"])
        for r in records:
            writer.writerow([r.player_id, r.card_id, "true" if r.correct else "false", r.session_index])


def write_activity(activity: dict[tuple[str, int], int], path: str | os.PathLike[str]) -> None:
    """Tallies in the ``group,period,count`` layout read by the chi-squared report."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["group", "period", "count"])
        for (group, week), count in sorted(activity.items()):
            writer.writerow([group, f"week{week}", count])
