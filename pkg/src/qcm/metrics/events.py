"""Gameplay-metric event schema.

Each event id has a fixed payload contract: the exact set of keys, their
value types, and (for flag events) the only allowed value. The contract
also fixes the key order used on the wire.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

PayloadValue = Union[bool, int, str]


class EventId(str, enum.Enum):
    GAME_START = "GAME_START"
    GAME_END = "GAME_END"
    GAME_PAUSE = "GAME_PAUSE"
    MAIN_MENU_START = "MAIN_MENU_START"
    MAIN_MENU_QUIT = "MAIN_MENU_QUIT"
    STORY_START = "STORY_START"
    STORY_SCENE_START = "STORY_SCENE_START"
    STORY_SCENE_END = "STORY_SCENE_END"
    STORY_END_SEQUENCE = "STORY_END_SEQUENCE"
    LABYRINTHE_START = "LABYRINTHE_START"
    LABYRINTHE_END = "LABYRINTHE_END"
    LABYRINTHE_LEVEL = "LABYRINTHE_LEVEL"
    LABYRINTHE_KEY = "LABYRINTHE_KEY"
    LABYRINTHE_BONUS = "LABYRINTHE_BONUS"
    LABYRINTHE_DOOR = "LABYRINTHE_DOOR"
    # extensions: bonus availability and optional avatar positions
    LABYRINTHE_BONUS_SPAWN = "LABYRINTHE_BONUS_SPAWN"
    MOVE = "MOVE"
    QUESTION_START = "QUESTION_START"
    QUESTION_EXAMPLE = "QUESTION_EXAMPLE"
    QUESTION_QCM = "QUESTION_QCM"
    QUESTION_ANSWER = "QUESTION_ANSWER"


BY_NAME: dict[str, EventId] = {e.value: e for e in EventId}


@dataclass(frozen=True)
class KeySpec:
    name: str
    kind: type
    # flag events must carry exactly this value
    fixed: PayloadValue | None = None
    minimum: int | None = None


_TRUE = (KeySpec("value", bool, True),)

CONTRACTS: dict[EventId, tuple[KeySpec, ...]] = {e: _TRUE for e in EventId}
CONTRACTS.update(
    {
        EventId.GAME_PAUSE: (KeySpec("value", bool),),
        EventId.STORY_SCENE_START: (KeySpec("scene", int, minimum=1),),
        EventId.STORY_SCENE_END: (KeySpec("scene", int, minimum=1),),
        EventId.LABYRINTHE_LEVEL: (KeySpec("level", int, minimum=1),),
        EventId.QUESTION_EXAMPLE: (KeySpec("image", str),),
        EventId.QUESTION_ANSWER: (
            KeySpec("card", str),
            KeySpec("choice", int, minimum=1),
            KeySpec("correct", bool),
        ),
        EventId.MOVE: (KeySpec("x", int, minimum=0), KeySpec("y", int, minimum=0)),
    }
)


class ContractError(ValueError):
    """A payload does not match its event's contract."""


def check_payload(event_id: EventId, payload: dict[str, PayloadValue]) -> None:
    specs = CONTRACTS[event_id]
    if payload.keys() != {s.name for s in specs}:
        expected = ",".join(s.name for s in specs)
        raise ContractError(f"{event_id.value} expects keys {{{expected}}}, got {{{','.join(payload)}}}")
    for spec in specs:
        value = payload[spec.name]
        # bool is a subclass of int; keep the two apart
        if type(value) is not spec.kind:
            raise ContractError(f"{event_id.value}.{spec.name} must be {spec.kind.__name__}, got {value!r}")
        if spec.fixed is not None and value != spec.fixed:
            raise ContractError(f"{event_id.value}.{spec.name} must be {spec.fixed!r}")
        if spec.minimum is not None and value < spec.minimum:
            raise ContractError(f"{event_id.value}.{spec.name} must be >= {spec.minimum}, got {value}")
        if spec.kind is str and not value:
            raise ContractError(f"{event_id.value}.{spec.name} must be non-empty")


def flag(value: bool = True) -> dict[str, PayloadValue]:
    return {"value": value}


@dataclass(frozen=True)
class MetricEvent:
    timestamp_ms: int
    seq: int
    player_id: str
    event_id: EventId
    payload: dict[str, PayloadValue] = field(default_factory=lambda: {"value": True})

    def validate(self) -> None:
        if self.timestamp_ms < 0:
            raise ContractError(f"negative timestamp {self.timestamp_ms}")
        if self.seq < 0:
            raise ContractError(f"negative seq {self.seq}")
        if not self.player_id:
            raise ContractError("empty player_id")
        check_payload(self.event_id, self.payload)


@dataclass
class Diagnostic:
    line_no: int
    position: int
    reason: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line_no}, byte {self.position}: {self.reason}: {self.message}"


@dataclass
class LogDocument:
    events: list[MetricEvent] = field(default_factory=list)
    source: str = ""
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def players(self) -> list[str]:
        return sorted({e.player_id for e in self.events})

    def by_player(self) -> dict[str, list[MetricEvent]]:
        out: dict[str, list[MetricEvent]] = {}
        for e in self.events:
            out.setdefault(e.player_id, []).append(e)
        return out

    def __len__(self) -> int:
        return len(self.events)
