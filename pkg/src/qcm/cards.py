"""Reading-card files and the per-player auto-corrective scheduler.

A file holds 48 cards in increasing difficulty. A player works through a
file in order; a wrong answer sends the card to a retry queue, and queued
cards come back (before any new card) from the next session onward. A
file is complete once every card has been answered correctly.

Card-description documents are CSV with the header::

    card_id,file_level,index,num_choices,correct_choice,example_ref
"""

from __future__ import annotations

import csv
import enum
import io
import os
import random
from dataclasses import dataclass, field
from typing import IO, Iterable

CARDS_PER_FILE = 48
FILE_LEVELS = (2, 3)
MIN_CHOICES = 3
MAX_CHOICES = 6

DECK_FIELDS = ("card_id", "file_level", "index", "num_choices", "correct_choice", "example_ref")


class DeckError(ValueError):
    """A card-description document violates the deck rules."""


class SchedulerError(Exception):
    """An operation was attempted on a scheduler state that does not allow it."""


@dataclass(frozen=True)
class Card:
    card_id: str
    file_level: int
    index_in_file: int
    num_choices: int
    correct_choice: int
    example_ref: str

    def __post_init__(self) -> None:
        if not MIN_CHOICES <= self.num_choices <= MAX_CHOICES:
            raise DeckError(
                f"card {self.card_id!r}: num_choices={self.num_choices} outside {MIN_CHOICES}..{MAX_CHOICES}"
            )
        if not 1 <= self.correct_choice <= self.num_choices:
            raise DeckError(
                f"card {self.card_id!r}: correct_choice={self.correct_choice} outside 1..{self.num_choices}"
            )
        if not 1 <= self.index_in_file <= CARDS_PER_FILE:
            raise DeckError(f"card {self.card_id!r}: index {self.index_in_file} outside 1..{CARDS_PER_FILE}")


@dataclass(frozen=True)
class Deck:
    file_level: int
    cards: tuple[Card, ...]

    def __post_init__(self) -> None:
        if len(self.cards) != CARDS_PER_FILE:
            raise DeckError(f"expected {CARDS_PER_FILE} cards, got {len(self.cards)}")
        seen_ids: set[str] = set()
        for pos, card in enumerate(self.cards, start=1):
            if card.file_level != self.file_level:
                raise DeckError(f"card {card.card_id!r}: file_level {card.file_level} != deck level {self.file_level}")
            if card.card_id in seen_ids:
                raise DeckError(f"duplicate card_id {card.card_id!r}")
            seen_ids.add(card.card_id)
            if card.index_in_file != pos:
                raise DeckError(f"card {card.card_id!r}: index {card.index_in_file} out of order (expected {pos})")
        object.__setattr__(self, "_by_id", {c.card_id: c for c in self.cards})

    def card(self, index_in_file: int) -> Card:
        return self.cards[index_in_file - 1]

    def by_id(self, card_id: str) -> Card:
        return self._by_id[card_id]  # type: ignore[attr-defined]

    def __contains__(self, card_id: object) -> bool:
        return card_id in self._by_id  # type: ignore[attr-defined]


def _row_int(row: dict[str, str], key: str, line: int) -> int:
    raw = (row.get(key) or "").strip()
    try:
        return int(raw)
    except ValueError:
        raise DeckError(f"line {line}: field {key!r} is not an integer: {raw!r}") from None


def parse_deck(text: str) -> Deck:
    reader = csv.DictReader(io.StringIO(text))
    missing = [f for f in DECK_FIELDS if f not in (reader.fieldnames or [])]
    if missing:
        raise DeckError(f"missing columns: {', '.join(missing)}")
    cards: list[Card] = []
    levels: set[int] = set()
    seen_index: dict[int, str] = {}
    for line, row in enumerate(reader, start=2):
        index = _row_int(row, "index", line)
        card_id = row["card_id"].strip()
        if index in seen_index:
            raise DeckError(f"line {line}: duplicate index {index} (card {card_id!r}, already used by {seen_index[index]!r})")
        seen_index[index] = card_id
        level = _row_int(row, "file_level", line)
        levels.add(level)
        try:
            cards.append(
                Card(
                    card_id=card_id,
                    file_level=level,
                    index_in_file=index,
                    num_choices=_row_int(row, "num_choices", line),
                    correct_choice=_row_int(row, "correct_choice", line),
                    example_ref=row["example_ref"],
                )
            )
        except DeckError as exc:
            raise DeckError(f"line {line}: {exc}") from None
    if len(levels) > 1:
        raise DeckError(f"document mixes file levels {sorted(levels)}")
    if len(cards) != CARDS_PER_FILE:
        raise DeckError(f"expected {CARDS_PER_FILE} cards, got {len(cards)}")
    (level,) = levels
    if level not in FILE_LEVELS:
        raise DeckError(f"file level {level} not supported (only {FILE_LEVELS})")
    cards.sort(key=lambda c: c.index_in_file)
    return Deck(level, tuple(cards))


def load_deck(source: str | os.PathLike[str] | IO[str]) -> Deck:
    """Load a deck from a path or an open text stream."""
    if hasattr(source, "read"):
        return parse_deck(source.read())  # type: ignore[union-attr]
    with open(source, encoding="utf-8", newline="") as fh:
        return parse_deck(fh.read())


def dump_deck(deck: Deck) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DECK_FIELDS)
    for c in deck.cards:
        writer.writerow([c.card_id, c.file_level, c.index_in_file, c.num_choices, c.correct_choice, c.example_ref])
    return buf.getvalue()


def synthetic_deck(file_level: int, seed: int = 0) -> Deck:
    """Stand-in deck with seeded choice counts; ids look like ``L2-07``."""
    rng = random.Random(f"deck:{seed}:{file_level}")
    cards = []
    for index in range(1, CARDS_PER_FILE + 1):
        n = rng.randint(MIN_CHOICES, MAX_CHOICES)
        cards.append(
            Card(
                card_id=f"L{file_level}-{index:02d}",
                file_level=file_level,
                index_in_file=index,
                num_choices=n,
                correct_choice=rng.randint(1, n),
                example_ref=f"fiches/L{file_level}/{index:02d}.png",
            )
        )
    return Deck(file_level, tuple(cards))


class NoCard(enum.Enum):
    FILE_COMPLETE = "file-complete"
    # only retries failed in the current session remain
    SESSION_EXHAUSTED = "session-exhausted"


FILE_COMPLETE = NoCard.FILE_COMPLETE
SESSION_EXHAUSTED = NoCard.SESSION_EXHAUSTED


class CardStatus(str, enum.Enum):
    UNSEEN = "unseen"
    CORRECT = "correct"
    PENDING_RETRY = "pending-retry"


@dataclass(frozen=True)
class RetryEntry:
    card_id: str
    session_index: int


@dataclass(frozen=True)
class AnswerRecord:
    card_id: str
    choice: int
    correct: bool
    session_index: int


@dataclass(frozen=True)
class PaperRecord:
    """An answer given on the paper file, outside any game log."""

    player_id: str
    card_id: str
    correct: bool
    session_index: int = 0


@dataclass(frozen=True)
class AnswerOutcome:
    correct: bool
    card_id: str = ""
    choice: int = 0


@dataclass
class SchedulerState:
    player_id: str
    decks: dict[int, Deck]
    current_file_level: int = FILE_LEVELS[0]
    cursor: int = 1
    retry_queue: list[RetryEntry] = field(default_factory=list)
    completed: set[str] = field(default_factory=set)
    answer_log: list[AnswerRecord] = field(default_factory=list)
    session_index: int = 0
    presented: str | None = None
    replay_cursor: int = 0

    @classmethod
    def fresh(cls, player_id: str, decks: Iterable[Deck] | None = None, file_level: int = FILE_LEVELS[0]) -> "SchedulerState":
        if decks is None:
            decks = [synthetic_deck(level) for level in FILE_LEVELS]
        return cls(player_id=player_id, decks={d.file_level: d for d in decks}, current_file_level=file_level)

    @property
    def deck(self) -> Deck:
        return self.decks[self.current_file_level]

    @property
    def file_complete(self) -> bool:
        return len(self.completed) == CARDS_PER_FILE

    def pending_ids(self) -> set[str]:
        return {e.card_id for e in self.retry_queue}


def next_card(state: SchedulerState, session_index: int) -> Card | NoCard:
    """Card to present next in ``session_index``.

    Repeated calls without an answer in between return the same card.
    """
    state.session_index = session_index
    if state.file_complete:
        state.presented = None
        return FILE_COMPLETE
    if state.retry_queue and state.retry_queue[0].session_index < session_index:
        card = state.deck.by_id(state.retry_queue[0].card_id)
    elif state.cursor <= CARDS_PER_FILE:
        card = state.deck.card(state.cursor)
    else:
        state.presented = None
        return SESSION_EXHAUSTED
    state.presented = card.card_id
    return card


def replay_card(state: SchedulerState, session_index: int) -> Card | None:
    """Cycle through already-corrected cards of the current file, in order.

    Used once nothing new can be served; answers are logged but leave the
    file progression untouched.
    """
    state.session_index = session_index
    done = [c for c in state.deck.cards if c.card_id in state.completed]
    if not done:
        state.presented = None
        return None
    start = state.replay_cursor
    card = next((c for c in done if c.index_in_file > start), done[0])
    state.replay_cursor = card.index_in_file
    state.presented = card.card_id
    return card


def record_answer(state: SchedulerState, card: Card, choice: int) -> AnswerOutcome:
    if state.presented != card.card_id:
        raise SchedulerError(f"card {card.card_id!r} was not presented to player {state.player_id!r}")
    if not 1 <= choice <= card.num_choices:
        raise ValueError(f"choice {choice} outside 1..{card.num_choices} for card {card.card_id!r}")
    correct = choice == card.correct_choice
    cid = card.card_id
    was_new = cid not in state.completed and cid not in state.pending_ids()
    if was_new:
        state.cursor = card.index_in_file + 1
    if cid not in state.completed:
        state.retry_queue = [e for e in state.retry_queue if e.card_id != cid]
        if correct:
            state.completed.add(cid)
        else:
            state.retry_queue.append(RetryEntry(cid, state.session_index))
    state.answer_log.append(AnswerRecord(cid, choice, correct, state.session_index))
    state.presented = None
    return AnswerOutcome(correct=correct, card_id=cid, choice=choice)


def promote(state: SchedulerState) -> SchedulerState:
    """Move a player who finished their file to the next file level."""
    if not state.file_complete:
        raise SchedulerError(
            f"file {state.current_file_level} incomplete ({len(state.completed)}/{CARDS_PER_FILE} correct)"
        )
    higher = [lvl for lvl in FILE_LEVELS if lvl > state.current_file_level]
    if not higher or higher[0] not in state.decks:
        raise SchedulerError(f"no higher file after level {state.current_file_level}")
    state.current_file_level = higher[0]
    state.cursor = 1
    state.retry_queue = []
    state.completed = set()
    state.presented = None
    state.replay_cursor = 0
    return state


def bilan(state: SchedulerState) -> dict[str, CardStatus]:
    """Status of every card in the current file, in file order."""
    pending = state.pending_ids()
    out: dict[str, CardStatus] = {}
    for card in state.deck.cards:
        if card.card_id in state.completed:
            out[card.card_id] = CardStatus.CORRECT
        elif card.card_id in pending:
            out[card.card_id] = CardStatus.PENDING_RETRY
        else:
            out[card.card_id] = CardStatus.UNSEEN
    return out
