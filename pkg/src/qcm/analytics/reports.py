"""Aggregates computed from metric logs.

All functions are pure over a :class:`LogDocument` whose events are in
(player_id, seq) order, as produced by ``read_log``.
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ..metrics.events import EventId, LogDocument, MetricEvent
from ..cards import PaperRecord
from .stats import median

NARRATIF = "narratif"
LUDIQUE = "ludique"
DIGITAL = "numerique"
PAPER = "papier"

_STARTS = {EventId.STORY_START: NARRATIF, EventId.LABYRINTHE_START: LUDIQUE}
_ENDS = {EventId.STORY_END_SEQUENCE: NARRATIF, EventId.LABYRINTHE_END: LUDIQUE}
# leaving to the menu or closing the app ends a game without finishing it
_QUITS = {EventId.MAIN_MENU_START, EventId.GAME_END}
_QUESTION_EVENTS = {EventId.QUESTION_START, EventId.QUESTION_EXAMPLE, EventId.QUESTION_QCM, EventId.QUESTION_ANSWER}

_CARD_ID = re.compile(r"^L(\d+)-(\d+)$")


class UnknownPlayerError(KeyError):
    pass


def card_sort_key(card_id: str) -> tuple[int, int, str]:
    m = _CARD_ID.match(card_id)
    if m:
        return int(m.group(1)), int(m.group(2)), card_id
    return 1 << 30, 0, card_id


def _by_player(log: LogDocument) -> dict[str, list[MetricEvent]]:
    out: dict[str, list[MetricEvent]] = {}
    for e in log.events:
        out.setdefault(e.player_id, []).append(e)
    for events in out.values():
        events.sort(key=lambda e: e.seq)
    return out


# sessions ---------------------------------------------------------


@dataclass(frozen=True)
class SessionSegment:
    player_id: str
    game_kind: str
    start_ms: int
    end_ms: int
    completed: bool

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


def _player_segments(player_id: str, events: list[MetricEvent], diagnostics: list[str] | None) -> list[SessionSegment]:
    segments: list[SessionSegment] = []
    open_kind: str | None = None
    open_start = 0
    for e in events:
        eid = e.event_id
        if eid in _STARTS:
            if open_kind is not None:
                segments.append(SessionSegment(player_id, open_kind, open_start, e.timestamp_ms, False))
            open_kind, open_start = _STARTS[eid], e.timestamp_ms
        elif eid in _ENDS:
            if open_kind == _ENDS[eid]:
                segments.append(SessionSegment(player_id, open_kind, open_start, e.timestamp_ms, True))
                open_kind = None
            elif diagnostics is not None:
                diagnostics.append(f"{player_id}: orphan {eid.value} at seq {e.seq}")
        elif eid in _QUITS and open_kind is not None:
            segments.append(SessionSegment(player_id, open_kind, open_start, e.timestamp_ms, False))
            open_kind = None
    if open_kind is not None:
        segments.append(SessionSegment(player_id, open_kind, open_start, events[-1].timestamp_ms, False))
    return segments


def reconstruct_sessions(log: LogDocument, diagnostics: list[str] | None = None) -> list[SessionSegment]:
    """One segment per game launch, grouped by player then time.

    A segment is ``completed`` when closed by its game's end event; a return
    to the menu, ``GAME_END``, another launch or the end of the log closes it
    as incomplete. End events with no open segment of that game go to
    ``diagnostics``.
    """
    out: list[SessionSegment] = []
    for pid, events in sorted(_by_player(log).items()):
        out += _player_segments(pid, events, diagnostics)
    return out


# per student -------------------------------------------------------


@dataclass
class StudentReport:
    player_id: str
    unique_cards_correct: int
    total_answers: int
    errors: int
    median_response_time_s: float | None
    sessions: list[SessionSegment] = field(default_factory=list)
    launches: dict[str, int] = field(default_factory=dict)

    @property
    def correct_answers(self) -> int:
        return self.total_answers - self.errors

    @property
    def error_rate(self) -> float | None:
        return self.errors / self.total_answers if self.total_answers else None


def _answer_durations(events: Iterable[MetricEvent]) -> list[int]:
    out = []
    start: int | None = None
    for e in events:
        if e.event_id is EventId.QUESTION_START:
            start = e.timestamp_ms
        elif e.event_id is EventId.QUESTION_ANSWER and start is not None:
            out.append(e.timestamp_ms - start)
            start = None
    return out


def _student(pid: str, events: list[MetricEvent]) -> StudentReport:
    total = errors = 0
    correct_ids: set[str] = set()
    launches = {NARRATIF: 0, LUDIQUE: 0}
    for e in events:
        if e.event_id is EventId.QUESTION_ANSWER:
            total += 1
            if e.payload["correct"]:
                correct_ids.add(e.payload["card"])  # type: ignore[arg-type]
            else:
                errors += 1
        elif e.event_id in _STARTS:
            launches[_STARTS[e.event_id]] += 1
    durations = _answer_durations(events)
    med = median(durations)
    return StudentReport(
        player_id=pid,
        unique_cards_correct=len(correct_ids),
        total_answers=total,
        errors=errors,
        median_response_time_s=None if med is None else med / 1000.0,
        sessions=_player_segments(pid, events, None),
        launches=launches,
    )


def student_report(log: LogDocument, player_id: str) -> StudentReport:
    events = [e for e in log.events if e.player_id == player_id]
    if not events:
        raise UnknownPlayerError(player_id)
    events.sort(key=lambda e: e.seq)
    return _student(player_id, events)


def student_reports(log: LogDocument) -> list[StudentReport]:
    return [_student(pid, events) for pid, events in sorted(_by_player(log).items())]


# cohort totals ----------------------------


class EmptyContextError(ValueError):
    pass


@dataclass
class ContextTotals:
    context: str
    players: int
    answers: int
    errors: int
    unique_cards_correct: int

    @property
    def error_rate(self) -> float:
        return self.errors / self.answers


@dataclass
class CohortTotals:
    contexts: dict[str, ContextTotals]
    per_player_unique: dict[str, dict[str, int]]
    by_group: dict[str, dict[str, ContextTotals]] = field(default_factory=dict)

    @property
    def relative_difference(self) -> Fraction | None:
        """Digital over paper unique correct cards, minus one."""
        if DIGITAL not in self.contexts or PAPER not in self.contexts:
            return None
        return Fraction(self.contexts[DIGITAL].unique_cards_correct, self.contexts[PAPER].unique_cards_correct) - 1


def _totals(context: str, rows: list[tuple[str, str, bool]]) -> ContextTotals:
    errors = sum(1 for _, _, ok in rows if not ok)
    unique = len({(p, c) for p, c, ok in rows if ok})
    return ContextTotals(context, len({p for p, _, _ in rows}), len(rows), errors, unique)


def cohort_totals(
    log: LogDocument,
    paper_records: Iterable[PaperRecord] | None = None,
    group_map: dict[str, str] | None = None,
    players: Iterable[str] | None = None,
) -> CohortTotals:
    """Answer counts, error rates and unique correct cards per context.

    Unique cards are counted per player and summed over players. ``players``
    restricts the cohort (e.g. to students with reliable records).
    """
    keep = set(players) if players is not None else None
    digital = [
        (e.player_id, str(e.payload["card"]), bool(e.payload["correct"]))
        for e in log.events
        if e.event_id is EventId.QUESTION_ANSWER and (keep is None or e.player_id in keep)
    ]
    sources = {DIGITAL: digital}
    if paper_records is not None:
        sources[PAPER] = [(r.player_id, r.card_id, r.correct) for r in paper_records if keep is None or r.player_id in keep]
    for ctx, rows in sources.items():
        if not rows:
            raise EmptyContextError(f"no answers in context {ctx!r}")
    contexts = {ctx: _totals(ctx, rows) for ctx, rows in sources.items()}
    per_player: dict[str, dict[str, int]] = {}
    for rows in sources.values():
        for p, _, _ in rows:
            per_player.setdefault(p, dict.fromkeys(sources, 0))
    for ctx, rows in sources.items():
        for p, _ in {(p, c) for p, c, ok in rows if ok}:
            per_player[p][ctx] += 1
    by_group: dict[str, dict[str, ContextTotals]] = {}
    if group_map:
        for g in sorted(set(group_map.values())):
            by_group[g] = {}
            for ctx, rows in sources.items():
                sub = [r for r in rows if group_map.get(r[0]) == g]
                if sub:
                    by_group[g][ctx] = _totals(ctx, sub)
    return CohortTotals(contexts, dict(sorted(per_player.items())), by_group)


# per card ---------------------------------------------------------


@dataclass
class CardReport:
    card_id: str
    attempts: int
    errors: int
    wrong_choices: dict[int, int]

    @property
    def error_rate(self) -> float:
        return self.errors / self.attempts


def card_error_rates(log: LogDocument) -> list[CardReport]:
    by_card: dict[str, CardReport] = {}
    for e in log.events:
        if e.event_id is not EventId.QUESTION_ANSWER:
            continue
        cid = str(e.payload["card"])
        rep = by_card.get(cid)
        if rep is None:
            rep = by_card[cid] = CardReport(cid, 0, 0, {})
        rep.attempts += 1
        if not e.payload["correct"]:
            rep.errors += 1
            choice = int(e.payload["choice"])
            rep.wrong_choices[choice] = rep.wrong_choices.get(choice, 0) + 1
    for rep in by_card.values():
        rep.wrong_choices = dict(sorted(rep.wrong_choices.items()))
    return [by_card[k] for k in sorted(by_card, key=card_sort_key)]


# success vs median time ------------------------------------------


@dataclass(frozen=True)
class SuccessPoint:
    player_id: str
    group: str
    success_rate: float
    median_time_s: float
    n_cards: int


def success_vs_time(
    log: LogDocument, group_map: dict[str, str] | None = None, diagnostics: list[str] | None = None
) -> list[SuccessPoint]:
    """One point per player; players without answers are left out and noted."""
    group_map = group_map or {}
    points = []
    for rep in student_reports(log):
        if rep.total_answers == 0 or rep.median_response_time_s is None:
            if diagnostics is not None:
                diagnostics.append(f"{rep.player_id}: no timed answers, excluded")
            continue
        points.append(
            SuccessPoint(
                rep.player_id,
                group_map.get(rep.player_id, ""),
                rep.correct_answers / rep.total_answers,
                rep.median_response_time_s,
                rep.total_answers,
            )
        )
    return points


# bonus capture --------------------------------------------------------------


@dataclass(frozen=True)
class BonusCapture:
    captured: int
    available: int

    @property
    def fraction(self) -> Fraction | None:
        return Fraction(self.captured, self.available) if self.available else None

    @property
    def rate(self) -> float | None:
        return self.captured / self.available if self.available else None


def bonus_capture_rate(log: LogDocument, questions_per_pickup: int | None = None) -> BonusCapture:
    """Bonuses captured over bonuses spawned.

    A capture is a ``LABYRINTHE_BONUS`` collision whose following question
    series (consecutive question events, pauses ignored) is answered
    entirely correctly. With ``questions_per_pickup`` set, a series must
    also have exactly that many answers.
    """
    available = captured = 0
    for events in _by_player(log).values():
        i, n = 0, len(events)
        while i < n:
            eid = events[i].event_id
            if eid is EventId.LABYRINTHE_BONUS_SPAWN:
                available += 1
            elif eid is EventId.LABYRINTHE_BONUS:
                answers: list[bool] = []
                j = i + 1
                while j < n and (events[j].event_id in _QUESTION_EVENTS or events[j].event_id is EventId.GAME_PAUSE):
                    if events[j].event_id is EventId.QUESTION_ANSWER:
                        answers.append(bool(events[j].payload["correct"]))
                    j += 1
                ok = bool(answers) and all(answers)
                if questions_per_pickup is not None and len(answers) != questions_per_pickup:
                    ok = False
                captured += ok
                i = j
                continue
            i += 1
    return BonusCapture(captured, available)


# external tables ------------------------------------------------------------


def read_paper_records(path: str | os.PathLike[str]) -> list[PaperRecord]:
    """CSV with header ``player_id,card_id,correct[,session_index]``."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for line, row in enumerate(reader, start=2):
            flag = (row.get("correct") or "").strip().lower()
            if flag not in ("true", "false", "1", "0"):
                raise ValueError(f"{os.fspath(path)} line {line}: correct must be true/false, got {flag!r}")
            out.append(
                PaperRecord(
                    row["player_id"], row["card_id"], flag in ("true", "1"), int(row.get("session_index") or 0)
                )
            )
    return out


def read_group_map(path: str | os.PathLike[str]) -> dict[str, str]:
    """CSV with header ``player_id,group``."""
    with open(path, encoding="utf-8", newline="") as fh:
        return {row["player_id"]: row["group"] for row in csv.DictReader(fh)}


def write_group_map(group_map: dict[str, str], path: str | os.PathLike[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["player_id", "group"])
        for pid in sorted(group_map):
            w.writerow([pid, group_map[pid]])


def read_tallies(path: str | os.PathLike[str]) -> list[tuple[str, str, int]]:
    """CSV with header ``group,period,count`` (one row per tally)."""
    with open(path, encoding="utf-8", newline="") as fh:
        return [(r["group"], r["period"], int(r["count"])) for r in csv.DictReader(fh)]
