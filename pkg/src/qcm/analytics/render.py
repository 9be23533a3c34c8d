"""CSV tables and SVG figures for computed reports.

Output is byte-deterministic: rows follow the order of the report lists
(already sorted by the analytics functions), rates are written with four
decimals, files are UTF-8 with LF line endings.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from .reports import (
    LUDIQUE,
    NARRATIF,
    BonusCapture,
    CardReport,
    CohortTotals,
    ContextTotals,
    SessionSegment,
    StudentReport,
    SuccessPoint,
)
from .stats import ChiSquareResult

GROUP_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
GAME_COLORS = {NARRATIF: "#6a3d9a", LUDIQUE: "#33a02c"}
MAX_RADIUS = 18.0


class ReportError(OSError):
    """A report could not be written to its destination."""


def rate(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def seconds(value: float | None) -> str:
    return "" if value is None else f"{value:.3f}"


def _csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# tables ---------------------------------------------------------------------


def students_csv(reports: Sequence[StudentReport]) -> str:
    header = (
        "player_id", "unique_cards_correct", "total_answers", "correct_answers", "errors",
        "error_rate", "median_response_time_s", "narratif_launches", "ludique_launches",
    )
    rows = [
        (
            r.player_id, r.unique_cards_correct, r.total_answers, r.correct_answers, r.errors,
            rate(r.error_rate), seconds(r.median_response_time_s),
            r.launches.get(NARRATIF, 0), r.launches.get(LUDIQUE, 0),
        )
        for r in reports
    ]
    return _csv(header, rows)


def cards_csv(reports: Sequence[CardReport]) -> str:
    rows = [
        (
            r.card_id, r.attempts, r.errors, rate(r.error_rate),
            ";".join(f"{choice}:{n}" for choice, n in r.wrong_choices.items()),
        )
        for r in reports
    ]
    return _csv(("card_id", "attempts", "errors", "error_rate", "wrong_choices"), rows)


def sessions_csv(segments: Sequence[SessionSegment]) -> str:
    rows = [
        (s.player_id, s.game_kind, s.start_ms, s.end_ms, seconds(s.duration_ms / 1000), str(s.completed).lower())
        for s in segments
    ]
    return _csv(("player_id", "game", "start_ms", "end_ms", "duration_s", "completed"), rows)


def _totals_row(scope: str, t: ContextTotals) -> tuple[object, ...]:
    return (scope, t.context, t.players, t.answers, t.errors, rate(t.error_rate), t.unique_cards_correct)


def totals_csv(totals: CohortTotals) -> str:
    rows = [_totals_row("all", t) for _, t in sorted(totals.contexts.items())]
    for group, per_ctx in totals.by_group.items():
        rows += [_totals_row(f"group:{group}", t) for _, t in sorted(per_ctx.items())]
    return _csv(("scope", "context", "players", "answers", "errors", "error_rate", "unique_cards_correct"), rows)


def totals_players_csv(totals: CohortTotals) -> str:
    contexts = sorted(totals.contexts)
    rows = [(pid, *(counts.get(c, 0) for c in contexts)) for pid, counts in totals.per_player_unique.items()]
    return _csv(("player_id", *contexts), rows)


def chi2_csv(result: ChiSquareResult, table: Sequence[Sequence[int]]) -> str:
    (a, b), (c, d) = table
    return _csv(
        ("o11", "o12", "o21", "o22", "statistic", "degrees_of_freedom", "p_value"),
        [(a, b, c, d, f"{result.statistic:.6f}", result.degrees_of_freedom, f"{result.p_value:.6f}")],
    )


def bonus_csv(bonus: BonusCapture) -> str:
    return _csv(("captured", "available", "rate"), [(bonus.captured, bonus.available, rate(bonus.rate))])


# figures --------------------------------------------------------------------


def _num(x: float) -> str:
    return f"{x:.2f}"


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def scatter_svg(points: Sequence[SuccessPoint], width: int = 640, height: int = 420) -> str:
    """Success rate against median answer time, one circle per player.

    Circle radius is proportional to the number of answered cards; colour
    encodes the group.
    """
    left, right, top, bottom = 60, 20, 20, 50
    pw, ph = width - left - right, height - top - bottom
    x_max = max((p.median_time_s for p in points), default=0.0) or 1.0
    n_max = max((p.n_cards for p in points), default=0) or 1
    groups = sorted({p.group for p in points})
    colors = {g: GROUP_COLORS[i % len(GROUP_COLORS)] for i, g in enumerate(groups)}
    body = [
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">median answer time (s)</text>',
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">success rate</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        y = top + ph * (1 - frac)
        body.append(f'<text x="{left - 6}" y="{_num(y + 4)}" text-anchor="end" font-size="10">{frac:.1f}</text>')
    body.append(f'<text x="{left + pw}" y="{top + ph + 14}" text-anchor="end" font-size="10">{x_max:.1f}</text>')
    for i, g in enumerate(groups):
        body.append(
            f'<circle cx="{left + 10}" cy="{top + 10 + 16 * i}" r="5" fill="{colors[g]}"/>'
            f'<text x="{left + 20}" y="{top + 14 + 16 * i}" font-size="10">{escape(g or "?")}</text>'
        )
    for p in sorted(points, key=lambda p: p.player_id):
        cx = left + pw * p.median_time_s / x_max
        cy = top + ph * (1 - p.success_rate)
        r = MAX_RADIUS * p.n_cards / n_max
        body.append(
            f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="{colors[p.group]}" '
            f'fill-opacity="0.6" data-player={quoteattr(p.player_id)} data-n="{p.n_cards}">'
            f"<title>{escape(p.player_id)}</title></circle>"
        )
    return _svg(width, height, body)


def timeline_svg(segments: Sequence[SessionSegment], width: int = 800, row_height: int = 18) -> str:
    """One row per player, one bar per game launch; unfinished launches are dashed."""
    players = sorted({s.player_id for s in segments})
    left, right, top = 60, 20, 20
    height = top * 2 + row_height * max(len(players), 1)
    pw = width - left - right
    t0 = min((s.start_ms for s in segments), default=0)
    span = (max((s.end_ms for s in segments), default=0) - t0) or 1
    rows = {pid: i for i, pid in enumerate(players)}
    body = []
    for pid, i in rows.items():
        y = top + row_height * i
        body.append(f'<text x="{left - 6}" y="{y + row_height - 5}" text-anchor="end" font-size="10">{escape(pid)}</text>')
    for s in sorted(segments, key=lambda s: (s.player_id, s.start_ms, s.end_ms, s.game_kind)):
        x = left + pw * (s.start_ms - t0) / span
        w = max(pw * s.duration_ms / span, 1.0)
        y = top + row_height * rows[s.player_id] + 2
        dash = "" if s.completed else ' stroke-dasharray="3,2"'
        body.append(
            f'<rect x="{_num(x)}" y="{y}" width="{_num(w)}" height="{row_height - 4}" '
            f'fill="{GAME_COLORS.get(s.game_kind, "#999")}" stroke="#000" stroke-width="0.5"{dash} '
            f'data-game="{escape(s.game_kind)}" data-completed="{str(s.completed).lower()}"/>'
        )
    return _svg(width, height, body)


# bundle ---------------------------------------------------------------------


@dataclass
class ReportBundle:
    """Whichever reports were computed; ``None`` entries are skipped."""

    students: list[StudentReport] | None = None
    cards: list[CardReport] | None = None
    sessions: list[SessionSegment] | None = None
    points: list[SuccessPoint] | None = None
    totals: CohortTotals | None = None
    chi2: tuple[ChiSquareResult, list[list[int]]] | None = None
    bonus: BonusCapture | None = None


def render_files(bundle: ReportBundle) -> dict[str, str]:
    """File name to content, in a fixed order."""
    files: dict[str, str] = {}
    if bundle.students is not None:
        files["students.csv"] = students_csv(bundle.students)
    if bundle.cards is not None:
        files["cards.csv"] = cards_csv(bundle.cards)
    if bundle.sessions is not None:
        files["sessions.csv"] = sessions_csv(bundle.sessions)
        files["sessions.svg"] = timeline_svg(bundle.sessions)
    if bundle.points is not None:
        files["scatter.svg"] = scatter_svg(bundle.points)
    if bundle.totals is not None:
        files["totals.csv"] = totals_csv(bundle.totals)
        files["totals_players.csv"] = totals_players_csv(bundle.totals)
    if bundle.chi2 is not None:
        files["chi2.csv"] = chi2_csv(*bundle.chi2)
    if bundle.bonus is not None:
        files["bonus.csv"] = bonus_csv(bundle.bonus)
    return files


def emit_reports(bundle: ReportBundle, destination: str | os.PathLike[str]) -> list[Path]:
    out = Path(destination)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, text in render_files(bundle).items():
            path = out / name
            path.write_bytes(text.encode("utf-8"))
            paths.append(path)
    except OSError as exc:
        raise ReportError(f"cannot write reports to {out}: {exc}") from exc
    return paths
