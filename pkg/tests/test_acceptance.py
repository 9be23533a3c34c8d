"""Acceptance suite; the terminal summary prints one verdict per criterion."""

import random
import time
import timeit
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qcm.analytics import (
    DIGITAL,
    PAPER,
    bonus_capture_rate,
    chi2_sf_1dof,
    chi_squared_2x2,
    cohort_totals,
)
from qcm.cards import CARDS_PER_FILE, FILE_COMPLETE, SESSION_EXHAUSTED, Card, SchedulerState, next_card, record_answer
from qcm.cli import main
from qcm.games import generate_maze
from qcm.metrics import EventId as E
from qcm.metrics import LogDocument, MetricEvent, ParseError, flag, parse_line, read_log_file, serialize_event
from qcm.sim import config_from_dict, simulate_cohort

from helpers import CLASSROOM, small_config
from log_strategies import small_logs
from maze_oracle import is_perfect, targets_reachable
from oracles import CHI2_SF, TABLE_1, TABLE_1_P, TABLE_1_STATISTIC
from serving import post, running_server, snapshot
from strategies import random_event
from test_analytics import check_against_oracle

criterion = pytest.mark.criterion


def elapsed(fn, *args):
    t0 = time.perf_counter()
    result = fn(*args)
    return time.perf_counter() - t0, result


@criterion(1, "chi-squared on the 2x2 activity table")
def test_chi2_reproduction():
    result = chi_squared_2x2(TABLE_1)
    assert abs(result.p_value - 0.038) <= 0.001
    assert abs(result.statistic - TABLE_1_STATISTIC) <= 1e-6
    assert abs(result.p_value - TABLE_1_P) <= 1e-6
    best = min(timeit.repeat(lambda: chi_squared_2x2(TABLE_1), number=100, repeat=5)) / 100
    assert best < 1e-3


@criterion(2, "chi-squared tail accuracy")
def test_chi2_tail_accuracy():
    for x, p in CHI2_SF.items():
        assert abs(chi2_sf_1dof(x) - p) <= 1e-6, x


@criterion(3, "maze safety over 1000 seeds x 5 levels")
def test_maze_safety():
    t0 = time.perf_counter()
    failures = []
    for seed in range(1000):
        for level in range(1, 6):
            m = generate_maze(seed, level)
            if not (is_perfect(m) and targets_reachable(m)):
                failures.append((seed, level))
    assert failures == []
    assert time.perf_counter() - t0 < 10


@criterion(4, "same config gives byte-identical logs and reports")
def test_determinism(tmp_path, classroom_run):
    again = tmp_path / "again"
    assert main(["simulate", str(CLASSROOM), "--out", str(again)]) == 0
    assert (again / "merged.qcmlog").read_bytes() == (classroom_run / "merged.qcmlog").read_bytes()
    assert (again / "manifest.json").read_bytes() == (classroom_run / "manifest.json").read_bytes()
    outputs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        argv = ["report", str(classroom_run / "merged.qcmlog"), "--out", str(out),
                "--groups", str(classroom_run / "groups.csv"),
                "--paper-records", str(classroom_run / "paper_records.csv")]
        assert main(argv) == 0
        assert main(["report", "--chi2", "--activity", str(classroom_run / "activity.csv"), "--out", str(out)]) == 0
        outputs.append(snapshot(out))
    assert outputs[0] == outputs[1]
    assert {"students.csv", "cards.csv", "sessions.csv", "sessions.svg", "scatter.svg", "chi2.csv"} <= set(outputs[0])


@criterion(5, "serialize/parse round trip and corrupted-byte fuzz")
def test_round_trip():
    rng = random.Random(55)
    for _ in range(100_000):
        event = random_event(rng)
        line = serialize_event(event)
        assert parse_line(line) == event, line


@criterion(5, "serialize/parse round trip and corrupted-byte fuzz")
def test_corrupted_bytes():
    run = simulate_cohort(config_from_dict(small_config()))
    pool = [serialize_event(e).encode("utf-8") for e in run.log.events]
    pool += [
        serialize_event(MetricEvent(1_465_214_400_000, 7, "é;=%\t", E.QUESTION_EXAMPLE, {"image": "a=b;c%\n"}))
        .encode("utf-8"),
        serialize_event(MetricEvent(9, 2**40, "p", E.QUESTION_ANSWER, {"card": "L2-01", "choice": 3, "correct": False}))
        .encode("utf-8"),
    ]
    rng = random.Random(5)
    mutations = 0
    while mutations < 10_000:
        line = pool[rng.randrange(len(pool))]
        original = parse_line(line)
        pos = rng.randrange(len(line))
        byte = rng.randrange(256)
        if byte == line[pos]:
            continue
        mutated = line[:pos] + bytes([byte]) + line[pos + 1:]
        mutations += 1
        try:
            parsed = parse_line(mutated)
        except ParseError as exc:
            assert 0 <= exc.position <= len(mutated)
        else:
            assert parsed != original


def _recovery_config():
    # game error 1 - 0.955 * c = 0.225, plain error 1 - 0.955 = 0.045
    base = 0.955
    defaults = {"p_correct_base": base, "p_correct_slope": 0.0, "carelessness_factor": 0.775 / base,
                "response_median_s": 15}
    profiles = [{"player_id": f"T{i:02d}", "group": "T"} for i in range(30)]
    profiles += [{"player_id": f"P{i:02d}", "group": "P"} for i in range(30)]
    sessions = [
        {"start": f"2016-06-{6 + day:02d}T14:00:00+02:00", "duration_min": 30, "groups": ["T"]} for day in range(3)
    ] + [
        {"start": f"2016-06-{6 + day:02d}T15:00:00+02:00", "duration_min": 60, "context": "paper", "groups": ["P"]}
        for day in range(3)
    ]
    return {"master_seed": 6, "defaults": defaults, "profiles": profiles, "sessions": sessions,
            "paper_overhead_s": 5}


@criterion(6, "configured error rates recovered by the cohort totals")
def test_statistical_recovery():
    run = simulate_cohort(config_from_dict(_recovery_config()))
    totals = cohort_totals(run.log, run.paper_records, run.group_map)
    game, plain = totals.contexts[DIGITAL], totals.contexts[PAPER]
    assert game.answers >= 2000 and plain.answers >= 2000
    assert abs(game.error_rate - 0.225) <= 0.02
    assert abs(plain.error_rate - 0.045) <= 0.02


def _drive(outcomes, breaks):
    """Answer per ``outcomes`` (then always correctly), opening a new session where ``breaks`` says."""
    state = SchedulerState.fresh("p")
    session, served = 1, []
    script = list(zip(outcomes, breaks))
    correct_ids = set()
    for step in range(2000):
        card = next_card(state, session)
        assert (card is FILE_COMPLETE) == (correct_ids == {c.card_id for c in state.deck.cards})
        if card is FILE_COMPLETE:
            return served
        if card is SESSION_EXHAUSTED:
            session += 1
            continue
        ok, brk = script[step] if step < len(script) else (True, False)
        record_answer(state, card, card.correct_choice if ok else (1 if card.correct_choice != 1 else 2))
        served.append((card.card_id, session, ok))
        if ok:
            correct_ids.add(card.card_id)
        if brk:
            session += 1
    raise AssertionError("file never completed")


@criterion(7, "scheduler completeness and retries in later sessions")
@settings(max_examples=500, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 9).map(lambda n: n == 0)), max_size=160))
def test_scheduler_completeness(script):
    served = _drive([ok for ok, _ in script], [brk for _, brk in script])
    assert len({cid for cid, _, ok in served if ok}) == CARDS_PER_FILE
    for i, (cid, session, ok) in enumerate(served):
        if not ok:
            later = [s for c, s, _ in served[i + 1:] if c == cid]
            assert later and min(later) > session


@criterion(8, "classroom scale: >=140k lines in <5 s, report in <2 s")
def test_scale(tmp_path):
    out = tmp_path / "sim"
    took, status = elapsed(main, ["simulate", str(CLASSROOM), "--out", str(out)])
    assert status == 0
    lines = (out / "merged.qcmlog").read_bytes().count(b"\n")
    print(f"simulate: {lines} lines in {took:.2f} s")
    assert lines >= 140_000 and took < 5
    took, status = elapsed(
        main, ["report", str(out / "merged.qcmlog"), "--students", "--cards", "--sessions", "--out", str(tmp_path / "r")]
    )
    print(f"report: {took:.2f} s")
    assert status == 0 and took < 2


@criterion(9, "aggregates equal a brute-force recount on random small logs")
@settings(max_examples=100, deadline=None)
@given(small_logs(max_events=200))
def test_oracle_equivalence(events):
    check_against_oracle(events)


@criterion(10, "bonus capture 134 of 169")
def test_bonus_plumbing():
    events, t = [], 0

    def emit(event_id, payload=None):
        nonlocal t
        t += 1000
        events.append(MetricEvent(t, len(events) + 1, "p", event_id, payload or flag()))

    for i in range(169):
        emit(E.LABYRINTHE_BONUS_SPAWN)
        if i < 134:
            emit(E.LABYRINTHE_BONUS)
            outcomes = (True, True)
        else:
            # walked past it, or took it and missed a question
            if i % 2:
                emit(E.LABYRINTHE_BONUS)
            outcomes = (True, False)
        if i >= 134 and i % 2 == 0:
            continue
        for k, ok in enumerate(outcomes):
            emit(E.QUESTION_START)
            emit(E.QUESTION_ANSWER, {"card": f"L2-{k + 1:02d}", "choice": 1 if ok else 2, "correct": ok})
    result = bonus_capture_rate(LogDocument(events))
    assert (result.captured, result.available) == (134, 169)
    assert result.fraction == Fraction(134, 169)
    assert abs(result.rate - 0.7929) <= 0.0001


@criterion(11, "uploading the classroom log twice through serve is idempotent")
def test_ingestion_idempotency(tmp_path, classroom_run):
    players = sorted((classroom_run / "players").iterdir())
    total_lines = sum(p.read_bytes().count(b"\n") for p in players)
    assert total_lines >= 140_000
    store = tmp_path / "store"
    with running_server(store) as (_, base):
        first = [post(base, read_log_file(p).events[0].player_id, p.read_bytes()) for p in players]
        after_one = snapshot(store)
        second = [post(base, read_log_file(p).events[0].player_id, p.read_bytes()) for p in players]
        after_two = snapshot(store)
    assert sum(r["accepted"] for r in first) == total_lines
    assert sum(r["duplicate"] for r in second) == total_lines
    assert sum(r["accepted"] + r["rejected"] for r in second) == 0
    assert after_one == after_two
    assert sorted(after_one.values()) == sorted(p.read_bytes() for p in players)
