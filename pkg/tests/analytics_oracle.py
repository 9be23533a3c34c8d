"""Brute-force recounts over raw event lists, written without the streaming code."""

from statistics import median

from qcm.metrics import EventId as E

START_KIND = {E.STORY_START: "narratif", E.LABYRINTHE_START: "ludique"}
END_KIND = {E.STORY_END_SEQUENCE: "narratif", E.LABYRINTHE_END: "ludique"}
QUESTION = {E.QUESTION_START, E.QUESTION_EXAMPLE, E.QUESTION_QCM, E.QUESTION_ANSWER}


def of(events, pid):
    return sorted((e for e in events if e.player_id == pid), key=lambda e: e.seq)


def answers(events, pid=None):
    return [e for e in events if e.event_id is E.QUESTION_ANSWER and (pid is None or e.player_id == pid)]


def student(events, pid):
    mine = of(events, pid)
    ans = answers(mine)
    durations = []
    for i, e in enumerate(mine):
        if e.event_id is E.QUESTION_ANSWER:
            starts = [x for x in mine[:i] if x.event_id is E.QUESTION_START]
            prior_answers = [x for x in mine[:i] if x.event_id is E.QUESTION_ANSWER]
            # pair with the latest start not already consumed by an earlier answer
            if starts and (not prior_answers or starts[-1].seq > prior_answers[-1].seq):
                durations.append(e.timestamp_ms - starts[-1].timestamp_ms)
    return {
        "total": len(ans),
        "errors": sum(1 for e in ans if not e.payload["correct"]),
        "unique": len({e.payload["card"] for e in ans if e.payload["correct"]}),
        "median_s": median(durations) / 1000 if durations else None,
    }


def sessions(events, pid):
    mine = of(events, pid)
    out = []
    used_ends = set()
    for i, e in enumerate(mine):
        if e.event_id not in START_KIND:
            continue
        kind = START_KIND[e.event_id]
        closer = None
        for j in range(i + 1, len(mine)):
            x = mine[j].event_id
            if END_KIND.get(x) == kind or x in (E.MAIN_MENU_START, E.GAME_END) or x in START_KIND:
                closer = j
                break
        if closer is None:
            out.append((kind, e.timestamp_ms, mine[-1].timestamp_ms, False))
        else:
            done = END_KIND.get(mine[closer].event_id) == kind
            if done:
                used_ends.add(closer)
            out.append((kind, e.timestamp_ms, mine[closer].timestamp_ms, done))
    orphans = sum(1 for j, e in enumerate(mine) if e.event_id in END_KIND and j not in used_ends)
    return out, orphans


def cards(events):
    table = {}
    for e in answers(events):
        row = table.setdefault(e.payload["card"], [0, 0, {}])
        row[0] += 1
        if not e.payload["correct"]:
            row[1] += 1
            row[2][e.payload["choice"]] = row[2].get(e.payload["choice"], 0) + 1
    return table


def bonus(events):
    captured = available = 0
    for pid in sorted({e.player_id for e in events}):
        mine = of(events, pid)
        available += sum(1 for e in mine if e.event_id is E.LABYRINTHE_BONUS_SPAWN)
        for i, e in enumerate(mine):
            if e.event_id is not E.LABYRINTHE_BONUS:
                continue
            run = []
            for x in mine[i + 1 :]:
                if x.event_id in QUESTION or x.event_id is E.GAME_PAUSE:
                    run.append(x)
                else:
                    break
            results = [x.payload["correct"] for x in run if x.event_id is E.QUESTION_ANSWER]
            if results and all(results):
                captured += 1
    return captured, available
