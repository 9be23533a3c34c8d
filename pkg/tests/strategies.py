"""Hypothesis strategies producing contract-valid metric events."""

from hypothesis import strategies as st

from qcm.metrics import CONTRACTS, EventId, MetricEvent

# include every character the codec escapes, plus non-ASCII
text = st.text(
    alphabet=st.one_of(st.sampled_from("%\t\n\r;=ée"), st.characters(blacklist_categories=("Cs",))),
    min_size=1,
    max_size=12,
)


def _value(spec):
    if spec.fixed is not None:
        return st.just(spec.fixed)
    if spec.kind is bool:
        return st.booleans()
    if spec.kind is int:
        return st.integers(min_value=spec.minimum if spec.minimum is not None else -(2**63), max_value=2**63)
    return text


@st.composite
def events(draw, player_ids=text):
    event_id = draw(st.sampled_from(list(EventId)))
    payload = {spec.name: draw(_value(spec)) for spec in CONTRACTS[event_id]}
    return MetricEvent(
        timestamp_ms=draw(st.integers(0, 2**63)),
        seq=draw(st.integers(0, 2**63)),
        player_id=draw(player_ids),
        event_id=event_id,
        payload=payload,
    )


_ALPHABET = "%\t\n\r;=éeaZ09 _-/." + "".join(map(chr, range(0x2190, 0x2198))) + "\U0001f600"


def _random_text(rng):
    return "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(1, 12)))


def random_event(rng):
    """Same distribution family as ``events()``, drawn from a seeded ``random.Random``; fast enough for 10^5."""
    event_id = rng.choice(list(EventId))
    payload = {}
    for spec in CONTRACTS[event_id]:
        if spec.fixed is not None:
            payload[spec.name] = spec.fixed
        elif spec.kind is bool:
            payload[spec.name] = rng.random() < 0.5
        elif spec.kind is int:
            low = spec.minimum if spec.minimum is not None else -(2**63)
            payload[spec.name] = rng.choice([low, low + 1, 2**63, rng.randint(low, 2**63), rng.randint(low, low + 100)])
        else:
            payload[spec.name] = _random_text(rng)
    return MetricEvent(
        timestamp_ms=rng.choice([0, 2**63, rng.randint(0, 2**63), rng.randint(0, 10**13)]),
        seq=rng.choice([0, 1, rng.randint(0, 2**63)]),
        player_id=_random_text(rng),
        event_id=event_id,
        payload=payload,
    )
