"""Small builders shared by the test modules."""

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
CLASSROOM = ROOT / "configs" / "classroom.json"


def small_config(**overrides) -> dict:
    """A two-player, two-session config for fast tests."""
    config = {
        "master_seed": 11,
        "profiles": [
            {"player_id": "A", "group": "A"},
            {"player_id": "B", "group": "B", "preference": {"narratif": 0.2, "ludique": 0.8}},
        ],
        "sessions": [
            {"start": "2016-06-06T14:00:00+02:00", "duration_min": 10},
            {"start": "2016-06-07T14:00:00+02:00", "duration_min": 10},
        ],
    }
    config.update(overrides)
    return config


def write_config(path: Path, config: dict) -> Path:
    path.write_text(json.dumps(config), encoding="utf-8")
    return path
