"""Seed derivation for reproducible runs.

Every random stream in the toolkit is a ``random.Random`` seeded with an
integer derived from a parent seed and a label. The derivation is a keyed
BLAKE2b hash truncated to 64 bits, so a child seed depends only on its
parent and label, never on the order in which siblings are created.
"""

from __future__ import annotations

import hashlib
import random

MASK64 = (1 << 64) - 1


def derive_seed(parent: int, *labels: object) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(str(parent & MASK64).encode("ascii"))
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


def rng_for(parent: int, *labels: object) -> random.Random:
    return random.Random(derive_seed(parent, *labels))
