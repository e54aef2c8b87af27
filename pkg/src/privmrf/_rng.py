"""Deterministic RNG stream derivation.

All randomness flows through Philox (counter-based, splittable) generators
keyed by a 64-bit master seed plus string labels, so any component can derive
an independent stream without coordination.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _label_key(label: str) -> int:
    return int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "big")


def stream(seed: int, *labels: str) -> np.random.Generator:
    """Independent Philox stream for (seed, labels)."""
    keys = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_label_key(str(l)) for l in labels]
    key = np.random.SeedSequence(keys).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def trial_seed(master_seed: int, *labels) -> int:
    """Stable 63-bit per-trial seed derived from a master seed and labels."""
    text = ":".join([str(master_seed)] + [str(l) for l in labels])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1
