"""Named, reproducible random substreams.

A stream is identified by ``(seed, label)``. The label is hashed into the
seed sequence entropy, so streams for different labels are independent and
never depend on the order in which they are created.
"""

from __future__ import annotations

import hashlib

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _label_words(label: str) -> list[int]:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def substream(seed: int, label: str) -> np.random.Generator:
    """Counter-based (Philox) generator for the named stream."""
    seed = check_seed(seed)
    entropy = [seed & 0xFFFFFFFF, seed >> 32, *_label_words(label)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
