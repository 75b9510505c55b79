"""Named random streams derived from one 64-bit seed.

Each pipeline stage draws from its own stream, so adding or skipping a stage
(an oracle run, say) never shifts another stage's random choices.
"""

import zlib

import numpy as np


def stream_seed(seed: int, name: str) -> int:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(zlib.crc32(name.encode()),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def stream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(stream_seed(seed, name))
