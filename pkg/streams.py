# ============================================
# COUNTER-BASED RANDOM STREAMS
# ============================================
# Every stochastic draw site gets its own Philox generator keyed by a path of
# non-negative integers (seed, generation, role, slot, ...). Draws never depend
# on the order in which other streams were consumed, so evaluation order and
# worker count cannot change results.

from enum import IntEnum

import numpy as np


class Role(IntEnum):
    INIT = 0
    START_POSES = 1
    BREED = 2
    REPLAY = 3


def derive_seed(base_seed: int, *key: int) -> int:
    """Child seed for a sweep cell, e.g. derive_seed(base_seed, fov_index, replicate)."""
    sequence = np.random.SeedSequence(base_seed, spawn_key=tuple(int(k) for k in key))
    state = sequence.generate_state(1, dtype=np.uint64)
    return int(state[0])


class RandomStreams:
    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        if seed < 0 or any(k < 0 for k in key):
            raise ValueError(f'stream keys must be non-negative, got {seed}/{key}')
        self.seed = seed
        self.key = tuple(int(k) for k in key)

    def child(self, *key: int) -> 'RandomStreams':
        return RandomStreams(self.seed, self.key + tuple(int(k) for k in key))

    def generator(self, *key: int) -> np.random.Generator:
        # keys of different length never share a stream
        spawn_key = self.key + tuple(int(k) for k in key)
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=spawn_key)))

    def __repr__(self):
        return f'<RandomStreams(seed={self.seed}, key={self.key})>'
