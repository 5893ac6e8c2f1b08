"""Reproducible random substreams.

Every random draw in the simulator comes from a Philox-4x64 counter-based
generator keyed by ``(master seed, frame index, stage)`` through numpy's
``SeedSequence`` spawn keys. Frames can therefore be generated in any order
or in parallel without changing their content.
"""

import enum

import numpy as np

_SEED_MASK = (1 << 64) - 1


class Stage(enum.IntEnum):
    ILLUMINATION = 0
    TURBULENCE_PRE = 1
    TURBULENCE_POST = 2
    SENSOR = 3
    SWEEP = 4


def substream(seed: int, index: int, stage: Stage) -> np.random.Generator:
    """Generator for one ``(index, stage)`` pair under a 64-bit master seed."""
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=(int(index), int(stage)))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, index: int, stage: Stage = Stage.SWEEP) -> int:
    """A child 64-bit seed, used to give each sweep point an independent run."""
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=(int(index), int(stage)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
