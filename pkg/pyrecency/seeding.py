"""This module contains code that handles seeded random number generation"""

import logging
from typing import List, Union

import numpy as np

LOGGER = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: Seed) -> np.random.Generator:
    """Return a Generator for a seed; a Generator passed in is returned as-is"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    """Return `count` independent child seeds of `seed`, in a fixed order"""
    children = np.random.SeedSequence(seed).spawn(count)
    LOGGER.debug("Spawned %s child seeds from %s", count, seed)
    return children
