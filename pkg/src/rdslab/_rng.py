"""Seed handling.

Public entry points accept an int seed, a ``numpy.random.SeedSequence`` or a
ready ``numpy.random.Generator``. Internally everything is keyed off
``SeedSequence`` spawn keys so that independent concerns (network build, seed
draws, recruitment, reporting errors, bootstrap) consume independent streams
and results are reproducible regardless of evaluation order or worker count.
"""

from __future__ import annotations

from typing import Union

import numpy as np

RngLike = Union[int, np.random.SeedSequence, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Coerce ``rng`` to a PCG64 Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(rng))
    if isinstance(rng, (int, np.integer)):
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(rng))))
    raise TypeError(f"cannot interpret {type(rng).__name__} as a random source")


def as_seed_sequence(rng: RngLike) -> np.random.SeedSequence:
    """Coerce ``rng`` to a SeedSequence suitable for spawning substreams.

    A Generator is consumed for four words of entropy, which keeps the
    derived sequence deterministic given the generator state.
    """
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, (int, np.integer)):
        return np.random.SeedSequence(int(rng))
    if isinstance(rng, np.random.Generator):
        entropy = rng.integers(0, 2**32, size=4, dtype=np.uint32)
        return np.random.SeedSequence([int(x) for x in entropy])
    raise TypeError(f"cannot interpret {type(rng).__name__} as a random source")


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by ``(master_seed, key...)``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
