"""Seeded random streams.

Every stochastic component draws from its own ``numpy.random.Generator``
backed by Philox-4x64, a counter-based generator: output block ``k`` is a
fixed 10-round bijection of the counter ``k`` under a 128-bit key, so a
stream is fully determined by its key and position. Keys come from
``numpy.random.SeedSequence`` over ``(seed, purpose, *extra)``, which gives
statistically independent streams per run, per purpose and per epoch or
layer index.
"""

import numpy as np

PURPOSES = {
    "init": 1,
    "shuffle": 2,
    "dropout": 3,
    "soi": 4,
    "data": 5,
}


def stream(seed, purpose, *extra):
    """Return the generator for ``purpose`` under ``seed``.

    ``extra`` are non-negative ints (epoch, layer index, ...) that split the
    stream further.
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    try:
        tag = PURPOSES[purpose]
    except KeyError:
        raise ValueError(f"unknown stream purpose {purpose!r}") from None
    entropy = [int(seed), tag, *(int(e) for e in extra)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
