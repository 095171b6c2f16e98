import numpy as np


def derive_rng(seed, *keys):
    """Independent, reproducible generator for (seed, key, ...).

    Substreams for distinct key tuples do not overlap, so work can be split
    into blocks or workers without changing the drawn values.
    """
    if seed is None:
        raise ValueError("a seed is required, refusing to auto-randomize")
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed, *keys):
    return int(derive_rng(seed, *keys).integers(0, 2 ** 63 - 1))
