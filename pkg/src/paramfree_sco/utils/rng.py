"""
Counter-based random streams
"""

import numpy as np


def counter_stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``.

    Streams are keyed rather than advanced, so trial ``k`` draws the same
    numbers whether trials run serially, in parallel or in any order.
    """
    entropy = [int(seed)] + [int(k) for k in keys]
    if any(v < 0 for v in entropy):
        raise ValueError(f"seed and stream keys must be nonnegative: {entropy}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
