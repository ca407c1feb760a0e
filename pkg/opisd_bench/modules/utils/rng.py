import numpy as np

# PCG64 is numpy's documented, platform-independent 64-bit generator: a given seed yields the
# same stream on every platform and numpy release that keeps the bit generator stable.


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(base_seed: int, run_index: int) -> int:
    """Seed of run k in a collection: s_0 + k."""
    return base_seed + run_index
