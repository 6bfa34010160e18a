"""Counter-based, splittable random streams.

Every sampled value in the project is derived from one root seed through
named splits, so runs are reproducible and resumable: a stream for
(seed, "train", step) is the same whether the run was interrupted or not.
"""

import hashlib
import os

import numpy as np

DEFAULT_SEED = 1234
SEED_ENV_VAR = "PLATYPUS_SEED"


def root_seed(seed=None):
    """Resolve the root seed: explicit argument, else PLATYPUS_SEED, else default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def derive_key(seed, *labels):
    """Hash (seed, labels...) into a 128-bit Philox key.

    Labels may be strings or ints; the mapping is stable across platforms
    and Python versions (no use of hash()).
    """
    h = hashlib.sha256()
    h.update(str(int(seed)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:16], "little")


def split(seed, *labels):
    """Return an independent numpy Generator for (seed, labels...)."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *labels)))
