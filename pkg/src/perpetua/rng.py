"""Counter-based random number streams.

Every stochastic routine in this package draws from a Philox generator keyed
by a 128-bit (seed, stream_index) pair.  Streams are independent by
construction, and results never depend on how work is split across threads:
path k always consumes exactly the draws of stream (seed, k), in a fixed
documented order.

Where one experiment needs several unrelated ensembles (say overshoot
harvests at two levels), sub-seeds are derived by hashing the master seed
together with a short purpose tag, so ensembles do not share randomness.
"""

import hashlib

import numpy as np

_U64 = np.uint64
MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, *tags) -> int:
    """Derive an independent 64-bit sub-seed from a master seed and tags.

    Tags are stringified and hashed with SHA-256, so any hashable labels
    (strings, numbers) give a stable, platform-independent result.
    """
    text = repr(int(master_seed) & MASK64) + "|" + "|".join(str(t) for t in tags)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for stream `index` of `seed`; key = (seed, index) verbatim."""
    key = np.array([int(seed) & MASK64, int(index) & MASK64], dtype=_U64)
    return np.random.Generator(np.random.Philox(key=key))
