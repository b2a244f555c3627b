"""Counter-based randomness.

Every random draw in the toolkit is a pure function of the master seed and
stable identifiers (element id, walker id, superstep). Nothing depends on the
partition an element happens to live in, so results do not change with the
degree of parallelism.
"""

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)


def mix64(x: int) -> int:
    """splitmix64 finalizer on a Python int."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def hash_words(seed: int, *words: int) -> int:
    h = mix64(seed & MASK64)
    for w in words:
        h = mix64(h ^ (w & MASK64))
    return h


def unit_interval(seed: int, *words: int) -> float:
    """Uniform draw in (0, 1]; never exactly zero."""
    return ((hash_words(seed, *words) >> 11) + 1) * _INV_2_53


def mix64_array(x: np.ndarray) -> np.ndarray:
    z = x.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z += np.uint64(_GOLDEN)
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
        z ^= z >> np.uint64(31)
    return z


def hash_array(seed: int, ids, *words: int) -> np.ndarray:
    """Vectorized ``hash_words(seed, id, *words)`` over an id array."""
    ids = np.asarray(ids).astype(np.int64, copy=False).view(np.uint64)
    h = np.uint64(mix64(seed & MASK64))
    z = mix64_array(ids ^ h)
    for w in words:
        z = mix64_array(z ^ np.uint64(w & MASK64))
    return z


def unit_interval_array(seed: int, ids, *words: int) -> np.ndarray:
    h = hash_array(seed, ids, *words)
    return ((h >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _INV_2_53
