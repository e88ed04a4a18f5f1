"""Counter-based random number generation.

Every random draw in the package is a pure function of (seed, stream tag,
counter).  There is no generator state, so results do not depend on
traversal order, worker count, or backend.  The mixer is the splitmix64
finalizer, a full-avalanche 64-bit permutation that is standard for
non-cryptographic Monte Carlo work.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# Stream tags keep draws for different purposes independent even when the
# integer counters coincide.
TAG_DISORDER = 0x11
TAG_PARENT = 0x22
TAG_COMPONENT = 0x33
TAG_REPLICA = 0x44
TAG_CELL = 0x55

# 2**-53, the spacing of doubles in [1, 2): top 53 bits of the hash give a
# uniform double in [0, 1).
_INV53 = float(2.0**-53)


def mix64(x: np.ndarray | int) -> np.ndarray | np.uint64:
    """Splitmix64 finalizer. Accepts a uint64 scalar or array."""
    z = np.uint64(x) if np.isscalar(x) else x.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z = np.uint64(z + _GOLDEN) if np.isscalar(x) else z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def stream_key(seed: int, tag: int) -> np.uint64:
    """Derive the base key of a (seed, tag) stream."""
    s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return np.uint64(mix64(s ^ (np.uint64(tag) * _MIX1)))


def hash_to_uint64(key: np.uint64, counters: np.ndarray) -> np.ndarray:
    """Hash an array of uint64 counters under a stream key."""
    c = counters.astype(np.uint64, copy=False)
    with np.errstate(over="ignore"):
        return mix64((c * _GOLDEN) ^ key)


def uniforms(seed: int, tag: int, counters: np.ndarray) -> np.ndarray:
    """Uniform doubles in [0, 1) indexed by counter."""
    h = hash_to_uint64(stream_key(seed, tag), counters)
    return (h >> np.uint64(11)).astype(np.float64) * _INV53


def uniforms_open(seed: int, tag: int, counters: np.ndarray) -> np.ndarray:
    """Uniform doubles in the open interval (0, 1).

    Used where an inverse CDF diverges at the endpoints.
    """
    h = hash_to_uint64(stream_key(seed, tag), counters)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


def uniform_indices(seed: int, tag: int, counters: np.ndarray, n: int) -> np.ndarray:
    """Uniform integers in [0, n) indexed by counter."""
    u = uniforms(seed, tag, counters)
    idx = (u * n).astype(np.int64)
    # floating guard; u < 1 makes idx <= n-1 except for pathological rounding
    np.clip(idx, 0, n - 1, out=idx)
    return idx


def derive_seed(seed: int, tag: int, index: int) -> int:
    """A child seed for replica or worker-cell streams."""
    return int(hash_to_uint64(stream_key(seed, tag), np.array([index], dtype=np.uint64))[0])


def fold_path_codes(parent_codes: np.ndarray, child_digit: np.ndarray | int) -> np.ndarray:
    """Extend canonical vertex codes by one generation.

    A vertex is identified by its sequence of child indices from the root;
    the code is a sequential hash fold over that sequence, so it does not
    depend on the tree depth or on the branching number.
    """
    d = np.uint64(child_digit + 1) if np.isscalar(child_digit) else (
        child_digit.astype(np.uint64) + np.uint64(1))
    with np.errstate(over="ignore"):
        return mix64(parent_codes ^ (d * _GOLDEN))


ROOT_CODE = np.uint64(0x5A17B0A981E2DFC3)


def path_code(path: tuple[int, ...]) -> np.uint64:
    """Canonical code of a single vertex given as a child-index path."""
    code = ROOT_CODE
    for digit in path:
        if digit < 0:
            raise ValueError("child indices are nonnegative")
        code = np.uint64(fold_path_codes(np.array([code], dtype=np.uint64), digit)[0])
    return code
