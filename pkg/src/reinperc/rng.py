"""Counter-based randomness: every random quantity is a pure function of keys.

There is no sequential generator state anywhere in the package.  Uniforms are
produced by applying the splitmix64 finalizer to a 64-bit key XORed with a
mixed stream seed, so any edge, radius index or replica can be regenerated
independently, in any order, on any number of workers.  The constants below
are the published splitmix64 constants; they are part of the reproducibility
contract and must not change between versions.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1

# splitmix64 (Steele/Lea/Flood); fixed forever for seed stability.
GAMMA = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB

_U64 = np.uint64


def mix64(z: int) -> int:
    """splitmix64 finalizer of a 64-bit integer (scalar, exact)."""
    z = (z + GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized mix64 over a uint64 array (wraparound arithmetic)."""
    z = z.astype(np.uint64, copy=True)
    z += _U64(GAMMA)
    z = (z ^ (z >> _U64(30))) * _U64(MIX_A)
    z = (z ^ (z >> _U64(27))) * _U64(MIX_B)
    return z ^ (z >> _U64(31))


def zigzag64(n: int) -> int:
    # signed -> unsigned, small |n| stays small: 0,-1,1,-2,... -> 0,1,2,3,...
    return ((n << 1) ^ (n >> 63)) & MASK64 if n < 0 else (n << 1) & MASK64


def token_key(token: str) -> int:
    """Stable 64-bit key for a string token (stream names, vertex tags)."""
    return int.from_bytes(
        hashlib.blake2b(token.encode(), digest_size=8).digest(), "little"
    )


def derive_seed(seed: int, *parts) -> int:
    """Derive a child seed from (seed, part, part, ...).

    Parts may be ints (zigzag-coded) or strings (hashed).  The chain
    h <- mix64(h XOR mix64(key)) makes distinct part tuples collide with
    probability ~2^-64; used for env/bond/replica stream addressing.
    """
    h = seed & MASK64
    for part in parts:
        if isinstance(part, str):
            k = token_key(part)
        else:
            k = zigzag64(int(part))
        h = mix64(h ^ mix64(k))
    return h


def unit_from_u64(x: int) -> float:
    """Map a 64-bit integer to [0, 1) with 53-bit resolution."""
    return (x >> 11) * (2.0 ** -53)


def uniforms_for_keys(keys: np.ndarray, stream_seed: int) -> np.ndarray:
    """One uniform in [0,1) per 64-bit key, under the given stream seed."""
    mixed = mix64_array(keys ^ _U64(mix64(stream_seed)))
    return (mixed >> _U64(11)).astype(np.float64) * (2.0 ** -53)


def uniforms_for_indices(indices: np.ndarray, stream_seed: int) -> np.ndarray:
    """One uniform per signed integer index (zigzag-keyed).

    Used for per-index radius sampling: the uniform attached to index n is
    the same no matter what range [lo, hi] the caller samples, which is what
    makes environments consistent across nested windows.
    """
    idx = np.asarray(indices, dtype=np.int64)
    zz = np.where(idx < 0, (idx << 1) ^ (idx >> 63), idx << 1).astype(np.uint64)
    return uniforms_for_keys(mix64_array(zz), stream_seed)
