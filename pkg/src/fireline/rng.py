"""Counter-based random streams.

Every variate in the package is addressed by an integer triple
(key, channel, index) and produced by hashing that triple, so any stream can
be regenerated in isolation, in any order, on any platform.  This is what
lets the growth clocks of a lattice site be *the same realization* across
different fire rates, and lets a single replica of a Monte Carlo batch be
rerun on its own.

The mixer is the splitmix64 finalizer applied three times, injecting one
coordinate per round.  It is not cryptographic; it is a standard
hash-counter generator good enough to pass the distributional checks in the
test suite.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_PRIME2 = 0xC2B2AE3D27D4EB4F
_KEY_TWEAK = 0x5851F42D4C957F2D

#: channel layout inside one keyed stream; retry attempt j for channel c is
#: addressed as c + (j << 8).
CH_TIME = 0
CH_POS = 1
CH_CHILD = 2


def mix64(z: int) -> int:
    """splitmix64 finalizer (bijective on 64-bit words)."""
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def fnv1a64(text: str) -> int:
    """FNV-1a of the UTF-8 bytes; stable label hashing across platforms."""
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK
    return h


def derive_key(master_seed: int, label: str) -> int:
    """Stream key for a (seed, label) pair."""
    return mix64((master_seed & _MASK) ^ _KEY_TWEAK ^ fnv1a64(label))


def raw64(key: int, channel: int, index: int) -> int:
    """The (key, channel, index) -> u64 counter hash all streams use."""
    z = mix64(key & _MASK)
    z = mix64((z + ((channel & _MASK) * _GOLDEN)) & _MASK)
    z = mix64((z + ((index & _MASK) * _PRIME2)) & _MASK)
    return z


def unit(key: int, channel: int, index: int) -> float:
    """Uniform double in the open interval (0, 1)."""
    return ((raw64(key, channel, index) >> 11) + 0.5) * 2.0**-53


def exp_gap(key: int, channel: int, index: int) -> float:
    """Standard exponential variate; strictly positive."""
    return -math.log(unit(key, channel, index))


def child_key(key: int, index: int) -> int:
    """Independent sub-stream key, e.g. one per Monte Carlo replica."""
    return raw64(key, CH_CHILD, index)
