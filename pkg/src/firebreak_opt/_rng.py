"""Deterministic seed derivation and counter-style uniform draws.

Replication seeds and per-trial uniforms are produced by hashing, never by
consuming a shared stream, so every result is a pure function of
(master seed, replication index, source cell, target cell).  That is what
makes replications independent of execution order and worker count, and what
makes fire-spread trials comparable across alternative firebreak sets
(common random numbers).

The mixer is the SplitMix64 finalizer, a standard 64-bit avalanche function.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(_GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_INV_2_53 = float(2.0**-53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _M1) & _MASK64
    z = ((z ^ (z >> 27)) * _M2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def replication_seed(master_seed: int, r: int) -> int:
    """Seed for replication ``r``: mix(mix(master) + (r+1) * golden)."""
    return mix64((mix64(master_seed) + (r + 1) * _GOLDEN) & _MASK64)


def stream_seed(master_seed: int, *tags: int | str) -> int:
    """Derive an independent named stream from a master seed.

    String tags are folded in bytewise so distinct purposes ("init",
    "final", ...) cannot collide with plain integer tags.
    """
    z = mix64(master_seed)
    for tag in tags:
        if isinstance(tag, str):
            for byte in tag.encode("utf-8"):
                z = mix64((z + byte * _GOLDEN) & _MASK64)
        else:
            z = mix64((z + (int(tag) + 1) * _GOLDEN) & _MASK64)
    return z


def _avalanche(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U30)) * _U_M1
    z = (z ^ (z >> _U27)) * _U_M2
    return z ^ (z >> _U31)


def trial_uniforms(fire_seed: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Uniforms in [0, 1) keyed by (fire seed, source cell, target cell).

    Vectorized over parallel ``src``/``dst`` index arrays.  The same key
    always yields the same uniform, regardless of how many other trials the
    fire performs.
    """
    h0 = np.uint64(mix64(fire_seed))
    z = _avalanche(h0 ^ ((src.astype(np.uint64) + np.uint64(1)) * _U_GOLDEN))
    z = _avalanche(z ^ ((dst.astype(np.uint64) + np.uint64(1)) * _U_M2))
    return (z >> _U11).astype(np.float64) * _INV_2_53
