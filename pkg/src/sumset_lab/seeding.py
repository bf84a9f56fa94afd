"""Counter-based seed streams.

Every random draw in the package is a pure function of a 64-bit key and an
integer index, so draws can be produced in any order, in parallel, and
still match a serial run bit for bit.

The mixing function (identifier ``SEED_MIX_ID``) is the splitmix64
finalizer::

    mix64(z) = let z = z + 0x9E3779B97F4A7C15
                   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
               in z ^ (z >> 31)                      (all mod 2**64)

    mix2(key, i) = mix64(key ^ mix64(i mod 2**64))

A root stream for master seed ``s`` has key ``mix64(s mod 2**64)``; its
word at index ``i`` is ``mix2(key, i)``, and ``child(i)`` is the stream
whose key is that word. Words map to integers below ``m`` (``m < 2**32``)
as ``((w >> 32) * m) >> 32`` and to fair bits as ``w >> 63``. The former
has a relative bias of at most ``m / 2**32`` per atom.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels

SEED_MIX_ID = "splitmix64-xor/v1"

_M64 = (1 << 64) - 1


def mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def mix2(key: int, index: int) -> int:
    return mix64(key ^ mix64(index & _M64))


@dataclass(frozen=True)
class SeedStream:
    """A key plus the path of child indices that produced it."""

    master: int
    path: tuple[int, ...] = ()
    key: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.master, (int, np.integer)):
            raise TypeError("master seed must be an integer")
        k = mix64(int(self.master) & _M64)
        for i in self.path:
            k = mix2(k, i)
        object.__setattr__(self, "key", k)

    def child(self, index: int) -> "SeedStream":
        return SeedStream(self.master, self.path + (int(index),))

    def word(self, index: int) -> int:
        return mix2(self.key, index)

    def words(self, indices) -> np.ndarray:
        idx = np.ascontiguousarray(indices, dtype=np.int64)
        keys = np.full(idx.shape[0], self.key, dtype=np.uint64)
        return kernels.mix2(keys, idx)

    def child_keys(self, indices) -> np.ndarray:
        """Keys of ``child(i)`` for every i, as a uint64 array."""
        return self.words(indices)

    def uniform(self, index: int, m: int) -> int:
        return ((self.word(index) >> 32) * m) >> 32

    def bit(self, index: int) -> int:
        return self.word(index) >> 63


def words_for_keys(keys: np.ndarray, index: int) -> np.ndarray:
    """mix2(k, index) for every key k; one draw per child stream."""
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    return kernels.mix2(keys, np.full(keys.shape[0], index, dtype=np.int64))
