"""Counter-based deterministic random generator.

All synthetic data in this package is drawn from a SplitMix64 counter
stream so that identical (seed, draw sequence) produce bit-identical
output on every platform.  The generator never holds hidden state beyond
an integer counter, which makes streams trivially reproducible and
cheap to fork per scan / per purpose via :meth:`CounterRng.spawn`.

Algorithm: the k-th 64-bit word of stream ``key`` is

    mix64(key + (k + 1) * 0x9E3779B97F4A7C15)

with ``mix64`` the SplitMix64 finalizer (Steele, Lea & Flood 2014):

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Uniform floats take the top 53 bits of a word; normals use Box-Muller.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _mix64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):  # wraparound multiply is the algorithm
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def _hash_label(label: str) -> np.uint64:
    # FNV-1a over the UTF-8 bytes; only used to derive child stream keys.
    h = 0xCBF29CE484222325
    for b in label.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK64
    return np.uint64(h)


class CounterRng:
    """Deterministic random stream identified by (seed, spawn path)."""

    def __init__(self, seed: int, _key: np.uint64 | None = None):
        if _key is None:
            _key = _mix64(np.uint64(seed & _MASK64))
        self._key = np.uint64(_key)
        self._counter = 0

    def spawn(self, label: str) -> "CounterRng":
        """Independent child stream; same (seed, label) gives the same child."""
        child_key = _mix64(self._key ^ _hash_label(label))
        return CounterRng(0, _key=child_key)

    def _words(self, count: int) -> np.ndarray:
        idx = np.arange(self._counter + 1, self._counter + count + 1, dtype=np.uint64)
        self._counter += count
        return _mix64(self._key + idx * _GAMMA)

    def uniform(self, size: int | tuple[int, ...] = ()) -> np.ndarray | float:
        """Uniform float64 in [0, 1) with 53-bit resolution."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape)) if shape else 1
        u = (self._words(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return u.reshape(shape) if shape else float(u[0])

    def normal(self, size: int | tuple[int, ...] = ()) -> np.ndarray | float:
        """Standard normals via Box-Muller on consecutive uniform pairs."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape)) if shape else 1
        npairs = (n + 1) // 2
        w = self._words(2 * npairs)
        # u1 in (0, 1] so log(u1) is finite; u2 in [0, 1).
        u1 = ((w[:npairs] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (w[npairs:] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return z.reshape(shape) if shape else float(z[0])

    def integers(self, low: int, high: int, size: int | tuple[int, ...] = ()) -> np.ndarray | int:
        """Integers in [low, high), derived as floor(uniform * range)."""
        if high <= low:
            raise ValueError(f"empty integer range [{low}, {high})")
        u = self.uniform(size)
        out = low + np.floor(np.asarray(u) * (high - low)).astype(np.int64)
        scalar = (isinstance(size, tuple) and size == ())
        return int(out) if scalar else out

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n)."""
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = int(self.integers(0, i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def choice(self, seq, size: int) -> list:
        """Sample ``size`` distinct elements of ``seq`` (order deterministic)."""
        if size > len(seq):
            raise ValueError("sample larger than population")
        idx = self.permutation(len(seq))[:size]
        return [seq[int(i)] for i in idx]
