"""Deterministic 64-bit random number generation.

Everything procedural in this project (tiles, audio, agent behavior,
action selection) is driven by one generator family so that golden
values survive platform and library changes. The sequence is the
splitmix64 counter generator:

    state_k = seed + k * 0x9E3779B97F4A7C15        (mod 2**64)
    out_k   = mix(state_k)

where ``mix`` is the murmur-style finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Because the k-th output depends only on (seed, k), bulk generation is
vectorizable (see :func:`fill_u64`) and produces the identical stream
as sequential draws from :class:`SplitMix64`.

Derived conventions, fixed here once and relied on by tests:

* floats are ``(u64 >> 11) * 2**-53`` in [0, 1)
* bounded ints use the multiply-shift reduction ``(u64 * n) >> 64``
* gaussians use Box-Muller on two fresh floats, no caching
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# FNV-1a constants, used only to hash string tags in derive()
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(z: int) -> int:
    """splitmix64 output finalizer (pure function of one 64-bit word)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _fnv1a(tag: str) -> int:
    h = _FNV_OFFSET
    for b in tag.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return h


def derive(seed: int, *parts: int | str) -> int:
    """Derive a child seed from a parent seed and a path of tags.

    Used to give every subsystem (tile noise, occlusion mask, token
    choice, ...) an independent stream from one user-facing seed.
    """
    h = mix64((seed & MASK64) ^ 0xA0761D6478BD642F)
    for p in parts:
        v = _fnv1a(p) if isinstance(p, str) else (p & MASK64)
        h = mix64(h ^ v)
    return h


class SplitMix64:
    """Sequential splitmix64 stream."""

    __slots__ = ("_state", "_k")

    def __init__(self, seed: int):
        self._state = seed & MASK64
        self._k = 0

    def next_u64(self) -> int:
        self._k += 1
        return mix64((self._state + self._k * GOLDEN) & MASK64)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Uniform int in [0, n) via multiply-shift reduction."""
        return (self.next_u64() * n) >> 64

    def next_gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller transform; consumes exactly two draws."""
        u1 = (self.next_u64() >> 11) + 1  # in [1, 2**53], avoids log(0)
        u2 = self.next_float()
        r = np.sqrt(-2.0 * np.log(u1 * 2.0**-53))
        return mu + sigma * float(r * np.cos(2.0 * np.pi * u2))

    def next_uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct ints from range(n), order randomized."""
        pool = list(range(n))
        self.shuffle(pool)
        return pool[:k]

    def choice(self, items):
        return items[self.next_below(len(items))]


def fill_u64(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """Vectorized block of the same stream: outputs offset+1 .. offset+n.

    ``fill_u64(s, n)[k]`` equals the (k+1)-th ``next_u64()`` of
    ``SplitMix64(s)``.
    """
    ks = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    z = (np.uint64(seed & MASK64) + ks * np.uint64(GOLDEN)).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def fill_floats(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """Vectorized uniforms in [0, 1), same convention as next_float."""
    return (fill_u64(seed, n, offset) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def fill_gauss(seed: int, n: int) -> np.ndarray:
    """Vectorized standard normals via Box-Muller on consecutive pairs.

    Consumes 2*ceil(n/2) draws from the stream; matches no scalar path
    (bulk noise fields only need self-consistency).
    """
    m = (n + 1) // 2
    u = fill_u64(seed, 2 * m)
    u1 = ((u[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (u[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * m, dtype=np.float64)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n]
