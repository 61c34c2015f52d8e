"""Portable 64-bit PRNG: splitmix64 seed expansion feeding xoshiro256** streams.

Every stochastic draw in the package goes through this module so that a run is
reproducible bit-for-bit from its seed on any platform (including ports to
other languages, which only need ~30 lines to match). Substreams are derived
by hashing an index path into the seed, so trials are independent and can be
regenerated in isolation.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    # splitmix64 output finalizer (Steele, Lea & Flood; public domain).
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + _GOLDEN) & MASK64
    return state, _mix64(state)


def derive_seed(seed: int, *path: int) -> int:
    """Hash an index path into a seed, giving an independent substream seed.

    Chained bijective mixing: distinct paths of the same length cannot
    collide for a fixed seed.
    """
    s = seed & MASK64
    for p in path:
        s = _mix64((s + _GOLDEN + (p & MASK64)) & MASK64)
    return s


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** 1.0 (Blackman & Vigna), seeded via splitmix64 expansion."""

    __slots__ = ("s",)

    def __init__(self, seed: int):
        state = seed & MASK64
        lanes = []
        for _ in range(4):
            state, out = splitmix64(state)
            lanes.append(out)
        self.s = lanes

    @classmethod
    def from_path(cls, seed: int, *path: int) -> "Xoshiro256StarStar":
        return cls(derive_seed(seed, *path))

    @classmethod
    def from_state(cls, s0: int, s1: int, s2: int, s3: int) -> "Xoshiro256StarStar":
        rng = cls.__new__(cls)
        rng.s = [s0 & MASK64, s1 & MASK64, s2 & MASK64, s3 & MASK64]
        return rng

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def chance(self, p: float) -> bool:
        return self.random() < p

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        limit = MASK64 - (MASK64 + 1) % n
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % n

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller transform (cosine branch; one draw per two uniforms)."""
        u1 = self.random()
        u2 = self.random()
        z = math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)
        return mu + sigma * z

    def poisson(self, lam: float) -> int:
        """Knuth's product method; fine for the small rates used here."""
        if lam < 0:
            raise ValueError("poisson rate must be >= 0")
        if lam == 0:
            return 0
        threshold = math.exp(-lam)
        k = 0
        p = 1.0
        while True:
            p *= self.random()
            if p <= threshold:
                return k
            k += 1

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), uniform without replacement."""
        if k > n:
            raise ValueError("cannot sample %d from %d" % (k, n))
        pool = list(range(n))
        out = []
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
            out.append(pool[i])
        return out
