"""Prime enumeration by a segmented sieve of Eratosthenes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SEGMENT = 1 << 18


@dataclass(frozen=True)
class PrimeIndex:
    """Ascending primes p_1 = 2, p_2 = 3, ...; ``index[i]`` is p_i (1-based)."""

    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __getitem__(self, i: int) -> int:
        if i < 1:
            raise IndexError("prime indices start at 1")
        return self.primes[i - 1]


def _small_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def sieve(N: int) -> np.ndarray:
    """All primes <= N as an int64 array."""
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    root = max(math.isqrt(N), 2)
    base = _small_sieve(root)
    chunks = [base[base <= N]]
    lo = root + 1
    while lo <= N:
        hi = min(lo + SEGMENT, N + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, -(-lo // p) * p)
            if start >= hi:
                continue
            flags[start - lo :: p] = False
        chunks.append(np.flatnonzero(flags) + lo)
        lo = hi
    return np.concatenate(chunks).astype(np.int64)


def primes_up_to(N: int) -> PrimeIndex:
    return PrimeIndex(tuple(int(p) for p in sieve(N)))


def first_k_primes(k: int) -> PrimeIndex:
    if k < 1:
        return PrimeIndex(())
    # Rosser's bound p_k < k (ln k + ln ln k) for k >= 6
    bound = 15 if k < 6 else int(k * (math.log(k) + math.log(math.log(k)))) + 1
    return PrimeIndex(tuple(int(p) for p in sieve(bound)[:k]))
