"""Vectorized random tournaments for large sampled checks.

Sample i is exactly random_tournament(n, derive_seed(seed, i)); the numpy
path only makes the batch fast.
"""

from itertools import combinations

import numpy as np

from .rng import GOLDEN

_U = np.uint64


def _mix(z):
    z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


def pair_bits(n: int, seed: int, lo: int, hi: int) -> np.ndarray:
    """Array of shape (hi-lo, n(n-1)/2) with the orientation bits of samples lo..hi-1."""
    m = n * (n - 1) // 2
    idx = np.arange(lo + 1, hi + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        seeds = _mix(_U(seed % (1 << 64)) + idx * _U(GOLDEN))
        words = [_mix(seeds + _U((w + 1) * GOLDEN % (1 << 64))) for w in range((m + 63) // 64)]
    bits = np.empty((hi - lo, m), dtype=np.uint8)
    for k in range(m):
        bits[:, k] = ((words[k // 64] >> _U(k % 64)) & _U(1)).astype(np.uint8)
    return bits


def has_transitive_subset(bits: np.ndarray, n: int, k: int) -> np.ndarray:
    """Per sample, whether some k vertices induce a transitive tournament.

    A k-vertex tournament is transitive exactly when its scores are
    0..k-1, which is when the sum of squared scores reaches its maximum.
    """
    index = {}
    for p, (i, j) in enumerate(combinations(range(n), 2)):
        index[i, j] = p
    target = sum(s * s for s in range(k))
    found = np.zeros(bits.shape[0], dtype=bool)
    for sub in combinations(range(n), k):
        squares = np.zeros(bits.shape[0], dtype=np.int32)
        for a in sub:
            score = np.zeros(bits.shape[0], dtype=np.int32)
            for b in sub:
                if a < b:
                    score += bits[:, index[a, b]]
                elif b < a:
                    score += 1 - bits[:, index[b, a]].astype(np.int32)
            squares += score * score
        found |= squares == target
    return found


def sampled_lacking_transitive(n: int, k: int, seed: int, lo: int, hi: int) -> list:
    """Indices in [lo, hi) whose sample has no transitive k-subset."""
    bits = pair_bits(n, seed, lo, hi)
    bad = ~has_transitive_subset(bits, n, k)
    return [lo + int(i) for i in np.nonzero(bad)[0]]
