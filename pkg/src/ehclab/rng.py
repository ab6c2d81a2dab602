"""SplitMix64 pseudo-random stream.

Chosen for bit-exact reproducibility: the algorithm is a handful of 64-bit
integer operations, so results do not depend on the platform or on the
Python version.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def bits(self, count: int):
        """Yield `count` fair bits, least significant bit of each word first."""
        word = 0
        for k in range(count):
            if k % 64 == 0:
                word = self.next()
            yield (word >> (k % 64)) & 1

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next()
            if x < limit:
                return x % bound

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items, k: int) -> list:
        pool = list(items)
        self.shuffle(pool)
        return pool[:k]


def derive_seed(seed: int, index: int) -> int:
    """Seed of the index-th independent sub-task of a seeded job.

    Equal to the index-th output of the stream seeded with `seed`, so a
    batch can be split across workers without changing any sample.
    """
    return mix64((seed + (index + 1) * GOLDEN) & MASK64)
