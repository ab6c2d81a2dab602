"""Brute-force reference implementations, written independently of the package."""

from itertools import combinations, permutations


def arcs_of(t):
    return {(u, v) for u in range(t.n) for v in range(t.n) if u != v and t.out[u] >> v & 1}


def is_transitive_set(arcs, vs):
    # a tournament is transitive iff its score sequence is 0..k-1
    scores = sorted(sum((u, v) in arcs for v in vs if v != u) for u in vs)
    return scores == list(range(len(vs)))


def tr_oracle(t):
    arcs = arcs_of(t)
    for size in range(t.n, 0, -1):
        for vs in combinations(range(t.n), size):
            if is_transitive_set(arcs, vs):
                return size
    return 0


def contains_oracle(t, h):
    """Try every vertex subset and every bijection onto it."""
    ta, ha = arcs_of(t), arcs_of(h)
    for vs in combinations(range(t.n), h.n):
        for perm in permutations(vs):
            if all((a, b) in ta for a, b in ((perm[u], perm[v]) for u, v in ha)):
                return True
    return False


def canonical_oracle(t):
    """Least pair bitstring over all n! relabelings."""
    arcs = arcs_of(t)
    best = None
    for perm in permutations(range(t.n)):
        # perm[new] = old
        bits = "".join("1" if (perm[i], perm[j]) in arcs else "0"
                       for i in range(t.n) for j in range(i + 1, t.n))
        if best is None or bits < best:
            best = bits
    return best


def splitmix64(seed):
    """Reference SplitMix64 stream."""
    mask = (1 << 64) - 1
    state = seed & mask
    while True:
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        yield z ^ (z >> 31)
