"""Tournaments and partial digraphs with the basic exact operations.

Vertices are 0-based integers. Adjacency is kept as one out-neighbour
bitmask per vertex, which makes subset recursion and containment search
cheap. The TRN text format stores one bit per unordered pair in the order
(0,1),(0,2),...,(0,n-1),(1,2),...,(n-2,n-1); '1' means lower -> higher.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .rng import SplitMix64, derive_seed

Ordering = tuple
Embedding = dict

DEFAULT_CANON_BOUND = 8
MAX_ENUMERATE = 7
MAX_CRITICAL_N = 16


def popcount(x: int) -> int:
    return bin(x).count("1")


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def pairs(n: int):
    """Unordered pairs in TRN order."""
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j


def check_ordering(n: int, order: Sequence[int]) -> tuple:
    order = tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"ordering {order} is not a permutation of 0..{n - 1}")
    return order


class Digraph:
    """Partial orientation of the complete graph: each pair is u->v, v->u or unoriented."""

    __slots__ = ("n", "out", "inn")

    def __init__(self, n: int, out: Sequence[int]):
        if n < 0 or len(out) != n:
            raise ValueError("need one out-mask per vertex")
        full = (1 << n) - 1
        out = tuple(out)
        inn = [0] * n
        for u, m in enumerate(out):
            if m & ~full or (m >> u) & 1:
                raise ValueError(f"bad out-mask for vertex {u}")
            for v in iter_bits(m):
                inn[v] |= 1 << u
        for u in range(n):
            if out[u] & inn[u]:
                raise ValueError(f"pair oriented both ways at vertex {u}")
        self.n = n
        self.out = out
        self.inn = tuple(inn)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple]):
        out = [0] * n
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValueError(f"bad arc {(u, v)}")
            out[u] |= 1 << v
        return cls(n, out)

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.n == other.n and self.out == other.out

    def __hash__(self):
        return hash((self.n, self.out))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r})"

    def has_arc(self, u: int, v: int) -> bool:
        return bool((self.out[u] >> v) & 1)

    def oriented(self, u: int, v: int) -> bool:
        return self.has_arc(u, v) or self.has_arc(v, u)

    def arcs(self) -> list:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.out[u])]

    def unoriented_pairs(self) -> list:
        return [(i, j) for i, j in pairs(self.n) if not self.oriented(i, j)]

    def is_tournament(self) -> bool:
        full = (1 << self.n) - 1
        return all((self.out[v] | self.inn[v] | (1 << v)) == full for v in range(self.n))

    def pair_string(self) -> str:
        chars = []
        for i, j in pairs(self.n):
            chars.append("1" if self.has_arc(i, j) else "0" if self.has_arc(j, i) else "-")
        return "".join(chars)

    def to_text(self) -> str:
        return f"dgr {self.n}\n{self.pair_string()}\n"

    def with_arc(self, u: int, v: int) -> "Digraph":
        """Copy with the pair {u,v} set to u->v (whatever it was before)."""
        out = list(self.out)
        out[v] &= ~(1 << u)
        out[u] |= 1 << v
        return _promote(self.n, out)

    def without_pair(self, u: int, v: int) -> "Digraph":
        out = list(self.out)
        out[u] &= ~(1 << v)
        out[v] &= ~(1 << u)
        return Digraph(self.n, out)

    def induced(self, vertices: Iterable[int]):
        vs = sorted(set(vertices))
        for v in vs:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} out of range")
        index = {v: k for k, v in enumerate(vs)}
        out = [0] * len(vs)
        for a, u in enumerate(vs):
            for v in iter_bits(self.out[u]):
                if v in index:
                    out[a] |= 1 << index[v]
        return _promote(len(vs), out)

    def relabel(self, perm: Sequence[int]):
        """Digraph whose vertex perm[i] plays the role of vertex i here."""
        perm = check_ordering(self.n, perm)
        out = [0] * self.n
        for u in range(self.n):
            for v in iter_bits(self.out[u]):
                out[perm[u]] |= 1 << perm[v]
        return _promote(self.n, out)

    def reorder(self, order: Sequence[int]):
        """Digraph whose vertex i is vertex order[i] here (position relabeling)."""
        order = check_ordering(self.n, order)
        inverse = [0] * self.n
        for i, v in enumerate(order):
            inverse[v] = i
        return self.relabel(inverse)

    def completions(self):
        """All tournaments obtained by orienting the unoriented pairs.

        Pairs are flipped in unoriented-pair order; completion number b
        orients the k-th pair lower->higher iff bit k of b is set.
        """
        free = self.unoriented_pairs()
        for b in range(1 << len(free)):
            out = list(self.out)
            for k, (i, j) in enumerate(free):
                if (b >> k) & 1:
                    out[i] |= 1 << j
                else:
                    out[j] |= 1 << i
            yield Tournament(self.n, out)


class Tournament(Digraph):
    __slots__ = ()

    def __init__(self, n: int, out: Sequence[int]):
        super().__init__(n, out)
        if not self.is_tournament():
            raise ValueError("some pair is unoriented")

    @classmethod
    def from_bits(cls, n: int, bits: str):
        if len(bits) != n * (n - 1) // 2:
            raise ValueError(f"expected {n * (n - 1) // 2} bits, got {len(bits)}")
        out = [0] * n
        for (i, j), c in zip(pairs(n), bits):
            if c == "1":
                out[i] |= 1 << j
            elif c == "0":
                out[j] |= 1 << i
            else:
                raise ValueError(f"illegal character {c!r}")
        return cls(n, out)

    @classmethod
    def transitive(cls, n: int):
        return cls(n, [((1 << n) - 1) & ~((1 << (i + 1)) - 1) for i in range(n)])

    def bits(self) -> str:
        return "".join("1" if self.has_arc(i, j) else "0" for i, j in pairs(self.n))

    def to_text(self) -> str:
        return f"trn {self.n}\n{self.bits()}\n"

    def score(self, v: int) -> int:
        return popcount(self.out[v])

    def is_transitive(self) -> bool:
        return sorted(self.score(v) for v in range(self.n)) == list(range(self.n))


def _promote(n, out):
    d = Digraph(n, out)
    return Tournament(n, out) if d.is_tournament() else d


def _parse_header(text: str, tag: str):
    lines = text.strip("\n").split("\n")
    head = lines[0].split()
    if len(head) != 2 or head[0] != tag or not head[1].isdigit():
        raise ValueError(f"malformed header {lines[0]!r}, expected '{tag} <n>'")
    n = int(head[1])
    body = "".join(line.strip() for line in lines[1:])
    if len(body) != n * (n - 1) // 2:
        raise ValueError(f"expected {n * (n - 1) // 2} pair symbols, got {len(body)}")
    return n, body


def from_text(text: str) -> Tournament:
    n, body = _parse_header(text, "trn")
    return Tournament.from_bits(n, body)


def to_text(t: Digraph) -> str:
    return t.to_text()


def digraph_from_text(text: str) -> Digraph:
    """Parse either format; `dgr` allows '-' for unoriented pairs."""
    if text.lstrip().startswith("trn"):
        return from_text(text)
    n, body = _parse_header(text, "dgr")
    out = [0] * n
    for (i, j), c in zip(pairs(n), body):
        if c == "1":
            out[i] |= 1 << j
        elif c == "0":
            out[j] |= 1 << i
        elif c != "-":
            raise ValueError(f"illegal character {c!r}")
    return _promote(n, out)


def induced(t: Digraph, vertices: Iterable[int]):
    return t.induced(vertices)


def backward_arcs(d: Digraph, order: Sequence[int]) -> list:
    """Arcs (u,v) with u after v in the ordering, sorted."""
    order = check_ordering(d.n, order)
    pos = {v: i for i, v in enumerate(order)}
    return sorted((u, v) for u, v in d.arcs() if pos[u] > pos[v])


def backward_arc_graph(d: Digraph, order: Sequence[int]) -> frozenset:
    return frozenset((min(u, v), max(u, v)) for u, v in backward_arcs(d, order))


def is_transitive_under(d: Digraph, order: Sequence[int]) -> bool:
    return not backward_arcs(d, order)


class TransitiveSolver:
    """Memoized tr over vertex subsets of one digraph.

    A transitive subtournament has a source that dominates the rest, so
    tr(S) = 1 + max over v in S of tr(S & out(v)).
    """

    def __init__(self, t: Digraph):
        self.out = t.out
        self.cache = {0: (0, -1)}

    def size(self, mask: int) -> int:
        return self._solve(mask)[0]

    def _solve(self, mask: int):
        hit = self.cache.get(mask)
        if hit is not None:
            return hit
        best, arg = 0, -1
        for v in iter_bits(mask):
            sub = mask & self.out[v]
            if popcount(sub) + 1 <= best:
                continue
            val = self._solve(sub)[0] + 1
            if val > best:
                best, arg = val, v
        self.cache[mask] = (best, arg)
        return best, arg

    def witness(self, mask: int) -> tuple:
        seq = []
        while mask:
            _, v = self._solve(mask)
            seq.append(v)
            mask &= self.out[v]
        return tuple(seq)


def tr(t: Digraph, vertices: Iterable[int] | None = None):
    """(size, witness) of a largest transitive subtournament; witness source first."""
    solver = TransitiveSolver(t)
    mask = (1 << t.n) - 1 if vertices is None else mask_of(vertices)
    size = solver.size(mask)
    return size, solver.witness(mask)


def directed_density(t: Digraph, xs: Iterable[int], ys: Iterable[int]) -> Fraction:
    xs, ys = set(xs), set(ys)
    if not xs or not ys:
        raise ValueError("density needs two nonempty sets")
    if xs & ys:
        raise ValueError("density needs disjoint sets")
    ym = mask_of(ys)
    arcs = sum(popcount(t.out[x] & ym) for x in xs)
    return Fraction(arcs, len(xs) * len(ys))


def contains(t: Digraph, h: Digraph) -> Embedding | None:
    """An embedding of h onto an induced subdigraph of t, or None.

    Only oriented pairs of h constrain the map, so a tournament pattern
    must appear as an induced copy and a partial pattern as a homomorphic
    copy on its oriented pairs.
    """
    if h.n > t.n:
        return None
    if h.n == 0:
        return {}
    order = sorted(range(h.n), key=lambda v: (-popcount(h.out[v]), v))
    full = (1 << t.n) - 1
    assign = {}

    def rec(k, used):
        if k == len(order):
            return True
        u = order[k]
        cand = full & ~used
        for w, img in assign.items():
            if h.has_arc(u, w):
                cand &= t.inn[img]
            elif h.has_arc(w, u):
                cand &= t.out[img]
            if not cand:
                return False
        for c in iter_bits(cand):
            assign[u] = c
            if rec(k + 1, used | (1 << c)):
                return True
            del assign[u]
        return False

    if rec(0, 0):
        return {u: assign[u] for u in range(h.n)}
    return None


def is_free(t: Digraph, h: Digraph) -> bool:
    return contains(t, h) is None


def is_isomorphic(a: Tournament, b: Tournament) -> bool:
    return a.n == b.n and contains(a, b) is not None


def canonical_form(t: Tournament, bound: int = DEFAULT_CANON_BOUND) -> str:
    """Lexicographically least TRN bitstring over all relabelings.

    Labels are assigned one at a time.  Fixing label i settles row i of the
    bitstring once every later label is known to sit in a cell whose
    in-neighbours of label i come before its out-neighbours, so the search
    keeps an ordered partition of the unlabeled vertices and only branches
    on ties for the least row.
    """
    if t.n > bound:
        raise ValueError(f"canonical form limited to n <= {bound}")
    return _canonical(t.n, t.out)


def _canonical(n: int, out: tuple) -> str:
    best = [None]

    def rec(cells, prefix):
        if not cells:
            if best[0] is None or prefix < best[0]:
                best[0] = prefix
            return
        first, rest = cells[0], cells[1:]
        options = []
        for v in iter_bits(first):
            row, split = [], []
            for c in ([first & ~(1 << v)] if first != 1 << v else []) + list(rest):
                lo, hi = c & ~out[v], c & out[v]
                row.append("0" * popcount(lo) + "1" * popcount(hi))
                if lo:
                    split.append(lo)
                if hi:
                    split.append(hi)
            options.append(("".join(row), split))
        least = min(r for r, _ in options)
        candidate = prefix + least
        if best[0] is not None and candidate > best[0][: len(candidate)]:
            return
        for r, split in options:
            if r == least:
                rec(split, candidate)

    rec([(1 << n) - 1] if n else [], "")
    return best[0]


def canonical_tournament(t: Tournament, bound: int = DEFAULT_CANON_BOUND) -> Tournament:
    return Tournament.from_bits(t.n, canonical_form(t, bound))


@lru_cache(maxsize=None)
def _classes(n: int) -> tuple:
    if n == 0:
        return ("",)
    found = set()
    for bits in _classes(n - 1):
        base = Tournament.from_bits(n - 1, bits)
        for s in range(1 << (n - 1)):
            out = [m | ((0 if (s >> v) & 1 else 1) << (n - 1)) for v, m in enumerate(base.out)]
            out.append(s)
            found.add(_canonical(n, tuple(out)))
    return tuple(sorted(found))


def enumerate_tournaments(n: int) -> list:
    """One tournament per isomorphism class, sorted by canonical bitstring."""
    if not 0 <= n <= MAX_ENUMERATE:
        raise ValueError(f"exhaustive enumeration supports 0 <= n <= {MAX_ENUMERATE}")
    return [Tournament.from_bits(n, b) for b in _classes(n)]


def all_labeled(n: int):
    """Every labeled tournament on n vertices (2^(n(n-1)/2) of them)."""
    m = n * (n - 1) // 2
    for b in range(1 << m):
        yield Tournament.from_bits(n, format(b, f"0{m}b") if m else "")


def random_tournament(n: int, seed: int) -> Tournament:
    rng = SplitMix64(seed)
    out = [0] * n
    for (i, j), bit in zip(pairs(n), rng.bits(n * (n - 1) // 2)):
        if bit:
            out[i] |= 1 << j
        else:
            out[j] |= 1 << i
    return Tournament(n, out)


def as_fraction(eps) -> Fraction:
    if isinstance(eps, float):
        raise TypeError("epsilon must be an exact rational, not a float")
    return Fraction(eps)


def below_power(a: int, n: int, eps) -> bool:
    """a < n**eps, decided in integers for rational eps = e/p."""
    eps = as_fraction(eps)
    e, p = eps.numerator, eps.denominator
    return a ** p < n ** e


def is_epsilon_critical(t: Tournament, eps, max_n: int = MAX_CRITICAL_N) -> bool:
    eps = as_fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if t.n > max_n:
        raise ValueError(f"criticality check limited to n <= {max_n}")
    solver = TransitiveSolver(t)
    full = (1 << t.n) - 1
    if not below_power(solver.size(full), t.n, eps):
        return False
    for mask in range(full):
        size = popcount(mask)
        # cheap lower bound floor(log2)+1 settles most subsets
        if size == 0 or not below_power(size.bit_length(), size, eps):
            continue
        if below_power(solver.size(mask), size, eps):
            return False
    return True


@dataclass
class LemmaHReport:
    k: int
    n: int
    mode: str
    checked: int
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def verify_lemma_h(k: int, mode: str = "exhaustive", samples: int = 0, seed: int = 0,
                   jobs: int = 1) -> LemmaHReport:
    """Check that tournaments on 2^(k-1) vertices have tr >= k."""
    if k < 1:
        raise ValueError("k must be positive")
    n = 1 << (k - 1)
    if mode == "exhaustive":
        if n > 5:
            raise ValueError("exhaustive mode needs 2^(k-1) <= 5")
        report = LemmaHReport(k, n, mode, 0)
        for t in all_labeled(n):
            report.checked += 1
            if tr(t)[0] < k:
                report.counterexamples.append(t)
        return report
    if mode != "sample":
        raise ValueError(f"unknown mode {mode!r}")
    from .parallel import run_chunks
    from .sampling import sampled_lacking_transitive

    chunk = 1 << 16
    tasks = [(n, k, seed, lo, min(samples, lo + chunk)) for lo in range(0, samples, chunk)]
    flagged = [i for part in run_chunks(sampled_lacking_transitive, tasks, jobs) for i in part]
    report = LemmaHReport(k, n, mode, samples)
    for i in flagged:
        t = random_tournament(n, derive_seed(seed, i))
        if tr(t)[0] < k:
            report.counterexamples.append(t)
    return report


__all__ = [
    "Digraph", "Tournament", "Ordering", "Embedding", "TransitiveSolver", "LemmaHReport",
    "from_text", "to_text", "digraph_from_text", "induced", "backward_arcs",
    "backward_arc_graph", "is_transitive_under", "tr", "directed_density", "contains",
    "is_free", "is_isomorphic", "canonical_form", "canonical_tournament",
    "enumerate_tournaments", "all_labeled", "random_tournament", "below_power",
    "is_epsilon_critical", "verify_lemma_h", "check_ordering", "pairs", "popcount",
    "iter_bits", "mask_of",
]
