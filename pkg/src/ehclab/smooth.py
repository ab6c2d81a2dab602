"""Smooth structures: verification, labels, well-contained embeddings and extraction.

A structure is a sequence of disjoint vertex sets, each flagged linear (0)
or transitive (1).  Sets are large in the sense of the constant c, and
every vertex of an earlier set sends almost all its arcs (all but a
lambda fraction) to each later set, and symmetrically.  All comparisons
are exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Digraph, Tournament, contains, directed_density, iter_bits, mask_of, popcount, tr
from .families import FamilySpec, assemble, spider_spec_from_params
from .mutants import (CorrespondingDigraph, apply_operation, cyclic_ordering, is_triangle_under,
                      operation_for, spider_deleted_pairs)
from .rng import SplitMix64


class LemmaViolation(AssertionError):
    """A deterministic inequality failed on an input meeting its hypotheses."""


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("use exact rationals, not floats")
    return Fraction(x)


def transitive_order(t: Digraph, vertices) -> tuple | None:
    """Ordering of `vertices` with no backward arc (source first), or None."""
    m = mask_of(vertices)
    order = sorted(vertices, key=lambda v: -popcount(t.out[v] & m))
    for i, u in enumerate(order):
        if popcount(t.out[u] & m) != len(order) - 1 - i:
            return None
        for v in order[i + 1:]:
            if not t.has_arc(u, v):
                return None
    return tuple(order)


@dataclass
class SmoothStructure:
    host: Tournament
    sets: list                 # tuples; a transitive set is stored in its transitive order
    w: tuple
    c: Fraction
    lam: Fraction
    delta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        data = {
            "c": f"{self.c.numerator}/{self.c.denominator}",
            "lambda": f"{self.lam.numerator}/{self.lam.denominator}",
            "w": list(self.w),
            "delta": {str(k): v for k, v in sorted(self.delta.items())},
            "sets": [sorted(s) for s in self.sets],
            "transitive_orders": {str(i + 1): list(s) for i, s in enumerate(self.sets) if self.w[i]},
        }
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, host: Tournament) -> "SmoothStructure":
        data = json.loads(text)
        try:
            w = tuple(int(b) for b in data["w"])
            orders = {int(k): tuple(v) for k, v in data.get("transitive_orders", {}).items()}
            sets = []
            for i, s in enumerate(data["sets"], start=1):
                if w[i - 1]:
                    s = orders.get(i) or transitive_order(host, s)
                    if s is None:
                        raise ValueError(f"set {i} is flagged transitive but is not")
                sets.append(tuple(s))
            return cls(host, sets, w, Fraction(data["c"]), Fraction(data["lambda"]),
                       {int(k): int(v) for k, v in data.get("delta", {}).items()})
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed smooth structure: {exc}") from None


@dataclass
class SmoothReport:
    ok: bool
    violations: list


def _check_shape(t: Tournament, sets, w):
    if len(sets) != len(w):
        raise ValueError("need one flag per set")
    seen = set()
    for i, s in enumerate(sets, start=1):
        if not s:
            raise ValueError(f"set {i} is empty")
        for v in s:
            if not 0 <= v < t.n:
                raise ValueError(f"set {i}: vertex {v} out of range")
            if v in seen:
                raise ValueError(f"vertex {v} appears in two sets")
            seen.add(v)


def verify_smooth(t: Tournament, sets, c, lam, w, tr_bound: int | None = None) -> SmoothReport:
    """Check every condition; `tr_bound` may replace tr(T) by any upper bound on it."""
    c, lam = _frac(c), _frac(lam)
    _check_shape(t, sets, w)
    bad = []
    n = t.n
    tr_value = tr(t)[0] if tr_bound is None and any(w) else tr_bound
    for i, (s, flag) in enumerate(zip(sets, w), start=1):
        if flag == 0 and len(s) < c * n:
            bad.append(f"set {i}: linear set of size {len(s)} < c*n = {c * n}")
        if flag == 1:
            if transitive_order(t, s) is None:
                bad.append(f"set {i}: flagged transitive but T|S is not transitive")
            if len(s) < c * tr_value:
                bad.append(f"set {i}: transitive set of size {len(s)} < c*tr = {c * tr_value}")
    floor = 1 - lam
    masks = [mask_of(s) for s in sets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            for v in sets[i]:
                d = Fraction(popcount(t.out[v] & masks[j]), len(sets[j]))
                if d < floor:
                    bad.append(f"sets {i + 1}->{j + 1}: vertex {v} has d({{v}},S{j + 1}) = {d} < {floor}")
            for v in sets[j]:
                d = Fraction(popcount(t.inn[v] & masks[i]), len(sets[i]))
                if d < floor:
                    bad.append(f"sets {i + 1}->{j + 1}: vertex {v} has d(S{i + 1},{{v}}) = {d} < {floor}")
    return SmoothReport(not bad, bad)


def tightest_constants(t: Tournament, sets, w, tr_bound: int | None = None):
    """(largest c, smallest lambda) for which the sets form a smooth structure."""
    _check_shape(t, sets, w)
    tr_value = tr(t)[0] if tr_bound is None and any(w) else tr_bound
    c = min(Fraction(len(s), tr_value if flag else t.n) for s, flag in zip(sets, w))
    worst = Fraction(1)
    masks = [mask_of(s) for s in sets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            for v in sets[i]:
                worst = min(worst, Fraction(popcount(t.out[v] & masks[j]), len(sets[j])))
            for v in sets[j]:
                worst = min(worst, Fraction(popcount(t.inn[v] & masks[i]), len(sets[i])))
    return c, 1 - worst


def block_tr_bound(t: Tournament, blocks) -> int:
    """Upper bound on tr(T) from a partition covering V(T): a transitive set meets each block transitively."""
    covered = sorted(v for b in blocks for v in b)
    if covered != list(range(t.n)):
        raise ValueError("blocks must partition the vertex set")
    return sum(tr(t, b)[0] for b in blocks)


# ---------------------------------------------------------------- deterministic lemmas

def subset_density_bound(t: Tournament, a1, a2, x, y, lam, eta1, eta2) -> Fraction:
    """Margin of d(X,Y) over 1 - lam/(eta1*eta2) for X in A1, Y in A2."""
    lam, eta1, eta2 = _frac(lam), _frac(eta1), _frac(eta2)
    a1, a2, x, y = set(a1), set(a2), set(x), set(y)
    if not (x <= a1 and y <= a2 and x and y):
        raise ValueError("need nonempty X inside A1 and Y inside A2")
    if not (0 < eta1 <= 1 and 0 < eta2 <= 1):
        raise ValueError("eta values must lie in (0, 1]")
    if directed_density(t, a1, a2) < 1 - lam:
        raise ValueError("hypothesis d(A1,A2) >= 1 - lambda fails")
    if len(x) < eta1 * len(a1) or len(y) < eta2 * len(a2):
        raise ValueError("size hypotheses on X or Y fail")
    margin = directed_density(t, x, y) - (1 - lam / (eta1 * eta2))
    if margin < 0:
        raise LemmaViolation(f"d(X,Y) below the bound by {-margin}")
    return margin


def common_restriction(t: Tournament, sets, j: int, subset, outside) -> set:
    """Vertices of `subset` (inside set j, 0-based) agreeing with every x in `outside`.

    For x in an earlier set the vertex must be adjacent from x, for x in a
    later set adjacent to x.
    """
    where = {v: i for i, s in enumerate(sets) for v in s}
    block = set(sets[j])
    subset = set(subset)
    if not subset <= block:
        raise ValueError("subset must lie inside the chosen set")
    result = set(subset)
    for x in outside:
        if x in block:
            raise ValueError(f"vertex {x} lies in the chosen set")
        if x not in where:
            raise ValueError(f"vertex {x} is in no set of the structure")
        if where[x] < j:
            result &= set(iter_bits(t.out[x]))
        else:
            result &= set(iter_bits(t.inn[x]))
    return result


def restriction_margin(t: Tournament, sets, w, lam, j: int, subset, outside, gamma) -> Fraction:
    """Size of the common restriction minus (1 - k*lam/gamma)|subset|; raises on violation."""
    lam, gamma = _frac(lam), _frac(gamma)
    if len(subset) < gamma * len(sets[j]):
        raise ValueError("subset smaller than gamma * |S_j|")
    report = verify_smooth(t, sets, 0, lam, [0] * len(sets))
    if not report.ok:
        raise ValueError("structure is not smooth at this lambda")
    got = len(common_restriction(t, sets, j, subset, outside))
    margin = got - (1 - len(set(outside)) * lam / gamma) * len(subset)
    if margin < 0:
        raise LemmaViolation(f"common restriction short by {-margin}")
    return margin


# ---------------------------------------------------------------- labels and embeddings

@dataclass
class XiLabeling:
    label: dict            # vertex -> label (1-based)
    classes: list          # classes[j-1] = vertices carrying label j
    widths: dict           # set index (1-based) -> sub-block width

    def label_count(self) -> int:
        return len(self.classes)


def xi_labels(s: SmoothStructure, delta: dict | None = None) -> XiLabeling:
    delta = dict(s.delta if delta is None else delta)
    ones = {i for i, b in enumerate(s.w, start=1) if b == 1}
    if set(delta) != ones:
        raise ValueError(f"delta keys {sorted(delta)} do not match the 1-flags {sorted(ones)}")
    label, classes, widths = {}, [], {}
    for i, (block, flag) in enumerate(zip(s.sets, s.w), start=1):
        if flag == 0:
            classes.append(tuple(sorted(block)))
            continue
        d = delta[i]
        width = len(block) // d if d > 0 else 0
        if width == 0:
            raise ValueError(f"set {i} of size {len(block)} cannot hold {d} sub-blocks")
        widths[i] = width
        for k in range(d):
            classes.append(tuple(block[k * width:(k + 1) * width]))
    for j, cls in enumerate(classes, start=1):
        for v in cls:
            label[v] = j
    return XiLabeling(label, classes, widths)


def is_well_contained(f: dict, d: Digraph, xi: XiLabeling, host: Digraph) -> bool:
    """f maps vertex j-1 of d (its j-th in order) to a host vertex labeled j."""
    if sorted(f) != list(range(d.n)) or len(set(f.values())) != d.n:
        return False
    for u in range(d.n):
        if xi.label.get(f[u]) != u + 1:
            return False
    return all(host.has_arc(f[u], f[v]) for u, v in d.arcs())


@dataclass
class EmbeddingResult:
    status: str            # found | absent | budget
    embedding: dict | None
    nodes: int


def find_embedding(d: Digraph, xi: XiLabeling, host: Digraph, budget: int = 1_000_000,
                   order=None) -> EmbeddingResult:
    """Backtracking search for a well-contained copy of d.

    With the default natural assignment order and candidates tried in
    increasing order, the first hit is the lexicographically smallest
    embedding.  Each assignment filters the candidate sets of the
    unassigned vertices, so a dead branch is noticed as soon as one
    candidate set empties.
    """
    if xi.label_count() != d.n:
        raise ValueError(f"pattern has {d.n} vertices but the structure has {xi.label_count()} labels")
    if d.n == 0:
        return EmbeddingResult("found", {}, 0)
    order = list(range(d.n)) if order is None else list(order)
    domains = [mask_of(xi.classes[u]) for u in range(d.n)]
    assign = {}
    nodes = [0]

    def rec(k, domains):
        if k == len(order):
            return True
        u = order[k]
        for c in iter_bits(domains[u]):
            nodes[0] += 1
            if nodes[0] > budget:
                raise _Budget
            new = list(domains)
            ok = True
            for v in order[k + 1:]:
                if d.has_arc(u, v):
                    new[v] &= host.out[c]
                elif d.has_arc(v, u):
                    new[v] &= host.inn[c]
                new[v] &= ~(1 << c)
                if not new[v]:
                    ok = False
                    break
            if not ok:
                continue
            assign[u] = c
            if rec(k + 1, new):
                return True
            del assign[u]
        return False

    try:
        found = rec(0, domains)
    except _Budget:
        return EmbeddingResult("budget", None, nodes[0])
    if not found:
        return EmbeddingResult("absent", None, nodes[0])
    return EmbeddingResult("found", dict(sorted(assign.items())), nodes[0])


class _Budget(Exception):
    pass


def plant_host(d: Digraph, w, delta: dict, sizes, seed: int):
    """Host tournament with smooth blocks of the given sizes and a planted copy of d.

    Blocks are laid out one after another.  Linear blocks are random inside,
    transitive blocks are transitive, arcs between blocks point forward.
    One vertex of each label class is picked at random and the arcs of d
    are written between the picked vertices.
    Returns (host, structure sets, planted embedding).
    """
    rng = SplitMix64(seed)
    if len(sizes) != len(w):
        raise ValueError("need one size per flag")
    n = sum(sizes)
    sets, start = [], 0
    for size in sizes:
        sets.append(tuple(range(start, start + size)))
        start += size
    out = [0] * n
    where = {v: i for i, s in enumerate(sets) for v in s}
    for a in range(n):
        for b in range(a + 1, n):
            if where[a] == where[b] and w[where[a]] == 0 and rng.next() & 1:
                out[b] |= 1 << a
            else:
                out[a] |= 1 << b
    base = Tournament(n, out)
    probe = SmoothStructure(base, sets, tuple(w), Fraction(0), Fraction(0), dict(delta))
    xi = xi_labels(probe)
    if xi.label_count() != d.n:
        raise ValueError("block pattern does not match the pattern size")
    planted = {u: xi.classes[u][rng.below(len(xi.classes[u]))] for u in range(d.n)}
    for u, v in d.arcs():
        a, b = planted[u], planted[v]
        out[b] &= ~(1 << a)
        out[a] |= 1 << b
    host = Tournament(n, out)
    for i, (s, flag) in enumerate(zip(sets, w), start=1):
        if flag and transitive_order(host, s) != s:
            raise ValueError(f"planted arcs break the transitive order of set {i}")
    return host, sets, planted


def search_smooth_structure(t: Tournament, c, lam, w, divisor: int | None = None,
                            budget: int = 2_000_000):
    """Brute force over ordered tuples of disjoint sets (n <= 12, |w| <= 3).

    Returns (status, structure or None, tuples tried) with status
    found | absent | budget.  Larger sets are tried first.
    """
    c, lam = _frac(c), _frac(lam)
    if t.n > 12 or len(w) > 3:
        raise ValueError("search limited to n <= 12 and |w| <= 3")
    n = t.n
    tr_value = tr(t)[0]
    floor = 1 - lam
    cands = {}
    for flag in set(w):
        need = c * (tr_value if flag else n)
        pool = []
        for mask in range(1, 1 << n):
            size = popcount(mask)
            if size < need or (divisor and size % divisor):
                continue
            vs = tuple(iter_bits(mask))
            if flag and transitive_order(t, vs) is None:
                continue
            pool.append((size, vs, mask))
        pool.sort(key=lambda e: (-e[0], e[1]))
        cands[flag] = pool
    tried = [0]

    def smooth_pair(ma, sa, mb, sb):
        for v in sa:
            if Fraction(popcount(t.out[v] & mb), len(sb)) < floor:
                return False
        for v in sb:
            if Fraction(popcount(t.inn[v] & ma), len(sa)) < floor:
                return False
        return True

    chosen = []

    def rec(i, used):
        if i == len(w):
            return True
        for size, vs, mask in cands[w[i]]:
            if mask & used:
                continue
            tried[0] += 1
            if tried[0] > budget:
                raise _Budget
            if all(smooth_pair(pm, ps, mask, vs) for ps, pm in chosen):
                chosen.append((vs, mask))
                if rec(i + 1, used | mask):
                    return True
                chosen.pop()
        return False

    try:
        hit = rec(0, 0)
    except _Budget:
        return "budget", None, tried[0]
    if not hit:
        return "absent", None, tried[0]
    sets = [transitive_order(t, vs) if flag else vs for (vs, _), flag in zip(chosen, w)]
    return "found", SmoothStructure(t, sets, tuple(w), c, lam), tried[0]


# ---------------------------------------------------------------- extraction

# Removal cases per kind, by mutant vertex id.  (x, y, removed): if x -> y
# in the host the listed copies are dropped; the last case always applies.
# The first three keep a copy under the cyclic ordering, the last under
# the defining ordering.
_LETTERS = "c d b g n r p q o s f a t".split()
_CASES = {
    "left-beta1": [("a", "p", "c r q o s t"), ("s", "q", "d g n r p a"), ("t", "r", "d g n p q a"),
                   (None, None, "c d b n o f")],
    "left-beta2": [("a", "p", "c r q o s f"), ("s", "q", "d g n r p a"), ("f", "r", "d g n p q a"),
                   (None, None, "c d b n o t")],
    "right-beta1": [("p", "d", "c g n r q t"), ("r", "g", "d p q o s a"), ("q", "c", "d r p o s a"),
                    (None, None, "b n o f a t")],
    "right-beta2": [("p", "d", "b g n r q t"), ("r", "g", "d p q o s a"), ("q", "b", "d r p o s a"),
                    (None, None, "c n o f a t")],
}


def _ids(letters: str) -> list:
    return [_LETTERS.index(ch) for ch in letters.split()]


@dataclass
class AsterismExtraction:
    h_embedding: dict      # H vertex -> host vertex
    theta: tuple           # ordering of V(H) in Theta the copy follows
    cases: list            # per asteroid: index of the case that fired
    kept: tuple            # host vertices of the copy, in order


def extract_asterism(cd: CorrespondingDigraph, f: dict, host: Tournament) -> AsterismExtraction:
    """Turn a copy of the corresponding digraph into an induced copy of H."""
    removed = set()
    theta = list(range(cd.host.n))
    cases = []
    for i, (kind, ids) in enumerate(cd.mutants):
        for k, (a, b, gone) in enumerate(_CASES[kind]):
            if a is None or host.has_arc(f[ids[_LETTERS.index(a)]], f[ids[_LETTERS.index(b)]]):
                break
        cases.append(k)
        removed |= {ids[q] for q in _ids(gone)}
        if k < 3:
            betas = cd.spec.of_kind("beta")
            ps = betas[i].positions
            for slot, v in zip(ps, apply_operation(operation_for(kind), ps)):
                theta[slot] = v
    kept_hat = [u for u in range(cd.digraph.n) if u not in removed]
    if len(kept_hat) != cd.host.n:
        raise AssertionError("extraction kept the wrong number of vertices")
    kept = tuple(f[u] for u in kept_hat)
    emb = {theta[k]: kept[k] for k in range(cd.host.n)}
    for u in range(cd.host.n):
        for v in range(cd.host.n):
            if u != v and cd.host.has_arc(u, v) != host.has_arc(emb[u], emb[v]):
                raise AssertionError(f"extracted copy disagrees on pair {(u, v)}")
    if contains(host.induced(kept), cd.host) is None:
        raise AssertionError("extracted vertices do not induce H")
    return AsterismExtraction(dict(sorted(emb.items())), tuple(theta), cases, kept)


@dataclass
class SpiderPiece:
    spider: int
    tag: str               # "s" spider copy, "t" triangle
    vertices: tuple        # host vertices


def extract_spider_or_triangle(spec: FamilySpec, f: dict, host: Tournament) -> list:
    """Per spider of spec: its full copy (tag s) or a triangle in the host (tag t).

    The copy must be a well-contained copy of the mutant, i.e. f respects
    every oriented pair; only the unoriented pairs are inspected.
    """
    pieces = []
    h = assemble(spec)
    copy_order = [f[u] for u in sorted(f)]
    for s, c in enumerate(spec.of_kind("spider")):
        sp = spider_spec_from_params(c.params, len(c.positions))
        dels = [(c.positions[a], c.positions[b]) for a, b in spider_deleted_pairs(sp)]
        back = [(a, b) for a, b in dels if host.has_arc(f[b], f[a])]
        if not back:
            copy = tuple(f[u] for u in c.positions)
            pieces.append(SpiderPiece(s, "s", copy))
            continue
        a, b = back[0]
        others = [y for y in c.positions if y not in (a, b)]
        for y in others:
            tri = (f[a], f[b], f[y])
            if is_triangle_under(host, copy_order, tri):
                pieces.append(SpiderPiece(s, "t", tuple(sorted(tri, key=copy_order.index))))
                break
        else:
            raise AssertionError(f"no triangle through backward pair {(a, b)} of spider {s}")
    _check_tags(spec, h, pieces)
    return pieces


def _check_tags(spec: FamilySpec, h: Tournament, pieces):
    """The tag sequence is realised by applying alpha to the tagged spiders of H."""
    theta = list(range(spec.n))
    spiders = spec.of_kind("spider")
    for piece in pieces:
        if piece.tag != "t":
            continue
        c = spiders[piece.spider]
        sp = spider_spec_from_params(c.params, len(c.positions))
        local_order, parts = cyclic_ordering(sp)
        for slot, v in zip(c.positions, local_order):
            theta[slot] = c.positions[v]
        tri = [c.positions[v] for v in parts["triangle"]]
        if not is_triangle_under(h, theta, tri):
            raise AssertionError("cyclic ordering lost its triangle")
