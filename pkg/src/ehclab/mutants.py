"""Mutant gadgets, the orderings they induce and the leaf-vector bookkeeping.

A mutant beta-asteroid has 13 vertices: the seven beta-asteroid vertices
(named P1..P7 by their position in its defining ordering) plus six helpers
m, g, x, w, r, y.  Three beta-asteroid pairs are left unoriented so that
every completion can be examined.  Vertex k of the mutant digraph is the
k-th vertex of its own ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .core import Digraph, Tournament, backward_arc_graph
from .families import (BETA_KINDS, FamilySpec, SpiderSpec, assemble, beta_side,
                       build_beta_asteroid, build_spider, layout_of, spider_roles,
                       spider_spec_from_params, validate)

OPERATIONS = {
    "1": (3, 1, 5, 2, 4, 6, 7),
    "2": (1, 2, 4, 6, 3, 7, 5),
    "alpha": (4, 1, 3, 5, 2),
}


def apply_operation(op: str, segment):
    if op not in OPERATIONS:
        raise ValueError(f"unknown operation {op!r}")
    perm = OPERATIONS[op]
    segment = tuple(segment)
    if len(segment) != len(perm):
        raise ValueError(f"operation {op} needs a segment of length {len(perm)}")
    return tuple(segment[i - 1] for i in perm)


def operation_for(kind: str) -> str:
    return "1" if beta_side(kind) == "left" else "2"


# ---------------------------------------------------------------- mutant beta-asteroids

MUTANT_ORDER = {
    "left-beta1": ("m", "g", "x", "P1", "w", "P2", "P3", "P4", "r", "P5", "y", "P6", "P7"),
    "left-beta2": ("m", "g", "x", "P1", "w", "P2", "P3", "P4", "r", "P5", "P6", "P7", "y"),
    "right-beta1": ("P1", "P2", "y", "P3", "r", "P4", "P5", "P6", "w", "P7", "x", "g", "m"),
    "right-beta2": ("y", "P1", "P2", "P3", "r", "P4", "P5", "P6", "w", "P7", "x", "g", "m"),
}
MUTANT_LEAVES = {
    "left-beta1": ("x", "w", "P2", "P3", "P4", "r", "P6"),
    "left-beta2": ("x", "w", "P2", "P3", "P4", "r", "P7"),
    "right-beta1": ("P2", "r", "P4", "P5", "P6", "w", "x"),
    "right-beta2": ("P1", "r", "P4", "P5", "P6", "w", "x"),
}
HELPERS = ("m", "g", "x", "w", "r", "y")


def _mutant_relations(kind: str):
    """(helper arcs, deleted base pairs) by vertex name."""
    names = set(MUTANT_ORDER[kind])
    if beta_side(kind) == "left":
        core, tail = ["P1", "P2", "P3", "P4", "P5"], ["P6", "P7"]
    else:
        core, tail = ["P3", "P4", "P5", "P6", "P7"], ["P1", "P2"]
    arcs = []

    def beats(a, group):
        arcs.extend((a, b) for b in group)

    def beaten(a, group):
        arcs.extend((b, a) for b in group)

    def others(*skip):
        return sorted(names - set(skip))

    if kind == "left-beta1":
        deleted = [(core[2], tail[0]), (core[1], tail[1]), (core[3], core[4])]
        beats("m", others("m", "r"))
        beats("g", others("g", "m", "w"))
        beats("x", others("x", "m", "g", "y"))
        arcs.append((core[0], "w"))
        beats("w", others("w", core[0], "m", "x"))
        beaten("r", core[:4])
        beats("r", ["m", core[4], "y"] + tail)
        beaten("y", others("y", "x", *tail))
        beats("y", ["x"] + tail)
    elif kind == "left-beta2":
        deleted = [(core[2], tail[1]), (core[1], tail[0]), (core[3], core[4])]
        arcs += [("r", "m"), ("w", "g"), ("y", "x")]
        beats("m", others("m", "r"))
        beats("g", others("g", "m", "w"))
        beats("x", others("x", "m", "g", "y"))
        arcs.append((core[0], "w"))
        beats("w", others("w", core[0], "m", "x"))
        beaten("r", core[:4])
        beats("r", [core[4]] + tail + ["y"])
        beaten("y", others("y", "x"))
    elif kind == "right-beta1":
        deleted = [(tail[1], core[2]), (tail[0], core[3]), (core[0], core[1])]
        arcs.append(("g", "w"))
        beaten("m", others("m", "r"))
        beaten("g", others("g", "m", "w"))
        beaten("x", others("x", "m", "g", "y"))
        beaten("w", others("w", core[4], "x", "m"))
        arcs.append(("w", core[4]))
        beaten("r", ["m"] + tail + ["y", core[0]])
        beats("r", core[1:])
        beaten("y", ["x"] + tail)
        beats("y", others("y", "x", *tail))
    else:
        deleted = [(tail[0], core[2]), (tail[1], core[3]), (core[0], core[1])]
        arcs += [("m", "r"), ("g", "w"), ("x", "y")]
        beaten("m", others("m", "r"))
        beaten("g", others("g", "m", "w"))
        beaten("x", others("x", "m", "g", "y"))
        beaten("w", others("w", core[4], "x", "m"))
        arcs.append(("w", core[4]))
        beaten("r", tail + ["y", core[0]])
        beats("r", core[1:])
        beats("y", others("y", "x"))
    return arcs, deleted


@dataclass
class MutantBetaAsteroid:
    kind: str
    digraph: Digraph
    names: tuple                 # name of vertex k
    leaves: tuple                # vertex ids
    deleted: tuple               # unoriented pairs as (earlier, later) vertex ids
    base: tuple                  # vertex ids of P1..P7
    helpers: dict = field(default_factory=dict)

    def vertex(self, name: str) -> int:
        return self.names.index(name)

    @property
    def order(self) -> tuple:
        return tuple(range(13))


def mutant_beta_asteroid(kind: str) -> MutantBetaAsteroid:
    if kind not in BETA_KINDS:
        raise ValueError(f"unknown beta-asteroid kind {kind!r}")
    names = MUTANT_ORDER[kind]
    idx = {nm: k for k, nm in enumerate(names)}
    t, order = build_beta_asteroid(kind)
    base_t = t.reorder(order)   # vertex k = P(k+1)
    arcs, deleted = _mutant_relations(kind)
    fixed = {}
    for a in range(7):
        for b in range(7):
            if a != b and base_t.has_arc(a, b):
                fixed[frozenset((f"P{a + 1}", f"P{b + 1}"))] = (f"P{a + 1}", f"P{b + 1}")
    gone = {frozenset(p) for p in deleted}
    for p in gone:
        del fixed[p]
    for u, v in arcs:
        key = frozenset((u, v))
        if key in gone or fixed.get(key, (u, v)) != (u, v):
            raise AssertionError(f"conflicting relation {u}->{v} in {kind}")
        fixed[key] = (u, v)
    if len(fixed) != 75:
        raise AssertionError(f"{kind}: {len(fixed)} oriented pairs")
    out = [0] * 13
    for u, v in fixed.values():
        out[idx[u]] |= 1 << idx[v]
    return MutantBetaAsteroid(
        kind=kind,
        digraph=Digraph(13, out),
        names=names,
        leaves=tuple(sorted(idx[nm] for nm in MUTANT_LEAVES[kind])),
        deleted=tuple(tuple(sorted((idx[a], idx[b]))) for a, b in deleted),
        base=tuple(idx[f"P{k}"] for k in range(1, 8)),
        helpers={h: idx[h] for h in HELPERS},
    )


def mutant_blocks(kind: str):
    """(first block, second block) of mutant vertex ids: 10+3 for left kinds, 3+10 for right."""
    return (tuple(range(10)), tuple(range(10, 13))) if beta_side(kind) == "left" else \
        (tuple(range(3)), tuple(range(3, 13)))


def mutant_cyclic_order(kind: str) -> tuple:
    """Mutant vertex ids of P1..P7 after the kind's operation (1 for left, 2 for right)."""
    return apply_operation(operation_for(kind), mutant_beta_asteroid(kind).base)


# ---------------------------------------------------------------- Theta and the corresponding digraph

def theta_set(spec: FamilySpec) -> list:
    """[(chosen asteroid indices, ordering of V(H))] for every subset of beta-asteroids."""
    problems = validate(spec)
    if problems:
        raise ValueError("; ".join(problems))
    betas = spec.of_kind("beta")
    result = []
    for size in range(len(betas) + 1):
        for chosen in combinations(range(len(betas)), size):
            order = list(range(spec.n))
            for i in chosen:
                ps = betas[i].positions
                image = apply_operation(operation_for(betas[i].params["kind"]), ps)
                for slot, v in zip(ps, image):
                    order[slot] = v
            result.append((chosen, tuple(order)))
    return result


@dataclass
class CorrespondingDigraph:
    spec: FamilySpec
    host: Tournament                  # H under the identity ordering
    digraph: Digraph                  # Ĥ; its ordering is the identity
    origin: list                      # per Ĥ vertex: ("H", v) or ("helper", asteroid index, name)
    mutants: list                     # per asteroid: (kind, Ĥ ids of the 13 mutant vertices)
    h_to_hat: dict                    # H vertex -> Ĥ vertex

    @property
    def order(self) -> tuple:
        return tuple(range(self.digraph.n))

    def helper_pairs(self) -> list:
        """The pairs xy, mr, gw of every mutant, as sorted Ĥ id pairs."""
        out = []
        for kind, ids in self.mutants:
            names = MUTANT_ORDER[kind]
            for a, b in (("x", "y"), ("m", "r"), ("g", "w")):
                u, v = ids[names.index(a)], ids[names.index(b)]
                out.append((min(u, v), max(u, v)))
        return sorted(out)


def corresponding_digraph(spec: FamilySpec) -> CorrespondingDigraph:
    if spec.family != "asterism" or validate(spec):
        raise ValueError("corresponding digraph needs a valid asterism")
    if not spec.regular:
        raise ValueError("corresponding digraph needs a regular asterism (no singletons)")
    h = assemble(spec)
    betas = spec.of_kind("beta")
    starts = {}
    for i, c in enumerate(betas):
        first, second = mutant_blocks(c.params["kind"])
        ps = c.positions
        lead, trail = (ps[0], ps[5]) if beta_side(c.params["kind"]) == "left" else (ps[0], ps[2])
        starts[lead] = (i, first)
        starts[trail] = (i, second)
    in_beta = {p for c in betas for p in c.positions}
    origin = []
    mutant_ids = [[None] * 13 for _ in betas]
    for p in range(spec.n):
        if p in starts:
            i, block = starts[p]
            kind = betas[i].params["kind"]
            names = MUTANT_ORDER[kind]
            for k in block:
                nm = names[k]
                mutant_ids[i][k] = len(origin)
                if nm.startswith("P"):
                    origin.append(("H", betas[i].positions[int(nm[1]) - 1]))
                else:
                    origin.append(("helper", i, nm))
        elif p not in in_beta:
            origin.append(("H", p))
    n_hat = len(origin)
    owner = {}
    for i, ids in enumerate(mutant_ids):
        for k, v in enumerate(ids):
            owner[v] = (i, k)
    muts = [mutant_beta_asteroid(c.params["kind"]) for c in betas]
    out = [0] * n_hat
    for a in range(n_hat):
        for b in range(a + 1, n_hat):
            oa, ob = owner.get(a), owner.get(b)
            if oa and ob and oa[0] == ob[0]:
                d = muts[oa[0]].digraph
                if d.has_arc(oa[1], ob[1]):
                    out[a] |= 1 << b
                elif d.has_arc(ob[1], oa[1]):
                    out[b] |= 1 << a
            elif origin[a][0] == "H" and origin[b][0] == "H" and h.has_arc(origin[b][1], origin[a][1]):
                out[b] |= 1 << a
            else:
                out[a] |= 1 << b
    return CorrespondingDigraph(
        spec=spec, host=h, digraph=Digraph(n_hat, out), origin=origin,
        mutants=[(c.params["kind"], tuple(ids)) for c, ids in zip(betas, mutant_ids)],
        h_to_hat={o[1]: k for k, o in enumerate(origin) if o[0] == "H"},
    )


def backward_identity_holds(cd: CorrespondingDigraph) -> bool:
    """B(Ĥ) equals B(H) carried over plus the helper pairs of every mutant."""
    hat = backward_arc_graph(cd.digraph, cd.order)
    base = backward_arc_graph(cd.host, tuple(range(cd.host.n)))
    carried = {tuple(sorted((cd.h_to_hat[u], cd.h_to_hat[v]))) for u, v in base}
    return set(hat) == carried | set(cd.helper_pairs())


# ---------------------------------------------------------------- spiders

def cyclic_ordering(spec: SpiderSpec):
    """(ordering, decomposition) with operation alpha applied to the interior.

    The decomposition lists two stars (center, leaves) built from each center
    and its legs, and the triangle formed by the petals; it is checked
    against the backward arcs under the new ordering.
    """
    t, _, roles = build_spider(spec)
    interior = roles["interior"]
    order = list(range(spec.n))
    for slot, v in zip(interior, apply_operation("alpha", interior)):
        order[slot] = v
    order = tuple(order)
    stars = [(c, tuple(sorted(roles["legs"][c]))) for c in roles["centers"]]
    triangle = tuple(sorted(roles["petals"]))
    expected = {tuple(sorted((c, leg))) for c, legs in stars for leg in legs}
    expected |= {tuple(sorted(p)) for p in combinations(triangle, 2)}
    if set(backward_arc_graph(t, order)) != expected:
        raise AssertionError("cyclic ordering does not split into two stars and a triangle")
    return order, {"stars": stars, "triangle": triangle}


def is_triangle_under(t: Digraph, order, vertices) -> bool:
    """Three vertices whose arcs all point from later to earlier."""
    pos = {v: i for i, v in enumerate(order)}
    a, b, c = sorted(vertices, key=pos.get)
    return t.has_arc(c, b) and t.has_arc(c, a) and t.has_arc(b, a)


def spider_deleted_pairs(spec: SpiderSpec) -> list:
    """0-based (earlier, later) pairs that the mutant spider leaves unoriented, in rule order."""
    r = spider_roles(spec)
    n = spec.n
    if spec.kind == "middle":
        m = spec.left_legs
        pairs = [(i, m + 4) for i in r["legs"][m + 1]] + [(m + 2, i) for i in r["legs"][m + 5]]
    elif spec.kind == "right":
        pairs = [(i, n - 3) for i in r["legs"][n]] + [(i, n - 1) for i in r["legs"][n - 4]]
    else:
        pairs = [(2, i) for i in r["legs"][5]] + [(4, i) for i in r["legs"][1]]
    return [(u - 1, v - 1) for u, v in pairs]


def mutant_spider(spec: SpiderSpec):
    """(digraph, deleted pairs)."""
    t, _, _ = build_spider(spec)
    d = Digraph(t.n, t.out)
    dels = spider_deleted_pairs(spec)
    for u, v in dels:
        d = d.without_pair(u, v)
    return d, dels


def mutant_clutter(spec: FamilySpec):
    """(digraph, [(spider index, global deleted pairs)]) with every spider mutated."""
    if validate(spec):
        raise ValueError("; ".join(validate(spec)))
    t = assemble(spec)
    d = Digraph(t.n, t.out)
    info = []
    for s, c in enumerate(spec.of_kind("spider")):
        sp = spider_spec_from_params(c.params, len(c.positions))
        dels = [(c.positions[u], c.positions[v]) for u, v in spider_deleted_pairs(sp)]
        for u, v in dels:
            d = d.without_pair(u, v)
        info.append((s, dels))
    return d, info


# ---------------------------------------------------------------- flag vectors

@dataclass(frozen=True)
class FlagVector:
    bits: tuple
    delta: dict = field(default_factory=dict, compare=False, hash=False)


def leaf_vector(n: int, leaves) -> FlagVector:
    leaves = set(leaves)
    return FlagVector(tuple(1 if i in leaves else 0 for i in range(n)))


def compress(s) -> tuple:
    """(s_c, delta): each maximal run of 1s becomes one 1; delta maps its 1-based index to the run length."""
    bits = tuple(s.bits if isinstance(s, FlagVector) else s)
    out, delta = [], {}
    k = 0
    while k < len(bits):
        if bits[k] == 1:
            run = 0
            while k < len(bits) and bits[k] == 1:
                run += 1
                k += 1
            out.append(1)
            delta[len(out)] = run
        else:
            out.append(0)
            k += 1
    return tuple(out), delta


def expand(sc, delta) -> tuple:
    out = []
    for i, b in enumerate(sc, start=1):
        out.extend([1] * delta[i] if b == 1 else [0])
    return tuple(out)


def corresponding_leaf_vector(cd: CorrespondingDigraph) -> FlagVector:
    """Flags of Ĥ: leaves of stars and of mutant beta-asteroids."""
    leaves = set()
    for kind, ids in cd.mutants:
        m = mutant_beta_asteroid(kind)
        leaves |= {ids[k] for k in m.leaves}
    for center, star_leaves in layout_of(cd.spec).stars:
        leaves |= {cd.h_to_hat[v] for v in star_leaves}
    return leaf_vector(cd.digraph.n, leaves)
