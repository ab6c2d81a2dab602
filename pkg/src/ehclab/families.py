"""Builders, validators and recognition for the ordered tournament families.

Every family member is described by a FamilySpec: a list of components,
each with a kind, parameters and the sorted global positions it occupies.
Built tournaments use vertex i for position i, so the defining ordering is
the identity.  Inside a component the arcs follow the component's own
defining ordering; every arc between different components is forward.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

import networkx as nx

from .core import Tournament, check_ordering, iter_bits, popcount
from .rng import SplitMix64

# Asteroid arcs and beta-asteroid extras, 1-based labels.
ASTEROID_ARCS = ((1, 2), (1, 3), (4, 1), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (5, 3), (5, 4))
BETA_EXTRA = {
    "left-beta1": ((2, 6), (7, 5), (7, 6)),
    "left-beta2": ((2, 6), (7, 6)),
    "right-beta1": ((6, 3), (6, 7), (5, 7)),
    "right-beta2": ((6, 3), (6, 7)),
}
# Defining ordering of each kind, as labels listed by position.  Pairs not
# fixed above are forward under it.
BETA_ORDER = {
    "left-beta1": (6, 1, 2, 3, 4, 7, 5),
    "left-beta2": (6, 1, 2, 3, 4, 5, 7),
    "right-beta1": (5, 7, 1, 2, 3, 4, 6),
    "right-beta2": (7, 5, 1, 2, 3, 4, 6),
}
BETA_KINDS = tuple(BETA_ORDER)

FAMILIES = ("galaxy", "asterism", "galaxy_with_spiders", "clutter", "merged")
ALLOWED_KINDS = {
    "galaxy": {"star", "singleton"},
    "asterism": {"beta", "star", "singleton"},
    "galaxy_with_spiders": {"spider", "star", "singleton"},
    "clutter": {"spider"},
    "merged": {"beta", "spider", "star", "singleton"},
}


class FamilyError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def beta_side(kind: str) -> str:
    if kind not in BETA_ORDER:
        raise ValueError(f"unknown beta-asteroid kind {kind!r}")
    return kind.split("-")[0]


def from_backward(n: int, backward) -> Tournament:
    """Tournament on 0..n-1, forward under the identity except the given (later, earlier) arcs."""
    back = {(u, v) for u, v in backward}
    out = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if (j, i) in back:
                out[j] |= 1 << i
            else:
                out[i] |= 1 << j
    for u, v in back:
        if not u > v:
            raise ValueError(f"{(u, v)} is not backward")
    return Tournament(n, out)


def from_labeled_arcs(n: int, arcs, order) -> Tournament:
    """Tournament on labels 1..n (vertex label-1): the given arcs, other pairs forward under order."""
    pos = {v: i for i, v in enumerate(order)}
    fixed = {}
    for u, v in arcs:
        fixed[frozenset((u, v))] = (u, v)
    out = [0] * n
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            u, v = fixed.get(frozenset((a, b)), (a, b) if pos[a] < pos[b] else (b, a))
            out[u - 1] |= 1 << (v - 1)
    return Tournament(n, out)


# ---------------------------------------------------------------- components

@dataclass(frozen=True)
class StarSpec:
    kind: str
    n: int
    r: int = 0

    def validate(self):
        if self.kind not in ("left", "right", "middle"):
            raise ValueError(f"unknown star kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("a star has at least two vertices")
        if self.kind == "middle" and not 2 <= self.r <= self.n - 1:
            raise ValueError("middle star needs 2 <= r <= n-1")


def star_backward(spec: StarSpec) -> list:
    spec.validate()
    n = spec.n
    if spec.kind == "right":
        return [(n - 1, i) for i in range(n - 1)]
    if spec.kind == "left":
        return [(i, 0) for i in range(1, n)]
    c = spec.r - 1
    return [(i, c) for i in range(c + 1, n)] + [(c, i) for i in range(c)]


def build_star(spec: StarSpec):
    return from_backward(spec.n, star_backward(spec)), tuple(range(spec.n))


def build_asteroid():
    return from_labeled_arcs(5, ASTEROID_ARCS, (1, 2, 3, 4, 5)), (0, 1, 2, 3, 4)


def build_beta_asteroid(kind: str):
    """(tournament on labels 1..7 as vertices 0..6, defining ordering)."""
    beta_side(kind)
    order = BETA_ORDER[kind]
    t = from_labeled_arcs(7, ASTEROID_ARCS + BETA_EXTRA[kind], order)
    return t, tuple(v - 1 for v in order)


@dataclass(frozen=True)
class SpiderSpec:
    """kind middle: `left_legs` legs before the interior, `right_legs` after.
    kind left/right: `legs` legs and the 1-based leg indices `x1`; the rest form X2.
    """

    kind: str
    left_legs: int = 0
    right_legs: int = 0
    legs: int = 0
    x1: tuple = ()

    @property
    def n(self) -> int:
        if self.kind == "middle":
            return self.left_legs + self.right_legs + 5
        return self.legs + 5

    def leg_indices(self) -> list:
        """1-based positions of the legs in the spider ordering."""
        if self.kind == "middle":
            m = self.left_legs
            return list(range(1, m + 1)) + list(range(m + 6, self.n + 1))
        if self.kind == "right":
            return list(range(1, self.legs + 1))
        return list(range(6, self.n + 1))

    def validate(self):
        if self.kind not in ("left", "middle", "right"):
            raise ValueError(f"unknown spider kind {self.kind!r}")
        if min(self.left_legs, self.right_legs, self.legs) < 0:
            raise ValueError("leg counts must be nonnegative")
        if self.kind != "middle":
            legs = set(self.leg_indices())
            if not set(self.x1) <= legs or len(set(self.x1)) != len(self.x1):
                raise ValueError(f"x1 {self.x1} is not a subset of the legs {sorted(legs)}")


def spider_roles(spec: SpiderSpec) -> dict:
    """Roles in 1-based spider positions."""
    spec.validate()
    n = spec.n
    if spec.kind == "middle":
        m = spec.left_legs
        interior = list(range(m + 1, m + 6))
        legs = {m + 1: list(range(1, m + 1)), m + 5: list(range(m + 6, n + 1))}
    elif spec.kind == "right":
        interior = list(range(n - 4, n + 1))
        x1 = sorted(spec.x1)
        legs = {n: x1, n - 4: [i for i in spec.leg_indices() if i not in x1]}
    else:
        interior = list(range(1, 6))
        x1 = sorted(spec.x1)
        legs = {5: x1, 1: [i for i in spec.leg_indices() if i not in x1]}
    centers = sorted(legs)
    return {
        "interior": interior,
        "centers": centers,
        "petals": [v for v in interior if v not in centers],
        "legs": legs,
    }


def spider_backward(spec: SpiderSpec) -> list:
    """Backward arcs (later, earlier) in 1-based positions."""
    roles = spider_roles(spec)
    n = spec.n
    if spec.kind == "middle":
        m = spec.left_legs
        arcs = [(m + 4, m + 1), (m + 5, m + 2)]
        arcs += [(m + 1, i) for i in roles["legs"][m + 1]]
        arcs += [(i, m + 5) for i in roles["legs"][m + 5]]
    elif spec.kind == "right":
        arcs = [(n, n - 3), (n - 1, n - 4)]
        arcs += [(n, i) for i in roles["legs"][n]]
        arcs += [(n - 4, i) for i in roles["legs"][n - 4]]
    else:
        arcs = [(4, 1), (5, 2)]
        arcs += [(i, 5) for i in roles["legs"][5]]
        arcs += [(i, 1) for i in roles["legs"][1]]
    return arcs


def build_spider(spec: SpiderSpec):
    """(tournament, identity ordering, 0-based roles)."""
    t = from_backward(spec.n, [(u - 1, v - 1) for u, v in spider_backward(spec)])
    r = spider_roles(spec)
    roles = {
        "interior": [v - 1 for v in r["interior"]],
        "centers": [v - 1 for v in r["centers"]],
        "petals": [v - 1 for v in r["petals"]],
        "legs": {c - 1: [v - 1 for v in ls] for c, ls in r["legs"].items()},
    }
    return t, tuple(range(spec.n)), roles


def spider_spec_from_params(params: dict, n: int) -> SpiderSpec:
    kind = params.get("side")
    if kind == "middle":
        m = int(params.get("left_legs", 0))
        return SpiderSpec("middle", left_legs=m, right_legs=n - 5 - m)
    if kind in ("left", "right"):
        return SpiderSpec(kind, legs=n - 5, x1=tuple(sorted(params.get("x1", []))))
    raise ValueError(f"spider params need side left/middle/right, got {params!r}")


# ---------------------------------------------------------------- FamilySpec

@dataclass(frozen=True)
class Component:
    kind: str
    positions: tuple
    params: dict = field(default_factory=dict, compare=False, hash=False)

    def key(self):
        return (self.kind, self.positions, json.dumps(self.params, sort_keys=True))


@dataclass
class FamilySpec:
    family: str
    n: int
    components: list

    def to_json(self) -> str:
        data = {
            "family": self.family,
            "n": self.n,
            "components": [
                {"kind": c.kind, "params": c.params, "positions": list(c.positions)}
                for c in sorted(self.components, key=lambda c: c.positions)
            ],
        }
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FamilySpec":
        data = json.loads(text)
        try:
            comps = [Component(c["kind"], tuple(sorted(c["positions"])), dict(c.get("params", {})))
                     for c in data["components"]]
            return cls(data["family"], int(data["n"]), comps)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed family spec: {exc}") from None

    def __eq__(self, other):
        return (isinstance(other, FamilySpec) and self.family == other.family and self.n == other.n
                and sorted(c.key() for c in self.components) == sorted(c.key() for c in other.components))

    def of_kind(self, *kinds) -> list:
        return sorted((c for c in self.components if c.kind in kinds), key=lambda c: c.positions)

    @property
    def regular(self) -> bool:
        return not self.of_kind("singleton")


def component_local(c: Component) -> tuple:
    """(tournament whose vertex k sits at c.positions[k], roles in local indices)."""
    k = len(c.positions)
    if c.kind == "singleton":
        if k != 1:
            raise ValueError("singleton component must have one position")
        return Tournament(1, [0]), {}
    if c.kind == "star":
        side = c.params.get("side")
        if side not in ("left", "right", "middle"):
            raise ValueError("star params need side left, right or middle")
        r = int(c.params.get("r", 0)) if side == "middle" else 0
        t, _ = build_star(StarSpec(side, k, r))
        center = {"left": 0, "right": k - 1, "middle": r - 1}[side]
        return t, {"center": center, "leaves": [i for i in range(k) if i != center]}
    if c.kind == "beta":
        kind = c.params.get("kind")
        if k != 7:
            raise ValueError("beta-asteroid component must have seven positions")
        t, order = build_beta_asteroid(kind)
        return t.reorder(order), {"labels": [v + 1 for v in order]}
    if c.kind == "spider":
        t, _, roles = build_spider(spider_spec_from_params(c.params, k))
        return t, roles
    raise ValueError(f"unknown component kind {c.kind!r}")


@dataclass
class Layout:
    """Global-position view of the roles of every component."""

    stars: list = field(default_factory=list)      # (center, leaves)
    spiders: list = field(default_factory=list)    # dict with interior/centers/petals/legs
    betas: list = field(default_factory=list)      # (kind, positions)
    singletons: list = field(default_factory=list)


def layout_of(spec: FamilySpec) -> Layout:
    lay = Layout()
    for c in spec.of_kind("star", "spider", "beta", "singleton"):
        _, roles = component_local(c)
        g = c.positions
        if c.kind == "star":
            lay.stars.append((g[roles["center"]], [g[i] for i in roles["leaves"]]))
        elif c.kind == "spider":
            lay.spiders.append({
                "interior": [g[i] for i in roles["interior"]],
                "centers": [g[i] for i in roles["centers"]],
                "petals": [g[i] for i in roles["petals"]],
                "legs": {g[ct]: [g[i] for i in ls] for ct, ls in roles["legs"].items()},
                "vertices": list(g),
            })
        elif c.kind == "beta":
            lay.betas.append((c.params["kind"], list(g)))
        else:
            lay.singletons.append(g[0])
    return lay


def _strictly_between(v, points) -> bool:
    return len(points) >= 2 and min(points) < v < max(points)


def _consecutive(ps) -> bool:
    return all(b == a + 1 for a, b in zip(ps, ps[1:]))


@dataclass
class ContractingGraph:
    nodes: list            # (description, sorted positions)
    edges: list            # index pairs
    components: list       # lists of node indices
    blocks: list           # ordered partition M_1..M_k as sorted tuples


def contracting_graph(spec: FamilySpec) -> ContractingGraph:
    lay = layout_of(spec)
    nodes = []
    for s, sp in enumerate(lay.spiders):
        for center in sorted(sp["legs"]):
            if sp["legs"][center]:
                nodes.append((f"legs of spider {s} at center {center}", sorted(sp["legs"][center])))
        nodes.append((f"petals of spider {s}", sorted(sp["petals"])))
    for center, leaves in lay.stars:
        nodes.append((f"leaves of star at center {center}", sorted(leaves)))
    g = nx.Graph()
    g.add_nodes_from(range(len(nodes)))
    edges = []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            a, b = nodes[i][1], nodes[j][1]
            if any(_strictly_between(v, a) for v in b) or any(_strictly_between(v, b) for v in a):
                g.add_edge(i, j)
                edges.append((i, j))
    comps = [sorted(c) for c in nx.connected_components(g)]
    blocks = sorted(tuple(sorted(v for i in c for v in nodes[i][1])) for c in comps)
    comps.sort(key=lambda c: min(v for i in c for v in nodes[i][1]))
    return ContractingGraph(nodes, edges, comps, blocks)


def partition_blocks(spec: FamilySpec) -> list:
    return contracting_graph(spec).blocks


def _galaxy_violations(lay: Layout) -> list:
    out = []
    for a, (ca, _) in enumerate(lay.stars):
        for b, (_, leaves) in enumerate(lay.stars):
            if a != b and _strictly_between(ca, leaves):
                out.append(f"star center {ca} lies between leaves {sorted(leaves)} of another star")
    return out


def _leg_block_violations(spec: FamilySpec, lay: Layout, blockers: list, what: str) -> list:
    """Legs of distinct spiders may share a block only if no blocker lies between their centers."""
    out = []
    gws = FamilySpec(spec.family, spec.n, spec.of_kind("spider", "star", "singleton"))
    for block in partition_blocks(gws):
        bset = set(block)
        present = [s for s, sp in enumerate(lay.spiders)
                   if any(v in bset for ls in sp["legs"].values() for v in ls)]
        for i in present:
            for j in present:
                if i >= j:
                    continue
                for a in lay.spiders[i]["centers"]:
                    for b in lay.spiders[j]["centers"]:
                        bad = [x for x in blockers if min(a, b) < x < max(a, b)]
                        if bad:
                            out.append(f"legs of spiders {i} and {j} share block {list(block)} "
                                       f"but {what} {bad[0]} lies between centers {a} and {b}")
    return sorted(set(out))


def validate(spec: FamilySpec) -> list:
    """All violated constraints, each naming the offending vertices; empty means valid."""
    if spec.family not in FAMILIES:
        return [f"unknown family {spec.family!r}"]
    v = []
    seen = {}
    for c in spec.components:
        if c.kind not in ALLOWED_KINDS[spec.family]:
            v.append(f"component kind {c.kind!r} not allowed in {spec.family}")
        if list(c.positions) != sorted(set(c.positions)):
            v.append(f"positions {list(c.positions)} not sorted and distinct")
        for p in c.positions:
            if not 0 <= p < spec.n:
                v.append(f"position {p} out of range")
            if p in seen:
                v.append(f"position {p} used twice")
            seen[p] = c
    if v:
        return v
    if len(seen) != spec.n:
        return [f"positions {sorted(set(range(spec.n)) - set(seen))} not covered"]
    try:
        lay = layout_of(spec)
    except (ValueError, KeyError) as exc:
        return [f"bad component parameters: {exc}"]

    v += _galaxy_violations(lay)
    for kind, ps in lay.betas:
        five, two = (ps[:5], ps[5:]) if beta_side(kind) == "left" else (ps[2:], ps[:2])
        if not (_consecutive(five) and _consecutive(two)):
            v.append(f"{kind} blocks {five} and {two} are not consecutive")
        for center, leaves in lay.stars:
            for x in ps:
                if _strictly_between(x, leaves):
                    v.append(f"beta-asteroid vertex {x} lies between leaves {sorted(leaves)} of a star")
    star_centers = [c for c, _ in lay.stars]
    for s, sp in enumerate(lay.spiders):
        if not _consecutive(sp["interior"]):
            v.append(f"interior {sp['interior']} of spider {s} is not consecutive")
        for x in sp["interior"]:
            for _, leaves in lay.stars:
                if _strictly_between(x, leaves):
                    v.append(f"interior vertex {x} lies between leaves {sorted(leaves)} of a star")
        for center, ls in sp["legs"].items():
            for c in star_centers:
                if _strictly_between(c, ls):
                    v.append(f"star center {c} lies between legs {ls} of center {center}")
            for _, ps in lay.betas:
                for x in ps:
                    if _strictly_between(x, ls):
                        v.append(f"beta-asteroid vertex {x} lies between legs {ls} of center {center}")
    for a, b in zip(lay.spiders, lay.spiders[1:]):
        if max(a["vertices"]) > min(b["vertices"]):
            v.append(f"spiders at {a['vertices']} and {b['vertices']} are interleaved")
    if lay.spiders:
        v += _leg_block_violations(spec, lay, star_centers, "star center")
        if lay.betas:
            beta_vertices = [x for _, ps in lay.betas for x in ps]
            v += _leg_block_violations(spec, lay, beta_vertices, "beta-asteroid vertex")
    return v


def build_family(spec: FamilySpec):
    """(tournament, identity ordering); raises FamilyError on any violation."""
    violations = validate(spec)
    if violations:
        raise FamilyError(violations)
    return assemble(spec), tuple(range(spec.n))


def assemble(spec: FamilySpec) -> Tournament:
    """Tournament of a positionally valid spec, without the family constraints."""
    n = spec.n
    comp_of = {}
    local = {}
    for c in spec.components:
        local[c.positions] = component_local(c)[0]
        for k, p in enumerate(c.positions):
            comp_of[p] = (c.positions, k)
    out = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            (ci, ki), (cj, kj) = comp_of[i], comp_of[j]
            if ci == cj and local[ci].has_arc(kj, ki):
                out[j] |= 1 << i
            else:
                out[i] |= 1 << j
    return Tournament(n, out)


def _require(spec, family):
    if spec.family != family:
        raise FamilyError([f"expected a {family} spec, got {spec.family}"])
    return build_family(spec)


def build_galaxy(spec: FamilySpec):
    return _require(spec, "galaxy")


def build_asterism(spec: FamilySpec):
    return _require(spec, "asterism")


def build_galaxy_with_spiders(spec: FamilySpec):
    if spec.family not in ("galaxy_with_spiders", "clutter"):
        raise FamilyError([f"expected a galaxy_with_spiders spec, got {spec.family}"])
    return build_family(spec)


def merge(asterism_part: FamilySpec, gws_part: FamilySpec, layout: str):
    """Interleave two specs: layout has one 'a' or 'g' per merged position."""
    na, ng = asterism_part.n, gws_part.n
    if len(layout) != na + ng or layout.count("a") != na or set(layout) - {"a", "g"}:
        raise FamilyError([f"layout must hold {na} 'a' and {ng} 'g' symbols"])
    slots = {"a": [], "g": []}
    for p, ch in enumerate(layout):
        slots[ch].append(p)
    comps = []
    for part, ch in ((asterism_part, "a"), (gws_part, "g")):
        for c in part.components:
            comps.append(Component(c.kind, tuple(slots[ch][p] for p in c.positions), dict(c.params)))
    spec = FamilySpec("merged", na + ng, comps)
    t, order = build_family(spec)
    return t, order, spec


def validate_ordering(t: Tournament, order, spec: FamilySpec) -> list:
    """Violations of 'the vertex at position i of `order` plays position i of spec'."""
    order = check_ordering(t.n, order)
    problems = validate(spec)
    if problems:
        return problems
    if t.n != spec.n or t.reorder(order) != assemble(spec):
        return ["tournament under this ordering differs from the spec"]
    return []


# ---------------------------------------------------------------- recognition

MAX_RECOGNIZE = 9


def _backward_masks(t: Tournament) -> list:
    """For the identity ordering: bmask[v] = vertices joined to v by a backward arc."""
    n = t.n
    b = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if t.has_arc(v, u):
                b[u] |= 1 << v
                b[v] |= 1 << u
    return b


def _local_bits(t: Tournament, positions) -> str:
    return t.induced(positions).bits()


_TEMPLATES = {}


def _beta_template(kind):
    if kind not in _TEMPLATES:
        t, order = build_beta_asteroid(kind)
        _TEMPLATES[kind] = t.reorder(order).bits()
    return _TEMPLATES[kind]


def _beta_placements(t: Tournament):
    n = t.n
    for kind in BETA_KINDS:
        for s5 in range(n - 4):
            for s2 in range(n - 1):
                five = list(range(s5, s5 + 5))
                two = [s2, s2 + 1]
                if set(five) & set(two):
                    continue
                if beta_side(kind) == "left" and s2 < s5 or beta_side(kind) == "right" and s2 > s5:
                    continue
                ps = sorted(five + two)
                if _local_bits(t, ps) == _beta_template(kind):
                    yield Component("beta", tuple(ps), {"kind": kind})


def _spider_placements(t: Tournament, bmask):
    n = t.n
    for s in range(n - 4):
        inner = list(range(s, s + 5))
        first, last = inner[0], inner[4]
        before = [u for u in range(s)]
        after = [u for u in range(s + 5, n)]
        lm = [u for u in before if (bmask[first] >> u) & 1]
        rm = [u for u in after if (bmask[last] >> u) & 1]
        cands = [({"side": "middle", "left_legs": len(lm)}, lm + inner + rm)]
        for side, pool in (("right", before), ("left", after)):
            x1 = [u for u in pool if (bmask[last] >> u) & 1]
            x2 = [u for u in pool if (bmask[first] >> u) & 1]
            legs = sorted(set(x1) | set(x2))
            if not legs or len(legs) != len(x1) + len(x2):
                continue
            base = 1 if side == "right" else 6
            ps = legs + inner if side == "right" else inner + legs
            cands.append(({"side": side, "x1": [legs.index(u) + base for u in x1]}, ps))
        for params, ps in cands:
            comp = Component("spider", tuple(sorted(ps)), params)
            try:
                local, _ = component_local(comp)
            except ValueError:
                continue
            if _local_bits(t, comp.positions) == local.bits():
                yield comp


def _star_choices(t: Tournament, bmask, rest):
    """Each backward-arc component on `rest` as star/singleton options, or None."""
    rest_mask = 0
    for v in rest:
        rest_mask |= 1 << v
    seen = 0
    options = []
    for v in rest:
        if (seen >> v) & 1:
            continue
        comp, frontier = 0, 1 << v
        while frontier:
            comp |= frontier
            nxt = 0
            for u in iter_bits(frontier):
                nxt |= bmask[u] & rest_mask
            frontier = nxt & ~comp
        seen |= comp
        ps = tuple(iter_bits(comp))
        if len(ps) == 1:
            options.append([Component("singleton", ps, {})])
            continue
        opts = []
        local = _local_bits(t, ps)
        shapes = [{"side": "left"}, {"side": "right"}]
        shapes += [{"side": "middle", "r": r} for r in range(2, len(ps))]
        for params in shapes:
            c = Component("star", ps, params)
            if local == component_local(c)[0].bits():
                opts.append(c)
        if not opts:
            return None
        options.append(opts)
    return options


def decompose(t: Tournament, family: str):
    """A spec of `family` that builds exactly t under the identity ordering, or None."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    bmask = _backward_masks(t)
    use_beta = family in ("asterism", "merged")
    use_spider = family in ("galaxy_with_spiders", "clutter", "merged")
    pieces = []
    if use_beta:
        pieces += list(_beta_placements(t))
    if use_spider:
        pieces += list(_spider_placements(t, bmask))

    def choose(start, used, chosen):
        yield chosen
        for k in range(start, len(pieces)):
            ps = set(pieces[k].positions)
            if not ps & used:
                yield from choose(k + 1, used | ps, chosen + [pieces[k]])

    for chosen in choose(0, set(), []):
        used = {p for c in chosen for p in c.positions}
        rest = [v for v in range(t.n) if v not in used]
        if family == "clutter" and rest:
            continue
        options = _star_choices(t, bmask, rest)
        if options is None:
            continue
        for pick in product(*options):
            spec = FamilySpec(family, t.n, list(chosen) + list(pick))
            if not validate(spec) and assemble(spec) == t:
                return spec
    return None


def recognize(t: Tournament, family: str):
    """(ordering, spec) under which t is a member of `family`, or None.

    Orderings are searched depth first; a prefix whose backward arcs
    contain a cycle is abandoned, since every family here has a forest of
    backward arcs under its defining ordering.
    """
    if t.n > MAX_RECOGNIZE:
        raise ValueError(f"recognition supports n <= {MAX_RECOGNIZE}")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    n = t.n
    prefix = []

    def rec(used, comp):
        if len(prefix) == n:
            spec = decompose(t.reorder(prefix), family)
            return (tuple(prefix), spec) if spec is not None else None
        for v in range(n):
            if (used >> v) & 1:
                continue
            # earlier vertices beaten by v are its backward neighbours
            roots = {comp[u] for u in iter_bits(t.out[v] & used)}
            if len(roots) < popcount(t.out[v] & used):
                continue
            new = list(comp)
            new[v] = v
            for u in range(n):
                if (used >> u) & 1 and new[u] in roots:
                    new[u] = v
            prefix.append(v)
            found = rec(used | (1 << v), new)
            prefix.pop()
            if found:
                return found
        return None

    return rec(0, list(range(n)))


def random_asterism(seed: int, max_betas: int = 3, max_n: int = 30, attempts: int = 1000) -> FamilySpec:
    """A valid regular asterism with 1..max_betas beta-asteroids and random stars.

    Beta-asteroid blocks and star vertices are shuffled together, so stars
    may interleave with each other; layouts failing validation are redrawn.
    """
    rng = SplitMix64(seed)
    for _ in range(attempts):
        betas = [BETA_KINDS[rng.below(4)] for _ in range(1 + rng.below(max_betas))]
        room = max_n - 7 * len(betas)
        stars = []
        while room >= 2 and rng.below(3):
            size = 2 + rng.below(min(room, 5) - 1)
            stars.append((("left", "right")[rng.below(2)], size))
            room -= size
        tokens = [("beta", i, part) for i in range(len(betas)) for part in (0, 1)]
        tokens += [("star", i, k) for i, (_, size) in enumerate(stars) for k in range(size)]
        rng.shuffle(tokens)
        beta_pos = {i: [] for i in range(len(betas))}
        star_pos = {i: [] for i in range(len(stars))}
        p = 0
        for kind, i, _ in tokens:
            if kind == "star":
                star_pos[i].append(p)
                p += 1
                continue
            first = not beta_pos[i]
            left = beta_side(betas[i]) == "left"
            width = (5 if left else 2) if first else (2 if left else 5)
            beta_pos[i].extend(range(p, p + width))
            p += width
        comps = [Component("beta", tuple(beta_pos[i]), {"kind": k}) for i, k in enumerate(betas)]
        comps += [Component("star", tuple(star_pos[i]), {"side": side}) for i, (side, _) in enumerate(stars)]
        spec = FamilySpec("asterism", p, comps)
        if not validate(spec):
            return spec
    raise RuntimeError("no valid asterism drawn")
