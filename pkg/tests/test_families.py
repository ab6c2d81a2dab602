import pytest
from hypothesis import given, settings, strategies as st

from ehclab.core import Tournament, backward_arcs, contains, tr
from ehclab.families import (BETA_KINDS, Component, FamilyError, FamilySpec, SpiderSpec,
                             StarSpec, assemble, build_asteroid, build_beta_asteroid,
                             build_family, build_galaxy, build_spider, build_star,
                             contracting_graph, layout_of, merge, partition_blocks,
                             random_asterism, recognize, spider_backward, spider_roles,
                             validate, validate_ordering)


def one_based(arcs):
    return {(u + 1, v + 1) for u, v in arcs}


def star(positions, side, **extra):
    return Component("star", tuple(positions), {"side": side, **extra})


def beta(positions, kind="left-beta1"):
    return Component("beta", tuple(positions), {"kind": kind})


def spider(positions, **params):
    return Component("spider", tuple(positions), params)


# ---------------------------------------------------------------- stars

def test_right_star():
    t, order = build_star(StarSpec("right", 3))
    assert one_based(backward_arcs(t, order)) == {(3, 1), (3, 2)}


def test_left_star_two_vertices():
    t, order = build_star(StarSpec("left", 2))
    assert one_based(backward_arcs(t, order)) == {(2, 1)}
    # a two-vertex star is also a right star of the same tournament
    assert build_star(StarSpec("right", 2))[0] == t


def test_middle_star():
    t, order = build_star(StarSpec("middle", 4, 2))
    assert one_based(backward_arcs(t, order)) == {(3, 2), (4, 2), (2, 1)}


@pytest.mark.parametrize("spec", [StarSpec("middle", 4, 1), StarSpec("middle", 4, 4),
                                  StarSpec("left", 1), StarSpec("up", 3)])
def test_invalid_stars(spec):
    with pytest.raises(ValueError):
        build_star(spec)


# ---------------------------------------------------------------- asteroid and beta-asteroids

def test_asteroid():
    a, order = build_asteroid()
    assert len(a.arcs()) == 10
    assert one_based(backward_arcs(a, order)) == {(4, 1), (5, 3), (5, 4)}
    assert tr(a)[0] == 4


@pytest.mark.parametrize("kind", BETA_KINDS)
def test_beta_restricts_to_asteroid(kind):
    t, _ = build_beta_asteroid(kind)
    a, _ = build_asteroid()
    assert t.induced(range(5)) == a


@pytest.mark.parametrize("kind", BETA_KINDS)
def test_beta_backward_graph_is_forest(kind):
    t, order = build_beta_asteroid(kind)
    edges = [tuple(sorted(e)) for e in backward_arcs(t, order)]
    # 7 vertices, a forest has at most 6 edges and no cycle
    parent = list(range(7))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for u, v in edges:
        assert find(u) != find(v)
        parent[find(u)] = find(v)


def test_beta_prose_arcs():
    # left beta1: 2 -> 6, 7 -> 6, 7 -> 5 (labels 1-based, vertex ids 0-based)
    t, _ = build_beta_asteroid("left-beta1")
    assert t.has_arc(1, 5) and t.has_arc(6, 5) and t.has_arc(6, 4)
    t, _ = build_beta_asteroid("right-beta1")
    # right beta1: 6 adjacent to 3 and 7
    assert t.has_arc(5, 2) and t.has_arc(5, 6)


# The label-order examples below assume the unmentioned pairs of a
# beta-asteroid are forward under the label order 1..7.  The builders make
# them forward under the forest ordering instead (see the notes in README),
# so these values are not reproduced.
@pytest.mark.xfail(strict=True, reason="label-order backward arcs differ from the forest-ordering build")
def test_left_beta1_label_order_backward_arcs():
    t, _ = build_beta_asteroid("left-beta1")
    assert one_based(backward_arcs(t, range(7))) == {(4, 1), (5, 3), (5, 4), (7, 5), (7, 6)}


@pytest.mark.xfail(strict=True, reason="label-order backward arcs differ from the forest-ordering build")
def test_left_beta2_label_order_backward_arcs():
    t, _ = build_beta_asteroid("left-beta2")
    assert one_based(backward_arcs(t, range(7))) == {(4, 1), (5, 3), (5, 4), (7, 6)}


# ---------------------------------------------------------------- spiders

def test_middle_spider():
    sp = SpiderSpec("middle", left_legs=1, right_legs=1)
    t, order, roles = build_spider(sp)
    assert one_based(backward_arcs(t, order)) == {(5, 2), (6, 3), (2, 1), (7, 6)}
    assert spider_roles(sp)["petals"] == [3, 4, 5]
    assert roles["petals"] == [2, 3, 4]


def test_right_spider():
    sp = SpiderSpec("right", legs=1, x1=(1,))
    t, order, _ = build_spider(sp)
    assert one_based(backward_arcs(t, order)) == {(6, 3), (5, 2), (6, 1)}


def test_petals_of_middle_spiders():
    for m in range(3):
        sp = SpiderSpec("middle", left_legs=m, right_legs=2)
        assert spider_roles(sp)["petals"] == [m + 2, m + 3, m + 4]


def test_left_spider_backward():
    sp = SpiderSpec("left", legs=2, x1=(6,))
    assert set(spider_backward(sp)) == {(4, 1), (5, 2), (6, 5), (7, 1)}


def test_spider_bad_partition():
    with pytest.raises(ValueError):
        build_spider(SpiderSpec("right", legs=2, x1=(7,)))


# ---------------------------------------------------------------- galaxies

def test_single_star_galaxy():
    spec = FamilySpec("galaxy", 3, [star([0, 1, 2], "right")])
    t, order = build_galaxy(spec)
    assert t == build_star(StarSpec("right", 3))[0]


def test_disjoint_stars_galaxy():
    spec = FamilySpec("galaxy", 5, [star([0, 1], "left"), star([2, 3, 4], "right")])
    t, order = build_galaxy(spec)
    assert validate_ordering(t, order, spec) == []
    assert one_based(backward_arcs(t, order)) == {(2, 1), (5, 3), (5, 4)}


def test_center_between_leaves_rejected():
    # left star on 0,2,4 has leaves 2 and 4; the right star on 1,3 has its center at 3
    spec = FamilySpec("galaxy", 5, [star([0, 2, 4], "left"), star([1, 3], "right")])
    problems = validate(spec)
    assert any("center 3" in p for p in problems)
    with pytest.raises(FamilyError):
        build_galaxy(spec)


def test_overlapping_and_uncovered_positions():
    assert validate(FamilySpec("galaxy", 3, [star([0, 1], "left"), star([1, 2], "left")]))
    assert validate(FamilySpec("galaxy", 3, [star([0, 1], "left")]))


def test_galaxy_with_middle_star_component():
    spec = FamilySpec("galaxy", 4, [star([0, 1, 2, 3], "middle", r=2)])
    t, order = build_family(spec)
    assert t == build_star(StarSpec("middle", 4, 2))[0]


# ---------------------------------------------------------------- asterisms

def test_single_beta_asterism():
    spec = FamilySpec("asterism", 7, [beta(range(7))])
    assert validate(spec) == []
    assert spec.regular


def test_beta_with_star_to_the_right():
    spec = FamilySpec("asterism", 10, [beta(range(7)), star([7, 8, 9], "right")])
    assert validate(spec) == []


def test_star_straddling_beta_rejected():
    spec = FamilySpec("asterism", 10, [star([0, 8, 9], "right"), beta(range(1, 8))])
    assert any("between leaves" in p for p in validate(spec))


def test_star_leaves_straddling_beta_vertex():
    spec = FamilySpec("asterism", 10, [star([0, 1, 9], "left"), beta(range(2, 9))])
    assert any("beta-asteroid vertex" in p for p in validate(spec))


def test_beta_blocks_must_be_consecutive():
    spec = FamilySpec("asterism", 9, [beta([0, 1, 2, 3, 5, 7, 8]), star([4, 6], "left")])
    assert any("not consecutive" in p for p in validate(spec))


def test_singleton_makes_asterism_irregular():
    spec = FamilySpec("asterism", 8, [beta(range(7)), Component("singleton", (7,))])
    assert validate(spec) == [] and not spec.regular


# ---------------------------------------------------------------- galaxies with spiders

def test_single_middle_spider_is_clutter():
    spec = FamilySpec("clutter", 7, [spider(range(7), side="middle", left_legs=1)])
    assert validate(spec) == []


def test_star_center_between_spider_legs_rejected():
    # middle spider with two left legs at 0 and 2, star center 1 between them
    comps = [spider([0, 2, 3, 4, 5, 6, 7], side="middle", left_legs=2), star([1, 8], "left")]
    spec = FamilySpec("galaxy_with_spiders", 9, comps)
    assert any("star center 1" in p for p in validate(spec))


def test_interleaved_spider_legs_with_star_center_rejected():
    # spider 0 right leg at 10; spider 1 left leg at 6 and 11; star center sits between centers
    comps = [
        spider([0, 1, 2, 3, 4, 10], side="middle", left_legs=0),
        star([5, 12], "left"),
        spider([6, 7, 8, 9, 11, 13], side="middle", left_legs=0),
    ]
    problems = validate(FamilySpec("galaxy_with_spiders", 14, comps))
    assert problems


def test_contracting_graph_disjoint_spans():
    comps = [spider(range(7), side="middle", left_legs=1), star([7, 8], "right")]
    spec = FamilySpec("galaxy_with_spiders", 9, comps)
    cg = contracting_graph(spec)
    assert cg.edges == []
    assert len(cg.components) == len(cg.nodes)


def test_contracting_graph_interleaving_edge():
    # star leaves 0 and 2 around the spider's left leg 1
    comps = [spider([1, 3, 4, 5, 6, 7], side="middle", left_legs=1), star([0, 2, 8], "right")]
    spec = FamilySpec("galaxy_with_spiders", 9, comps)
    cg = contracting_graph(spec)
    names = [d for d, _ in cg.nodes]
    legs = next(i for i, d in enumerate(names) if d.startswith("legs"))
    leaves = next(i for i, d in enumerate(names) if d.startswith("leaves"))
    assert (min(legs, leaves), max(legs, leaves)) in cg.edges


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_partition_excludes_centers(seed):
    spec = random_asterism(seed)
    lay = layout_of(spec)
    blocks = partition_blocks(spec)
    flat = [v for b in blocks for v in b]
    assert len(flat) == len(set(flat))
    centers = {c for c, _ in lay.stars}
    assert not centers & set(flat)


# ---------------------------------------------------------------- merging

def test_merge_with_empty_parts():
    ast = FamilySpec("asterism", 7, [beta(range(7))])
    empty = FamilySpec("galaxy_with_spiders", 0, [])
    t, order, spec = merge(ast, empty, "a" * 7)
    assert t == assemble(ast)
    gws = FamilySpec("galaxy_with_spiders", 7, [spider(range(7), side="middle", left_legs=1)])
    t, order, spec = merge(FamilySpec("asterism", 0, []), gws, "g" * 7)
    assert t == assemble(gws)


def test_merge_beta_between_same_center_legs_rejected():
    ast = FamilySpec("asterism", 7, [beta(range(7))])
    gws = FamilySpec("galaxy_with_spiders", 7, [spider(range(7), side="middle", left_legs=2)])
    # legs of the spider are its first two vertices; put beta vertices between them
    with pytest.raises(FamilyError) as err:
        merge(ast, gws, "g" + "a" * 7 + "g" * 6)
    assert any("between legs" in p for p in err.value.violations)


def test_merge_side_by_side():
    ast = FamilySpec("asterism", 7, [beta(range(7))])
    gws = FamilySpec("galaxy_with_spiders", 7, [spider(range(7), side="middle", left_legs=1)])
    t, order, spec = merge(ast, gws, "a" * 7 + "g" * 7)
    assert validate_ordering(t, order, spec) == []


# ---------------------------------------------------------------- specs and recognition

def test_spec_json_round_trip():
    spec = FamilySpec("asterism", 10, [beta(range(7)), star([7, 8, 9], "right")])
    again = FamilySpec.from_json(spec.to_json())
    assert again == spec
    assert again.to_json() == spec.to_json()
    with pytest.raises(ValueError):
        FamilySpec.from_json('{"family": "galaxy"}')


def test_builders_are_deterministic():
    spec = random_asterism(3)
    assert build_family(spec)[0].to_text() == build_family(spec)[0].to_text()


def test_recognize_beta_asteroid():
    t, order = build_beta_asteroid("left-beta1")
    found = recognize(t, "asterism")
    assert found is not None
    order2, spec = found
    assert validate_ordering(t, order2, spec) == []
    assert spec.of_kind("beta")


def test_recognize_three_cycle_as_galaxy():
    c3 = Tournament.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
    order, spec = recognize(c3, "galaxy")
    assert validate_ordering(c3, order, spec) == []
    kinds = sorted(c.kind for c in spec.components)
    assert kinds == ["singleton", "star"]
    assert len(spec.of_kind("star")[0].positions) == 2


def test_recognize_transitive_galaxy():
    t4 = Tournament.transitive(4)
    order, spec = recognize(t4, "galaxy")
    assert [c.kind for c in spec.components] == ["singleton"] * 4
    assert backward_arcs(t4, order) == []


def test_recognize_absent_and_bounds():
    # the asteroid is not an asterism on its own (it needs two extra vertices)
    a, _ = build_asteroid()
    assert recognize(a, "asterism") is None or recognize(a, "asterism")[1].of_kind("beta") == []
    with pytest.raises(ValueError):
        recognize(Tournament.transitive(10), "galaxy")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_random_asterisms_are_valid(seed):
    spec = random_asterism(seed, max_n=30)
    assert validate(spec) == [] and spec.regular and spec.n <= 30
    assert 1 <= len(spec.of_kind("beta")) <= 3


def test_every_built_spider_is_recognized():
    for sp in [SpiderSpec("middle", left_legs=1, right_legs=1), SpiderSpec("left", legs=1, x1=(6,)),
               SpiderSpec("right", legs=2, x1=(2,))]:
        t, _, _ = build_spider(sp)
        found = recognize(t, "galaxy_with_spiders")
        assert found is not None
        assert validate_ordering(t, *found) == []


def test_beta_contains_asteroid():
    a, _ = build_asteroid()
    for kind in BETA_KINDS:
        assert contains(build_beta_asteroid(kind)[0], a) is not None
