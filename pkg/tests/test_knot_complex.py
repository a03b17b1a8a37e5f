import pytest

from hfgeo.errors import BadSteps, FlipUndefined, NotNested, NotSouthWest
from hfgeo.knot_complex import (
    INF,
    Difference,
    FlipSpec,
    Generator,
    KnotComplex,
    SouthWest,
    a_complex,
    b_complex,
    box,
    box_pair,
    build_model,
    corpus,
    direct_sum,
    edge_maps,
    figure_eight,
    grading_shift,
    region_complex,
    staircase,
    torus_2,
    unknot,
    validate_knot_complex,
)
from hfgeo.oracle import truncated_field_homology
from hfgeo.ualgebra import ModuleDecomp, check_chain_map, homology_decomp


def test_unknot_passes():
    r = validate_knot_complex(unknot())
    assert r.ok and not r.failed
    assert unknot().rank == 1


@pytest.mark.parametrize("name", sorted(corpus()))
def test_corpus_models_validate(name):
    r = validate_knot_complex(corpus()[name])
    assert r.ok, r.failed


def test_trefoil_has_three_generators():
    k = staircase([1, 1])
    assert k.rank == 3 and k.genus_bound == 1


def test_staircase_gradings():
    # T(2,3): generators at alexander 1, 0, -1 with maslov 0, -1, -2
    k = torus_2(3)
    assert sorted((g.alexander, int(g.maslov)) for g in k.generators) == [(-1, -2), (0, -1), (1, 0)]


def test_staircase_rejects_asymmetric_or_bad_steps():
    with pytest.raises(BadSteps):
        staircase([1, 2])
    with pytest.raises(BadSteps):
        staircase([0, 0])


def test_figure_eight_shape():
    k = figure_eight()
    assert k.rank == 5
    assert validate_knot_complex(k).ok
    assert homology_decomp(region_complex(k, SouthWest.half_plane_j(0))) == ModuleDecomp(1)


def test_filtration_violation_detected():
    gens = (Generator("x", 0, 0), Generator("y", -1, 2))
    k = KnotComplex(gens, (("x", "y", 0),))
    r = validate_knot_complex(k)
    assert [c.name for c in r.failed] == ["filtration"]


def test_maslov_violation_detected():
    gens = (Generator("x", 0, 0), Generator("y", 0, 0))
    k = KnotComplex(gens, (("x", "y", 0),))
    assert "maslov_drop" in [c.name for c in validate_knot_complex(k).failed]


def test_d_squared_violation_detected():
    gens = (Generator("x", 0, 0), Generator("y", -1, 0), Generator("z", -2, 0))
    k = KnotComplex(gens, (("x", "y", 0), ("y", "z", 0)))
    r = validate_knot_complex(k)
    assert r.failed[0].name == "d_squared_zero"
    assert all(c.status == "skip" for c in r.checks[1:])


def test_homology_axiom_violation_detected():
    k = KnotComplex((Generator("x", 1, 0),), ())
    assert [c.name for c in validate_knot_complex(k).failed] == ["homology_axiom"]


def test_bad_flip_detected():
    k = torus_2(3).with_flip(FlipSpec(pairs=(("x0", "x0"), ("x1", "x1"), ("x2", "x2"))))
    assert "flip" in [c.name for c in validate_knot_complex(k).failed]


def test_unknot_region():
    c = region_complex(unknot(), SouthWest.half_plane_j(0))
    assert c.rank == 1 and homology_decomp(c) == ModuleDecomp(1)


def test_trefoil_line_region_is_killed_by_u():
    # {j = 0, i < 0}: the j <= 0, i <= -1 quadrant minus the j <= -1 one
    k = torus_2(3)
    diff = Difference(SouthWest.quadrant(-1, 0), SouthWest.quadrant(-1, -1))
    h = homology_decomp(region_complex(k, diff))
    assert h.free_rank == 0 and all(t == 1 for t in h.torsion)
    assert h == truncated_field_homology(region_complex(k, diff))


def test_empty_difference_is_acyclic():
    s = SouthWest.quadrant(0, 0)
    for k in corpus().values():
        assert homology_decomp(region_complex(k, Difference(s, s))) == ModuleDecomp(0)


def test_difference_requires_nesting():
    with pytest.raises(NotNested):
        Difference(SouthWest.quadrant(0, 0), SouthWest.quadrant(1, 0))


def test_region_shape_errors():
    with pytest.raises(NotSouthWest):
        SouthWest(((INF, INF),))
    with pytest.raises(NotSouthWest):
        SouthWest.from_points([(0, 0), (1, 1)], window=3)
    sw = SouthWest.from_points([(i, j) for i in range(-3, 1) for j in range(-3, 1)], window=3)
    assert sw.contains(0, 0) and not sw.contains(1, 0)


def test_region_algebra():
    a, b = SouthWest.quadrant(0, 2), SouthWest.quadrant(2, 0)
    assert a.union(b).includes(a) and a.union(b).includes(b)
    assert a.includes(a.intersect(b))
    assert not a.includes(b)


@pytest.mark.parametrize("s", range(-3, 4))
def test_unknot_a_complex(s):
    assert homology_decomp(a_complex(unknot(), s)) == ModuleDecomp(1)


def test_trefoil_a_complexes():
    k = torus_2(3)
    for s in (1, 2, 5):
        assert homology_decomp(a_complex(k, s)) == ModuleDecomp(1)
        assert homology_decomp(a_complex(k, s)) == homology_decomp(b_complex(k))
    assert homology_decomp(a_complex(k, 0)) == ModuleDecomp(1)


def test_a_complexes_match_oracle_on_corpus():
    for k in corpus().values():
        for s in range(-k.genus_bound - 1, k.genus_bound + 2):
            c = a_complex(k, s)
            assert homology_decomp(c) == truncated_field_homology(c)


def test_unknot_edge_maps_are_identity():
    e = edge_maps(unknot(), 0, check=True)
    assert dict(e.v.entries) == {(0, 0): 0} and dict(e.h.entries) == {(0, 0): 0}


@pytest.mark.parametrize("name", sorted(corpus()))
def test_edge_maps_are_chain_maps(name):
    k = corpus()[name]
    for s in range(-k.genus_bound - 1, k.genus_bound + 2):
        e = edge_maps(k, s)
        check_chain_map(e.v, e.a, e.b)
        check_chain_map(e.h, e.a, e.b)


def test_mirror_is_valid_and_involutive():
    for k in corpus().values():
        m = k.mirror()
        assert validate_knot_complex(m).ok
        mm = m.mirror()
        assert mm.generators == k.generators and set(mm.arrows) == set(k.arrows)


def test_boxes():
    # a box alone is acyclic, so it only becomes a knot complex next to a staircase
    assert [c.name for c in validate_knot_complex(box(2)).failed] == ["homology_axiom"]
    assert validate_knot_complex(direct_sum([unknot(), box(2)])).ok
    assert validate_knot_complex(direct_sum([torus_2(3), box_pair(1, 0, 2)])).ok
    assert homology_decomp(b_complex(box(2))) == ModuleDecomp(0)
    with pytest.raises(BadSteps):
        box(0)


def test_off_diagonal_box_has_no_flip():
    with pytest.raises(FlipUndefined):
        _ = box(1, 0, 1).flip_matrix


def test_build_model_and_shift():
    k = build_model("staircase", [1, 1])
    assert k.generators == torus_2(3).generators
    shifted = grading_shift(k, maslov=2)
    assert all(a.maslov + 2 == b.maslov for a, b in zip(k.generators, shifted.generators))
    with pytest.raises(ValueError):
        build_model("pretzel")
