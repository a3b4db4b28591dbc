import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import h2_by_sympy
from tga import cech
from tga.errors import PreconditionError, SchemaError, UnsupportedError

SPACES = {
    "circle": cech.circle_complex,
    "sphere": cech.sphere_complex,
    "torus": cech.torus_complex,
    "rp2": cech.projective_plane_complex,
}


def test_coboundary_squares_to_zero():
    for make in SPACES.values():
        d0, d1 = cech.coboundary_matrices(make())
        from tga.snf import matmul

        assert all(x == 0 for row in matmul(d1, d0) for x in row)


@pytest.mark.parametrize("name,expected", [("circle", "trivial"), ("sphere", "Z"), ("torus", "Z"), ("rp2", "Z/2")])
def test_cohomology_groups(name, expected):
    space = SPACES[name]()
    group = cech.cohomology_group(space)
    assert str(group) == expected
    assert (group.rank, list(group.torsion)) == h2_by_sympy(space)


def test_space_validation():
    with pytest.raises(SchemaError, match="missing faces"):
        cech.SimplicialSpace.build([0, 1, 2], [(0, 1)], [(0, 1, 2)])
    with pytest.raises(SchemaError):
        cech.SimplicialSpace.from_json({"vertices": [0], "simplices": {"3": []}})
    s = cech.sphere_complex()
    assert cech.SimplicialSpace.from_json(s.to_json()) == s


def test_hand_built_violation():
    cover = cech.discrete_cover({"a": [0], "b": [0], "c": [0]})
    S = cech.make_cocycle(cover, {("a", "b"): Fraction(1, 4), ("b", "c"): Fraction(1, 4), ("a", "c"): Fraction(1, 10)})
    res = cech.check_cocycle(cover, S)
    assert not res.ok
    assert [(v.triple, v.defect) for v in res.violations] == [(("a", "b", "c"), Fraction(2, 5))]


def test_zero_cocycle_and_antisymmetry():
    cover = cech.star_cover(cech.sphere_complex())
    zero = cech.make_cocycle(cover, {p: 0 for p in cover.pair_components})
    assert cech.check_cocycle(cover, zero).ok
    assert all(v == 0 for v in cech.integer_class(cover, zero).values())
    S = cech.make_cocycle(cover, {(1, 0) if p == (0, 1) else p: Fraction(1, 3) for p in cover.pair_components})
    assert S.value(0, 1, (0, 1)) == Fraction(-1, 3)
    assert S.value(1, 0, (0, 1)) == Fraction(1, 3)


def test_shape_errors():
    cover = cech.star_cover(cech.sphere_complex())
    with pytest.raises(SchemaError, match="missing"):
        cech.make_cocycle(cover, {(0, 1): 0})
    with pytest.raises(SchemaError, match="diagonal"):
        cech.make_cocycle(cover, {(0, 0): 0})
    with pytest.raises(SchemaError):
        cech.make_cocycle(cover, {**{p: 0 for p in cover.pair_components}, (0, 1): {(0, 1): 0}})


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["circle", "sphere", "torus", "rp2"]), st.integers(0, 10_000))
def test_coboundaries_are_cocycles_of_class_zero(name, seed):
    space = SPACES[name]()
    cover = cech.star_cover(space)
    r = random.Random(seed)
    S = cech.coboundary(cover, cech.random_zero_cochain(cover, r, constant=r.random() < 0.5))
    assert cech.check_cocycle(cover, S).ok
    n = cech.integer_class(cover, S)
    assert all(v == 0 for v in n.values())
    assert cech.classify_cocycle(space, cover, S).is_zero
    t = cech.trivialize(cover, S)
    assert t.ok and cech.is_trivialization(cover, S, t.b)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["sphere", "torus", "rp2"]), st.integers(0, 10_000))
def test_integer_class_is_a_cocycle_and_classes_add(name, seed):
    space = SPACES[name]()
    cover = cech.star_cover(space)
    r = random.Random(seed)
    S, T = cech.random_cocycle(cover, r), cech.random_cocycle(cover, r)
    n = cech.integer_class(cover, S)
    assert all(v == 0 for v in cech.integer_coboundary_defect(cover, n).values())
    cs, ct = cech.classify_cocycle(space, cover, S), cech.classify_cocycle(space, cover, T)
    assert cech.classify_cocycle(space, cover, S + T) == cs + ct


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["circle", "sphere", "torus", "rp2"]), st.integers(0, 10_000))
def test_trivialize_succeeds_exactly_on_class_zero(name, seed):
    space = SPACES[name]()
    cover = cech.star_cover(space)
    r = random.Random(seed)
    if space.triangles and r.random() < 0.5:
        n = {(t, t): r.randint(-2, 2) for t in space.triangles}
        S = cech.random_cocycle(cover, r, n)
    else:
        S = cech.random_cocycle(cover, r)
    cls = cech.classify_cocycle(space, cover, S)
    t = cech.trivialize(cover, S)
    assert t.ok == cls.is_zero
    if t.ok:
        assert cech.is_trivialization(cover, S, t.b)
    else:
        assert t.certificate == cls


def test_prescribed_class_is_realized():
    space = cech.sphere_complex()
    cover = cech.star_cover(space)
    n = {(t, t): 0 for t in space.triangles}
    n[((1, 2, 3), (1, 2, 3))] = 1
    S = cech.random_cocycle(cover, random.Random(1), n)
    assert cech.integer_class(cover, S) == n
    assert cech.classify_cocycle(space, cover, S).free == (1,)


def test_outward_orientation_fixes_the_sign():
    # The outward boundary of [0123] is [123] - [023] + [013] - [012].
    assert cech.fundamental_cycles(cech.sphere_complex()) == [[-1, 1, -1, 1]]


def test_generator_from_json_file_shape():
    space = cech.sphere_complex()
    doc = {
        "cover": "star",
        "theta": {
            "0,1": "0", "0,2": "0", "0,3": "0", "1,2": "0", "1,3": "0",
            "2,3": {"2,3": "0", "0,2,3": "0", "1,2,3": "1"},
        },
    }
    cover, S = cech.cocycle_from_json(doc, space)
    assert cech.classify_cocycle(space, cover, S).free == (1,)
    assert not cech.trivialize(cover, S).ok


def test_json_errors_carry_paths():
    space = cech.sphere_complex()
    with pytest.raises(SchemaError, match=r"theta\['0,9'\]"):
        cech.cocycle_from_json({"cover": "star", "theta": {"0,9": "0"}}, space)
    with pytest.raises(SchemaError, match="p/q"):
        cech.cocycle_from_json({"cover": "star", "theta": {"0,1": "x"}}, space)
    with pytest.raises(SchemaError, match="unknown keys"):
        cech.cocycle_from_json({"cover": "star", "extra": 1}, space)


def test_band_cover_routes_to_bundle_module():
    cover = cech.band_cover(0)
    S = cech.make_cocycle(cover, {}, {("L", "U"): 1})
    assert cech.check_cocycle(cover, S).ok
    with pytest.raises(UnsupportedError, match="bundle"):
        cech.integer_class(cover, S)
    with pytest.raises(UnsupportedError):
        cech.classify_cocycle(cech.sphere_complex(), cover, S)


def test_integer_class_rejects_non_cocycle():
    cover = cech.discrete_cover({"a": [0], "b": [0], "c": [0]})
    S = cech.make_cocycle(cover, {("a", "b"): Fraction(1, 3), ("b", "c"): 0, ("a", "c"): 0})
    with pytest.raises(PreconditionError):
        cech.integer_class(cover, S)


def test_discrete_cover_always_trivializes():
    cover = cech.discrete_cover({"a": [0, 1, 2], "b": [1, 2], "c": [2, 3]})
    r = random.Random(0)
    for _ in range(20):
        S = cech.random_cocycle(cover, r)
        t = cech.trivialize(cover, S)
        assert t.ok and cech.is_trivialization(cover, S, t.b)
