import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import G
from oracles import naive_admissible_pairs, random_graph
from tga.errors import PreconditionError
from tga.graph import classify_vertices
from tga.ideals import (
    admissible_pairs,
    hereditary_saturated_oracle,
    ideal_report,
    invariant_sets,
    is_invariant,
)


def sets(*xs):
    return [frozenset(x) for x in xs]


def test_invariance_examples(edge_uv):
    assert is_invariant(edge_uv, set())[0] and is_invariant(edge_uv, {"u", "v"})[0]
    ok, why = is_invariant(edge_uv, {"v"})
    assert not ok and "receives no edge" in why
    ok, why = is_invariant(edge_uv, {"u"})
    assert not ok and "leaves" in why


def test_invariant_set_examples(loop, edge_uv):
    assert invariant_sets(loop) == sets((), ("v",))
    assert invariant_sets(edge_uv) == sets((), ("u", "v"))
    g = G(["u", "v"], [("e", "u", "v"), ("l", "v", "v")])
    assert invariant_sets(g) == sets((), ("v",), ("u", "v"))


def test_pair_examples(loop, edge_uv):
    assert [(p.F0, p.Z) for p in admissible_pairs(loop)] == [(frozenset(), frozenset()), (frozenset({"v"}), frozenset())]
    assert [(p.F0, p.Z) for p in admissible_pairs(edge_uv)] == [
        (frozenset(), frozenset()),
        (frozenset({"u", "v"}), frozenset({"u"})),
    ]


def test_infinite_family_example_has_four_pairs():
    g = G(["u", "v"], [("l", "v", "v")], [("u", "v")])
    got = {(tuple(sorted(p.F0)), tuple(sorted(p.Z))) for p in admissible_pairs(g)}
    assert got == {((), ()), (("v",), ()), (("v",), ("v",)), (("u", "v"), ("u", "v"))}
    assert ideal_report(g)["ideal_count"] == 4


def test_oracle_examples(loop, edge_uv):
    assert hereditary_saturated_oracle(loop) == invariant_sets(loop)
    assert hereditary_saturated_oracle(edge_uv) == sets((), ("u", "v"))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_agreement_with_independent_oracles(seed):
    g = random_graph(random.Random(seed))
    inv = invariant_sets(g)
    assert inv == hereditary_saturated_oracle(g)
    pairs = admissible_pairs(g)
    assert {(p.F0, p.Z) for p in pairs} == naive_admissible_pairs(g)
    V = frozenset(g.vertices)
    sg = classify_vertices(g).sg
    assert pairs[0].F0 == frozenset() and pairs[0].Z == frozenset()
    assert [p.Z for p in pairs if p.F0 == V] == [sg]


def test_size_guard():
    g = G(range(21), [])
    with pytest.raises(PreconditionError, match="guard"):
        invariant_sets(g)
    assert len(invariant_sets(G(range(3), []), max_vertices=3)) == 8


def test_monotone_property_is_false_as_stated():
    # Adding an edge can create invariant sets: {v} is not invariant for u -> v,
    # but it is once v also receives a loop.
    before = G(["u", "v"], [("e", "u", "v")])
    after = G(["u", "v"], [("e", "u", "v"), ("l", "v", "v")])
    assert frozenset({"v"}) not in invariant_sets(before)
    assert frozenset({"v"}) in invariant_sets(after)
