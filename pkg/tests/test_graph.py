import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import G
from oracles import entrance_free_base_sets, path_count_by_matrix_power, random_graph
from tga.errors import PreconditionError, SchemaError, UnsupportedError
from tga.graph import (
    DiscreteGraph,
    adjacency_counts,
    all_small_graphs,
    classify_vertices,
    cycles_without_entrances,
    graph_surgery,
    is_non_returning,
    is_topologically_free,
    path_space,
)


def test_classification_examples(loop, edge_uv):
    c = classify_vertices(G(["v"], []))
    assert (c.sce, c.fin, c.rg, c.sg) == ({"v"}, {"v"}, set(), {"v"})
    c = classify_vertices(loop)
    assert (c.sce, c.rg, c.sg) == (set(), {"v"}, set())
    c = classify_vertices(edge_uv)
    assert (c.sce, c.rg, c.sg) == ({"u"}, {"v"}, {"u"})


def test_flagged_vertex_is_singular_but_not_a_source():
    c = classify_vertices(G(["v"], [], receivers=["v"]))
    assert c.sce == set() and c.fin == set() and c.sg == {"v"}


def test_validation_lists_offenders():
    with pytest.raises(SchemaError, match="e9"):
        G(["u"], [("e9", "u", "w")])
    with pytest.raises(SchemaError, match="duplicate edge ids"):
        G(["u"], [("e", "u", "u"), ("e", "u", "u")])
    with pytest.raises(SchemaError):
        DiscreteGraph.from_json({"vertices": ["u"], "bogus": 1})


def test_json_round_trip_keeps_families():
    g = G(["u", "v"], [("l", "v", "v")], [("u", "v")], ["u"])
    again = DiscreteGraph.from_json(g.to_json())
    assert again == g
    assert again.infinite_receivers == {"u", "v"}


def test_path_space_examples(loop, o2, edge_uv):
    assert path_space(loop, 3).paths == (("l", "l", "l"),)
    assert sorted(path_space(o2, 2).paths) == [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    assert path_space(edge_uv, 2).paths == ()
    assert path_space(o2, 1).paths == (("a",), ("b",))
    with pytest.raises(PreconditionError):
        path_space(o2, 0)
    with pytest.raises(UnsupportedError):
        path_space(G(["v"], [], receivers=["v"]), 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 2))
def test_path_count_composes_like_matrix_powers(seed, n, m):
    g = random_graph(random.Random(seed), 4, 7, family_prob=0)
    P, Q, R = path_space(g, n), path_space(g, m), path_space(g, n + m)
    by_s = {v: sum(1 for p in P.paths if P.s(p) == v) for v in g.vertices}
    by_r = {v: sum(1 for q in Q.paths if Q.r(q) == v) for v in g.vertices}
    assert len(R.paths) == sum(by_s[v] * by_r[v] for v in g.vertices)
    assert len(R.paths) == path_count_by_matrix_power(g, n + m)
    for p in R.paths:
        assert all(g.s(p[i]) == g.r(p[i + 1]) for i in range(len(p) - 1))


def test_adjacency_orientation(edge_uv):
    assert adjacency_counts(edge_uv) == [[0, 0], [1, 0]]


def test_cycle_examples(loop, o2):
    assert [c.edges for c in cycles_without_entrances(loop)] == [("l",)]
    assert cycles_without_entrances(o2) == []
    exit_graph = G(["u", "v"], [("l", "u", "u"), ("e", "u", "v")])
    assert [c.edges for c in cycles_without_entrances(exit_graph)] == [("l",)]
    assert is_topologically_free(o2) == (True, [])
    free, wit = is_topologically_free(loop)
    assert not free and wit[0].edges == ("l",)
    assert is_topologically_free(G(["u", "v"], [("e", "u", "v")]))[0]


def test_flag_on_cycle_is_an_entrance():
    assert cycles_without_entrances(G(["v"], [("l", "v", "v")], receivers=["v"])) == []


def test_cycle_is_rotated_to_smallest_edge_and_closed():
    g = G([0, 1, 2], [("c", 0, 1), ("a", 1, 2), ("b", 2, 0)])
    (c,) = cycles_without_entrances(g)
    assert c.edges[0] == "a"
    assert g.r(c.edges[0]) == g.s(c.edges[-1])
    assert c.base_points == {0, 1, 2} and not c.has_entrance


def test_cycles_match_networkx_on_exhaustive_corpus():
    for g in all_small_graphs(3, 4, flags=True):
        mine = {c.base_points for c in cycles_without_entrances(g)}
        assert mine == entrance_free_base_sets(g), g
        assert (not mine) == is_topologically_free(g)[0]


def test_surgery_examples(loop):
    g0 = graph_surgery(loop, [])
    assert g0.vertices == (("v", 0),) and [e.id for e in g0.edges] == [("l", 0)]
    g1 = graph_surgery(loop, ["v"])
    assert set(g1.vertices) == {("v", 0), ("v", 1)}
    assert {(e.id, e.src, e.rng) for e in g1.edges} == {(("l", 0), ("v", 0), ("v", 0)), (("l", 1), ("v", 1), ("v", 0))}
    with pytest.raises(PreconditionError, match="offending"):
        graph_surgery(G(["u", "v"], [("e", "u", "v")]), ["u"])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_surgery_cardinalities_and_regular_set(seed):
    r = random.Random(seed)
    g = random_graph(r, 5, 8)
    rg = sorted(classify_vertices(g).rg)
    Y = [v for v in rg if r.random() < 0.5]
    h = graph_surgery(g, Y)
    assert len(h.vertices) == len(g.vertices) + len(Y)
    assert len(h.edges) == len(g.edges) + sum(1 for e in g.edges if e.src in Y)
    assert classify_vertices(h).rg == {(v, 0) for v in rg}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000))
def test_partition_and_regular_receivers(seed):
    g = random_graph(random.Random(seed))
    c = classify_vertices(g)
    assert c.rg | c.sg == set(g.vertices) and not (c.rg & c.sg)
    assert c.rg <= c.fin and not (c.rg & c.sce)
    for v in c.rg:
        assert 1 <= len(g.incoming(v)) and v not in g.infinite_receivers


def test_non_returning_examples():
    assert is_non_returning([("a", "b")])
    assert not is_non_returning([("a", "a")])
    assert is_non_returning([("a", "b"), ("c", "b")])
    assert not is_non_returning([("a", "b"), ("b", "c")])
    with pytest.raises(PreconditionError):
        is_non_returning([("a", "b"), ("a",)])


def test_restrict_requires_forward_closure(edge_uv):
    with pytest.raises(PreconditionError):
        edge_uv.restrict(["u"])
    assert edge_uv.restrict(["v"]).edges == ()
