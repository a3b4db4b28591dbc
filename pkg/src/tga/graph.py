"""Discrete topological graphs: vertex classes, path spaces, cycles, surgery.

Every edge ``e`` runs from ``src`` (the source map ``s``) to ``rng`` (the
range map ``r``). Paths compose right to left: ``(e1, ..., en)`` is a path
when ``s(e_i) == r(e_{i+1})``, so ``r^n`` reads the first edge and ``s^n``
the last.

An infinite receiver is modelled by an *infinite family*: a formal, never
materialized, infinite set of parallel edges from ``src`` to ``rng``. A bare
receiver flag is a family whose source is the receiver itself.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import PreconditionError, SchemaError, UnsupportedError

Vertex = Hashable
EdgeId = Hashable


@dataclass(frozen=True, order=True)
class Edge:
    id: EdgeId
    src: Vertex
    rng: Vertex


@dataclass(frozen=True)
class DiscreteGraph:
    """Finite vertex and edge sets plus optional infinite families.

    Construct through :meth:`build`, which sorts and validates; all lists on
    the instance are in canonical (sorted) order.
    """

    vertices: tuple
    edges: tuple[Edge, ...]
    infinite_families: tuple[tuple, ...] = ()
    _by_id: Mapping = field(default=None, compare=False, repr=False, hash=False)

    @classmethod
    def build(
        cls,
        vertices: Iterable[Vertex],
        edges: Iterable,
        infinite_families: Iterable = (),
        infinite_receivers: Iterable[Vertex] = (),
    ) -> "DiscreteGraph":
        """Validate and normalize.

        ``edges`` items are :class:`Edge` or ``(id, src, rng)`` triples.
        ``infinite_receivers`` are bare flags, stored as self-sourced families.
        """
        verts = list(vertices)
        vset = set(verts)
        problems = []
        if len(vset) != len(verts):
            dup = sorted(v for v, c in Counter(verts).items() if c > 1)
            problems.append(f"duplicate vertices {dup}")
        es = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        counts = Counter(e.id for e in es)
        dup_ids = sorted(i for i, c in counts.items() if c > 1)
        if dup_ids:
            problems.append(f"duplicate edge ids {dup_ids}")
        bad = [e.id for e in es if e.src not in vset or e.rng not in vset]
        if bad:
            problems.append(f"edges with undeclared endpoints {sorted(bad)}")
        fams = {tuple(f) for f in infinite_families}
        fams |= {(v, v) for v in infinite_receivers}
        badf = sorted(f for f in fams if f[0] not in vset or f[1] not in vset)
        if badf:
            problems.append(f"infinite families with undeclared endpoints {badf}")
        if problems:
            raise SchemaError("; ".join(problems), path="graph")
        es.sort(key=lambda e: e.id)
        return cls(tuple(sorted(verts)), tuple(es), tuple(sorted(fams)), {e.id: e for e in es})

    def edge(self, eid: EdgeId) -> Edge:
        return self._by_id[eid]

    def s(self, eid: EdgeId) -> Vertex:
        return self._by_id[eid].src

    def r(self, eid: EdgeId) -> Vertex:
        return self._by_id[eid].rng

    @property
    def edge_ids(self) -> tuple:
        return tuple(e.id for e in self.edges)

    @property
    def infinite_receivers(self) -> frozenset:
        return frozenset(rng for _, rng in self.infinite_families)

    @property
    def is_finite_tier(self) -> bool:
        return not self.infinite_families

    def incoming(self, v: Vertex) -> list[EdgeId]:
        return [e.id for e in self.edges if e.rng == v]

    def outgoing(self, v: Vertex) -> list[EdgeId]:
        return [e.id for e in self.edges if e.src == v]

    def source_fibers(self) -> dict:
        """``v -> [e : s(e) = v]`` for every vertex, in edge order."""
        fib = {v: [] for v in self.vertices}
        for e in self.edges:
            fib[e.src].append(e.id)
        return fib

    def restrict(self, F0: Iterable[Vertex]) -> "DiscreteGraph":
        """The graph ``(F0, s^{-1}(F0), r, s)``; infinite families survive iff sourced in ``F0``."""
        F = set(F0)
        leaving = sorted(e.id for e in self.edges if e.src in F and e.rng not in F)
        leaving += sorted(f for f in self.infinite_families if f[0] in F and f[1] not in F)
        if leaving:
            raise PreconditionError(f"r does not map s^-1(F0) into F0: {leaving}")
        return DiscreteGraph.build(
            [v for v in self.vertices if v in F],
            [e for e in self.edges if e.src in F],
            [f for f in self.infinite_families if f[0] in F],
        )

    def to_json(self) -> dict:
        return {
            "vertices": [_jsonable(v) for v in self.vertices],
            "edges": [{"id": _jsonable(e.id), "src": _jsonable(e.src), "rng": _jsonable(e.rng)} for e in self.edges],
            "infinite_families": [{"src": _jsonable(a), "rng": _jsonable(b)} for a, b in self.infinite_families],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "DiscreteGraph":
        if not isinstance(doc, Mapping):
            raise SchemaError("graph document must be an object", path="$")
        unknown = set(doc) - {"vertices", "edges", "infinite_receivers", "infinite_families"}
        if unknown:
            raise SchemaError(f"unknown keys {sorted(unknown)}", path="$")
        if "vertices" not in doc:
            raise SchemaError("missing 'vertices'", path="$")
        edges = []
        for i, e in enumerate(doc.get("edges", [])):
            if not isinstance(e, Mapping) or set(e) != {"id", "src", "rng"}:
                raise SchemaError("edge needs exactly id, src, rng", path=f"$.edges[{i}]")
            edges.append((_hashable(e["id"]), _hashable(e["src"]), _hashable(e["rng"])))
        fams = []
        for i, f in enumerate(doc.get("infinite_families", [])):
            if not isinstance(f, Mapping) or set(f) != {"src", "rng"}:
                raise SchemaError("family needs exactly src, rng", path=f"$.infinite_families[{i}]")
            fams.append((_hashable(f["src"]), _hashable(f["rng"])))
        return cls.build(
            [_hashable(v) for v in doc["vertices"]],
            edges,
            fams,
            [_hashable(v) for v in doc.get("infinite_receivers", [])],
        )


def _hashable(x):
    return tuple(_hashable(y) for y in x) if isinstance(x, list) else x


def _jsonable(x):
    return [_jsonable(y) for y in x] if isinstance(x, tuple) else x


@dataclass(frozen=True)
class VertexClassification:
    sce: frozenset
    fin: frozenset
    rg: frozenset
    sg: frozenset

    def to_json(self) -> dict:
        return {k: sorted(_jsonable(v) for v in getattr(self, k)) for k in ("sce", "fin", "rg", "sg")}


def classify_vertices(G: DiscreteGraph) -> VertexClassification:
    """Sources, finite receivers, regular and singular vertices.

    Closures are identities on a discrete space, so ``rg = fin - sce``.
    """
    V = frozenset(G.vertices)
    infinite = G.infinite_receivers
    ranged = {e.rng for e in G.edges}
    sce = frozenset(v for v in V if v not in ranged and v not in infinite)
    fin = V - infinite
    rg = fin - sce
    return VertexClassification(sce=sce, fin=fin, rg=rg, sg=V - rg)


@dataclass(frozen=True)
class PathSpaceGraph:
    n: int
    paths: tuple[tuple, ...]
    base: DiscreteGraph

    def r(self, p: tuple) -> Vertex:
        return self.base.r(p[0])

    def s(self, p: tuple) -> Vertex:
        return self.base.s(p[-1])

    def as_graph(self) -> DiscreteGraph:
        """The topological graph ``E_n = (E^0, E^n, r^n, s^n)``."""
        return DiscreteGraph.build(self.base.vertices, [(p, self.s(p), self.r(p)) for p in self.paths])


def _require_finite(G: DiscreteGraph, what: str):
    if not G.is_finite_tier:
        raise UnsupportedError(f"{what} needs materialized edges; graph has infinite families {list(G.infinite_families)}")


def path_space(G: DiscreteGraph, n: int) -> PathSpaceGraph:
    """All composable tuples ``(e1, ..., en)`` with ``s(e_i) = r(e_{i+1})``."""
    if not isinstance(n, int) or n < 1:
        raise PreconditionError(f"path length must be a positive integer, got {n!r}")
    _require_finite(G, "path_space")
    by_range = defaultdict(list)
    for e in G.edges:
        by_range[e.rng].append(e.id)
    paths = [(e,) for e in G.edge_ids]
    for _ in range(n - 1):
        paths = [p + (f,) for p in paths for f in by_range[G.s(p[-1])]]
    return PathSpaceGraph(n, tuple(sorted(paths)), G)


@dataclass(frozen=True)
class Cycle:
    edges: tuple
    base_points: frozenset
    has_entrance: bool


def _cycle_from_edges(G: DiscreteGraph, edges: Sequence[EdgeId]) -> Cycle:
    k = edges.index(min(edges))
    edges = tuple(edges[k:]) + tuple(edges[:k])
    base = frozenset(G.r(e) for e in edges)
    infinite = G.infinite_receivers
    entrance = any(G.incoming(G.r(e)) != [e] or G.r(e) in infinite for e in edges)
    return Cycle(edges, base, entrance)


def cycles_without_entrances(G: DiscreteGraph) -> list[Cycle]:
    """Simple cycles in which each base point receives only its cycle edge.

    A vertex on such a cycle has a unique incoming edge, so following unique
    predecessors from each candidate vertex finds every such cycle once.
    """
    infinite = G.infinite_receivers
    pred = {}
    for v in G.vertices:
        inc = G.incoming(v)
        if len(inc) == 1 and v not in infinite:
            pred[v] = inc[0]
    found = {}
    for start in pred:
        walk, v = [], start
        seen = set()
        while v in pred and v not in seen:
            seen.add(v)
            e = pred[v]
            walk.append(e)
            v = G.s(e)
        if v == start:
            c = _cycle_from_edges(G, walk)
            found[c.edges] = c
    return [found[k] for k in sorted(found)]


def is_topologically_free(G: DiscreteGraph) -> tuple[bool, list[Cycle]]:
    """On a discrete vertex space "empty interior" means "empty"."""
    witnesses = cycles_without_entrances(G)
    return (not witnesses), witnesses


def graph_surgery(G: DiscreteGraph, Y: Iterable[Vertex]) -> DiscreteGraph:
    """The graph ``E_Y`` with ``Y`` doubled into new sources ``(v, 1)``."""
    Y = set(Y)
    rg = classify_vertices(G).rg
    off = sorted(Y - rg, key=repr)
    if off:
        raise PreconditionError(f"surgery set must lie in the regular vertices; offending {off}")
    verts = [(v, 0) for v in G.vertices] + [(v, 1) for v in sorted(Y)]
    edges = [((e.id, 0), (e.src, 0), (e.rng, 0)) for e in G.edges]
    edges += [((e.id, 1), (e.src, 1), (e.rng, 0)) for e in G.edges if e.src in Y]
    fams = [((a, 0), (b, 0)) for a, b in G.infinite_families]
    fams += [((a, 1), (b, 0)) for a, b in G.infinite_families if a in Y]
    return DiscreteGraph.build(verts, edges, fams)


def is_non_returning(paths: Iterable[Sequence[EdgeId]]) -> bool:
    """Whether the last edge of each path avoids the first ``n-1`` edges of every path."""
    paths = [tuple(p) for p in paths]
    if not paths:
        raise PreconditionError("non-returning is defined for nonempty path sets")
    lengths = {len(p) for p in paths}
    if len(lengths) != 1:
        raise PreconditionError(f"paths of mixed lengths {sorted(lengths)}")
    if lengths.pop() < 2:
        raise PreconditionError("non-returning needs paths of length at least 2")
    heads = {e for p in paths for e in p[:-1]}
    return all(p[-1] not in heads for p in paths)


def adjacency_counts(G: DiscreteGraph) -> list[list[int]]:
    """``A[i][j]`` = number of edges with range ``vertices[i]`` and source ``vertices[j]``."""
    idx = {v: i for i, v in enumerate(G.vertices)}
    A = [[0] * len(idx) for _ in idx]
    for e in G.edges:
        A[idx[e.rng]][idx[e.src]] += 1
    return A


def all_small_graphs(max_vertices: int, max_edges: int, flags: bool = False):
    """Every graph on ``0..max_vertices`` vertices with up to ``max_edges`` edges.

    Multi-edges and loops are included; edges are labelled in a canonical
    order, so isomorphic graphs may repeat. With ``flags`` every subset of
    vertices is additionally tried as the set of bare infinite receivers.
    """
    for nv in range(max_vertices + 1):
        verts = list(range(nv))
        slots = list(product(verts, verts))
        for combo in _multisets(len(slots), max_edges):
            edges = [(f"e{k}", slots[i][0], slots[i][1]) for k, i in enumerate(combo)]
            flag_sets = _subsets(verts) if flags else [()]
            for fl in flag_sets:
                yield DiscreteGraph.build(verts, edges, infinite_receivers=fl)


def _multisets(n: int, max_size: int):
    def rec(start, size):
        yield ()
        if size == 0:
            return
        for i in range(start, n):
            for rest in rec(i, size - 1):
                yield (i,) + rest

    if n == 0:
        yield ()
        return
    yield from rec(0, max_size)


def _subsets(items: Sequence):
    for mask in range(1 << len(items)):
        yield tuple(x for k, x in enumerate(items) if mask >> k & 1)
