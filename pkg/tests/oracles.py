"""Independent reference computations used only by the tests.

Nothing here imports the package's algorithms; each oracle works straight
from the definitions, usually by brute force or through a third-party library.
"""

from __future__ import annotations

from itertools import combinations
from math import gcd

import networkx as nx
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf


def gcd_of_minors_factors(M, k_max=None):
    """Invariant factors ``d_1..d_k`` from ``d_1 ... d_k = gcd of k x k minors``."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    k_max = min(rows, cols) if k_max is None else min(k_max, rows, cols)
    out, prev = [], 1
    for k in range(1, k_max + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, int(sympy.Matrix([[M[i][j] for j in cs] for i in rs]).det()))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def sympy_invariant_factors(M):
    """Nonzero diagonal of sympy's Smith form, made positive and sorted by divisibility."""
    if not M or not M[0]:
        return []
    D = sympy_snf(sympy.Matrix(M), domain=sympy.ZZ)
    diag = [abs(int(D[i, i])) for i in range(min(D.shape))]
    return sorted((d for d in diag if d), key=lambda d: d)


def h2_by_sympy(space):
    """``(rank, torsion)`` of ``C^2 / im d1`` for a complex of dimension at most 2."""
    edges = {e: i for i, e in enumerate(space.edges)}
    tris = list(space.triangles)
    if not tris:
        return 0, []
    M = []
    for a, b, c in tris:
        row = [0] * len(edges)
        row[edges[(b, c)]] += 1
        row[edges[(a, c)]] -= 1
        row[edges[(a, b)]] += 1
        M.append(row)
    facs = sympy_invariant_factors(M) if edges else []
    return len(tris) - len(facs), [d for d in facs if d > 1]


# ---------------------------------------------------------------------------
# graphs


def to_multidigraph(G):
    H = nx.MultiDiGraph()
    H.add_nodes_from(G.vertices)
    for e in G.edges:
        H.add_edge(e.src, e.rng, key=e.id)
    return H


def entrance_free_base_sets(G):
    """Vertex sets of simple cycles whose every vertex receives exactly one edge and no family."""
    H = to_multidigraph(G)
    flagged = {b for _, b in G.infinite_families}
    simple = nx.DiGraph(H)
    out = set()
    for cyc in nx.simple_cycles(simple):
        if all(H.in_degree(v) == 1 and v not in flagged for v in cyc):
            out.add(frozenset(cyc))
    return out


def path_count_by_matrix_power(G, n):
    """Number of composable n-tuples as the entry sum of ``A^n`` with ``A[range][source]``."""
    idx = {v: i for i, v in enumerate(G.vertices)}
    A = sympy.zeros(len(idx), len(idx))
    for e in G.edges:
        A[idx[e.rng], idx[e.src]] += 1
    if not idx:
        return 0
    return int(sum(A**n))


def _subsets(items):
    items = list(items)
    return [frozenset(c) for k in range(len(items) + 1) for c in combinations(items, k)]


def _vertex_classes(vertices, edges, families):
    """``(rg, sg)`` straight from the definitions; ``edges`` are (src, rng) pairs."""
    V = set(vertices)
    receivers = {b for _, b in edges}
    infinite = {b for _, b in families}
    sources = {v for v in V if v not in receivers and v not in infinite}
    rg = (V - infinite) - sources
    return rg, V - rg


def naive_admissible_pairs(G):
    """All ``(F0, Z)`` pairs satisfying the three stated conditions, by double subset enumeration."""
    V = list(G.vertices)
    edges = [(e.src, e.rng) for e in G.edges]
    fams = list(G.infinite_families)
    rg, sg = _vertex_classes(V, edges, fams)
    out = set()
    for F0 in _subsets(V):
        closed = all(b in F0 for a, b in edges + fams if a in F0)
        if not closed:
            continue
        feeds = all(any(a in F0 and b == v for a, b in edges) for v in rg & F0)
        if not feeds:
            continue
        f_edges = [(a, b) for a, b in edges if a in F0]
        f_fams = [(a, b) for a, b in fams if a in F0]
        _, f_sg = _vertex_classes(F0, f_edges, f_fams)
        for Z in _subsets(V):
            if f_sg <= Z <= (sg & F0):
                out.add((F0, Z))
    return out


def random_graph(rng, max_vertices=5, max_edges=8, family_prob=0.2):
    from tga.graph import DiscreteGraph

    nv = rng.randint(1, max_vertices)
    edges = [(f"e{k}", rng.randrange(nv), rng.randrange(nv)) for k in range(rng.randint(0, max_edges))]
    fams = [(rng.randrange(nv), rng.randrange(nv)) for _ in range(nv) if rng.random() < family_prob]
    return DiscreteGraph.build(range(nv), edges, fams)

