"""Invariant vertex sets and admissible pairs of a discrete graph.

Admissible pairs ``(F0, Z)`` are the combinatorial coordinates of the
gauge-invariant ideals, so counting pairs counts those ideals.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import PreconditionError
from .graph import DiscreteGraph, classify_vertices

DEFAULT_MAX_VERTICES = 20


@dataclass(frozen=True)
class AdmissiblePair:
    F0: frozenset
    Z: frozenset

    def to_json(self) -> dict:
        return {"F0": sorted(self.F0), "Z": sorted(self.Z)}


def _guard(G: DiscreteGraph, max_vertices: int):
    if len(G.vertices) > max_vertices:
        raise PreconditionError(
            f"brute force over 2^{len(G.vertices)} vertex subsets exceeds the guard of {max_vertices} vertices"
        )


def _subsets(items) -> list[frozenset]:
    items = list(items)
    return [frozenset(c) for k in range(len(items) + 1) for c in combinations(items, k)]


def subset_key(S) -> tuple:
    return (len(S), sorted(S))


def is_invariant(G: DiscreteGraph, F0: Iterable) -> tuple[bool, str]:
    """Whether ``F0`` is invariant, with the first reason it is not."""
    F = frozenset(F0)
    stray = F - set(G.vertices)
    if stray:
        raise PreconditionError(f"F0 contains unknown vertices {sorted(stray)}")
    for e in G.edges:
        if e.src in F and e.rng not in F:
            return False, f"edge {e.id} leaves F0 ({e.src} -> {e.rng})"
    for src, rng in G.infinite_families:
        if src in F and rng not in F:
            return False, f"infinite family {src} -> {rng} leaves F0"
    rg = classify_vertices(G).rg
    for v in sorted(rg & F):
        if not any(e.src in F for e in G.edges if e.rng == v):
            return False, f"regular vertex {v} receives no edge from inside F0"
    return True, "invariant"


def invariant_sets(G: DiscreteGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> list[frozenset]:
    _guard(G, max_vertices)
    return sorted((F for F in _subsets(G.vertices) if is_invariant(G, F)[0]), key=subset_key)


def restricted_singular(G: DiscreteGraph, F0: Iterable) -> frozenset:
    """``F_sg``: singular vertices of ``(F0, s^-1(F0), r, s)``, keeping families sourced in ``F0``."""
    return classify_vertices(G.restrict(F0)).sg


def admissible_pairs(G: DiscreteGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> list[AdmissiblePair]:
    sg = classify_vertices(G).sg
    out = []
    for F0 in invariant_sets(G, max_vertices):
        low = restricted_singular(G, F0)
        free = sorted((sg & F0) - low)
        for extra in _subsets(free):
            out.append(AdmissiblePair(F0, low | extra))
    return sorted(out, key=lambda p: (subset_key(p.F0), subset_key(p.Z)))


def hereditary_saturated_oracle(G: DiscreteGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> list[frozenset]:
    """Complements of the hereditary saturated vertex sets.

    ``H`` is hereditary when ``r(e) in H`` forces ``s(e) in H`` (families
    included) and saturated when every regular vertex whose incoming edges
    all start in ``H`` lies in ``H``.
    """
    _guard(G, max_vertices)
    rg = classify_vertices(G).rg
    arrows = [(e.src, e.rng) for e in G.edges] + list(G.infinite_families)
    feeders = {v: {e.src for e in G.edges if e.rng == v} for v in rg}
    V = frozenset(G.vertices)
    out = []
    for H in _subsets(G.vertices):
        if any(r in H and s not in H for s, r in arrows):
            continue
        if any(v not in H and feeders[v] <= H for v in rg):
            continue
        out.append(V - H)
    return sorted(out, key=subset_key)


def ideal_report(G: DiscreteGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> dict:
    pairs = admissible_pairs(G, max_vertices)
    return {"pairs": [p.to_json() for p in pairs], "ideal_count": len(pairs)}
