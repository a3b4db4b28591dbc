"""Simplicity of the graph algebra decided from the graph alone.

Two equivalent conditions are evaluated independently:

* minimal and topologically free;
* minimal and not generated by a cycle.

A twisting cocycle may be supplied; it is validated against the graph and
then has no influence on the verdict.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import PreconditionError
from .graph import DiscreteGraph, cycles_without_entrances, is_topologically_free
from .ideals import DEFAULT_MAX_VERTICES, admissible_pairs, invariant_sets

TWIST_NOTE = "the verdict depends only on the graph; a twisting cocycle is validated but does not change it"


@dataclass(frozen=True)
class SimplicityReport:
    simple: bool
    minimal: bool
    topologically_free: bool
    generated_by_cycle: bool
    condition_minimal_free: bool
    condition_minimal_not_cycle: bool
    admissible_pair_count: int
    witnesses: dict = field(default_factory=dict)
    twist_note: str = TWIST_NOTE

    @property
    def conditions_agree(self) -> bool:
        return self.condition_minimal_free == self.condition_minimal_not_cycle

    def to_json(self) -> dict:
        return {
            "simple": self.simple,
            "minimal": self.minimal,
            "topologically_free": self.topologically_free,
            "generated_by_cycle": self.generated_by_cycle,
            "conditions": {
                "minimal_and_topologically_free": self.condition_minimal_free,
                "minimal_and_not_generated_by_cycle": self.condition_minimal_not_cycle,
                "agree": self.conditions_agree,
            },
            "admissible_pair_count": self.admissible_pair_count,
            "witnesses": self.witnesses,
            "twist_note": self.twist_note,
        }


def is_minimal(G: DiscreteGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[bool, list[frozenset]]:
    """Whether the only invariant sets are the empty set and all vertices; otherwise the others."""
    if not G.vertices:
        raise PreconditionError("minimality is not defined for the empty graph")
    V = frozenset(G.vertices)
    extra = [F for F in invariant_sets(G, max_vertices) if F and F != V]
    return not extra, extra


def forward_closure(G: DiscreteGraph, start) -> frozenset:
    """Vertices reachable from ``start`` along edges and infinite families (source to range)."""
    succ = {v: set() for v in G.vertices}
    for e in G.edges:
        succ[e.src].add(e.rng)
    for a, b in G.infinite_families:
        succ[a].add(b)
    seen = set(start)
    todo = deque(seen)
    while todo:
        v = todo.popleft()
        for w in succ[v] - seen:
            seen.add(w)
            todo.append(w)
    return frozenset(seen)


def is_generated_by_cycle(G: DiscreteGraph) -> bool:
    """Some entrance-free cycle reaches every vertex.

    The forward closure of the base points of an entrance-free cycle is
    always invariant, so a minimal graph with such a cycle is generated by it.
    """
    V = frozenset(G.vertices)
    return any(forward_closure(G, c.base_points) == V for c in cycles_without_entrances(G))


def _check_twist(G: DiscreteGraph, cocycle) -> None:
    if cocycle is None:
        return
    model_graph = getattr(cocycle, "graph", None)
    if model_graph is None:
        raise PreconditionError("cocycle must be a correspondence model on the same graph")
    if model_graph.edges != G.edges or model_graph.vertices != G.vertices:
        raise PreconditionError("cocycle lives on a different graph")


def simplicity_verdict(G: DiscreteGraph, cocycle=None, max_vertices: int = DEFAULT_MAX_VERTICES) -> SimplicityReport:
    _check_twist(G, cocycle)
    minimal, invariant_witnesses = is_minimal(G, max_vertices)
    free, cycles = is_topologically_free(G)
    generated = is_generated_by_cycle(G)
    pairs = admissible_pairs(G, max_vertices)
    cond2 = minimal and free
    cond3 = minimal and not generated
    witnesses = {
        "entrance_free_cycles": [list(c.edges) for c in cycles],
        "invariant_sets": [sorted(F) for F in invariant_witnesses],
    }
    return SimplicityReport(
        simple=cond2,
        minimal=minimal,
        topologically_free=free,
        generated_by_cycle=generated,
        condition_minimal_free=cond2,
        condition_minimal_not_cycle=cond3,
        admissible_pair_count=len(pairs),
        witnesses=witnesses,
    )
