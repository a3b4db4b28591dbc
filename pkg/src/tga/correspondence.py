"""The twisted graph correspondence of a discrete graph, as fiberwise linear algebra.

A model is a finite graph, a cover of its edge set by charts ``N_a`` and
unit scalars ``s_ab(e)`` on the overlaps. Module elements are chart-indexed
edge functions with ``x_a = s_ab x_b``; adjointable operators are blocks on
the source fibers ``s^-1(v)``.

Scalars are Python ``complex`` (checked to a tolerance) or
:class:`~tga.gaussian.GaussianRational` (checked exactly). A model is exact
when all its cocycle values are Gaussian rationals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .errors import PreconditionError, SchemaError, UnsupportedError
from .gaussian import GaussianRational, parse_unit, random_unit, sphere_point
from .graph import DiscreteGraph, classify_vertices, path_space
from .ideals import is_invariant

POSITIVITY_TOL = 1e-10
IDENTITY_TOL = 1e-12
DEFAULT_MAX_TENSOR = 3

# shared exact constants; GaussianRational values are never mutated
_G_ZERO = GaussianRational(0)
_G_ONE = GaussianRational(1)


def _conj(z):
    return z.conjugate()


def close(a, b, tol: float = IDENTITY_TOL) -> bool:
    """Exact equality when both sides are exact, otherwise ``|a - b| <= tol``."""
    if _is_exact(a) and _is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= tol


def _is_exact(z) -> bool:
    return isinstance(z, (GaussianRational, int, Fraction)) and not isinstance(z, bool)


class MembershipError(PreconditionError):
    """An element violates ``x_a = s_ab x_b`` on some overlap."""

    def __init__(self, message, overlap=None):
        self.overlap = overlap
        super().__init__(message)


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class CorrespondenceModel:
    graph: DiscreteGraph
    charts: tuple
    cover: Mapping  # chart -> frozenset of edge ids
    cocycle: Mapping  # (a, b) with a < b -> {edge: unit}
    exact: bool = False
    _charts_of: Mapping = field(default=None, compare=False, repr=False)
    _fibers: Mapping = field(default=None, compare=False, repr=False)

    @classmethod
    def build(cls, graph: DiscreteGraph, cover: Mapping, cocycle: Mapping = (), tol: float = IDENTITY_TOL):
        if not graph.is_finite_tier:
            raise UnsupportedError("correspondence models need materialized edges (no infinite families)")
        edges = set(graph.edge_ids)
        cover = {a: frozenset(es) for a, es in cover.items() if es}
        for a, es in cover.items():
            stray = es - edges
            if stray:
                raise SchemaError(f"chart {a!r} names unknown edges {sorted(stray, key=repr)}", path="cover")
        uncovered = edges - set().union(*cover.values()) if cover else edges
        if uncovered:
            raise SchemaError(f"edges not covered by any chart: {sorted(uncovered, key=repr)}", path="cover")
        charts = tuple(sorted(cover))
        values = {}
        for (a, b), table in dict(cocycle).items():
            if a == b:
                raise SchemaError(f"s_aa is fixed to 1; do not give ({a!r},{a!r})", path="cocycle")
            if a not in cover or b not in cover:
                raise SchemaError(f"cocycle pair ({a!r},{b!r}) names an unknown chart", path="cocycle")
            key = (a, b) if a < b else (b, a)
            overlap = cover[a] & cover[b]
            if set(table) != overlap:
                raise SchemaError(f"cocycle on ({a!r},{b!r}) must be given on exactly the overlap", path="cocycle")
            vals = {e: (table[e] if a < b else _conj(table[e])) for e in overlap}
            if key in values and any(not close(values[key][e], vals[e], tol) for e in overlap):
                raise SchemaError(f"pair {key} given twice inconsistently", path="cocycle")
            values[key] = vals
        for a in charts:
            for b in charts:
                if a < b and cover[a] & cover[b] and (a, b) not in values:
                    raise SchemaError(f"missing cocycle values on overlap ({a!r},{b!r})", path="cocycle")
        exact = all(_is_exact(z) for t in values.values() for z in t.values())
        for key, t in values.items():
            for e, z in t.items():
                if _is_exact(z):
                    ok = GaussianRational.coerce(z).norm2() == 1
                else:
                    ok = abs(abs(complex(z)) - 1) <= tol
                if not ok:
                    raise SchemaError(f"s{key} at edge {e!r} is not a unit", path="cocycle")
        if exact:
            values = {k: {e: GaussianRational.coerce(z) for e, z in t.items()} for k, t in values.items()}
        else:
            values = {k: {e: complex(z) for e, z in t.items()} for k, t in values.items()}
        charts_of = {e: tuple(a for a in charts if e in cover[a]) for e in graph.edge_ids}
        model = cls(graph, charts, cover, values, exact, charts_of, graph.source_fibers())
        bad = model.cocycle_violations(tol)
        if bad:
            raise PreconditionError(f"cocycle identity fails on {bad[:3]}")
        return model

    # -- basic data

    def charts_of(self, e) -> tuple:
        return self._charts_of[e]

    def ref(self, e):
        """Reference chart of an edge: the lowest chart containing it."""
        return self._charts_of[e][0]

    def fiber(self, v) -> list:
        return self._fibers[v]

    @property
    def one(self):
        return _G_ONE if self.exact else 1 + 0j

    @property
    def zero(self):
        return _G_ZERO if self.exact else 0j

    def scalar(self, z):
        return GaussianRational.coerce(z) if self.exact else complex(z)

    def s(self, a, b, e):
        if a == b:
            return self.one
        if a < b:
            return self.cocycle[(a, b)][e]
        return _conj(self.cocycle[(b, a)][e])

    def cocycle_violations(self, tol: float = IDENTITY_TOL) -> list:
        bad = []
        for e in self.graph.edge_ids:
            cs = self.charts_of(e)
            for i, a in enumerate(cs):
                for j in range(i + 1, len(cs)):
                    for c in cs[j + 1:]:
                        b = cs[j]
                        if not close(self.s(a, b, e) * self.s(b, c, e), self.s(a, c, e), tol):
                            bad.append((a, b, c, e))
        return bad

    def to_json(self) -> dict:
        from .gaussian import format_unit

        doc = self.graph.to_json()
        doc["cover"] = {str(a): sorted(str(e) for e in self.cover[a]) for a in self.charts}
        doc["cocycle"] = {
            f"{a},{b}": {str(e): format_unit(z) for e, z in sorted(t.items(), key=lambda kv: repr(kv[0]))}
            for (a, b), t in sorted(self.cocycle.items())
        }
        return doc


def trivial_model(G: DiscreteGraph) -> CorrespondenceModel:
    """One chart holding every edge, so the cocycle is empty (and the model exact)."""
    return CorrespondenceModel.build(G, {"N0": G.edge_ids})


def model_from_json(doc: Mapping, exact: bool | None = None) -> CorrespondenceModel:
    if not isinstance(doc, Mapping):
        raise SchemaError("model document must be an object", path="$")
    graph_doc = {k: v for k, v in doc.items() if k not in ("cover", "cocycle")}
    G = DiscreteGraph.from_json(graph_doc)
    ids = {str(e): e for e in G.edge_ids}
    cover_doc = doc.get("cover")
    if not isinstance(cover_doc, Mapping):
        raise SchemaError("model needs a 'cover' object", path="$.cover")
    cover = {}
    for a, es in cover_doc.items():
        if not isinstance(es, list):
            raise SchemaError("chart must list edge ids", path=f"$.cover[{a!r}]")
        unknown = [e for e in es if str(e) not in ids]
        if unknown:
            raise SchemaError(f"unknown edges {unknown}", path=f"$.cover[{a!r}]")
        cover[a] = [ids[str(e)] for e in es]
    values = [v for t in doc.get("cocycle", {}).values() for v in t.values()]
    if exact is None:
        exact = True
        for v in values:
            try:
                parse_unit(str(v), exact=True)
            except ValueError:
                exact = False
                break
    cocycle = {}
    for key, table in doc.get("cocycle", {}).items():
        path = f"$.cocycle[{key!r}]"
        parts = key.split(",")
        if len(parts) != 2 or any(p.strip() not in cover for p in parts):
            raise SchemaError("cocycle keys look like 'N1,N2' with declared charts", path=path)
        if not isinstance(table, Mapping):
            raise SchemaError("cocycle entry must map edge ids to unit complexes", path=path)
        vals = {}
        for e, z in table.items():
            if str(e) not in ids:
                raise SchemaError(f"unknown edge {e!r}", path=path)
            try:
                vals[ids[str(e)]] = parse_unit(str(z), exact=exact)
            except ValueError as exc:
                raise SchemaError(str(exc), path=f"{path}[{e!r}]") from None
        cocycle[(parts[0].strip(), parts[1].strip())] = vals
    return CorrespondenceModel.build(G, cover, cocycle)


def random_model(
    rng: random.Random,
    max_vertices: int = 6,
    max_edges: int = 10,
    max_charts: int = 4,
    exact: bool = False,
    min_edges: int = 1,
    graph: DiscreteGraph | None = None,
) -> CorrespondenceModel:
    """A random cover and a random cocycle ``s_ab = b_a conj(b_b)`` on ``graph`` (random if omitted)."""
    if graph is None:
        nv = rng.randint(1, max_vertices)
        ne = rng.randint(min(min_edges, max_edges), max_edges)
        edges = [(f"e{k}", rng.randrange(nv), rng.randrange(nv)) for k in range(ne)]
        graph = DiscreteGraph.build(range(nv), edges)
    G = graph
    k = rng.randint(1, max_charts)
    cover = {f"N{i}": set() for i in range(k)}
    for e in G.edge_ids:
        chosen = [a for a in cover if rng.random() < 0.5] or [rng.choice(list(cover))]
        for a in chosen:
            cover[a].add(e)
    b = {a: {e: random_unit(rng, exact) for e in es} for a, es in cover.items()}
    cocycle = {}
    for a in cover:
        for c in cover:
            if a < c and cover[a] & cover[c]:
                cocycle[(a, c)] = {e: b[a][e] * _conj(b[c][e]) for e in cover[a] & cover[c]}
    return CorrespondenceModel.build(G, cover, cocycle)


# ---------------------------------------------------------------------------
# module elements


@dataclass(frozen=True)
class ModuleElement:
    values: Mapping  # chart -> {edge: scalar}

    def at(self, a, e):
        return self.values[a][e]


def check_compatible(M: CorrespondenceModel, x: ModuleElement, tol: float = IDENTITY_TOL) -> None:
    if set(x.values) != set(M.charts) or any(set(x.values[a]) != M.cover[a] for a in M.charts):
        raise MembershipError("element is not defined on exactly the charts of the model")
    # Comparing every chart with the reference chart suffices: the cocycle
    # identity of the model then gives x_a = s_ab x_b for all pairs.
    for e in M.graph.edge_ids:
        b, *rest = M.charts_of(e)
        xb = x.values[b][e]
        for a in rest:
            xa = x.values[a][e]
            if not xb and not xa:
                continue
            if not close(xa, M.s(a, b, e) * xb, tol):
                key = (min(a, b), max(a, b), e)
                raise MembershipError(f"x_{key[0]} != s_{key[0]}{key[1]} x_{key[1]} at edge {e!r}", overlap=key)


def is_compatible(M: CorrespondenceModel, x: ModuleElement, tol: float = IDENTITY_TOL) -> bool:
    try:
        check_compatible(M, x, tol)
    except MembershipError:
        return False
    return True


def from_coords(M: CorrespondenceModel, c: Mapping) -> ModuleElement:
    """The element with ``x_ref(e)(e) = c[e]`` (missing edges are 0)."""
    vals = {}
    for a in M.charts:
        vals[a] = {e: M.s(a, M.ref(e), e) * M.scalar(c.get(e, 0)) for e in M.cover[a]}
    return ModuleElement(vals)


def coords(M: CorrespondenceModel, x: ModuleElement) -> dict:
    return {e: x.values[M.ref(e)][e] for e in M.graph.edge_ids}


def indicator(M: CorrespondenceModel, e) -> ModuleElement:
    """The basis section ``|e>``, equal to 1 at ``e`` in its reference chart."""
    return from_coords(M, {e: 1})


def zero_element(M: CorrespondenceModel) -> ModuleElement:
    return from_coords(M, {})


def add(x: ModuleElement, y: ModuleElement) -> ModuleElement:
    return ModuleElement({a: {e: v + y.values[a][e] for e, v in t.items()} for a, t in x.values.items()})


def scale(z, x: ModuleElement) -> ModuleElement:
    return ModuleElement({a: {e: z * v for e, v in t.items()} for a, t in x.values.items()})


def random_scalar(rng: random.Random, exact: bool):
    if exact:
        return GaussianRational(Fraction(rng.randint(-6, 6), rng.randint(1, 4)), Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
    return complex(rng.gauss(0, 1), rng.gauss(0, 1))


def random_element(M: CorrespondenceModel, rng: random.Random, density: float = 0.8) -> ModuleElement:
    c = {e: random_scalar(rng, M.exact) for e in M.graph.edge_ids if rng.random() < density}
    return from_coords(M, c)


def random_function(M: CorrespondenceModel, rng: random.Random) -> dict:
    return {v: random_scalar(rng, M.exact) for v in M.graph.vertices}


def inner_product(M: CorrespondenceModel, x: ModuleElement, y: ModuleElement, tol: float = IDENTITY_TOL) -> dict:
    """``<x, y>(v) = sum over s(e) = v of conj(x_a(e)) y_a(e)``, checked in every chart containing ``e``."""
    check_compatible(M, x, tol)
    check_compatible(M, y, tol)
    out = {}
    for v in M.graph.vertices:
        total = M.zero
        for e in M.fiber(v):
            cs = M.charts_of(e)
            terms = [_conj(x.values[a][e]) * y.values[a][e] if x.values[a][e] and y.values[a][e] else M.zero for a in cs]
            if any(terms) and any(not close(t, terms[0], tol) for t in terms[1:]):
                raise MembershipError(f"bracket at edge {e!r} depends on the chart")
            total = total + terms[0]
        out[v] = total
    return out


def left_action(M: CorrespondenceModel, f: Mapping, x: ModuleElement) -> ModuleElement:
    """``(f . x)_a(e) = f(r(e)) x_a(e)``."""
    G = M.graph
    return ModuleElement({a: {e: M.scalar(f[G.r(e)]) * v for e, v in t.items()} for a, t in x.values.items()})


def right_action(M: CorrespondenceModel, x: ModuleElement, f: Mapping) -> ModuleElement:
    """``(x . f)_a(e) = x_a(e) f(s(e))``."""
    G = M.graph
    return ModuleElement({a: {e: v * M.scalar(f[G.s(e)]) for e, v in t.items()} for a, t in x.values.items()})


def induced_section(M: CorrespondenceModel, a0, f: Mapping) -> ModuleElement:
    """``f^Ind``: equal to ``s_{a a0} f`` on ``N_a`` inside ``N_a0`` and 0 elsewhere."""
    leak = set(e for e, v in f.items() if v) - M.cover[a0]
    if leak:
        raise PreconditionError(f"function leaks out of chart {a0!r}: {sorted(leak, key=repr)}")
    vals = {}
    for a in M.charts:
        vals[a] = {
            e: (M.s(a, a0, e) * M.scalar(f.get(e, 0)) if e in M.cover[a0] else M.zero) for e in M.cover[a]
        }
    return ModuleElement(vals)


def induced_inner_formula(M: CorrespondenceModel, a0, f: Mapping, a1, g: Mapping) -> dict:
    """Closed form of ``<f^Ind(a0), g^Ind(a1)>(v) = sum conj(f(e)) s_{a0 a1}(e) g(e)`` over ``N_a0 N_a1``."""
    out = {v: M.zero for v in M.graph.vertices}
    for e in M.cover[a0] & M.cover[a1]:
        out[M.graph.s(e)] = out[M.graph.s(e)] + _conj(M.scalar(f.get(e, 0))) * M.s(a0, a1, e) * M.scalar(g.get(e, 0))
    return out


def equal_partition(M: CorrespondenceModel) -> dict:
    """``h_a(e) = 1 / (number of charts containing e)``, a non-canonical partition of unity."""
    return {a: {e: Fraction(1, len(M.charts_of(e))) for e in M.cover[a]} for a in M.charts}


def decompose(M: CorrespondenceModel, x: ModuleElement, partition: Mapping | None = None) -> list:
    """Write ``x`` as a sum of induced sections ``(h_a x_a)^Ind(a)``; returns ``[(a, h_a x_a)]``."""
    h = partition or equal_partition(M)
    for e in M.graph.edge_ids:
        if sum(h[a].get(e, 0) for a in M.charts_of(e)) != 1:
            raise PreconditionError(f"partition does not sum to 1 at edge {e!r}")
    return [(a, {e: M.scalar(h[a].get(e, 0)) * x.values[a][e] for e in M.cover[a]}) for a in M.charts]


def reconstruct(M: CorrespondenceModel, pieces: Sequence) -> ModuleElement:
    total = zero_element(M)
    for a, f in pieces:
        total = add(total, induced_section(M, a, f))
    return total


def elements_close(x: ModuleElement, y: ModuleElement, tol: float = IDENTITY_TOL) -> bool:
    return all(close(v, y.values[a][e], tol) for a, t in x.values.items() for e, v in t.items())


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class FiberedOperator:
    """Blocks ``blocks[v]`` on the fibers ``s^-1(v)`` in the edge basis ``basis[v]``."""

    basis: Mapping
    blocks: Mapping

    def __matmul__(self, other: "FiberedOperator") -> "FiberedOperator":
        return FiberedOperator(self.basis, {v: self.blocks[v] @ other.blocks[v] for v in self.blocks})

    def __add__(self, other: "FiberedOperator") -> "FiberedOperator":
        return FiberedOperator(self.basis, {v: self.blocks[v] + other.blocks[v] for v in self.blocks})

    def __sub__(self, other: "FiberedOperator") -> "FiberedOperator":
        return FiberedOperator(self.basis, {v: self.blocks[v] - other.blocks[v] for v in self.blocks})

    def scaled(self, z) -> "FiberedOperator":
        return FiberedOperator(self.basis, {v: z * B for v, B in self.blocks.items()})

    def adjoint(self) -> "FiberedOperator":
        return FiberedOperator(self.basis, {v: np.conjugate(B).T for v, B in self.blocks.items()})

    def rank(self, tol: float = IDENTITY_TOL) -> int:
        total = 0
        for B in self.blocks.values():
            if B.size:
                total += int(np.linalg.matrix_rank(B.astype(complex), tol=tol)) if np.abs(B.astype(complex)).max() > tol else 0
        return total

    def to_json(self) -> dict:
        return {
            str(v): {"basis": [str(e) for e in self.basis[v]], "matrix": [[str(z) for z in row] for row in B]}
            for v, B in self.blocks.items()
        }


def _empty_block(M: CorrespondenceModel, n: int):
    if M.exact:
        return np.array([[GaussianRational(0)] * n for _ in range(n)], dtype=object).reshape(n, n)
    return np.zeros((n, n), dtype=complex)


def zero_operator(M: CorrespondenceModel) -> FiberedOperator:
    basis = {v: tuple(M.fiber(v)) for v in M.graph.vertices}
    return FiberedOperator(basis, {v: _empty_block(M, len(b)) for v, b in basis.items()})


def operators_close(A: FiberedOperator, B: FiberedOperator, tol: float = IDENTITY_TOL) -> bool:
    if set(A.blocks) != set(B.blocks):
        return False
    return all(close(a, b, tol) for v in A.blocks for a, b in zip(A.blocks[v].flat, B.blocks[v].flat))


def max_entry_gap(A: FiberedOperator, B: FiberedOperator) -> float:
    gaps = [abs(complex(a) - complex(b)) for v in A.blocks for a, b in zip(A.blocks[v].flat, B.blocks[v].flat)]
    return max(gaps, default=0.0)


def apply(M: CorrespondenceModel, T: FiberedOperator, x: ModuleElement) -> ModuleElement:
    c = coords(M, x)
    out = {}
    for v, B in T.blocks.items():
        basis = T.basis[v]
        vec = [c[e] for e in basis]
        for i, e in enumerate(basis):
            out[e] = sum((B[i, j] * vec[j] for j in range(len(basis))), M.zero)
    return from_coords(M, out)


def phi_matrix(M: CorrespondenceModel, f: Mapping) -> FiberedOperator:
    """Left action of the vertex function ``f``: ``diag(f(r(e)))`` on every fiber."""
    T = zero_operator(M)
    for v, basis in T.basis.items():
        for i, e in enumerate(basis):
            T.blocks[v][i, i] = M.scalar(f[M.graph.r(e)])
    return T


def rank_one(M: CorrespondenceModel, x: ModuleElement, y: ModuleElement) -> FiberedOperator:
    """``Theta_{x,y} z = x <y, z>``."""
    check_compatible(M, x)
    check_compatible(M, y)
    cx, cy = coords(M, x), coords(M, y)
    T = zero_operator(M)
    for v, basis in T.basis.items():
        for i, e in enumerate(basis):
            for j, f in enumerate(basis):
                T.blocks[v][i, j] = cx[e] * _conj(cy[f])
    return T


def random_operator(M: CorrespondenceModel, rng: random.Random) -> FiberedOperator:
    T = zero_operator(M)
    for v, basis in T.basis.items():
        for i in range(len(basis)):
            for j in range(len(basis)):
                T.blocks[v][i, j] = random_scalar(rng, M.exact)
    return T


# ---------------------------------------------------------------------------
# the rank-one decomposition of phi(f)


@dataclass(frozen=True)
class PartitionTerm:
    chart: object
    weights: Mapping  # edge -> weight >= 0, support an s-section inside the chart


def _sqrt(q, exact: bool):
    if not exact:
        return float(q) ** 0.5
    q = Fraction(q)
    num, den = _isqrt_exact(q.numerator), _isqrt_exact(q.denominator)
    if num is None or den is None:
        raise PreconditionError(f"{q} is not a rational square; exact mode needs square weights")
    return Fraction(num, den)


def _isqrt_exact(n: int):
    r = math.isqrt(n)
    return r if r * r == n else None


def auto_partition(M: CorrespondenceModel, rng: random.Random | None = None) -> list[PartitionTerm]:
    """Layered partition: each chart is cut into s-sections; weights split each edge over its charts.

    Without ``rng`` the split is the equal split. With ``rng`` the weights are
    random; in exact mode they are squares of a rational point on a sphere so
    that square roots stay rational.
    """
    weight = {}
    for e in M.graph.edge_ids:
        cs = M.charts_of(e)
        if rng is None:
            ws = [Fraction(1, len(cs))] * len(cs)
        elif M.exact:
            pt = sphere_point([Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(len(cs) - 1)])
            ws = [p * p for p in pt]
        else:
            raw = [rng.random() + 0.05 for _ in cs]
            ws = [w / sum(raw) for w in raw]
        for a, w in zip(cs, ws):
            weight[(a, e)] = w
    terms = []
    for a in M.charts:
        layers: dict = {}
        seen: dict = {}
        for e in sorted(M.cover[a], key=repr):
            v = M.graph.s(e)
            k = seen.get(v, 0)
            seen[v] = k + 1
            layers.setdefault(k, {})[e] = weight[(a, e)]
        terms.extend(PartitionTerm(a, layers[k]) for k in sorted(layers))
    return terms


def phi_decomposition(M: CorrespondenceModel, f: Mapping, partition: Sequence[PartitionTerm] | None = None, tol: float = IDENTITY_TOL) -> list:
    """Terms ``Theta_{xi, xi}`` with ``xi = sqrt(h (f o r))^Ind`` that sum to ``phi(f)``.

    Returns ``[(term, xi, Theta)]``.
    """
    G = M.graph
    fin = classify_vertices(G).fin
    for v, val in f.items():
        if _is_exact(val):
            negative = Fraction(GaussianRational.coerce(val).im) != 0 or GaussianRational.coerce(val).re < 0
        else:
            negative = abs(complex(val).imag) > tol or complex(val).real < -tol
        if negative:
            raise PreconditionError(f"f must be non-negative; f({v!r}) = {val}")
        if val and v not in fin:
            raise PreconditionError(f"f must vanish off the finite receivers; f({v!r}) = {val}")
    terms = auto_partition(M) if partition is None else list(partition)
    support = {e for e in G.edge_ids if f.get(G.r(e), 0)}
    cover_sum = {e: 0 for e in support}
    for t in terms:
        stray = set(t.weights) - M.cover[t.chart]
        if stray:
            raise PreconditionError(f"partition term leaks out of chart {t.chart!r}")
        sources = [G.s(e) for e, w in t.weights.items() if w]
        if len(sources) != len(set(sources)):
            raise PreconditionError(f"partition term on chart {t.chart!r} is not an s-section")
        for e, w in t.weights.items():
            if (Fraction(w) if _is_exact(w) else w) < 0:
                raise PreconditionError("partition weights must be non-negative")
            if e in cover_sum:
                cover_sum[e] += w
    for e, total in cover_sum.items():
        if not close(total, 1, tol):
            raise PreconditionError(f"partition sums to {total} at edge {e!r}, not 1")
    out = []
    for t in terms:
        g = {}
        for e, w in t.weights.items():
            fe = f.get(G.r(e), 0)
            if M.exact:
                g[e] = _sqrt(Fraction(w) * GaussianRational.coerce(fe).re, True)
            else:
                g[e] = _sqrt(float(w) * complex(fe).real, False)
        xi = induced_section(M, t.chart, g)
        out.append((t, xi, rank_one(M, xi, xi)))
    return out


def sum_operators(M: CorrespondenceModel, ops: Iterable[FiberedOperator]) -> FiberedOperator:
    total = zero_operator(M)
    for T in ops:
        total = total + T
    return total


# ---------------------------------------------------------------------------
# restriction to an invariant set


def restrict_model(M: CorrespondenceModel, F0: Iterable) -> CorrespondenceModel:
    F0 = frozenset(F0)
    ok, why = is_invariant(M.graph, F0)
    if not ok:
        raise PreconditionError(f"F0 is not invariant: {why}")
    H = M.graph.restrict(F0)
    keep = set(H.edge_ids)
    cover = {a: M.cover[a] & keep for a in M.charts}
    cocycle = {}
    for (a, b), t in M.cocycle.items():
        common = cover[a] & cover[b]
        if common:
            cocycle[(a, b)] = {e: t[e] for e in common}
    return CorrespondenceModel.build(H, cover, cocycle)


def restrict_element(M: CorrespondenceModel, x: ModuleElement, F0: Iterable) -> ModuleElement:
    N = restrict_model(M, F0)
    return ModuleElement({a: {e: x.values[a][e] for e in N.cover[a]} for a in N.charts})


def restriction_omega(M: CorrespondenceModel, T: FiberedOperator, F0: Iterable) -> FiberedOperator:
    """``omega(T)``: the blocks of ``T`` over the fibers of ``F0``, an operator on ``X(F)``."""
    N = restrict_model(M, F0)
    F0 = frozenset(F0)
    return FiberedOperator({v: T.basis[v] for v in N.graph.vertices}, {v: T.blocks[v] for v in N.graph.vertices if v in F0})


def in_kernel_blockwise(T: FiberedOperator, F0: Iterable, tol: float = IDENTITY_TOL) -> bool:
    F0 = frozenset(F0)
    return all(close(z, 0, tol) for v, B in T.blocks.items() if v in F0 for z in B.flat)


def in_kernel_columnwise(M: CorrespondenceModel, T: FiberedOperator, F0: Iterable, tol: float = IDENTITY_TOL) -> bool:
    """``T x`` lies in ``X . C0(E0 - F0)`` for every basis section ``x``."""
    F0 = frozenset(F0)
    off = {v: (0 if v in F0 else 1) for v in M.graph.vertices}
    for e in M.graph.edge_ids:
        y = apply(M, T, indicator(M, e))
        if not elements_close(y, right_action(M, y, off), tol):
            return False
    return True


def kernel_rank_one_expansion(M: CorrespondenceModel, T: FiberedOperator, F0: Iterable) -> list:
    """``T = sum T_ij Theta_{|i>,|j>}`` over fibers off ``F0``; valid when ``T`` lies in ``ker omega``."""
    F0 = frozenset(F0)
    terms = []
    for v, B in T.blocks.items():
        if v in F0:
            continue
        basis = T.basis[v]
        for i, e in enumerate(basis):
            for j, f in enumerate(basis):
                terms.append((B[i, j], e, f))
    return terms


# ---------------------------------------------------------------------------
# tensor powers and path spaces


class _ProductCocycle(Mapping):
    """``s_AB(p) = prod s_{a_i b_i}(p_i)``, evaluated on demand.

    A product of cocycles is a cocycle, so the triple check that a general
    model runs on construction is not repeated here; it would cost the cube of
    the number of product charts.
    """

    def __init__(self, factor: CorrespondenceModel, cover: Mapping):
        self._factor = factor
        self._cover = cover
        names = sorted(cover)
        self._keys = [(A, B) for i, A in enumerate(names) for B in names[i + 1:] if cover[A] & cover[B]]
        self._key_set = set(self._keys)
        self._cache: dict = {}

    def __getitem__(self, key):
        if key not in self._cache:
            A, B = key
            if key not in self._key_set:
                raise KeyError(key)
            self._cache[key] = {p: self._value(A, B, p) for p in self._cover[A] & self._cover[B]}
        return self._cache[key]

    def _value(self, A, B, p):
        z = self._factor.one
        for a, b, e in zip(A, B, p):
            z = z * self._factor.s(a, b, e)
        return z

    def __iter__(self):
        return iter(self._keys)

    def __len__(self):
        return len(self._keys)


def path_model(M: CorrespondenceModel, n: int, max_n: int = DEFAULT_MAX_TENSOR) -> CorrespondenceModel:
    """The model on ``E_n`` with product charts ``(a1..an)`` and product cocycle."""
    if not 1 <= n <= max_n:
        raise PreconditionError(f"tensor length {n} outside 1..{max_n}")
    P = path_space(M.graph, n)
    G = P.as_graph()
    cover: dict = {}
    for p in P.paths:
        for combo in _product([M.charts_of(e) for e in p]):
            cover.setdefault(combo, set()).add(p)
    cover = {A: frozenset(ps) for A, ps in cover.items()}
    charts = tuple(sorted(cover))
    charts_of = {p: tuple(A for A in charts if p in cover[A]) for p in G.edge_ids}
    return CorrespondenceModel(G, charts, cover, _ProductCocycle(M, cover), M.exact, charts_of, G.source_fibers())


def _product(lists):
    out = [()]
    for options in lists:
        out = [t + (a,) for t in out for a in options]
    return out


def diamond(M: CorrespondenceModel, xs: Sequence[ModuleElement], P: CorrespondenceModel) -> ModuleElement:
    """``(x1 <> ... <> xn)_(a1..an)(e1..en) = prod x_i,a_i(e_i)``."""
    vals = {}
    for A in P.charts:
        # only products of nonzero entries can be nonzero
        row = dict.fromkeys(P.cover[A], M.zero)
        supports = [[(e, w) for e, w in x.values[a].items() if w] for x, a in zip(xs, A)]
        for combo in _product(supports):
            p = tuple(e for e, _ in combo)
            if p in row:
                z = M.one
                for _, w in combo:
                    z = z * w
                row[p] = z
        vals[A] = row
    return ModuleElement(vals)


def tensor_inner(M: CorrespondenceModel, xs: Sequence[ModuleElement], ys: Sequence[ModuleElement], max_n: int = DEFAULT_MAX_TENSOR) -> dict:
    """``<x1 (x) ... , y1 (x) ...>`` computed by ``<x (x) xi, y (x) eta> = <xi, <x, y> . eta>``."""
    if len(xs) != len(ys) or not 1 <= len(xs) <= max_n:
        raise PreconditionError(f"tensor length must be in 1..{max_n} on both sides")
    g = inner_product(M, xs[0], ys[0])
    for x, y in zip(xs[1:], ys[1:]):
        g = inner_product(M, x, left_action(M, g, y))
    return g


# ---------------------------------------------------------------------------
# coboundary twists


class CoboundaryMismatch(PreconditionError):
    def __init__(self, message, overlap):
        self.overlap = overlap
        super().__init__(message)


def twist_model(M: CorrespondenceModel, b: Mapping) -> CorrespondenceModel:
    """The model with ``s'_ab(e) = s_ab(e) conj(b_a(e)) b_b(e)``."""
    cocycle = {}
    for a in M.charts:
        for c in M.charts:
            if a < c and M.cover[a] & M.cover[c]:
                cocycle[(a, c)] = {e: M.s(a, c, e) * _conj(b[a][e]) * b[c][e] for e in M.cover[a] & M.cover[c]}
    return CorrespondenceModel.build(M.graph, M.cover, cocycle)


@dataclass(frozen=True)
class CoboundaryUnitary:
    source: CorrespondenceModel
    target: CorrespondenceModel
    b: Mapping

    def __call__(self, x: ModuleElement) -> ModuleElement:
        return ModuleElement({a: {e: _conj(self.b[a][e]) * v for e, v in t.items()} for a, t in x.values.items()})

    def inverse(self, y: ModuleElement) -> ModuleElement:
        return ModuleElement({a: {e: self.b[a][e] * v for e, v in t.items()} for a, t in y.values.items()})


def random_zero_cochain(M: CorrespondenceModel, rng: random.Random) -> dict:
    return {a: {e: random_unit(rng, M.exact) for e in M.cover[a]} for a in M.charts}


def coboundary_unitary(M: CorrespondenceModel, M2: CorrespondenceModel, b: Mapping, tol: float = IDENTITY_TOL) -> CoboundaryUnitary:
    """``(U x)_a = conj(b_a) x_a``, a unitary from ``M`` onto ``M2`` when ``s2 = s conj(b_a) b_b``."""
    if M.graph != M2.graph or dict(M.cover) != dict(M2.cover):
        raise PreconditionError("models must share graph and cover")
    for a in M.charts:
        for e in M.cover[a]:
            z = b[a][e]
            if not close(z * _conj(z), 1, tol):
                raise PreconditionError(f"b_{a}({e!r}) is not a unit")
    for a in M.charts:
        for c in M.charts:
            if a < c:
                for e in sorted(M.cover[a] & M.cover[c], key=repr):
                    want = M.s(a, c, e) * _conj(b[a][e]) * b[c][e]
                    if not close(M2.s(a, c, e), want, tol):
                        raise CoboundaryMismatch(
                            f"s'_{a}{c}({e!r}) = {M2.s(a, c, e)} but s conj(b_a) b_b = {want}", overlap=(a, c, e)
                        )
    return CoboundaryUnitary(M, M2, b)


# ---------------------------------------------------------------------------
# the ideal J_X at the discrete tier


def materialize_families(G: DiscreteGraph, copies: int) -> DiscreteGraph:
    """Replace each infinite family by ``copies`` parallel edges."""
    edges = list(G.edges)
    for k, (src, rng) in enumerate(G.infinite_families):
        edges += [(f"~inf{k}.{i}", src, rng) for i in range(copies)]
    return DiscreteGraph.build(G.vertices, edges)


def _phi_column(G: DiscreteGraph, v) -> np.ndarray:
    return np.array([1.0 if G.r(e) == v else 0.0 for e in G.edge_ids])


def covariance_vertices(G: DiscreteGraph, truncation: int = 3, tol: float = IDENTITY_TOL) -> frozenset:
    """Vertices ``v`` with ``phi(1_v)`` of finite rank and ``1_v`` orthogonal to ``ker phi``.

    Infinite families are truncated at ``N`` and ``2N`` edges; a rank that
    changes between the two is infinite. ``ker phi`` is the numerical null
    space of ``f -> phi(f)`` on vertex functions.
    """
    small = materialize_families(G, truncation)
    large = materialize_families(G, 2 * truncation)
    finite = set()
    for v in G.vertices:
        M1, M2 = trivial_model(small), trivial_model(large)
        f = {w: int(w == v) for w in G.vertices}
        if phi_matrix(M1, f).rank(tol) == phi_matrix(M2, f).rank(tol):
            finite.add(v)
    A = np.column_stack([_phi_column(large, v) for v in G.vertices]) if G.vertices else np.zeros((0, 0))
    if A.size:
        _, sing, vh = np.linalg.svd(A)
        rank = int((sing > tol).sum())
        null = vh[rank:]
    else:
        null = np.eye(len(G.vertices))
    perp = {v for i, v in enumerate(G.vertices) if not null.size or np.all(np.abs(null[:, i]) <= 1e-9)}
    return frozenset(finite & perp)


# ---------------------------------------------------------------------------
# surgery


def surgery_model(M: CorrespondenceModel, Y: Iterable) -> CorrespondenceModel:
    """The doubled model on ``E_Y``: ``N_a,Y = N_a x {0, 1}`` and ``s_ab,Y(e, n) = s_ab(e)``."""
    from .graph import graph_surgery

    H = graph_surgery(M.graph, Y)
    ids = set(H.edge_ids)
    cover = {a: {(e, n) for e in M.cover[a] for n in (0, 1) if (e, n) in ids} for a in M.charts}
    cocycle = {k: {(e, n): z for e, z in t.items() for n in (0, 1) if (e, n) in ids} for k, t in M.cocycle.items()}
    return CorrespondenceModel.build(H, cover, cocycle)


# ---------------------------------------------------------------------------
# the full property suite on one model


def _record(results: dict, name: str, ok: bool, gap: float = 0.0):
    entry = results.setdefault(name, {"ok": True, "max_gap": 0.0, "checked": 0})
    entry["ok"] = entry["ok"] and bool(ok)
    entry["max_gap"] = max(entry["max_gap"], float(gap))
    entry["checked"] += 1


def _fgap(a: Mapping, b: Mapping) -> float:
    return max((abs(complex(a[v]) - complex(b[v])) for v in a), default=0.0)


def property_suite(M: CorrespondenceModel, rng: random.Random, samples: int = 5, tol: float = IDENTITY_TOL) -> dict:
    """Run every module law on random data over ``M``; returns ``{law: {ok, max_gap, checked}}``."""
    G = M.graph
    res: dict = {}
    exact = M.exact
    for _ in range(samples):
        xs = [random_element(M, rng) for _ in range(3)]
        x, y = xs[0], xs[1]
        f = random_function(M, rng)
        g = random_function(M, rng)
        # Gram positivity and Cauchy-Schwarz
        gram = {v: np.zeros((3, 3), dtype=complex) for v in G.vertices}
        for i, a in enumerate(xs):
            for j, b in enumerate(xs):
                ip = inner_product(M, a, b, tol)
                for v in G.vertices:
                    gram[v][i, j] = complex(ip[v])
        floor = min((np.linalg.eigvalsh((B + B.conj().T) / 2).min() for B in gram.values()), default=0.0)
        _record(res, "gram_positivity", floor >= -POSITIVITY_TOL, max(0.0, -floor))
        nx = max((complex(z).real for z in inner_product(M, x, x).values()), default=0.0)
        ny = max((complex(z).real for z in inner_product(M, y, y).values()), default=0.0)
        lhs = max((abs(complex(z)) for z in inner_product(M, x, y).values()), default=0.0)
        _record(res, "cauchy_schwarz", lhs <= math.sqrt(max(nx, 0) * max(ny, 0)) + POSITIVITY_TOL)
        # actions and the adjoint relation
        fbar = {v: _conj(M.scalar(z)) for v, z in f.items()}
        a1 = inner_product(M, left_action(M, fbar, y), x)
        a2 = inner_product(M, y, left_action(M, f, x))
        _record(res, "adjoint_relation", all(close(a1[v], a2[v], tol) for v in a1), _fgap(a1, a2))
        r1 = inner_product(M, x, right_action(M, y, f))
        r2 = {v: inner_product(M, x, y)[v] * M.scalar(f[v]) for v in G.vertices}
        _record(res, "right_linearity", all(close(r1[v], r2[v], tol) for v in r1), _fgap(r1, r2))
        _record(res, "actions_compatible", is_compatible(M, left_action(M, f, x), tol) and is_compatible(M, right_action(M, x, f), tol))
        # phi is a *-homomorphism and agrees with the left action
        fg = {v: M.scalar(f[v]) * M.scalar(g[v]) for v in G.vertices}
        P1, P2 = phi_matrix(M, fg), phi_matrix(M, f) @ phi_matrix(M, g)
        _record(res, "phi_multiplicative", operators_close(P1, P2, tol), max_entry_gap(P1, P2))
        P3, P4 = phi_matrix(M, fbar), phi_matrix(M, f).adjoint()
        _record(res, "phi_adjoint", operators_close(P3, P4, tol), max_entry_gap(P3, P4))
        _record(res, "phi_is_left_action", elements_close(apply(M, phi_matrix(M, f), x), left_action(M, f, x), tol))
        z = xs[2]
        T = rank_one(M, x, y)
        tz = apply(M, T, z)
        ip = inner_product(M, y, z)
        want = right_action(M, x, ip)
        _record(res, "rank_one_action", elements_close(tz, want, tol))
        # rank-one decomposition of phi(f)
        if exact:
            fpos = {v: Fraction(rng.randint(0, 4)) ** 2 / Fraction(rng.randint(1, 3)) ** 2 for v in G.vertices}
        else:
            fpos = {v: rng.random() * 3 for v in G.vertices}
        terms = phi_decomposition(M, fpos, auto_partition(M, rng), tol)
        S, Phi = sum_operators(M, [t[2] for t in terms]), phi_matrix(M, fpos)
        _record(res, "rank_one_decomposition", operators_close(S, Phi, tol), max_entry_gap(S, Phi))
        # induced sections
        pieces = decompose(M, x)
        _record(res, "induced_decomposition", elements_close(reconstruct(M, pieces), x, tol))
        if len(M.charts) >= 1:
            a0, a1 = rng.choice(M.charts), rng.choice(M.charts)
            fa = {e: random_scalar(rng, exact) for e in M.cover[a0]}
            ga = {e: random_scalar(rng, exact) for e in M.cover[a1]}
            i1 = inner_product(M, induced_section(M, a0, fa), induced_section(M, a1, ga), tol)
            i2 = induced_inner_formula(M, a0, fa, a1, ga)
            _record(res, "induced_inner_product", all(close(i1[v], i2[v], tol) for v in i1), _fgap(i1, i2))
        # coboundary unitary
        b = random_zero_cochain(M, rng)
        M2 = twist_model(M, b)
        U = coboundary_unitary(M, M2, b, tol)
        ux, uy = U(x), U(y)
        ok = is_compatible(M2, ux, tol) and is_compatible(M2, uy, tol)
        i1, i2 = inner_product(M2, ux, uy, tol), inner_product(M, x, y, tol)
        _record(res, "unitary_inner_product", ok and all(close(i1[v], i2[v], tol) for v in i1), _fgap(i1, i2))
        _record(res, "unitary_left_action", elements_close(U(left_action(M, f, x)), left_action(M2, f, ux), tol))
        _record(res, "unitary_right_action", elements_close(U(right_action(M, x, f)), right_action(M2, ux, f), tol))
        _record(res, "unitary_inverse", elements_close(U.inverse(ux), x, tol))
    # omega over every invariant set
    from .ideals import invariant_sets

    for F0 in invariant_sets(G):
        A, B = random_operator(M, rng), random_operator(M, rng)
        wAB, wAwB = restriction_omega(M, A @ B, F0), restriction_omega(M, A, F0) @ restriction_omega(M, B, F0)
        _record(res, "omega_multiplicative", operators_close(wAB, wAwB, tol), max_entry_gap(wAB, wAwB))
        w1, w2 = restriction_omega(M, A.adjoint(), F0), restriction_omega(M, A, F0).adjoint()
        _record(res, "omega_adjoint", operators_close(w1, w2, tol), max_entry_gap(w1, w2))
        x, y = random_element(M, rng), random_element(M, rng)
        N = restrict_model(M, F0)
        t1 = restriction_omega(M, rank_one(M, x, y), F0)
        t2 = rank_one(N, restrict_element(M, x, F0), restrict_element(M, y, F0))
        _record(res, "omega_rank_one", operators_close(t1, t2, tol), max_entry_gap(t1, t2))
        K = A
        for v in K.blocks:
            if v in F0 or rng.random() < 0.3:
                K.blocks[v][...] = M.zero if exact else 0
        _record(res, "omega_kernel_characterization", in_kernel_blockwise(K, F0, tol) == in_kernel_columnwise(M, K, F0, tol))
        if in_kernel_blockwise(K, F0, tol):
            span = sum_operators(M, [rank_one(M, indicator(M, e), indicator(M, f2)).scaled(c) for c, e, f2 in kernel_rank_one_expansion(M, K, F0)])
            _record(res, "omega_kernel_span", operators_close(span, K, tol), max_entry_gap(span, K))
    # tensor powers on basis tensors
    for n in range(1, DEFAULT_MAX_TENSOR + 1):
        P = path_model(M, n)
        deltas = [indicator(M, e) for e in G.edge_ids]
        for _ in range(samples):
            if not deltas:
                break
            xs = [rng.choice(deltas) for _ in range(n)]
            ys = [rng.choice(deltas) for _ in range(n)]
            t = tensor_inner(M, xs, ys)
            if P.graph.edges:
                d = inner_product(P, diamond(M, xs, P), diamond(M, ys, P))
            else:
                d = {v: M.zero for v in G.vertices}
            _record(res, "tensor_inner_product", all(close(t[v], d[v], tol) for v in t), _fgap(t, d))
    return res
