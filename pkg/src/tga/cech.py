"""Covers, circle-valued 1-cocycles, and their integer cohomology classes.

A circle value ``exp(2 pi i theta)`` is stored by its rational log-lift
``theta``. Lifts are functions on the overlap they live on, so a cocycle
records ``theta_ab`` at every *site* of the overlap ``N_ab``: for the
vertex-star cover of a simplicial complex the sites are the barycenters of
the simplices containing ``{a, b}``; for a cover of a discrete set they are
the points themselves. Each triple overlap of a star cover is a single open
triangle, so the integer defect ``theta_ab + theta_bc - theta_ac`` is read
at exactly one site, which is all the class depends on.

A single rational per overlap is accepted everywhere as the constant lift.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable, Mapping

from . import snf
from .errors import PreconditionError, SchemaError, UnsupportedError
from .snf import AbelianGroup

Chart = Hashable
Site = Hashable


# ---------------------------------------------------------------------------
# simplicial spaces


@dataclass(frozen=True)
class SimplicialSpace:
    """A simplicial complex of dimension at most 2, oriented by ascending vertex id."""

    vertices: tuple
    edges: tuple[tuple, ...]
    triangles: tuple[tuple, ...]

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable = (), triangles: Iterable = ()) -> "SimplicialSpace":
        verts = sorted(set(vertices))
        vset = set(verts)
        es, ts = [], []
        for raw in edges:
            e = tuple(sorted(raw))
            if len(e) != 2 or e[0] == e[1]:
                raise SchemaError(f"degenerate 1-simplex {list(raw)}", path="simplices.1")
            es.append(e)
        for raw in triangles:
            t = tuple(sorted(raw))
            if len(t) != 3 or len(set(t)) != 3:
                raise SchemaError(f"degenerate 2-simplex {list(raw)}", path="simplices.2")
            ts.append(t)
        if len(set(es)) != len(es):
            raise SchemaError("1-simplex listed twice (orientation is by ascending id)", path="simplices.1")
        if len(set(ts)) != len(ts):
            raise SchemaError("2-simplex listed twice (orientation is by ascending id)", path="simplices.2")
        missing = sorted({v for e in es for v in e} - vset)
        if missing:
            raise SchemaError(f"1-simplices use undeclared vertices {missing}", path="simplices.1")
        eset = set(es)
        for t in ts:
            faces = [f for f in combinations(t, 2) if f not in eset]
            if faces:
                raise SchemaError(f"2-simplex {list(t)} is missing faces {faces}", path="simplices.2")
        space = cls(tuple(verts), tuple(sorted(es)), tuple(sorted(ts)))
        d0, d1 = coboundary_matrices(space)
        if any(any(x for x in row) for row in snf.matmul(d1, d0)):
            raise SchemaError("coboundary does not square to zero", path="simplices")
        return space

    @property
    def dimension(self) -> int:
        return 2 if self.triangles else 1 if self.edges else 0

    @property
    def simplices(self) -> tuple[tuple, ...]:
        return tuple((v,) for v in self.vertices) + self.edges + self.triangles

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "simplices": {"1": [list(e) for e in self.edges], "2": [list(t) for t in self.triangles]},
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "SimplicialSpace":
        if not isinstance(doc, Mapping) or "vertices" not in doc:
            raise SchemaError("space document needs 'vertices'", path="$")
        unknown = set(doc) - {"vertices", "simplices"}
        if unknown:
            raise SchemaError(f"unknown keys {sorted(unknown)}", path="$")
        simp = doc.get("simplices", {})
        bad = set(simp) - {"1", "2"}
        if bad:
            raise SchemaError(f"only dimensions 1 and 2 are supported, got {sorted(bad)}", path="$.simplices")
        return cls.build(doc["vertices"], simp.get("1", []), simp.get("2", []))


def coboundary_matrices(space: SimplicialSpace) -> tuple[list[list[int]], list[list[int]]]:
    """Integer matrices of ``d0: C^0 -> C^1`` and ``d1: C^1 -> C^2``.

    ``(d0 b)[a,b] = b_b - b_a`` and ``(d1 c)[a,b,c] = c_bc - c_ac + c_ab``.
    """
    vi = {v: i for i, v in enumerate(space.vertices)}
    ei = {e: i for i, e in enumerate(space.edges)}
    d0 = []
    for a, b in space.edges:
        row = [0] * len(vi)
        row[vi[a]] -= 1
        row[vi[b]] += 1
        d0.append(row)
    d1 = []
    for a, b, c in space.triangles:
        row = [0] * len(ei)
        row[ei[(b, c)]] += 1
        row[ei[(a, c)]] -= 1
        row[ei[(a, b)]] += 1
        d1.append(row)
    return d0, d1


def cohomology_group(space: SimplicialSpace) -> AbelianGroup:
    """``H^2(X; Z) = C^2 / im d1`` (there are no 3-simplices, so every 2-cochain is a cocycle)."""
    _, d1 = coboundary_matrices(space)
    return snf.cokernel(d1, len(space.triangles), len(space.edges))


def circle_complex() -> SimplicialSpace:
    return SimplicialSpace.build([0, 1, 2], [(0, 1), (1, 2), (0, 2)])


def sphere_complex() -> SimplicialSpace:
    """The boundary of the 3-simplex."""
    tris = list(combinations(range(4), 3))
    return SimplicialSpace.build(range(4), combinations(range(4), 2), tris)


def torus_complex() -> SimplicialSpace:
    """The 7-vertex triangulation of the torus."""
    tris = set()
    for i in range(7):
        tris.add(tuple(sorted((i, (i + 1) % 7, (i + 3) % 7))))
        tris.add(tuple(sorted((i, (i + 2) % 7, (i + 3) % 7))))
    edges = {tuple(sorted(p)) for t in tris for p in combinations(t, 2)}
    return SimplicialSpace.build(range(7), edges, tris)


def projective_plane_complex() -> SimplicialSpace:
    """The 6-vertex triangulation of the real projective plane."""
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
            (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]
    edges = {tuple(sorted(p)) for t in tris for p in combinations(t, 2)}
    return SimplicialSpace.build(range(6), edges, tris)


# ---------------------------------------------------------------------------
# covers


@dataclass(frozen=True)
class CoverModel:
    """An indexed cover with its nerve, sampled at sites.

    ``site_charts[x]`` is the set of charts containing site ``x``;
    ``pair_components[(a, b)]`` (with ``a < b``) lists the connected
    components of ``N_ab`` as sets of sites; ``annular`` holds the pairs
    whose overlap is an annulus (band covers only).
    """

    style: str
    charts: tuple
    site_charts: Mapping = field(default_factory=dict)
    pair_components: Mapping = field(default_factory=dict)
    annular: frozenset = frozenset()
    space: SimplicialSpace | None = None
    genus: int | None = None

    @property
    def pairs(self) -> tuple:
        return tuple(sorted(set(self.pair_components) | set(self.annular)))

    @property
    def triples(self) -> tuple:
        out = set()
        for charts in self.site_charts.values():
            out.update(combinations(sorted(charts), 3))
        return tuple(sorted(out))

    def sites(self, *charts) -> tuple:
        """Sites lying in every one of ``charts``, sorted."""
        want = set(charts)
        return tuple(sorted(x for x, cs in self.site_charts.items() if want <= cs))

    def component_of(self, pair: tuple, site: Site) -> int:
        for k, comp in enumerate(self.pair_components[pair]):
            if site in comp:
                return k
        raise KeyError((pair, site))

    def contractible_nerve(self) -> bool:
        return not self.annular

    def to_json(self):
        if self.style == "star":
            return "star"
        if self.style == "band":
            return {"style": "band", "genus": self.genus}
        return {
            "style": "discrete",
            "charts": {str(a): sorted(x for x, cs in self.site_charts.items() if a in cs) for a in self.charts},
        }


def star_cover(space: SimplicialSpace) -> CoverModel:
    """Open stars of the vertices; ``N_a1...ak`` is the open star of the simplex ``{a1..ak}``."""
    site_charts = {s: frozenset(s) for s in space.simplices}
    comps = {}
    for e in space.edges:
        comps[e] = (frozenset(s for s in space.simplices if set(e) <= set(s)),)
    return CoverModel("star", space.vertices, site_charts, comps, space=space)


def discrete_cover(charts: Mapping[Chart, Iterable]) -> CoverModel:
    """Cover of a finite discrete set by the given subsets; every point is its own component."""
    members = {a: frozenset(pts) for a, pts in charts.items()}
    points = set().union(*members.values()) if members else set()
    site_charts = {p: frozenset(a for a, pts in members.items() if p in pts) for p in points}
    comps = {}
    for a, b in combinations(sorted(members), 2):
        common = sorted(members[a] & members[b])
        if common:
            comps[(a, b)] = tuple(frozenset([p]) for p in common)
    return CoverModel("discrete", tuple(sorted(members)), site_charts, comps)


def band_cover(genus: int = 0) -> CoverModel:
    """Two disks ``L`` and ``U`` meeting in an annulus on a closed oriented surface.

    For genus ``g > 0`` the disk ``U`` is the complement of a smaller disk
    inside ``L`` (the usual clutching picture); the combinatorics is the same.
    """
    if genus < 0:
        raise PreconditionError("genus must be non-negative")
    return CoverModel("band", ("L", "U"), {}, {}, frozenset({("L", "U")}), genus=genus)


# ---------------------------------------------------------------------------
# cocycles


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, float):
        raise TypeError("use exact rationals (Fraction, int or 'p/q' strings), not floats")
    return Fraction(x)


@dataclass(frozen=True)
class CechCocycle:
    """Log-lifts ``theta[(a, b)][site]`` for ``a < b`` and windings on annular overlaps."""

    theta: Mapping = field(default_factory=dict)
    winding: Mapping = field(default_factory=dict)

    def value(self, a: Chart, b: Chart, site: Site) -> Fraction:
        if a == b:
            return Fraction(0)
        if a < b:
            return self.theta[(a, b)][site]
        return -self.theta[(b, a)][site]

    def winding_of(self, a: Chart, b: Chart) -> int:
        if a == b:
            return 0
        return self.winding[(a, b)] if a < b else -self.winding[(b, a)]

    def __add__(self, other: "CechCocycle") -> "CechCocycle":
        """Pointwise product of the circle-valued cocycles (sum of lifts)."""
        theta = {p: {x: v + other.theta[p][x] for x, v in d.items()} for p, d in self.theta.items()}
        wind = {p: w + other.winding.get(p, 0) for p, w in self.winding.items()}
        return CechCocycle(theta, wind)


def make_cocycle(cover: CoverModel, theta: Mapping = (), winding: Mapping = ()) -> CechCocycle:
    """Normalize user data into a :class:`CechCocycle` and check its shape.

    ``theta`` maps ordered chart pairs (either orientation) to a rational or
    to a ``{site: rational}`` mapping. Pairs may be given in both
    orientations only if they are antisymmetric. Every nonempty
    non-annular overlap must be present and nothing else.
    """
    theta = dict(theta)
    winding = dict(winding)
    out: dict = {}
    for (a, b), val in theta.items():
        if a == b:
            raise SchemaError(f"diagonal entry ({a!r},{a!r}) is fixed to 0 and must not be given", path="theta")
        key, sign = ((a, b), 1) if a < b else ((b, a), -1)
        if key not in cover.pair_components:
            raise SchemaError(f"no contractible overlap for pair {key}", path="theta")
        sites = cover.sites(*key)
        if isinstance(val, Mapping):
            got = set(val)
            if got != set(sites):
                raise SchemaError(
                    f"pair {key}: sites {sorted(got, key=repr)} differ from overlap sites {list(sites)}", path="theta"
                )
            samples = {x: sign * _frac(val[x]) for x in sites}
        else:
            samples = {x: sign * _frac(val) for x in sites}
        if key in out and out[key] != samples:
            raise SchemaError(f"pair {key} given in both orientations without antisymmetry", path="theta")
        out[key] = samples
    missing = sorted(set(cover.pair_components) - set(out))
    if missing:
        raise SchemaError(f"missing overlaps {missing}", path="theta")
    wout: dict = {}
    for (a, b), w in winding.items():
        key, sign = ((a, b), 1) if a < b else ((b, a), -1)
        if key not in cover.annular:
            raise SchemaError(f"winding given for non-annular pair {key}", path="winding")
        if int(w) != w:
            raise SchemaError(f"winding for {key} must be an integer", path="winding")
        w = sign * int(w)
        if key in wout and wout[key] != w:
            raise SchemaError(f"pair {key} given in both orientations without antisymmetry", path="winding")
        wout[key] = w
    missing = sorted(set(cover.annular) - set(wout))
    if missing:
        raise SchemaError(f"missing windings for annular overlaps {missing}", path="winding")
    return CechCocycle(out, wout)


def coboundary(cover: CoverModel, b: Mapping) -> CechCocycle:
    """``theta_ab = b_a - b_b`` for a 0-cochain ``b`` (constant or ``{site: value}`` per chart)."""
    def at(a, x):
        v = b[a]
        return _frac(v[x] if isinstance(v, Mapping) else v)

    theta = {p: {x: at(p[0], x) - at(p[1], x) for x in cover.sites(*p)} for p in cover.pair_components}
    return CechCocycle(theta, {p: 0 for p in cover.annular})


def _defect(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


@dataclass(frozen=True)
class Violation:
    triple: tuple
    site: Site
    defect: Fraction


@dataclass(frozen=True)
class CocycleCheck:
    ok: bool
    violations: tuple[Violation, ...] = ()

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"triple": list(v.triple), "site": _site_json(v.site), "defect": str(v.defect)} for v in self.violations
            ],
        }


def _site_json(x):
    return list(x) if isinstance(x, tuple) else x


def _triple_sum(S: CechCocycle, a, b, c, x) -> Fraction:
    return S.value(a, b, x) + S.value(b, c, x) - S.value(a, c, x)


def check_cocycle(cover: CoverModel, S: CechCocycle) -> CocycleCheck:
    """Whether ``s_ab s_bc = s_ac`` on every triple overlap, i.e. the lift sum is an integer."""
    _check_shape(cover, S)
    bad = []
    for a, b, c in cover.triples:
        for x in cover.sites(a, b, c):
            d = _defect(_triple_sum(S, a, b, c, x))
            if d:
                bad.append(Violation((a, b, c), x, d))
    return CocycleCheck(not bad, tuple(bad))


def _check_shape(cover: CoverModel, S: CechCocycle):
    if set(S.theta) != set(cover.pair_components):
        raise SchemaError("cocycle overlaps do not match the cover's nerve", path="theta")
    for p, samples in S.theta.items():
        if set(samples) != set(cover.sites(*p)):
            raise SchemaError(f"pair {p}: sites do not match the overlap", path="theta")
    if set(S.winding) != set(cover.annular):
        raise SchemaError("windings do not match the annular overlaps", path="winding")


def integer_class(cover: CoverModel, S: CechCocycle) -> dict:
    """The integer 2-cocycle ``n[(a,b,c), site] = theta_ab + theta_bc - theta_ac``."""
    if cover.annular:
        raise UnsupportedError("cover has annular overlaps; use the bundle module (euler_number) instead")
    check = check_cocycle(cover, S)
    if not check.ok:
        raise PreconditionError(f"not a cocycle: {len(check.violations)} violated triple overlaps")
    n = {}
    for a, b, c in cover.triples:
        for x in cover.sites(a, b, c):
            q = _triple_sum(S, a, b, c, x)
            n[((a, b, c), x)] = q.numerator
    return n


def integer_coboundary_defect(cover: CoverModel, n: Mapping) -> dict:
    """``(delta n)`` on every quadruple overlap site; all zero for a 2-cocycle."""
    quads = set()
    for charts in cover.site_charts.values():
        quads.update(combinations(sorted(charts), 4))
    out = {}
    for q in sorted(quads):
        for x in cover.sites(*q):
            a, b, c, d = q
            out[(q, x)] = n[((b, c, d), x)] - n[((a, c, d), x)] + n[((a, b, d), x)] - n[((a, b, c), x)]
    return out


@dataclass(frozen=True)
class CohomologyClass:
    """Coordinates of a class in ``Z^rank + Z/d1 + ...``."""

    group: AbelianGroup
    free: tuple[int, ...]
    torsion: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.torsion)

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        if other.group != self.group:
            raise ValueError("classes live in different groups")
        free = tuple(a + b for a, b in zip(self.free, other.free))
        tors = tuple((a + b) % d for a, b, d in zip(self.torsion, other.torsion, self.group.torsion))
        return CohomologyClass(self.group, free, tors)

    def to_json(self) -> dict:
        return {"group": self.group.to_dict(), "free": list(self.free), "torsion": list(self.torsion)}


def fundamental_cycles(space: SimplicialSpace) -> list[list[int]]:
    """Canonical basis of integer 2-cycles, one row per cycle over ``space.triangles``.

    Rows are in Hermite form scanned from the last triangle backwards, so each
    cycle has a positive coefficient on its last triangle. For the boundary of
    the 3-simplex this is the outward orientation ``[123] - [023] + [013] - [012]``.
    """
    _, d1 = coboundary_matrices(space)
    nt = len(space.triangles)
    boundary = snf.transpose(d1, len(space.edges))  # d2: C_2 -> C_1
    ker = snf.integer_kernel(boundary, nt) if nt else []
    return snf.hermite_rows(ker, order=range(nt - 1, -1, -1))


def class_of_integer_cochain(space: SimplicialSpace, n_by_triangle: Mapping) -> CohomologyClass:
    """Image of an integer 2-cochain in ``H^2(X; Z)``.

    Free coordinates are pairings with :func:`fundamental_cycles`; torsion
    coordinates come from the Smith form of ``d1``.
    """
    _, d1 = coboundary_matrices(space)
    vec = [int(n_by_triangle.get(t, 0)) for t in space.triangles]
    free = tuple(sum(c * x for c, x in zip(cyc, vec)) for cyc in fundamental_cycles(space))
    group = cohomology_group(space)
    tors: tuple[int, ...] = ()
    if group.torsion:
        U, D, _ = snf.smith_normal_form(d1, len(space.edges))
        d = snf.diagonal(D)
        y = [sum(u * x for u, x in zip(row, vec)) for row in U]
        tors = tuple(y[i] % d[i] for i in range(len(d)) if d[i] > 1)
    return CohomologyClass(group, free, tors)


def classify_cocycle(space: SimplicialSpace, cover: CoverModel, S: CechCocycle) -> CohomologyClass:
    """The class of ``S`` in ``H^2(space; Z)`` for the vertex-star cover."""
    if cover.style != "star" or cover.space != space:
        raise UnsupportedError("classification needs the vertex-star cover of the given complex")
    n = integer_class(cover, S)
    return class_of_integer_cochain(space, {tri: v for (tri, _), v in n.items()})


@dataclass(frozen=True)
class Trivialization:
    """Either a 0-cochain ``b`` with ``theta = b_a - b_b + (integer, constant per component)``
    or a nonzero class certifying that no such ``b`` exists."""

    ok: bool
    b: Mapping | None = None
    shift: Mapping | None = None
    certificate: CohomologyClass | None = None

    def to_json(self) -> dict:
        if not self.ok:
            return {"ok": False, "class": self.certificate.to_json() if self.certificate else None}
        return {
            "ok": True,
            "b": {str(a): {_key(x): str(v) for x, v in sorted(d.items(), key=lambda kv: repr(kv[0]))} for a, d in self.b.items()},
        }


def _key(x) -> str:
    return ",".join(map(str, x)) if isinstance(x, tuple) else str(x)


def trivialize(cover: CoverModel, S: CechCocycle) -> Trivialization:
    """Write ``S`` as a coboundary of circle-valued functions on the charts, if possible.

    Solves ``n = delta m`` over the integers with ``m`` constant on each
    connected component of each pairwise overlap, subtracts ``m`` from the
    lifts, and reads ``b_a`` at a site off the exact lift against the
    smallest chart containing that site.
    """
    if cover.annular:
        raise UnsupportedError("band covers carry windings; use the bundle module")
    n = integer_class(cover, S)
    cols = [(p, k) for p in sorted(cover.pair_components) for k in range(len(cover.pair_components[p]))]
    ci = {c: i for i, c in enumerate(cols)}
    rows = sorted(n, key=repr)
    M = []
    for (a, b, c), x in rows:
        row = [0] * len(cols)
        row[ci[((b, c), cover.component_of((b, c), x))]] += 1
        row[ci[((a, c), cover.component_of((a, c), x))]] -= 1
        row[ci[((a, b), cover.component_of((a, b), x))]] += 1
        M.append(row)
    m = snf.solve_integer(M, [n[r] for r in rows], len(cols)) if rows else [0] * len(cols)
    if m is None:
        cert = classify_cocycle(cover.space, cover, S) if cover.style == "star" else None
        return Trivialization(False, certificate=cert)
    shift = {c: m[i] for c, i in ci.items()}

    def exact(a, b_, x):
        if a == b_:
            return Fraction(0)
        key = (a, b_) if a < b_ else (b_, a)
        sign = 1 if a < b_ else -1
        return S.value(a, b_, x) - sign * shift[(key, cover.component_of(key, x))]

    b = {}
    for a in cover.charts:
        b[a] = {x: exact(a, min(cover.site_charts[x]), x) for x in cover.sites(a)}
    return Trivialization(True, b=b, shift=shift)


def trivialization_residuals(cover: CoverModel, S: CechCocycle, b: Mapping) -> dict:
    """``theta_ab(x) - b_a(x) + b_b(x)`` at every pair site (integers, constant per component, when ``b`` trivializes)."""
    return {
        (p, x): S.value(p[0], p[1], x) - b[p[0]][x] + b[p[1]][x]
        for p in cover.pair_components
        for x in cover.sites(*p)
    }


def is_trivialization(cover: CoverModel, S: CechCocycle, b: Mapping) -> bool:
    res = trivialization_residuals(cover, S, b)
    for p, comps in cover.pair_components.items():
        for comp in comps:
            vals = {res[(p, x)] for x in comp}
            if len(vals) != 1 or vals.pop().denominator != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# random data for property tests and scripts


def random_rational(rng: random.Random, span: int = 20, max_den: int = 12) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def random_zero_cochain(cover: CoverModel, rng: random.Random, constant: bool = False) -> dict:
    if constant:
        return {a: random_rational(rng) for a in cover.charts}
    return {a: {x: random_rational(rng) for x in cover.sites(a)} for a in cover.charts}


def random_cocycle(cover: CoverModel, rng: random.Random, n: Mapping | None = None, spread: int = 3) -> CechCocycle:
    """A random valid cocycle ``delta b + m`` with integer ``m`` per pair site.

    When ``n`` (keyed like :func:`integer_class`) is given on a star cover,
    ``m`` is chosen so that the cocycle realizes exactly that integer cochain.
    """
    base = coboundary(cover, random_zero_cochain(cover, rng))
    m = {p: {x: rng.randint(-spread, spread) for x in cover.sites(*p)} for p in cover.pair_components}
    if n is not None:
        if cover.style != "star":
            raise UnsupportedError("prescribed integer classes are supported on star covers only")
        for (a, b, c), x in n:
            m[(a, c)][x] = m[(a, b)][x] + m[(b, c)][x] - int(n[((a, b, c), x)])
    theta = {p: {x: base.theta[p][x] + m[p][x] for x in base.theta[p]} for p in base.theta}
    return CechCocycle(theta, {p: 0 for p in cover.annular})


# ---------------------------------------------------------------------------
# JSON


def parse_rational(s, path: str) -> Fraction:
    try:
        if isinstance(s, bool) or isinstance(s, float):
            raise ValueError
        return Fraction(s)
    except (ValueError, TypeError, ZeroDivisionError):
        raise SchemaError(f"expected a rational like 'p/q', got {s!r}", path=path) from None


def _chart_lookup(cover: CoverModel):
    table = {str(a): a for a in cover.charts}

    def find(token: str, path: str):
        token = token.strip()
        if token not in table:
            raise SchemaError(f"unknown chart {token!r}", path=path)
        return table[token]

    return find


def _site_lookup(cover: CoverModel, pair):
    table = {_key(x): x for x in cover.sites(*pair)}

    def find(token: str, path: str):
        norm = ",".join(t.strip() for t in str(token).split(","))
        if norm not in table:
            raise SchemaError(f"unknown site {token!r} for overlap {pair}", path=path)
        return table[norm]

    return find


def cover_from_json(doc, space: SimplicialSpace | None) -> CoverModel:
    if doc == "star":
        if space is None:
            raise SchemaError("a star cover needs a simplicial space", path="$.cover")
        return star_cover(space)
    if isinstance(doc, Mapping) and doc.get("style") == "band":
        genus = doc.get("genus", 0)
        if not isinstance(genus, int) or isinstance(genus, bool) or genus < 0:
            raise SchemaError("band genus must be a non-negative integer", path="$.cover.genus")
        return band_cover(genus)
    if isinstance(doc, Mapping) and doc.get("style") == "discrete":
        charts = doc.get("charts")
        if not isinstance(charts, Mapping):
            raise SchemaError("discrete cover needs a 'charts' object", path="$.cover.charts")
        return discrete_cover({a: pts for a, pts in charts.items()})
    raise SchemaError("cover must be 'star', {'style':'band',...} or {'style':'discrete',...}", path="$.cover")


def cocycle_from_json(doc: Mapping, space: SimplicialSpace | None = None) -> tuple[CoverModel, CechCocycle]:
    if not isinstance(doc, Mapping):
        raise SchemaError("cocycle document must be an object", path="$")
    unknown = set(doc) - {"cover", "theta", "winding"}
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}", path="$")
    cover = cover_from_json(doc.get("cover", "star"), space)
    chart = _chart_lookup(cover)
    theta, winding = {}, {}
    for key, val in doc.get("theta", {}).items():
        path = f"$.theta[{key!r}]"
        parts = key.split(",")
        if len(parts) != 2:
            raise SchemaError("pair keys look like 'a,b'", path=path)
        a, b = chart(parts[0], path), chart(parts[1], path)
        if isinstance(val, Mapping):
            pair = (a, b) if a < b else (b, a)
            site = _site_lookup(cover, pair)
            theta[(a, b)] = {site(k, path): parse_rational(v, f"{path}[{k!r}]") for k, v in val.items()}
        else:
            theta[(a, b)] = parse_rational(val, path)
    for key, val in doc.get("winding", {}).items():
        path = f"$.winding[{key!r}]"
        parts = key.split(",")
        if len(parts) != 2:
            raise SchemaError("pair keys look like 'a,b'", path=path)
        if not isinstance(val, int) or isinstance(val, bool):
            raise SchemaError("winding must be an integer", path=path)
        winding[(chart(parts[0], path), chart(parts[1], path))] = val
    return cover, make_cocycle(cover, theta, winding)
