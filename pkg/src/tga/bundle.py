"""Circle bundles glued from clutching data, and the invariants read off that data.

A bundle over a closed oriented surface of genus ``g`` is glued from two
trivial pieces over the disks ``L`` (lower) and ``U`` (upper) of a band
cover. The transition ``s_LU`` on the equatorial annulus has a degree ``k``
around the equator (oriented as the boundary of ``U``), and ``k`` is the
Euler number. The Hopf datum has ``k = +1``.

Over a discrete base every overlap is a set of points, so each cocycle is
a coboundary and the bundle is one circle per point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import snf
from .cech import CechCocycle, CoverModel, check_cocycle
from .errors import PreconditionError, SchemaError, UnsupportedError
from .snf import AbelianGroup


@dataclass(frozen=True)
class CircleBundle:
    kind: str  # "surface" | "discrete"
    genus: int = 0
    winding: int = 0
    size: int = 0
    components: int = 1

    def to_json(self) -> dict:
        if self.kind == "surface":
            return {"base": {"kind": "surface", "genus": self.genus}, "winding": self.winding}
        return {"base": {"kind": "discrete", "size": self.size}, "winding": 0}


@dataclass(frozen=True)
class GroupPresentation:
    """Words are tuples of ``(generator, exponent)`` pairs."""

    generators: tuple[str, ...]
    relators: tuple[tuple[tuple[str, int], ...], ...]

    def __post_init__(self):
        known = set(self.generators)
        for w in self.relators:
            stray = {g for g, _ in w} - known
            if stray:
                raise SchemaError(f"relator uses undeclared generators {sorted(stray)}", path="presentation")

    def __str__(self) -> str:
        rels = ", ".join(_word_text(w) for w in self.relators)
        return f"< {', '.join(self.generators)} | {rels} >"

    def to_json(self) -> dict:
        return {"generators": list(self.generators), "relators": [_word_text(w) for w in self.relators]}


def _word_text(word) -> str:
    if not word:
        return "1"
    return " ".join(g if e == 1 else f"{g}^{e}" for g, e in word)


def commutator(a: str, b: str) -> tuple:
    return ((a, 1), (b, 1), (a, -1), (b, -1))


def hopf_projection(z1: complex, z2: complex) -> tuple[complex, float]:
    """``p(z1, z2) = (2 z1 conj(z2), |z1|^2 - |z2|^2)`` from the unit 3-sphere to the unit 2-sphere."""
    return 2 * z1 * z2.conjugate(), abs(z1) ** 2 - abs(z2) ** 2


def hopf_transition(w: complex, h: float) -> complex:
    """Transition ``s_LU`` between the Hopf sections over the two hemispheres.

    Over ``U`` (``h > -1``) the section is ``z2 > 0``; over ``L`` (``h < 1``)
    it is ``z1 > 0``. A point of the fiber is ``z1/|z1|`` in the ``L`` gauge
    and ``z2/|z2|`` in the ``U`` gauge; their ratio is ``w / |w|``.
    """
    if abs(w) < 1e-12:
        raise PreconditionError("transition is undefined at the poles")
    return w / abs(w)


def winding_number(values: Sequence[complex]) -> int:
    """Degree of a closed sampled loop in the punctured plane."""
    vals = np.asarray(values, dtype=complex)
    steps = np.angle(np.roll(vals, -1) / vals)
    if np.max(np.abs(steps)) > math.pi / 2:
        raise PreconditionError("loop is undersampled for a reliable winding count")
    total = steps.sum() / (2 * math.pi)
    k = round(total)
    if abs(total - k) > 1e-9:
        raise PreconditionError(f"winding sum {total} is not near an integer")
    return int(k)


def hopf_winding(samples: int = 256) -> int:
    """Winding of the Hopf transition along the equator, oriented as the boundary of the upper disk.

    The equator ``h = 0`` is traced by ``(z1, z2) = (e^{it}/sqrt2, 1/sqrt2)``,
    whose image ``w = e^{it}`` runs counterclockwise when viewed from the
    upper pole.
    """
    r = 1 / math.sqrt(2)
    vals = []
    for k in range(samples):
        t = 2 * math.pi * k / samples
        w, h = hopf_projection(r * cmath.exp(1j * t), complex(r))
        assert abs(h) < 1e-12
        vals.append(hopf_transition(w, h))
    return winding_number(vals)


def build_bundle(base, cocycle=None) -> CircleBundle:
    """Record the bundle of a clutching datum.

    ``base`` is ``{"kind": "surface", "genus": g}`` or ``{"kind": "discrete",
    "size": m}``. For a surface, ``cocycle`` is an integer winding or a
    band-cover :class:`CechCocycle`; for a discrete base it is ``None`` or a
    ``(cover, cocycle)`` pair on a discrete cover, which only affects the
    gluing of charts and never the circle count.
    """
    kind = base.get("kind") if isinstance(base, Mapping) else None
    if kind == "surface":
        genus = base.get("genus", 0)
        if not isinstance(genus, int) or isinstance(genus, bool) or genus < 0:
            raise SchemaError("genus must be a non-negative integer", path="$.base.genus")
        if isinstance(cocycle, CechCocycle):
            if ("L", "U") not in cocycle.winding:
                raise UnsupportedError("surface bundles are clutched over a band cover")
            k = cocycle.winding_of("L", "U")
        else:
            k = 0 if cocycle is None else cocycle
        if not isinstance(k, int) or isinstance(k, bool):
            raise SchemaError("winding must be an integer", path="$.winding")
        return CircleBundle("surface", genus=genus, winding=k)
    if kind == "discrete":
        size = base.get("size")
        if not isinstance(size, int) or isinstance(size, bool) or size < 0:
            raise SchemaError("discrete base needs a non-negative integer size", path="$.base.size")
        if isinstance(cocycle, int) and cocycle != 0:
            raise UnsupportedError("a discrete base has no nonzero winding")
        if cocycle not in (None, 0):
            cover, S = cocycle
            if cover.style != "discrete":
                raise UnsupportedError("discrete bases take discrete covers")
            if not check_cocycle(cover, S).ok:
                raise PreconditionError("not a cocycle")
            if len(cover.site_charts) != size:
                raise SchemaError("cover points do not match the base size", path="$.cover")
        return CircleBundle("discrete", size=size, components=size)
    raise UnsupportedError("base must be a closed oriented surface or a discrete set")


def component_count(bundle: CircleBundle, cover: CoverModel | None = None) -> int:
    """Connected components of the total space.

    For a discrete base the glued space ``(N_a x T) / ~`` is counted
    directly: one circle per (chart, point), merged along every overlap.
    """
    if bundle.kind == "surface":
        return 1
    if cover is None:
        return bundle.size
    parent = {(a, x): (a, x) for x, cs in cover.site_charts.items() for a in cs}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for x, cs in cover.site_charts.items():
        cs = sorted(cs)
        for a in cs[1:]:
            parent[find((a, x))] = find((cs[0], x))
    return len({find(p) for p in parent})


def euler_number(bundle: CircleBundle) -> int:
    if bundle.kind != "surface":
        raise UnsupportedError("Euler number is defined here for surface bases only")
    return bundle.winding


def pi1_presentation(bundle: CircleBundle) -> GroupPresentation:
    """``< a_i, b_i, f | [a_i, f], [b_i, f], prod [a_i, b_i] f^-e >``, or ``< f | >`` per circle."""
    if bundle.kind == "discrete":
        if bundle.size == 0:
            raise PreconditionError("the empty bundle has no base point")
        return GroupPresentation(("f",), ())
    g, e = bundle.genus, bundle.winding
    gens = [x for i in range(1, g + 1) for x in (f"a{i}", f"b{i}")] + ["f"]
    rels = []
    for i in range(1, g + 1):
        rels.append(commutator(f"a{i}", "f"))
        rels.append(commutator(f"b{i}", "f"))
    last = tuple(x for i in range(1, g + 1) for x in commutator(f"a{i}", f"b{i}"))
    if e:
        last += (("f", -e),)
    if last:
        rels.append(last)
    return GroupPresentation(tuple(gens), tuple(rels))


def abelianization(p: GroupPresentation) -> AbelianGroup:
    """Cokernel of the exponent-sum matrix (relators x generators)."""
    idx = {g: i for i, g in enumerate(p.generators)}
    M = []
    for w in p.relators:
        row = [0] * len(idx)
        for g, e in w:
            row[idx[g]] += e
        M.append(row)
    return snf.cokernel(snf.transpose(M, len(idx)), len(idx), len(M))


def bundle_report(bundle: CircleBundle, cover: CoverModel | None = None) -> dict:
    pres = pi1_presentation(bundle)
    ab = abelianization(pres)
    out = {
        "components": component_count(bundle, cover),
        "pi1": str(ab),
        "pi1_abelianization": ab.to_dict(),
        "presentation": pres.to_json(),
    }
    if bundle.kind == "surface":
        out["euler"] = euler_number(bundle)
        out["genus"] = bundle.genus
    else:
        out["base_size"] = bundle.size
        out["pi1"] = f"{ab} per component"
    return out


def bundle_from_json(doc: Mapping) -> tuple[CircleBundle, CoverModel | None]:
    if not isinstance(doc, Mapping):
        raise SchemaError("bundle document must be an object", path="$")
    unknown = set(doc) - {"base", "winding"}
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}", path="$")
    if "base" not in doc:
        raise SchemaError("missing 'base'", path="$")
    base = doc["base"]
    if not isinstance(base, Mapping):
        raise SchemaError("base must be an object", path="$.base")
    allowed = {"surface": {"kind", "genus"}, "discrete": {"kind", "size"}}.get(base.get("kind"))
    if allowed is None:
        raise SchemaError("base kind must be 'surface' or 'discrete'", path="$.base.kind")
    if set(base) - allowed:
        raise SchemaError(f"unknown keys {sorted(set(base) - allowed)}", path="$.base")
    w = doc.get("winding", 0)
    if not isinstance(w, int) or isinstance(w, bool):
        raise SchemaError("winding must be an integer", path="$.winding")
    return build_bundle(base, w), None
