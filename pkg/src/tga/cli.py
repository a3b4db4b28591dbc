"""Command-line front end: ``tga <command> <input.json> [options]``.

Reports are canonical JSON (sorted keys, LF endings) with the schema version
and the tolerances in force. Exit codes: 0 analysed, 2 schema error,
3 precondition error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from typing import Any

from . import bundle as bundle_mod
from . import cech, correspondence, graph, ideals, simplicity
from .errors import PreconditionError, SchemaError

SCHEMA_VERSION = "1"


def canonical(obj: Any) -> Any:
    """Turn report values into plain JSON types with a deterministic order."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((canonical(v) for v in obj), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def dumps(report: dict) -> str:
    return json.dumps(canonical(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def as_text(report: Any, prefix: str = "") -> str:
    lines = []
    if isinstance(report, dict):
        for k in sorted(report):
            v = report[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{prefix}{k}:")
                lines.append(as_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v)}")
    elif isinstance(report, list):
        for v in report:
            if isinstance(v, (dict, list)):
                lines.append(f"{prefix}-")
                lines.append(as_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}- {json.dumps(v)}")
    return "\n".join(line for line in lines if line)


def load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"no such file {path}", path="$") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}", path="$") from None


def _graph(doc) -> graph.DiscreteGraph:
    if isinstance(doc, dict) and "cover" in doc:
        doc = {k: v for k, v in doc.items() if k not in ("cover", "cocycle")}
    return graph.DiscreteGraph.from_json(doc)


def _vertex_list(text: str, G: graph.DiscreteGraph) -> list:
    by_name = {str(v): v for v in G.vertices}
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if tok not in by_name:
            raise SchemaError(f"unknown vertex {tok!r}", path="--Y")
        out.append(by_name[tok])
    return out


def _seed() -> int:
    raw = os.environ.get("TGA_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"TGA_SEED must be an integer, got {raw!r}", path="env.TGA_SEED") from None


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args):
    return {"classification": graph.classify_vertices(_graph(load(args.input))).to_json()}


def cmd_paths(args):
    doc = load(args.input)
    G = _graph(doc)
    P = graph.path_space(G, args.n)
    out = {
        "n": args.n,
        "count": len(P.paths),
        "paths": [{"edges": list(p), "r": P.r(p), "s": P.s(p)} for p in P.paths],
    }
    if isinstance(doc, dict) and "cover" in doc:
        M = correspondence.model_from_json(doc)
        PM = correspondence.path_model(M, args.n, max_n=max(args.n, correspondence.DEFAULT_MAX_TENSOR))
        out["product_cover"] = {"/".join(map(str, A)): sorted(["/".join(map(str, p)) for p in PM.cover[A]]) for A in PM.charts}
    return out


def cmd_cycles(args):
    G = _graph(load(args.input))
    free, cycles = graph.is_topologically_free(G)
    return {
        "cycles_without_entrances": [
            {"edges": list(c.edges), "base_points": sorted(c.base_points), "has_entrance": c.has_entrance} for c in cycles
        ],
        "topologically_free": free,
    }


def cmd_surgery(args):
    doc = load(args.input)
    G = _graph(doc)
    Y = _vertex_list(args.Y, G)
    H = graph.graph_surgery(G, Y)
    out = {"graph": H.to_json(), "classification": graph.classify_vertices(H).to_json()}
    if isinstance(doc, dict) and "cover" in doc:
        out["model"] = correspondence.surgery_model(correspondence.model_from_json(doc), Y).to_json()
    return out


def _space_and_cocycle(args):
    space_doc = load(args.space)
    space = cech.SimplicialSpace.from_json(space_doc) if space_doc else None
    cover, S = cech.cocycle_from_json(load(args.cocycle), space)
    return space, cover, S


def cmd_cocycle_check(args):
    _, cover, S = _space_and_cocycle(args)
    return {"check": cech.check_cocycle(cover, S).to_json()}


def cmd_cohomology(args):
    space = cech.SimplicialSpace.from_json(load(args.input))
    return {"H2": cech.cohomology_group(space).to_dict(), "H2_text": str(cech.cohomology_group(space))}


def cmd_classify_cocycle(args):
    space, cover, S = _space_and_cocycle(args)
    if space is None:
        raise PreconditionError("classification needs a simplicial space")
    cls = cech.classify_cocycle(space, cover, S)
    triv = cech.trivialize(cover, S)
    return {"class": cls.to_json(), "zero": cls.is_zero, "trivializable": triv.ok}


def cmd_bundle(args):
    b, cover = bundle_mod.bundle_from_json(load(args.input))
    return bundle_mod.bundle_report(b, cover)


def cmd_ideals(args):
    return ideals.ideal_report(_graph(load(args.input)), args.max_vertices)


def cmd_simplicity(args):
    doc = load(args.input)
    G = _graph(doc)
    twist = correspondence.model_from_json(doc) if isinstance(doc, dict) and "cover" in doc else None
    return simplicity.simplicity_verdict(G, twist, args.max_vertices).to_json()


def cmd_verify_correspondence(args):
    M = correspondence.model_from_json(load(args.input))
    seed = _seed()
    res = correspondence.property_suite(M, random.Random(seed), samples=args.samples, tol=args.tolerance)
    return {"seed": seed, "exact": M.exact, "laws": res, "all_passed": all(v["ok"] for v in res.values())}


COMMANDS = {
    "classify": (cmd_classify, "vertex classes sce/fin/rg/sg"),
    "paths": (cmd_paths, "paths of length n"),
    "cycles": (cmd_cycles, "entrance-free cycles and topological freeness"),
    "surgery": (cmd_surgery, "the doubled graph E_Y"),
    "cocycle-check": (cmd_cocycle_check, "validate a circle-valued cocycle"),
    "cohomology": (cmd_cohomology, "H^2 of a simplicial space"),
    "classify-cocycle": (cmd_classify_cocycle, "class of a cocycle in H^2"),
    "bundle": (cmd_bundle, "Euler number and fundamental group of a clutched bundle"),
    "ideals": (cmd_ideals, "admissible pairs (gauge-invariant ideals)"),
    "simplicity": (cmd_simplicity, "simplicity verdict"),
    "verify-correspondence": (cmd_verify_correspondence, "run the correspondence law suite on a model"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--tolerance", type=float, default=correspondence.IDENTITY_TOL, help="identity tolerance")
    common.add_argument("--max-vertices", type=int, default=ideals.DEFAULT_MAX_VERTICES, help="brute-force guard")
    parser = argparse.ArgumentParser(prog="tga", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name in ("cocycle-check", "classify-cocycle"):
            p.add_argument("space", help="space JSON (use a file containing null for discrete covers)")
            p.add_argument("cocycle", help="cocycle JSON")
        else:
            p.add_argument("input")
        if name == "paths":
            p.add_argument("--n", type=int, required=True)
        if name == "surgery":
            p.add_argument("--Y", default="", help="comma-separated regular vertices")
        if name == "verify-correspondence":
            p.add_argument("--samples", type=int, default=5)
    return parser


def run(argv=None) -> tuple[str, int]:
    """Run one command; returns ``(output text, exit code)``."""
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command][0](args)
    except SchemaError as exc:
        return f"schema error: {exc}\n", 2
    except PreconditionError as exc:
        return f"precondition error: {exc}\n", 3
    report = dict(report)
    report["schema_version"] = SCHEMA_VERSION
    report["tolerances"] = {"identity": args.tolerance, "positivity": correspondence.POSITIVITY_TOL}
    report["command"] = args.command
    text = dumps(report) if args.format == "json" else as_text(canonical(report)) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return "", 0
    return text, 0


def main(argv=None) -> int:
    text, code = run(argv)
    (sys.stdout if code == 0 else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
