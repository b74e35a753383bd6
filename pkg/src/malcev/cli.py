"""Command-line driver. Every command prints one JSON report with sorted
keys; exit status 0 = ok, 1 = domain failure, 2 = input error."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Callable, Dict, List, Optional

from .cohomology import betti_numbers
from .duality import AlgebraMorphism, ReconstructionError, compare, reconstruct_hom
from .exact import format_rational, to_rational
from .group import GroupElement, MalcevGroup
from .lie import (
    LieAlgebra,
    free_nilpotent,
    graded,
    is_strictly_graded,
    lcs_dimensions,
    lcs_quotient_dimensions,
    lower_central_series,
    validate,
)
from .polymap import PolyMap, basis_indices, pull_inv, pull_m, pull_mtilde

OK, FAILURE, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def _read_json(arg: str):
    """A path to a JSON file, or inline JSON."""
    try:
        if os.path.exists(arg):
            with open(arg, encoding="utf-8") as fh:
                return json.load(fh)
        return json.loads(arg)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {arg!r}: {exc}") from exc


def load_spec(arg: str) -> LieAlgebra:
    data = _read_json(arg)
    # a report from `free` or `graded` carries the spec under results.spec
    if isinstance(data, dict) and "class" not in data and isinstance(data.get("results"), dict):
        data = data["results"].get("spec", data)
    try:
        return LieAlgebra.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed Lie algebra spec: {exc}") from exc


def load_element(group: MalcevGroup, arg: str) -> GroupElement:
    if not os.path.exists(arg) and not arg.lstrip().startswith(("{", "[")):
        raw = [c for c in arg.split(",") if c.strip()]
    else:
        data = _read_json(arg)
        raw = data["coords"] if isinstance(data, dict) else data
    try:
        return group.element([to_rational(c.strip() if isinstance(c, str) else c) for c in raw])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed group element {arg!r}: {exc}") from exc


def load_polymap(group: MalcevGroup, arg: str) -> PolyMap:
    data = _read_json(arg)
    if isinstance(data, list):
        data = {"terms": data}
    if "group" in data and data["group"] != group.algebra.content_hash():
        raise InputError("polynomial map was written for a different group")
    try:
        return PolyMap.from_json(group, data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed polynomial map: {exc}") from exc


def _file_hash(arg: str) -> str:
    blob = open(arg, "rb").read() if os.path.exists(arg) else arg.encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _vectors(vs) -> List[List[str]]:
    return [[format_rational(c) for c in v] for v in vs]


# ---------------------------------------------------------------------------
# commands: each returns (inputs, results, exit status)


def cmd_check(args):
    alg = load_spec(args.spec)
    rep = validate(alg)
    return {"spec": alg.content_hash()}, rep.to_json(), OK if rep.ok else FAILURE


def _valid(alg: LieAlgebra):
    rep = validate(alg)
    if not rep.ok:
        return rep.to_json()
    return None


def cmd_graded(args):
    alg = load_spec(args.spec)
    bad = _valid(alg)
    if bad:
        return {"spec": alg.content_hash()}, {"validation": bad}, FAILURE
    gr = graded(alg)
    return {"spec": alg.content_hash()}, {"spec": gr.to_json(), "strictly_graded": is_strictly_graded(gr)}, OK


def cmd_lcs(args):
    alg = load_spec(args.spec)
    bad = _valid(alg)
    if bad:
        return {"spec": alg.content_hash()}, {"validation": bad}, FAILURE
    series = lower_central_series(alg)
    results = {
        "dimensions": lcs_dimensions(alg),
        "quotient_dimensions": lcs_quotient_dimensions(alg),
        "bases": [_vectors(b) for b in series],
    }
    return {"spec": alg.content_hash()}, results, OK


def cmd_betti(args):
    alg = load_spec(args.spec)
    bad = _valid(alg)
    if bad:
        return {"spec": alg.content_hash()}, {"validation": bad}, FAILURE
    b = betti_numbers(alg)
    if args.max_n is not None:
        if args.max_n < 0:
            raise InputError("--max-n must be nonnegative")
        b = b[: args.max_n + 1]
    return {"spec": alg.content_hash()}, {"betti": b}, OK


def cmd_polbasis(args):
    alg = load_spec(args.spec)
    if args.degree < 0:
        raise InputError("--degree must be nonnegative")
    group = MalcevGroup(alg)
    try:
        exps = basis_indices(group, args.degree)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    results = {
        "degree": args.degree,
        "weights": list(group.weights),
        "variables": list(group.coord_names),
        "dimension": len(exps),
        "basis": [list(e) for e in exps],
    }
    return {"spec": alg.content_hash()}, results, OK


def cmd_mul(args):
    alg = load_spec(args.spec)
    group = MalcevGroup(alg)
    a = load_element(group, args.a)
    b = load_element(group, args.b)
    results = {"product": (a * b).to_json()}
    return {"spec": alg.content_hash(), "a": _file_hash(args.a), "b": _file_hash(args.b)}, results, OK


def cmd_pullback(args):
    alg = load_spec(args.spec)
    group = MalcevGroup(alg)
    xi = load_polymap(group, args.polymap)
    if args.op == "m":
        out = pull_m(xi).to_json()
    elif args.op == "mtilde":
        out = pull_mtilde(xi).to_json()
    else:
        out = pull_inv(xi).to_json()
    return {"spec": alg.content_hash(), "polymap": _file_hash(args.polymap)}, {"op": args.op, "pullback": out}, OK


def cmd_reconstruct(args):
    data = _read_json(args.morphism)
    try:
        psi = AlgebraMorphism.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed morphism: {exc}") from exc
    inputs = {"morphism": _file_hash(args.morphism)}
    flags = psi.flags.to_json()
    try:
        phi = reconstruct_hom(psi)
    except ReconstructionError as exc:
        return inputs, {"flags": flags, "error": str(exc)}, FAILURE
    return inputs, {"flags": flags, "homomorphism": phi.to_json()}, OK


def cmd_compare(args):
    a, b = load_spec(args.spec1), load_spec(args.spec2)
    for alg in (a, b):
        bad = _valid(alg)
        if bad:
            return {"spec1": a.content_hash(), "spec2": b.content_hash()}, {"validation": bad}, FAILURE
    return {"spec1": a.content_hash(), "spec2": b.content_hash()}, compare(a, b).to_json(), OK


def cmd_free(args):
    if args.gens < 1 or args.cls < 1:
        raise InputError("--gens and --class must be positive")
    alg = free_nilpotent(args.gens, args.cls)
    results = {
        "spec": alg.to_json(),
        "dimension": alg.dim,
        "hall_words": list(alg.hall_words),
    }
    return {"gens": args.gens, "class": args.cls}, results, OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="malcev", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn: Callable, help_text: str):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        return sp

    for name, fn, h in [
        ("check", cmd_check, "validate a Lie algebra spec"),
        ("graded", cmd_graded, "associated graded algebra"),
        ("lcs", cmd_lcs, "lower central series"),
    ]:
        add(name, fn, h).add_argument("spec")
    sp = add("betti", cmd_betti, "Betti numbers of the Chevalley-Eilenberg complex")
    sp.add_argument("spec")
    sp.add_argument("--max-n", type=int, default=None)
    sp = add("polbasis", cmd_polbasis, "ζ-monomial basis of Pol_d")
    sp.add_argument("spec")
    sp.add_argument("--degree", type=int, required=True)
    sp = add("mul", cmd_mul, "multiply two group elements")
    sp.add_argument("spec")
    sp.add_argument("a", help="element: JSON file, inline JSON, or comma-separated rationals")
    sp.add_argument("b")
    sp = add("pullback", cmd_pullback, "pull a polynomial map back along m, m~ or inversion")
    sp.add_argument("spec")
    sp.add_argument("--op", choices=["m", "mtilde", "inv"], required=True)
    sp.add_argument("polymap", help="JSON file or inline JSON")
    sp = add("reconstruct", cmd_reconstruct, "recover a homomorphism from an algebra morphism")
    sp.add_argument("morphism")
    sp = add("compare", cmd_compare, "compare quasi-isometry fingerprints")
    sp.add_argument("spec1")
    sp.add_argument("spec2")
    sp = add("free", cmd_free, "free nilpotent Lie algebra")
    sp.add_argument("--gens", type=int, required=True)
    sp.add_argument("--class", dest="cls", type=int, required=True)
    return p


def render(report: Dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inputs, results, status = args.func(args)
        report = {
            "command": args.command,
            "inputs": inputs,
            "results": results,
            "status": "ok" if status == OK else "failure",
        }
    except InputError as exc:
        status = INPUT_ERROR
        report = {"command": args.command, "inputs": {}, "results": {"error": str(exc)}, "status": "error"}
    print(render(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
