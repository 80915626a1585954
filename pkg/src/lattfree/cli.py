"""Command-line front end.

Exit codes: 0 success or FREE, 2 a negative verdict (NOT_*, rejected
certificate), 3 UNKNOWN, 1 errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import freeness, serialize
from .linalg import ZLattice
from .numberfield import Unsupported
from .pseudo import steinitz
from .units import ClosureTooLarge, sk1_generators, unit_representatives
from .wedderburn import (
    RegistryError, central_idempotents, check_idempotents, conductor, h2prime_report, load,
)

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE, EXIT_UNKNOWN = 0, 1, 2, 3
VERDICT_EXIT = {
    freeness.FREE: EXIT_OK,
    freeness.NOT_FREE: EXIT_NEGATIVE,
    freeness.NOT_LOCALLY_FREE: EXIT_NEGATIVE,
    freeness.NOT_FREE_OVER_MAXORDER: EXIT_NEGATIVE,
    freeness.UNKNOWN: EXIT_UNKNOWN,
}


def _emit(args, doc: dict, text: str) -> None:
    print(text)
    if args.json_out:
        Path(args.json_out).write_text(serialize.dumps(doc))


def _registry(args) -> str | None:
    return args.registry or os.environ.get("LATTFREE_REGISTRY")


def _ring_from_args(args):
    if args.algebra:
        a, b = (int(x) for x in args.algebra.split(","))
        return serialize.quaternion_order(a, b), f"maximal order of ({a},{b} | Q)"
    if args.quadratic is not None:
        return serialize.ring_from_json({"quadratic": args.quadratic}), f"O of Q(sqrt {args.quadratic})"
    return serialize.ring_from_json({"quadratic": 1}), "Z"


# ---------------------------------------------------------------- subcommands

def cmd_wedderburn(args) -> int:
    wd = load(args.group, _registry(args))
    check_idempotents(wd, central_idempotents(wd))
    comps = [{"index": c.index, "description": c.describe(), "n": c.n, "kind": c.kind,
              "center": c.F.name, "dim": c.dim} for c in wd.components]
    lines = [f"{wd.id}: {len(comps)} components, idempotents verified"]
    lines += [f"  [{c['index']}] {c['description']}  (dim {c['dim']})" for c in comps]
    _emit(args, {"group": wd.id, "registry_version": wd.version, "components": comps,
                 "idempotents_verified": True}, "\n".join(lines))
    return EXIT_OK


def cmd_conductor(args) -> int:
    wd = load(args.group, _registry(args))
    if args.instance:
        inst = serialize.instance_from_json(serialize.read_json(args.instance), _registry(args))
        order_qg = freeness.instance_order(inst)
        A = ZLattice.from_generators([wd.to_W(o) for o in order_qg.vectors()], wd.dim)
    else:
        A = wd.group_ring
    cd = conductor(wd, A)
    rep = h2prime_report(wd, args.rank)
    gens = cd.g_generators
    lines = [f"conductor of the order in the maximal order of Q[{wd.id}]:"]
    for c, g in zip(wd.components, gens):
        lines.append(f"  [{c.index}] {c.describe()}: g contains {g}")
    lines.append(f"H2' verdict (d = {args.rank}): {rep.verdict}")
    doc = {"group": wd.id, "g_generators": gens,
           "g_ideals": [serialize.lattice_to_json(g) for g in cd.g],
           "h2prime": rep.as_dict()}
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_steinitz(args) -> int:
    doc = serialize.read_json(args.file)
    serialize.validate(doc, serialize.STEINITZ_SCHEMA, "steinitz input")
    S = serialize.ring_from_json(doc["ring"])
    pairs = []
    for p in doc["pairs"]:
        ideal = S.left_ideal(serialize.elements(p["ideal"]))
        pairs.append((ideal, tuple(serialize.elements(p["vector"]))))
    st = steinitz(S, pairs, seed=args.seed)
    xi = S.pip(st.steinitz_ideal)
    out = {
        "free_part": [[serialize.element_to_json(x) for x in z] for z in st.free_part],
        "steinitz_ideal": serialize.lattice_to_json(st.steinitz_ideal),
        "last_element": [serialize.element_to_json(x) for x in st.last_element],
        "steinitz_principal": xi is not None,
        "generator": serialize.element_to_json(xi) if xi is not None else None,
    }
    text = (f"Steinitz form: {len(st.free_part)} free summands plus one twisted summand; "
            f"the Steinitz ideal is {'principal' if xi is not None else 'not principal'}")
    _emit(args, out, text)
    return EXIT_OK


def cmd_pip(args) -> int:
    doc = serialize.read_json(args.file)
    serialize.validate(doc, serialize.PIP_SCHEMA, "pip input")
    S = serialize.ring_from_json(doc["ring"])
    a = S.left_ideal(serialize.elements(doc["ideal"]))
    xi = S.pip(a)
    out = {"principal": xi is not None,
           "generator": serialize.element_to_json(xi) if xi is not None else None}
    _emit(args, out, f"generator: {out['generator']}" if xi is not None else "not principal")
    return EXIT_OK


def cmd_sk1(args) -> int:
    a, b = (int(x) for x in args.algebra.split(","))
    S = serialize.quaternion_order(a, b)
    data = sk1_generators(S)
    gens = []
    lines = []
    for g in data.generators:
        mat = [[serialize.element_to_json(x) for x in row] for row in g.matrix]
        gens.append({"prime": g.prime, "group_order": g.group_order, "matrix": mat,
                     "inverse": [[serialize.element_to_json(x) for x in row] for row in g.inverse],
                     "w_min_poly": {"trace": g.min_poly[0], "norm": g.min_poly[1]}})
        lines.append(f"p = {g.prime}: cyclic SK1 factor of order {g.group_order}")
        lines.append(f"  S^-1 T = {mat}")
    _emit(args, {"algebra": [a, b], "generators": gens, "group_order": data.group_order},
          "\n".join(lines))
    return EXIT_OK


def cmd_unit_reps(args) -> int:
    S, name = _ring_from_args(args)
    rs = unit_representatives(S, args.modulus, args.rank, method=args.method, cap=args.closure_cap)
    out = {"ring": name, "modulus": args.modulus, "rank": args.rank, "method": args.method,
           "size": len(rs)}
    text = f"image of GL_{args.rank}({name}) mod {args.modulus}: {len(rs)} elements"
    if args.cross_check:
        if args.rank != 1:
            raise ValueError("--cross-check compares unit images and needs --rank 1")
        other = "ktheory" if args.method == "generators" else "generators"
        rs2 = unit_representatives(S, args.modulus, 1, method=other, cap=args.closure_cap)
        same = rs.image_set() == rs2.image_set()
        out["cross_check"] = {"method": other, "size": len(rs2), "equal": same}
        text += f"\ncross-check against {other}: {len(rs2)} elements, equal = {same}"
        if not same:
            _emit(args, out, text)
            return EXIT_NEGATIVE
    _emit(args, out, text)
    return EXIT_OK


def cmd_isfree(args) -> int:
    inst = serialize.instance_from_json(serialize.read_json(args.instance), _registry(args))
    cert = freeness.is_free(inst, seed=args.seed, tuple_cap=args.tuple_cap,
                            closure_cap=args.closure_cap, unit_method=args.unit_method,
                            timings=args.timings)
    doc = cert.as_dict()
    lines = [f"verdict: {cert.verdict}"]
    lines += [f"  generator: {serialize.element_to_json(g)}" for g in cert.generators]
    lines += [f"  reason: {r}" for r in cert.reasons]
    _emit(args, doc, "\n".join(lines))
    return VERDICT_EXIT[cert.verdict]


def cmd_verify(args) -> int:
    cert = serialize.certificate_from_json(serialize.read_json(args.certificate))
    inst = serialize.instance_from_json(serialize.read_json(args.instance), _registry(args))
    ok = freeness.verify_certificate(inst, cert)
    _emit(args, {"verified": ok, "verdict": cert.verdict},
          "certificate verified" if ok else "certificate rejected")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_assoc_order(args) -> int:
    inst = serialize.instance_from_json(serialize.read_json(args.instance), _registry(args))
    order = freeness.associated_order(inst)
    G = inst.wd.group
    basis = serialize.lattice_to_json(order)
    lines = [f"associated order in Q[{G.id}] (coordinates on {', '.join(G.labels)}):"]
    lines += ["  " + " ".join(row) for row in basis]
    _emit(args, {"group": G.id, "labels": list(G.labels), "basis": basis}, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--registry", help="directory of registry JSON files")
    common.add_argument("--json-out", metavar="PATH", help="also write the result as JSON")

    p = argparse.ArgumentParser(prog="lattfree", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("wedderburn", parents=[common], help="components of Q[G]")
    s.add_argument("group")
    s.set_defaults(func=cmd_wedderburn)

    s = sub.add_parser("conductor", parents=[common], help="conductor of an order in the maximal order")
    s.add_argument("group")
    s.add_argument("--instance", help="use the order of this instance instead of Z[G]")
    s.add_argument("--rank", type=int, default=1, help="module rank d for the hypothesis report")
    s.set_defaults(func=cmd_conductor)

    s = sub.add_parser("steinitz", parents=[common], help="Steinitz form of a pseudo-basis")
    s.add_argument("file")
    s.set_defaults(func=cmd_steinitz)

    s = sub.add_parser("pip", parents=[common], help="principal ideal test")
    s.add_argument("file")
    s.set_defaults(func=cmd_pip)

    s = sub.add_parser("sk1", parents=[common], help="SK1 generators of a definite quaternion order")
    s.add_argument("--algebra", required=True, help='"a,b" for the algebra (a,b | Q)')
    s.set_defaults(func=cmd_sk1)

    s = sub.add_parser("unit-reps", parents=[common], help="image of GL_d in a finite quotient")
    ring = s.add_mutually_exclusive_group()
    ring.add_argument("--algebra", help='"a,b": maximal order of (a,b | Q)')
    ring.add_argument("--quadratic", type=int, help="ring of integers of Q(sqrt D)")
    s.add_argument("--modulus", type=int, required=True)
    s.add_argument("--rank", type=int, default=1)
    s.add_argument("--method", choices=["generators", "ktheory"], default="generators")
    s.add_argument("--cross-check", action="store_true",
                   help="compare with the other k = 1 route")
    s.add_argument("--closure-cap", type=int, default=freeness.CLOSURE_CAP)
    s.set_defaults(func=cmd_unit_reps)

    s = sub.add_parser("isfree", parents=[common], help="decide freeness of an instance")
    s.add_argument("instance")
    s.add_argument("--tuple-cap", type=int, default=freeness.TUPLE_CAP)
    s.add_argument("--closure-cap", type=int, default=freeness.CLOSURE_CAP)
    s.add_argument("--unit-method", choices=["generators", "ktheory"], default="generators")
    s.add_argument("--timings", action="store_true", help="record step timings in the output")
    s.set_defaults(func=cmd_isfree)

    s = sub.add_parser("verify", parents=[common], help="re-check a FREE certificate")
    s.add_argument("certificate")
    s.add_argument("instance")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("assoc-order", parents=[common], help="associated order of an instance")
    s.add_argument("instance")
    s.set_defaults(func=cmd_assoc_order)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (serialize.SchemaError, freeness.InstanceError, RegistryError, KeyError,
            Unsupported, ClosureTooLarge, ValueError, ArithmeticError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
