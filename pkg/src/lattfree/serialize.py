"""JSON formats for instances, certificates and ring descriptions.

Rationals travel as strings "p/q" (or "p"); documents are validated with
jsonschema before use and dumped with sorted keys so output is byte-stable.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema

from .freeness import FreenessCertificate, ProblemInstance
from .linalg import ZLattice
from .numberfield import NumberField, quadratic_field, rationals
from .pseudo import SkewOrder, field_order
from .quaternion import QuatAlgebra, maximalize_order, standard_order
from .wedderburn import load

RATIONAL = {"type": "string", "pattern": r"^-?\d+(/[1-9]\d*)?$"}
VECTOR = {"type": "array", "items": RATIONAL}
MATRIX = {"type": "array", "items": VECTOR}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["group", "lattice"],
    "additionalProperties": False,
    "properties": {
        "group": {"oneOf": [
            {"type": "string"},
            {"type": "object", "required": ["id", "labels", "mul_table"],
             "properties": {"id": {"type": "string"},
                            "labels": {"type": "array", "items": {"type": "string"}},
                            "mul_table": {"type": "array",
                                          "items": {"type": "array",
                                                    "items": {"type": "integer"}}}}},
        ]},
        "field": {"const": "Q"},
        "lattice": {
            "type": "object",
            "required": ["pseudo_basis", "action"],
            "additionalProperties": False,
            "properties": {
                "pseudo_basis": {"type": "array", "minItems": 1, "items": {
                    "type": "object", "required": ["ideal", "coords"],
                    "additionalProperties": False,
                    "properties": {"ideal": RATIONAL, "coords": VECTOR}}},
                "action": {"type": "object", "additionalProperties": MATRIX},
            },
        },
        "order": {"oneOf": [
            {"enum": ["group_ring", "associated"]},
            {"type": "object", "required": ["pseudo_basis"], "additionalProperties": False,
             "properties": {"pseudo_basis": {"type": "array", "items": {
                 "type": "object", "required": ["ideal", "coords"],
                 "additionalProperties": False,
                 "properties": {"ideal": RATIONAL, "coords": VECTOR}}}}},
        ]},
        "rank": {"type": "integer", "minimum": 1},
    },
}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["verdict", "group", "rank", "generators", "reasons", "component_log",
                 "seeds", "registry_version"],
    "properties": {
        "verdict": {"enum": ["FREE", "NOT_FREE", "NOT_LOCALLY_FREE", "NOT_FREE_OVER_MAXORDER",
                             "UNKNOWN"]},
        "group": {"type": "string"},
        "rank": {"type": "integer", "minimum": 1},
        "generators": {"type": "array", "items": VECTOR},
        "reasons": {"type": "array", "items": {"type": "string"}},
        "component_log": {"type": "array", "items": {"type": "object"}},
        "local_witnesses": {"type": "object", "additionalProperties": MATRIX},
        "seeds": {"type": "object"},
        "registry_version": {"type": "string"},
    },
}

RING_SCHEMA = {
    "oneOf": [
        {"type": "object", "required": ["quadratic"], "additionalProperties": False,
         "properties": {"quadratic": {"type": "integer"}}},
        {"type": "object", "required": ["min_poly"], "additionalProperties": False,
         "properties": {"min_poly": {"type": "array", "items": {"type": "integer"}},
                        "integral_basis": MATRIX}},
        {"type": "object", "required": ["quaternion"], "additionalProperties": False,
         "properties": {"quaternion": {"type": "array", "items": {"type": "integer"},
                                       "minItems": 2, "maxItems": 2}}},
    ]
}

IDEAL_PAIRS = {"type": "array", "items": {
    "type": "object", "required": ["ideal", "vector"], "additionalProperties": False,
    "properties": {"ideal": MATRIX, "vector": MATRIX}}}

STEINITZ_SCHEMA = {"type": "object", "required": ["ring", "pairs"], "additionalProperties": False,
                   "properties": {"ring": RING_SCHEMA, "pairs": IDEAL_PAIRS}}
PIP_SCHEMA = {"type": "object", "required": ["ring", "ideal"], "additionalProperties": False,
              "properties": {"ring": RING_SCHEMA, "ideal": MATRIX}}


class SchemaError(ValueError):
    pass


def validate(doc: Any, schema: dict, what: str) -> None:
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc),
                    key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors[:10]:
            path = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{what}: at {path}: {e.message}")
        raise SchemaError("\n".join(lines))


def frac(s: str) -> Fraction:
    return Fraction(s)


def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def read_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


# ---------------------------------------------------------------- instances

def instance_from_json(doc: dict, registry: str | None = None) -> ProblemInstance:
    validate(doc, INSTANCE_SCHEMA, "instance")
    group = doc["group"]
    if isinstance(group, dict):
        gid = group["id"]
        G = load(gid, registry).group
        if list(group["labels"]) != list(G.labels) or \
                [list(r) for r in group["mul_table"]] != [list(r) for r in G.mul]:
            raise SchemaError(f"instance: inline table for {gid} differs from the registry")
    else:
        gid = group
        G = load(gid, registry).group
    lat = doc["lattice"]
    basis = [tuple(frac(e["ideal"]) * frac(c) for c in e["coords"]) for e in lat["pseudo_basis"]]
    action = []
    for label in G.labels:
        if label not in lat["action"]:
            raise SchemaError(f"instance: at lattice/action: missing matrix for {label!r}")
        action.append([[frac(x) for x in row] for row in lat["action"][label]])
    extra = set(lat["action"]) - set(G.labels)
    if extra:
        raise SchemaError(f"instance: at lattice/action: unknown elements {sorted(extra)}")
    order = doc.get("order", "group_ring")
    if isinstance(order, dict):
        order = [[frac(e["ideal"]) * frac(c) for c in e["coords"]] for e in order["pseudo_basis"]]
    return ProblemInstance(gid, basis, action, order, doc.get("rank"), registry)


def instance_to_json(inst: ProblemInstance) -> dict:
    G = inst.wd.group
    doc = {
        "group": inst.group,
        "field": "Q",
        "lattice": {
            "pseudo_basis": [{"ideal": "1", "coords": [frac_str(c) for c in v]}
                             for v in inst.basis],
            "action": {G.labels[g]: [[frac_str(x) for x in row] for row in inst.action[g]]
                       for g in range(G.order)},
        },
    }
    if isinstance(inst.order, list):
        doc["order"] = {"pseudo_basis": [{"ideal": "1", "coords": [frac_str(c) for c in v]}
                                         for v in inst.order]}
    else:
        doc["order"] = inst.order
    if inst.rank is not None:
        doc["rank"] = inst.rank
    return doc


def certificate_from_json(doc: dict) -> FreenessCertificate:
    validate(doc, CERTIFICATE_SCHEMA, "certificate")
    return FreenessCertificate.from_dict(doc)


# ---------------------------------------------------------------- rings

def ring_from_json(doc: dict) -> SkewOrder:
    validate(doc, RING_SCHEMA, "ring")
    if "quadratic" in doc:
        D = doc["quadratic"]
        if D == 1:
            return field_order(rationals())
        return field_order(quadratic_field(D))
    if "min_poly" in doc:
        F = NumberField(doc["min_poly"], doc.get("integral_basis"))
        return field_order(F)
    a, b = doc["quaternion"]
    return quaternion_order(a, b)


def quaternion_order(a: int, b: int) -> SkewOrder:
    Q = QuatAlgebra(a, b, rationals())
    return SkewOrder(Q.alg, maximalize_order(Q, standard_order(Q)), Q.F, Q)


def elements(rows) -> list[tuple]:
    return [tuple(frac(x) for x in r) for r in rows]


def lattice_to_json(L: ZLattice) -> list[list[str]]:
    return [[frac_str(c) for c in v] for v in L.vectors()]


def element_to_json(x) -> list[str]:
    return [frac_str(c) for c in x]
