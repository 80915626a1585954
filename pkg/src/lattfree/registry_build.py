"""Builds the JSON registry of rational Wedderburn decompositions.

Each component is described by its center, its skew field and the images of
the group generators; images of the remaining elements, characters and the
component maximal orders are derived here and written out, then checked
again on load.  Run ``python -m lattfree.registry_build`` to regenerate.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from sympy import Poly, Symbol, cyclotomic_poly, divisors

from .algebra import Algebra, mat_to_vec, matrix_algebra, maximal_order
from .groups import GroupTable, by_id
from .linalg import ZLattice
from .numberfield import NumberField, rationals
from .quaternion import QuatAlgebra

REGISTRY_VERSION = "1"
REGISTRY_DIR = Path(__file__).parent / "registry"
GROUP_IDS = [f"C{n}" for n in range(1, 17)] + [
    "C2xC2", "C2xC4", "D4", "D6", "Q8", "Q12", "Q16", "Q8xC2", "A4"]


def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class _Spec:
    """One component under construction: center, skew field, n, generator images."""

    def __init__(self, F: NumberField, n: int = 1, quat: tuple | None = None,
                 unit_hint: list | None = None, torsion: tuple | None = None):
        self.F = F
        self.n = n
        self.quat = quat
        self.unit_hint = unit_hint
        self.torsion = torsion
        if quat is None:
            self.D = None
            self.Dalg = F.alg
        else:
            self.D = QuatAlgebra(quat[0], quat[1], F)
            self.Dalg = self.D.alg
        self.alg = self.Dalg if n == 1 else matrix_algebra(self.Dalg, n)

    def scalar(self, f) -> tuple:
        """The center element f as an element of the component."""
        d = self.D.elem(f) if self.D is not None else tuple(Fraction(c) for c in f)
        if self.n == 1:
            return d
        z = self.Dalg.zero()
        return mat_to_vec(self.Dalg, [[d if i == j else z for j in range(self.n)]
                                      for i in range(self.n)])

    def rat_matrix(self, m: Sequence[Sequence]) -> tuple:
        """An n x n rational matrix as an element of M_n(D)."""
        return mat_to_vec(self.Dalg, [[self.Dalg.scale(self.Dalg.one, x) for x in row] for row in m])


def cyclotomic(k: int) -> NumberField:
    if k <= 2:
        return rationals()
    x = Symbol("x")
    coeffs = [int(c) for c in reversed(Poly(cyclotomic_poly(k, x), x).all_coeffs())]
    return NumberField(coeffs, name=f"Q(zeta{k})", check=False)


def zeta(F: NumberField, k: int) -> tuple:
    if k == 1:
        return F.rational(1)
    if k == 2:
        return F.rational(-1)
    return F.theta


def _unit_hints(k: int, F: NumberField) -> list | None:
    """Fundamental units of the quartic cyclotomic fields (unit rank 1)."""
    z = F.theta
    one = F.rational(1)
    add, sub = F.alg.add, F.alg.sub
    z3 = F.mul(z, F.mul(z, z))
    if k == 5:
        return [add(one, z)]
    if k == 8:
        return [sub(add(one, z), z3)]
    if k in (10, 12):
        return [sub(one, z)]
    return None


def _torsion(k: int, F: NumberField) -> tuple[tuple, int]:
    if k % 2:
        return tuple(-c for c in zeta(F, k)), 2 * k
    return zeta(F, k), k


# ---------------------------------------------------------------- per-group component data

def _cyclic(G: GroupTable, n: int):
    out = []
    for k in divisors(n):
        F = cyclotomic(k)
        hint = _unit_hints(k, F)
        spec = _Spec(F, unit_hint=hint, torsion=_torsion(k, F) if hint else None)
        out.append((spec, [zeta(F, k)]))
    return out


def _linear(signs: Sequence[int]):
    """A rational linear character given by generator signs."""
    Q = rationals()
    return _Spec(Q), [Q.rational(s) for s in signs]


def _all_signs(r: int):
    from itertools import product
    return [list(s) for s in product([1, -1], repeat=r)]


def _c2xc2(G):
    return [_linear(s) for s in _all_signs(2)]


def _c2xc4(G):
    out = [_linear(s) for s in _all_signs(2)]
    Qi = cyclotomic(4)
    for s in (1, -1):
        spec = _Spec(Qi)
        out.append((spec, [Qi.rational(s), Qi.theta]))
    return out


def _matrix_comp(gens: Sequence[Sequence[Sequence]]):
    Q = rationals()
    spec = _Spec(Q, n=len(gens[0]))
    return spec, [spec.rat_matrix(g) for g in gens]


def _d4(G):
    out = [_linear(s) for s in _all_signs(2)]
    out.append(_matrix_comp([[[0, -1], [1, 0]], [[1, 0], [0, -1]]]))
    return out


def _d6(G):
    out = [_linear(s) for s in _all_signs(2)]
    swap = [[0, 1], [1, 0]]
    out.append(_matrix_comp([[[0, -1], [1, 1]], swap]))
    out.append(_matrix_comp([[[0, -1], [1, -1]], swap]))
    return out


def _hamilton():
    Q = rationals()
    spec = _Spec(Q, quat=(-1, -1))
    D = spec.D
    return spec, [D.elem(0, 1), D.elem(0, 0, 1)]


def _q8(G):
    return [_linear(s) for s in _all_signs(2)] + [_hamilton()]


def _q12(G):
    Q = rationals()
    out = [_linear([1, 1]), _linear([1, -1])]
    Qi = cyclotomic(4)
    out.append((_Spec(Qi), [Qi.rational(-1), Qi.theta]))
    out.append(_matrix_comp([[[0, -1], [1, -1]], [[0, 1], [1, 0]]]))
    spec = _Spec(Q, quat=(-1, -3))
    D = spec.D
    h = Fraction(1, 2)
    out.append((spec, [D.elem(h, 0, h), D.elem(0, 1)]))
    return out


def _q16(G):
    out = [_linear(s) for s in _all_signs(2)]
    out.append(_matrix_comp([[[0, -1], [1, 0]], [[1, 0], [0, -1]]]))
    F = NumberField([-2, 0, 1], name="Q(sqrt(2))")
    spec = _Spec(F, quat=(-1, -1))
    D = spec.D
    h = (Fraction(0), Fraction(1, 2))
    out.append((spec, [D.elem(h, h), D.elem(0, 0, 1)]))
    return out


def _q8xc2(G):
    out = []
    for c in (1, -1):
        for s in _all_signs(2):
            out.append(_linear(s + [c]))
        spec, (a, b) = _hamilton()
        out.append((spec, [a, b, spec.D.elem(c)]))
    return out


def _a4(G):
    out = [_linear([1, 1])]
    F3 = cyclotomic(3)
    out.append((_Spec(F3), [F3.theta, F3.rational(1)]))

    def perm_matrix(p):
        # action on e_i - e_3, i = 0, 1, 2
        m = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for tgt, sgn in ((p[i], 1), (p[3], -1)):
                if tgt < 3:
                    m[tgt][i] += sgn
        return m
    out.append(_matrix_comp([perm_matrix((1, 2, 0, 3)), perm_matrix((1, 0, 3, 2))]))
    return out


_BUILDERS: dict[str, Callable] = {
    "C2xC2": _c2xc2, "C2xC4": _c2xc4, "D4": _d4, "D6": _d6, "Q8": _q8, "Q12": _q12,
    "Q16": _q16, "Q8xC2": _q8xc2, "A4": _a4,
}


# ---------------------------------------------------------------- derived data

def _images(G: GroupTable, alg: Algebra, gen_images: Sequence[tuple]) -> list[tuple]:
    out = []
    for g in range(G.order):
        x = alg.one
        for k in G.word(g):
            x = alg.mul(x, gen_images[k])
        out.append(x)
    return out


def reduced_trace_q(spec_F: NumberField, D: QuatAlgebra | None, Dalg: Algebra, n: int,
                    x: Sequence) -> Fraction:
    """Tr_{F/Q} of the reduced trace of an element of M_n(D)."""
    t = Dalg.dim
    total = [Fraction(0)] * spec_F.degree
    for i in range(n):
        entry = x[(i * n + i) * t:(i * n + i + 1) * t]
        part = D.reduced_trace(entry) if D is not None else entry
        total = [a + b for a, b in zip(total, part)]
    return spec_F.trace(total)


def _component_max_order(spec: _Spec, images: list[tuple]) -> ZLattice:
    if spec.D is None:
        return ZLattice.standard(spec.alg.dim)
    if spec.n != 1:
        raise NotImplementedError("matrix rings over quaternion algebras are not registered")
    O = ZLattice.from_generators(images, spec.alg.dim)
    return maximal_order(spec.alg, O)


def build_entry(gid: str) -> dict:
    G = by_id(gid)
    G.check()
    if gid.startswith("C") and gid[1:].isdigit():
        comps = _cyclic(G, int(gid[1:]))
    else:
        comps = _BUILDERS[gid](G)
    components = []
    orders = []
    for spec, gens in comps:
        imgs = _images(G, spec.alg, gens)
        chars = [reduced_trace_q(spec.F, spec.D, spec.Dalg, spec.n, x) for x in imgs]
        m = 1 if spec.D is None else 2
        M = _component_max_order(spec, imgs)
        center = {
            "name": spec.F.name,
            "min_poly": spec.F.min_poly,
            "integral_basis": [[frac_str(c) for c in row] for row in spec.F.integral_basis],
        }
        if spec.unit_hint:
            center["unit_hint"] = [[frac_str(c) for c in u] for u in spec.unit_hint]
            center["torsion"] = {"generator": [frac_str(c) for c in spec.torsion[0]],
                                 "order": spec.torsion[1]}
        comp = {
            "n": spec.n,
            "kind": "field" if spec.D is None else "quaternion",
            "center": center,
            "char_degree": spec.n * m,
            "rho_images": {G.labels[g]: [frac_str(c) for c in imgs[g]] for g in range(G.order)},
            "char_values": {G.labels[g]: frac_str(chars[g]) for g in range(G.order)},
        }
        if spec.D is not None:
            comp["quaternion"] = {"a": [frac_str(c) for c in spec.D.a],
                                  "b": [frac_str(c) for c in spec.D.b]}
        components.append(comp)
        orders.append([[frac_str(c) for c in v] for v in M.vectors()])
    return {
        "id": gid,
        "version": REGISTRY_VERSION,
        "order": G.order,
        "labels": list(G.labels),
        "generators": [G.labels[g] for g in G.generators],
        "mul_table": [list(r) for r in G.mul],
        "components": components,
        "maximal_order_basis": orders,
    }


def write_registry(directory: Path = REGISTRY_DIR, ids: Sequence[str] = GROUP_IDS) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for gid in ids:
        entry = build_entry(gid)
        (directory / f"{gid}.json").write_text(json.dumps(entry, indent=1) + "\n")


if __name__ == "__main__":
    write_registry()
