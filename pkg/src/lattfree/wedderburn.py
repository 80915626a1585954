"""Rational Wedderburn decompositions of group algebras, loaded from the registry.

The decomposition Q[G] = A_1 + ... + A_r is stored as explicit images of the
group elements in each simple component A_i = M_n(D).  On load every entry is
checked: the images must define algebra homomorphisms, the characters must
give orthogonal central idempotents summing to one, and the component orders
must be orders containing the group images.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from pathlib import Path
from typing import Sequence

from .algebra import (
    Algebra, direct_sum, is_order, lat_mul, left_colon, matrix_algebra, right_colon,
)
from .groups import GroupTable
from .linalg import (
    ZLattice, dual_and_intersect, integral_preimage, inverse, lattice_index, matmul, matvec,
)
from .numberfield import NumberField, rationals
from .quaternion import QuatAlgebra

REGISTRY_DIR = Path(__file__).parent / "registry"

# Binary polyhedral groups whose maximal orders have locally free cancellation.
SWAN_GROUPS = frozenset({"Q8", "Q12", "Q16", "Q20", "Q24", "Q28", "Q36", "Q60",
                         "E24", "E48", "E120"})
# Groups whose integral group ring is known to admit stably free non-free modules.
GROUP_RING_CANCELLATION_FAILS = frozenset({"Q8xC2"})


class RegistryError(ValueError):
    """A registry entry failed validation; the message names the failing identity."""


def parse_frac(s) -> Fraction:
    return Fraction(s) if not isinstance(s, Fraction) else s


@dataclass
class Component:
    index: int
    n: int
    kind: str  # "field" or "quaternion"
    F: NumberField
    D: QuatAlgebra | None
    rho: list[tuple]
    char_values: list[Fraction]
    char_degree: int
    max_order: ZLattice
    offset: int = 0

    @cached_property
    def Dalg(self) -> Algebra:
        return self.F.alg if self.D is None else self.D.alg

    @cached_property
    def alg(self) -> Algebra:
        return self.Dalg if self.n == 1 else matrix_algebra(self.Dalg, self.n)

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def is_definite_quaternion(self) -> bool:
        return self.D is not None and self.D.is_totally_definite

    def embed_center(self, f: Sequence) -> tuple:
        d = self.D.elem(tuple(f)) if self.D is not None else tuple(Fraction(c) for c in f)
        if self.n == 1:
            return d
        t = self.Dalg.dim
        out = [Fraction(0)] * self.dim
        for a in range(self.n):
            out[(a * self.n + a) * t:(a * self.n + a + 1) * t] = d
        return tuple(out)

    def describe(self) -> str:
        skew = self.F.name if self.D is None else self.D.alg.name
        return f"M{self.n}({skew})" if self.n > 1 else skew


def _element_from(F: NumberField, xs) -> tuple:
    return tuple(parse_frac(c) for c in xs)


def _build_component(i: int, G: GroupTable, data: dict, order_basis) -> Component:
    c = data["center"]
    F = rationals() if c["min_poly"] == [0, 1] else NumberField(
        c["min_poly"], [[parse_frac(x) for x in r] for r in c["integral_basis"]],
        name=c.get("name", ""), check=False)
    if "unit_hint" in c:
        F.unit_hint = [_element_from(F, u) for u in c["unit_hint"]]
        t = c["torsion"]
        F.torsion_hint = (_element_from(F, t["generator"]), int(t["order"]))
    D = None
    if data["kind"] == "quaternion":
        q = data["quaternion"]
        D = QuatAlgebra(_element_from(F, q["a"]), _element_from(F, q["b"]), F)
    elif data["kind"] != "field":
        raise RegistryError(f"component {i}: unknown kind {data['kind']!r}")
    rho = [tuple(parse_frac(x) for x in data["rho_images"][lab]) for lab in G.labels]
    chars = [parse_frac(data["char_values"][lab]) for lab in G.labels]
    comp = Component(i, int(data["n"]), data["kind"], F, D, rho, chars, int(data["char_degree"]),
                     ZLattice.standard(1))
    comp.max_order = ZLattice.from_generators(
        [[parse_frac(x) for x in v] for v in order_basis], comp.dim)
    return comp


class WedderburnData:
    """Q[G] with its decomposition W = A_1 + ... + A_r and the isomorphism R: Q[G] -> W."""

    def __init__(self, G: GroupTable, components: list[Component], version: str = ""):
        self.group = G
        self.components = components
        self.version = version
        off = 0
        for comp in components:
            comp.offset = off
            off += comp.dim
        self.dim = off

    @property
    def id(self) -> str:
        return self.group.id

    @cached_property
    def QG(self) -> Algebra:
        G = self.group
        table = [[((G.mul[i][j], 1),) for j in range(G.order)] for i in range(G.order)]
        return Algebra(table, [1] + [0] * (G.order - 1), f"Q[{G.id}]")

    @cached_property
    def W(self) -> Algebra:
        return direct_sum([c.alg for c in self.components], f"W({self.id})")

    @cached_property
    def R(self) -> list[list[Fraction]]:
        """Matrix whose g-th column is the image of g in W."""
        cols = [self.group_image(g) for g in range(self.group.order)]
        return [[cols[g][r] for g in range(self.group.order)] for r in range(self.dim)]

    @cached_property
    def Rinv(self) -> list[list[Fraction]]:
        return inverse(self.R)

    def group_image(self, g: int) -> tuple:
        out: list[Fraction] = []
        for comp in self.components:
            out.extend(comp.rho[g])
        return tuple(out)

    def to_W(self, x: Sequence) -> tuple:
        return tuple(matvec(self.R, list(x)))

    def from_W(self, w: Sequence) -> tuple:
        return tuple(matvec(self.Rinv, list(w)))

    def part(self, w: Sequence, i: int) -> tuple:
        comp = self.components[i]
        return tuple(w[comp.offset:comp.offset + comp.dim])

    def embed(self, i: int, x: Sequence) -> tuple:
        comp = self.components[i]
        out = [Fraction(0)] * self.dim
        out[comp.offset:comp.offset + comp.dim] = x
        return tuple(out)

    def component_one(self, i: int) -> tuple:
        return self.embed(i, self.components[i].alg.one)

    @cached_property
    def maximal_order(self) -> ZLattice:
        gens = []
        for i, comp in enumerate(self.components):
            gens.extend(self.embed(i, v) for v in comp.max_order.vectors())
        return ZLattice.from_generators(gens, self.dim)

    @cached_property
    def group_ring(self) -> ZLattice:
        return ZLattice.from_generators([self.group_image(g) for g in range(self.group.order)],
                                        self.dim)


# ---------------------------------------------------------------- loading and validation

def _validate(wd: WedderburnData) -> None:
    G = wd.group
    try:
        G.check()
    except ValueError as exc:
        raise RegistryError(str(exc)) from None
    if wd.dim != G.order:
        raise RegistryError(f"{G.id}: component dimensions sum to {wd.dim}, not |G| = {G.order}")
    for comp in wd.components:
        A = comp.alg
        tag = f"{G.id} component {comp.index}"
        if comp.rho[0] != A.one:
            raise RegistryError(f"{tag}: rho(e) is not the identity")
        for g, h in product(range(G.order), repeat=2):
            if A.mul(comp.rho[g], comp.rho[h]) != comp.rho[G.mul[g][h]]:
                raise RegistryError(
                    f"{tag}: rho({G.labels[g]}) rho({G.labels[h]}) != rho({G.labels[G.mul[g][h]]})")
        for g in range(G.order):
            if reduced_trace_q(comp, comp.rho[g]) != comp.char_values[g]:
                raise RegistryError(f"{tag}: character value at {G.labels[g]} is inconsistent")
        m = 1 if comp.D is None else 2
        if comp.char_degree != comp.n * m:
            raise RegistryError(f"{tag}: character degree {comp.char_degree} != n*m")
        if not is_order(A, comp.max_order):
            raise RegistryError(f"{tag}: maximal order basis is not an order")
        for g in range(G.order):
            if not comp.max_order.contains(comp.rho[g]):
                raise RegistryError(f"{tag}: rho({G.labels[g]}) is outside the maximal order")
    check_idempotents(wd, central_idempotents(wd))


def reduced_trace_q(comp: Component, x: Sequence) -> Fraction:
    """Tr_{F/Q} of the reduced trace of x in M_n(D)."""
    t = comp.Dalg.dim
    total = [Fraction(0)] * comp.F.degree
    for i in range(comp.n):
        entry = x[(i * comp.n + i) * t:(i * comp.n + i + 1) * t]
        part = comp.D.reduced_trace(entry) if comp.D is not None else entry
        total = [a + b for a, b in zip(total, part)]
    return comp.F.trace(total)


def from_json(data: dict) -> WedderburnData:
    labels = tuple(data["labels"])
    mul = tuple(tuple(int(x) for x in r) for r in data["mul_table"])
    if len(labels) != int(data["order"]) or len(mul) != len(labels):
        raise RegistryError(f"{data.get('id')}: order does not match the table")
    gens = tuple(labels.index(g) for g in data["generators"])
    G = GroupTable(data["id"], labels, mul, gens)
    orders = data["maximal_order_basis"]
    if len(orders) != len(data["components"]):
        raise RegistryError(f"{G.id}: one maximal order basis per component is required")
    comps = [_build_component(i, G, c, o) for i, (c, o) in enumerate(zip(data["components"], orders))]
    wd = WedderburnData(G, comps, str(data.get("version", "")))
    _validate(wd)
    return wd


def registry_ids(directory: Path | None = None) -> list[str]:
    d = Path(directory) if directory else REGISTRY_DIR
    return sorted(p.stem for p in d.glob("*.json"))


def normalize_id(gid: str) -> str:
    if gid.startswith("Cn:"):
        return "C" + gid[3:]
    return gid


@lru_cache(maxsize=None)
def _load(gid: str, directory: str) -> WedderburnData:
    path = Path(directory) / f"{gid}.json"
    if not path.exists():
        raise KeyError(f"group {gid!r} is not in the registry at {directory}")
    return from_json(json.loads(path.read_text()))


def load(gid: str, directory: Path | str | None = None) -> WedderburnData:
    return _load(normalize_id(gid), str(directory or REGISTRY_DIR))


# ---------------------------------------------------------------- idempotents

def central_idempotents(wd: WedderburnData) -> list[tuple]:
    """e_i = (psi_i(1)/|G|) sum_g chi_i(g^-1) g, with chi_i the rational character."""
    G = wd.group
    inv = G.inverse
    out = []
    for comp in wd.components:
        s = Fraction(comp.char_degree, G.order)
        out.append(tuple(s * comp.char_values[inv[g]] for g in range(G.order)))
    return out


def check_idempotents(wd: WedderburnData, es: list[tuple]) -> None:
    """Raise RegistryError unless es are orthogonal central idempotents with sum 1
    that map to the component identities."""
    QG = wd.QG
    G = wd.group
    tag = G.id
    for i, e in enumerate(es):
        for j, f in enumerate(es):
            ef = QG.mul(e, f)
            want = e if i == j else QG.zero()
            if ef != want:
                raise RegistryError(f"{tag}: e_{i} e_{j} != {'e_' + str(i) if i == j else '0'}")
        for g in range(G.order):
            gv = QG.basis_element(g)
            if QG.mul(gv, e) != QG.mul(e, gv):
                raise RegistryError(f"{tag}: e_{i} does not commute with {G.labels[g]}")
        if wd.to_W(e) != wd.component_one(i):
            raise RegistryError(f"{tag}: e_{i} does not map to the identity of component {i}")
    total = [sum(c) for c in zip(*es)]
    if tuple(total) != QG.one:
        raise RegistryError(f"{tag}: idempotents do not sum to 1")


# ---------------------------------------------------------------- modules in W^d

def module_component_indices(wd: WedderburnData, i: int, d: int) -> list[int]:
    comp = wd.components[i]
    return [j * wd.dim + comp.offset + t for j in range(d) for t in range(comp.dim)]


def project_lattice(wd: WedderburnData, X: ZLattice, i: int, d: int) -> ZLattice:
    """e_i X for a lattice X in W^d, in the coordinates of A_i^d."""
    idx = module_component_indices(wd, i, d)
    return ZLattice.from_generators([[v[k] for k in idx] for v in X.vectors()], len(idx))


def component_span(wd: WedderburnData, i: int, d: int, order: ZLattice, L: ZLattice) -> ZLattice:
    """The Z-span of o*x for o in an order of A_i and x in a lattice of A_i^d."""
    A = wd.components[i].alg
    t = A.dim
    gens = []
    for x in L.vectors():
        for o in order.vectors():
            y: list[Fraction] = []
            for j in range(d):
                y.extend(A.mul(o, x[j * t:(j + 1) * t]))
            gens.append(y)
    return ZLattice.from_generators(gens, d * t)


def act(wd: WedderburnData, lam: Sequence, x: Sequence, d: int) -> tuple:
    """lam (in W) acting diagonally on x in W^d."""
    out: list[Fraction] = []
    n = wd.dim
    for j in range(d):
        out.extend(wd.W.mul(lam, x[j * n:(j + 1) * n]))
    return tuple(out)


def module_span(wd: WedderburnData, order: ZLattice, gens: Sequence[Sequence], d: int) -> ZLattice:
    return ZLattice.from_generators([act(wd, o, x, d) for x in gens for o in order.vectors()],
                                    d * wd.dim)


# ---------------------------------------------------------------- conductor

@dataclass
class ConductorData:
    conductor: ZLattice                 # in W
    g: list[ZLattice]                   # ideals of O_{F_i}, integral-basis coordinates
    f: list[ZLattice]                   # g_i M_i in A_i coordinates
    f_total: ZLattice = field(repr=False, default=None)  # type: ignore[assignment]

    @property
    def g_generators(self) -> list[int]:
        """The smallest positive integer in each g_i."""
        return [integer_part(gi) for gi in self.g]


def integer_part(a: ZLattice) -> int:
    """The smallest positive integer in a full lattice of O_F coordinates."""
    n = a.dim
    idx = lattice_index(ZLattice.standard(n), a)
    bound = idx.numerator
    for k in sorted(_divisors(bound)):
        if a.contains([Fraction(k)] + [Fraction(0)] * (n - 1)):
            return k
    raise ArithmeticError("lattice contains no positive integer")


def _divisors(n: int) -> list[int]:
    from sympy import divisors
    return [int(x) for x in divisors(n)]


def conductor(wd: WedderburnData, A: ZLattice, M: ZLattice | None = None) -> ConductorData:
    """The largest two-sided M-ideal inside A, its central contractions g_i and f_i = g_i M_i."""
    W = wd.W
    if M is None:
        M = wd.maximal_order
    if not A.is_subset(M):
        raise ValueError("the order is not contained in the maximal order")
    T = left_colon(W, M, A)          # {y : y M ⊆ A}
    c = right_colon(W, M, T)         # {x : M x M ⊆ A}
    gs, fs = [], []
    Binv = inverse(c.matrix())
    for i, comp in enumerate(wd.components):
        F = comp.F
        emb = [wd.embed(i, comp.embed_center(b)) for b in F.O.vectors()]
        # f·1_i lies in c iff its conductor coordinates are integers
        rows = matmul(Binv, [list(r) for r in zip(*emb)])
        gi = dual_and_intersect(integral_preimage(rows, F.degree), F.O)
        gs.append(gi)
        Mi = comp.max_order
        fi = ZLattice.from_generators(
            [comp.alg.mul(comp.embed_center(g), m) for g in gi.vectors() for m in Mi.vectors()],
            comp.dim)
        fs.append(fi)
    gens = []
    for i, fi in enumerate(fs):
        gens.extend(wd.embed(i, v) for v in fi.vectors())
    f_total = ZLattice.from_generators(gens, wd.dim)
    return ConductorData(c, gs, fs, f_total)


def is_two_sided_ideal(A: Algebra, M: ZLattice, c: ZLattice) -> bool:
    return lat_mul(A, M, c).is_subset(c) and lat_mul(A, c, M).is_subset(c)


# ---------------------------------------------------------------- hypothesis report

@dataclass
class ComponentReport:
    index: int
    description: str
    n: int
    eichler: bool
    cancellation: bool
    cancellation_reason: str
    nr_surjective: bool | None
    units_available: bool
    pip_available: bool


@dataclass
class H2Report:
    group: str
    d: int
    components: list[ComponentReport]
    group_ring_cancellation: bool
    verdict: str

    @property
    def cancellation_ok(self) -> bool:
        return self.group_ring_cancellation and all(c.cancellation for c in self.components)

    def as_dict(self) -> dict:
        from dataclasses import asdict
        return asdict(self)


def _units_available(comp: Component) -> bool:
    F = comp.F
    if comp.D is None:
        return F.degree <= 2 or F.unit_hint is not None
    return F.degree == 1 and comp.D.is_totally_definite


def _pip_available(comp: Component) -> bool:
    if comp.D is None:
        return comp.F.degree <= 2
    return comp.F.degree == 1


def h2prime_report(wd: WedderburnData, d: int) -> H2Report:
    gid = wd.id
    reps = []
    for comp in wd.components:
        eichler = not comp.is_definite_quaternion
        nd = comp.n * d
        if nd == 1:
            canc, why = True, "n*d = 1"
        elif eichler:
            canc, why = True, "Eichler component (Jacobinski)"
        elif gid in SWAN_GROUPS:
            canc, why = True, "maximal orders of this binary polyhedral group cancel (Swan)"
        else:
            canc, why = False, "totally definite quaternion component with n*d > 1"
        if comp.D is None or comp.F.degree == 1:
            nrs: bool | None = True
        elif wd.group.order < 40:
            nrs = True
        else:
            nrs = None
        reps.append(ComponentReport(comp.index, comp.describe(), comp.n, eichler, canc, why, nrs,
                                    _units_available(comp), _pip_available(comp)))
    grc = gid not in GROUP_RING_CANCELLATION_FAILS
    if not all(r.pip_available and r.units_available for r in reps) or any(
            r.nr_surjective is None for r in reps if r.n * d > 1):
        verdict = "unsupported"
    elif not grc or not all(r.cancellation for r in reps):
        verdict = "weakened: NOT_FREE unprovable"
    else:
        verdict = "full"
    return H2Report(gid, d, reps, grc, verdict)
