"""Deciding whether a lattice X over an order of Q[G] is free, with certificates.

An instance is a full lattice X in a rational G-representation V = Q^m, the
group acting through matrices A(g), together with an order of Q[G] (the
group ring, the associated order of X, or an explicit basis).  ``is_free``
either returns generators of X, or a verdict backed by evidence, or UNKNOWN.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm, prod
from typing import Sequence

from .algebra import is_order
from .linalg import ZLattice, integral_preimage, inverse, lattice_index, matvec, rank
from .nice import component_order, max_order_free_test
from .numberfield import Unsupported
from .pseudo import LocalBasisFailure, local_basis, prime_support
from .units import CLOSURE_CAP, ClosureTooLarge, component_representatives
from .wedderburn import (
    WedderburnData, act, conductor, h2prime_report, load, module_span, project_lattice,
)

FREE = "FREE"
NOT_FREE = "NOT_FREE"
NOT_LOCALLY_FREE = "NOT_LOCALLY_FREE"
NOT_FREE_OVER_MAXORDER = "NOT_FREE_OVER_MAXORDER"
UNKNOWN = "UNKNOWN"
VERDICTS = (FREE, NOT_FREE, NOT_LOCALLY_FREE, NOT_FREE_OVER_MAXORDER, UNKNOWN)

TUPLE_CAP = 1 << 28


class InstanceError(ValueError):
    pass


# ---------------------------------------------------------------- instances

@dataclass
class ProblemInstance:
    """X = span_Z(basis) inside Q^m, with g acting as the matrix action[g].

    ``order`` is "group_ring", "associated", or a list of Q[G] coordinate
    vectors spanning the order.
    """
    group: str
    basis: list[tuple]
    action: list[list[list[Fraction]]]
    order: str | list = "group_ring"
    rank: int | None = None
    registry: str | None = None

    def __post_init__(self):
        self.basis = [tuple(Fraction(x) for x in v) for v in self.basis]
        self.action = [[[Fraction(x) for x in row] for row in m] for m in self.action]

    @property
    def dim(self) -> int:
        return len(self.basis[0]) if self.basis else 0

    @property
    def wd(self) -> WedderburnData:
        return load(self.group, self.registry)

    @property
    def lattice(self) -> ZLattice:
        return ZLattice.from_generators(self.basis, self.dim)

    def qg_act(self, lam: Sequence, x: Sequence) -> tuple:
        """The element sum_g lam_g g of Q[G] applied to x."""
        out = [Fraction(0)] * self.dim
        for g, c in enumerate(lam):
            if c:
                for t, y in enumerate(matvec(self.action[g], x)):
                    out[t] += c * y
        return tuple(out)

    def validate(self) -> None:
        G = self.wd.group
        m = self.dim
        if len(self.action) != G.order:
            raise InstanceError(f"expected {G.order} action matrices, got {len(self.action)}")
        if any(len(a) != m or any(len(r) != m for r in a) for a in self.action):
            raise InstanceError("action matrices must be square of the lattice dimension")
        if rank([list(v) for v in self.basis]) != m or len(self.basis) != m:
            raise InstanceError("the lattice basis is not a basis of Q^m")
        ident = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
        if self.action[0] != ident:
            raise InstanceError("the identity element must act trivially")
        from .linalg import matmul
        for g in range(G.order):
            for h in range(G.order):
                if matmul(self.action[g], self.action[h]) != self.action[G.mul[g][h]]:
                    raise InstanceError(
                        f"action is not a homomorphism at ({G.labels[g]}, {G.labels[h]})")
        L = self.lattice
        for g in range(G.order):
            for v in self.basis:
                if not L.contains(matvec(self.action[g], v)):
                    raise InstanceError(f"lattice is not stable under {G.labels[g]}")
        if isinstance(self.order, list):
            for o in self.order:
                if len(o) != G.order:
                    raise InstanceError("order elements need one coordinate per group element")
                for v in self.basis:
                    if not L.contains(self.qg_act(o, v)):
                        raise InstanceError("lattice is not a module over the given order")
        elif self.order not in ("group_ring", "associated"):
            raise InstanceError(f"unknown order specification {self.order!r}")


def rank_check(inst: ProblemInstance) -> int:
    """d = dim V / |G|, which must be a positive integer."""
    n = inst.wd.group.order
    if inst.dim == 0 or inst.dim % n:
        raise InstanceError(f"dim V = {inst.dim} is not a positive multiple of |G| = {n}")
    d = inst.dim // n
    if inst.rank is not None and inst.rank != d:
        raise InstanceError(f"declared rank {inst.rank} differs from dim V / |G| = {d}")
    return d


def rationally_free(inst: ProblemInstance, d: int) -> bool:
    """V is free over Q[G] iff its character is d times the regular character."""
    n = inst.wd.group.order
    return all(sum(inst.action[g][i][i] for i in range(inst.dim)) == (d * n if g == 0 else 0)
               for g in range(n))


def rational_basis(inst: ProblemInstance, d: int, seed: int = 0) -> list[tuple]:
    """v_1..v_d with V = Q[G]v_1 + ... + Q[G]v_d (V must be rationally free)."""
    G = inst.wd.group
    m = inst.dim
    rng = random.Random(seed)
    chosen: list[tuple] = []
    cols: list[list[Fraction]] = []

    def candidates():
        for i in range(m):
            yield tuple(Fraction(int(i == j)) for j in range(m))
        while True:
            yield tuple(Fraction(rng.randint(-3, 3)) for _ in range(m))

    for v in candidates():
        trial = cols + [list(matvec(inst.action[g], v)) for g in range(G.order)]
        if rank(trial) == len(trial):
            chosen.append(v)
            cols = trial
            if len(chosen) == d:
                return chosen


def associated_order(inst: ProblemInstance) -> ZLattice:
    """{λ in Q[G] : λX ⊆ X} in group-element coordinates."""
    G = inst.wd.group
    L = inst.lattice
    Binv = inverse(L.matrix())
    rows = []
    for x in L.vectors():
        images = [matvec(Binv, matvec(inst.action[g], x)) for g in range(G.order)]
        for t in range(inst.dim):
            rows.append([images[g][t] for g in range(G.order)])
    order = integral_preimage(rows, G.order)
    QG = inst.wd.QG
    if not order.contains(QG.one) or not is_order(QG, order):
        raise ArithmeticError("stabilizer failed the ring checks")
    return order


def instance_order(inst: ProblemInstance) -> ZLattice:
    """The order of the instance in Q[G] coordinates."""
    n = inst.wd.group.order
    if inst.order == "group_ring":
        return ZLattice.standard(n)
    if inst.order == "associated":
        return associated_order(inst)
    order = ZLattice.from_generators(inst.order, n)
    if not is_order(inst.wd.QG, order):
        raise InstanceError("the given lattice is not an order of Q[G]")
    return order


# ---------------------------------------------------------------- transport V -> W^d

@dataclass
class Transport:
    """V ≅ Q[G]^d via x_j ↦ Σ x_j v_j, then Q[G] ≅ W componentwise."""
    wd: WedderburnData
    d: int
    phi: list[list[Fraction]]
    phi_inv: list[list[Fraction]]

    def to_W(self, x: Sequence) -> tuple:
        n = self.wd.group.order
        y = matvec(self.phi_inv, list(x))
        out: list[Fraction] = []
        for j in range(self.d):
            out.extend(self.wd.to_W(y[j * n:(j + 1) * n]))
        return tuple(out)

    def from_W(self, w: Sequence) -> tuple:
        k = self.wd.dim
        y: list[Fraction] = []
        for j in range(self.d):
            y.extend(self.wd.from_W(w[j * k:(j + 1) * k]))
        return tuple(matvec(self.phi, y))


def make_transport(inst: ProblemInstance, d: int, vs: Sequence[tuple]) -> Transport:
    n = inst.wd.group.order
    cols = [matvec(inst.action[g], v) for v in vs for g in range(n)]
    phi = [[cols[c][r] for c in range(len(cols))] for r in range(inst.dim)]
    return Transport(inst.wd, d, phi, inverse(phi))


# ---------------------------------------------------------------- certificates

def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class FreenessCertificate:
    verdict: str
    group: str
    d: int
    generators: list[tuple] = field(default_factory=list)
    reasons: list[str] = field(default_factory=list)
    component_log: list[dict] = field(default_factory=list)
    local_witnesses: dict = field(default_factory=dict)
    seed: int = 0
    registry_version: str = ""
    tuple_space: int | None = None
    timings: dict | None = None

    def as_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "group": self.group,
            "rank": self.d,
            "generators": [[frac_str(c) for c in g] for g in self.generators],
            "reasons": list(self.reasons),
            "component_log": self.component_log,
            "local_witnesses": {str(p): [[frac_str(c) for c in v] for v in w]
                                for p, w in sorted(self.local_witnesses.items())},
            "seeds": {"seed": self.seed},
            "registry_version": self.registry_version,
            "tuple_space": self.tuple_space,
        }
        if self.timings is not None:
            out["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return out

    @staticmethod
    def from_dict(data: dict) -> "FreenessCertificate":
        return FreenessCertificate(
            verdict=data["verdict"], group=data["group"], d=int(data["rank"]),
            generators=[tuple(Fraction(c) for c in g) for g in data.get("generators", [])],
            reasons=list(data.get("reasons", [])),
            component_log=list(data.get("component_log", [])),
            local_witnesses={int(p): [tuple(Fraction(c) for c in v) for v in w]
                             for p, w in data.get("local_witnesses", {}).items()},
            seed=int(data.get("seeds", {}).get("seed", 0)),
            registry_version=data.get("registry_version", ""),
            tuple_space=data.get("tuple_space"),
            timings=data.get("timings"),
        )


def verify_certificate(inst: ProblemInstance, cert: FreenessCertificate) -> bool:
    """Re-check a FREE certificate directly in V: α_j ∈ X and the order spans X from them."""
    if cert.verdict != FREE:
        return False
    try:
        d = rank_check(inst)
    except InstanceError:
        return False
    if len(cert.generators) != d or any(len(a) != inst.dim for a in cert.generators):
        return False
    L = inst.lattice
    if not all(L.contains(a) for a in cert.generators):
        return False
    order = instance_order(inst)
    span = ZLattice.from_generators(
        [inst.qg_act(o, a) for a in cert.generators for o in order.vectors()], inst.dim)
    return span.is_subset(L) and span.rank == inst.dim and lattice_index(L, span) == 1


# ---------------------------------------------------------------- local freeness

@dataclass
class LocalFreeness:
    status: str                    # "yes", "no" (exhaustive) or "unknown" (budget)
    prime: int | None = None
    witnesses: dict = field(default_factory=dict)
    detail: str = ""


def locally_free_check(wd: WedderburnData, X: ZLattice, A: ZLattice, d: int,
                       primes: Sequence[int], seed: int = 0) -> LocalFreeness:
    """Find d local generators of X over A at each prime, in W^d coordinates."""
    rng = random.Random(seed)
    found = {}
    for p in primes:
        try:
            found[p] = local_basis(X, A.vectors(), lambda o, x: act(wd, o, x, d), p, d, rng)
        except LocalBasisFailure as e:
            if e.exhaustive:
                return LocalFreeness("no", p, found,
                                     f"no {d} elements generate X locally at p = {p} "
                                     f"(exhaustive search over X/{p}X, {e.tried} tuples)")
            return LocalFreeness("unknown", p, found,
                                 f"local generators at p = {p} not found within budget")
    return LocalFreeness("yes", None, found)


# ---------------------------------------------------------------- step 8

@dataclass
class _Candidates:
    index: int                     # Wedderburn component
    size: int
    keys: list[tuple]              # key of each candidate, aligned with RepSet order
    lift: object                   # idx -> d x d matrix over A_i (original coordinates)


def _coordinate_key(Binv, N: int, m: int, vec: Sequence) -> list[int]:
    out = []
    for row in Binv:
        c = sum((a * b for a, b in zip(row, vec) if a and b), Fraction(0)) * N
        if c.denominator != 1:
            raise ArithmeticError("candidate lies outside the maximal-order module")
        out.append(int(c) % N)
    return out


def _alpha_parts(wd: WedderburnData, i: int, d: int, lam, beta) -> list[tuple]:
    """α_{i,j} = Σ_k λ[j][k] β_{i,k}, embedded in W^d, for j = 1..d."""
    A = wd.components[i].alg
    t = A.dim
    out = []
    for j in range(d):
        w: list[Fraction] = []
        for blk in range(d):
            acc = [Fraction(0)] * t
            for k in range(d):
                y = A.mul(lam[j][k], beta[k][blk * t:(blk + 1) * t])
                acc = [a + b for a, b in zip(acc, y)]
            w.extend(wd.embed(i, acc))
        out.append(tuple(w))
    return out


def _linear_keys(wd, i, d, crs, beta, Binv, N, m):
    """Keys for every RepSet element, using linearity in the residue coordinates."""
    R = crs.base.ring
    k = crs.base.k
    contrib = {}
    zero = R.zero
    for pos in range(k * k):
        for s in range(R.dim):
            unit = [zero] * (k * k)
            unit[pos] = tuple(int(t == s) for t in range(R.dim))
            lam = crs.to_component([[R.lift(unit[a * k + b]) for b in range(k)]
                                    for a in range(k)])
            parts = _alpha_parts(wd, i, d, lam, beta)
            contrib[pos, s] = [x for p in parts for x in _coordinate_key(Binv, N, m, p)]
    width = d * m
    keys = []
    for im in crs.base.images:
        acc = [0] * width
        for pos, r in enumerate(im):
            for s, c in enumerate(r):
                if c:
                    v = contrib[pos, s]
                    for t in range(width):
                        acc[t] += c * v[t]
        keys.append(tuple(x % N for x in acc))
    return keys


def enumerate_generators(cands: list[_Candidates], N: int, width: int):
    """Lexicographically first index tuple whose keys sum to 0 mod N, or None.

    Meet in the middle: suffix sums go into a table keeping the first suffix
    per key, then prefixes are scanned in order.
    """
    sizes = [c.size for c in cands]
    best, split = None, 0
    for s in range(len(cands) + 1):
        cost = max(prod(sizes[:s]), prod(sizes[s:]))
        if best is None or cost < best:
            best, split = cost, s
    prefix, suffix = cands[:split], cands[split:]

    def sums(group):
        """(index tuple, key sum) in lexicographic order."""
        if not group:
            yield (), (0,) * width
            return
        for idx in product(*(range(c.size) for c in group)):
            acc = [0] * width
            for c, j in zip(group, idx):
                for t, x in enumerate(c.keys[j]):
                    acc[t] += x
            yield idx, tuple(x % N for x in acc)

    table: dict[tuple, tuple] = {}
    for idx, key in sums(suffix):
        table.setdefault(key, idx)
    for idx, key in sums(prefix):
        need = tuple((-x) % N for x in key)
        if need in table:
            return idx + table[need]
    return None


# ---------------------------------------------------------------- the driver

def is_free(inst: ProblemInstance, seed: int = 0, tuple_cap: int = TUPLE_CAP,
            closure_cap: int = CLOSURE_CAP, unit_method: str = "generators",
            timings: bool = False) -> FreenessCertificate:
    clock: dict[str, float] = {}
    t0 = time.perf_counter()

    def lap(name):
        nonlocal t0
        now = time.perf_counter()
        clock[name] = now - t0
        t0 = now

    inst.validate()
    wd = inst.wd
    d = rank_check(inst)
    cert = FreenessCertificate(UNKNOWN, wd.id, d, seed=seed, registry_version=wd.version)

    def done(verdict: str, reason: str | None = None) -> FreenessCertificate:
        cert.verdict = verdict
        if reason:
            cert.reasons.append(reason)
        if timings:
            cert.timings = clock
        return cert

    if not rationally_free(inst, d):
        return done(NOT_FREE, "V is not free over Q[G]: its character is not d times the "
                              "regular character")
    report = h2prime_report(wd, d)
    if report.verdict == "unsupported":
        raise Unsupported(f"group {wd.id} has components outside the supported range")
    tr, X, A = transported_lattices(inst, d, seed)
    M = wd.maximal_order
    if not A.is_subset(M):
        raise Unsupported("the order is not contained in the registry maximal order")
    lap("setup")

    cond = conductor(wd, A, M)
    lap("conductor")

    # step 5: bases of MX over each component
    MX = module_span(wd, M, X.vectors(), d)
    bases, results = [], []
    not_free_reasons = []
    unknown_reasons = []
    for i, comp in enumerate(wd.components):
        S = component_order(comp)
        Xi = project_lattice(wd, MX, i, d)
        res = max_order_free_test(S, comp.n, comp.max_order, Xi, d,
                                  report.components[i].cancellation, seed=seed)
        results.append(res)
        entry = {"component": i, "description": comp.describe(), "status": res.status}
        if res.steinitz_ideal is not None:
            entry["steinitz_class"] = [[frac_str(c) for c in v]
                                       for v in res.steinitz_ideal.vectors()]
            entry["steinitz_principal"] = res.status == "basis"
        if res.pip is not None:
            entry["pip_result"] = [frac_str(c) for c in res.pip]
        cert.component_log.append(entry)
        if res.status == "not_free":
            not_free_reasons.append(f"component {i} ({comp.describe()}): {res.reason}")
        elif res.status == "unknown":
            unknown_reasons.append(f"component {i} ({comp.describe()}): {res.reason}; "
                                   "cancellation unavailable")
        bases.append(res.basis)
    lap("step5")
    if not_free_reasons:
        return done(NOT_FREE_OVER_MAXORDER, "; ".join(not_free_reasons))
    if unknown_reasons:
        return done(UNKNOWN, "; ".join(unknown_reasons))

    # step 6: local freeness at the primes dividing [M : A]
    local = locally_free_check(wd, X, A, d, prime_support(lattice_index(M, A)), seed)
    if local.status == "no":
        return done(NOT_LOCALLY_FREE, local.detail)
    if local.status == "unknown":
        return done(UNKNOWN, local.detail)
    cert.local_witnesses = {p: [tr.from_W(w) for w in wit] for p, wit in local.witnesses.items()}
    lap("step6")

    # step 7: unit representatives per component
    cands: list[_Candidates] = []
    B = X.matrix()
    Binv = inverse(B)
    m = d * wd.dim
    N = 1
    for v in MX.vectors():
        N = lcm(N, *(c.denominator for c in matvec(Binv, v)))
    width = d * m
    for i, comp in enumerate(wd.components):
        g = cond.g[i]
        beta = bases[i]
        if g == comp.F.O:
            parts = _alpha_parts(wd, i, d, _identity(comp.alg, d), beta)
            key = tuple(x for p in parts for x in _coordinate_key(Binv, N, m, p))
            cands.append(_Candidates(i, 1, [key], lambda idx, a=comp.alg: (_identity(a, d),)))
            cert.component_log[i]["repset_size"] = 1
            continue
        S = component_order(comp)
        try:
            crs = component_representatives(S, comp.n, d, g, results[i].conj, seed=seed,
                                            cap=closure_cap, method=unit_method)
        except ClosureTooLarge as e:
            return done(UNKNOWN, f"component {i}: unit image exceeds the closure cap "
                                 f"({e.cap}); representatives truncated")
        except Unsupported as e:
            return done(UNKNOWN, f"component {i}: unit representatives unavailable ({e})")
        cert.component_log[i]["repset_size"] = len(crs)
        keys = _linear_keys(wd, i, d, crs, beta, Binv, N, m)
        cands.append(_Candidates(i, len(crs), keys, crs.lift if crs.lift_component else None))
    lap("step7")

    # step 8: enumerate tuples (λ_i)
    cands.sort(key=lambda c: (c.size, c.index))
    space = prod(c.size for c in cands)
    cert.tuple_space = space
    if space > tuple_cap:
        return done(UNKNOWN, f"tuple space {space} exceeds the cap {tuple_cap}; "
                             "enumeration not attempted")
    hit = enumerate_generators(cands, N, width)
    lap("step8")
    if hit is None:
        if not report.cancellation_ok:
            return done(UNKNOWN, f"no tuple among {space} yields generators, but cancellation "
                                 f"fails ({report.verdict}); NOT_FREE is not provable")
        if any(c.lift is None for c in cands):
            return done(UNKNOWN, "no tuple yields generators, but some representative sets "
                                 "carry images only")
        return done(NOT_FREE, f"complete enumeration of {space} tuples found no generators")
    if any(c.lift is None for c in cands):
        return done(UNKNOWN, "a generating tuple exists mod the conductor but genuine lifts "
                             "are unavailable")
    alphas = [tuple(Fraction(0) for _ in range(m)) for _ in range(d)]
    for c, idx in zip(cands, hit):
        lam = c.lift(idx)[0]
        parts = _alpha_parts(wd, c.index, d, lam, bases[c.index])
        alphas = [tuple(a + b for a, b in zip(x, y)) for x, y in zip(alphas, parts)]
    if not all(X.contains(a) for a in alphas) or module_span(wd, A, alphas, d) != X:
        raise ArithmeticError("enumerated generators failed verification")
    cert.generators = [tr.from_W(a) for a in alphas]
    lap("verify")
    cert.verdict = FREE
    if not verify_certificate(inst, cert):
        raise ArithmeticError("certificate failed the independent check")
    return done(FREE)


def _identity(A, d: int) -> list[list[tuple]]:
    return [[tuple(A.one) if j == k else A.zero() for k in range(d)] for j in range(d)]


def transported_lattices(inst: ProblemInstance, d: int, seed: int = 0):
    """(transport, X in W^d, the instance order in W)."""
    wd = inst.wd
    tr = make_transport(inst, d, rational_basis(inst, d, seed))
    X = ZLattice.from_generators([tr.to_W(v) for v in inst.basis], d * wd.dim)
    A = ZLattice.from_generators([wd.to_W(o) for o in instance_order(inst).vectors()], wd.dim)
    return tr, X, A


def recheck_local_failure(inst: ProblemInstance, p: int, seed: int = 0) -> bool:
    """Re-run the exhaustive local search at p; true when it again finds no generators."""
    wd = inst.wd
    d = rank_check(inst)
    _, X, A = transported_lattices(inst, d, seed)
    try:
        local_basis(X, A.vectors(), lambda o, x: act(wd, o, x, d), p, d, random.Random(seed),
                    budget=0)
    except LocalBasisFailure as e:
        return e.exhaustive
    return False
