"""Pseudo-matrices over a maximal order of a skew field.

Vectors of D^r are tuples of r elements of D; a coefficient ideal is a full
ZLattice in D.  Modules are compared as Z-lattices of rank r·dim D.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Callable, Sequence

from sympy import factorint

from .algebra import Algebra, lat_inverse, lat_mul, right_order
from .linalg import (
    ZLattice, complete_to_basis, hnf_with_transform, inverse, lattice_index, matvec,
    rank_mod_p, transpose,
)
from .numberfield import NumberField, Unsupported, pip_nf
from .quaternion import QuatAlgebra, pip_quat


class RankError(ValueError):
    pass


class NotDirectError(ValueError):
    pass


class LocalBasisFailure(Exception):
    """No local generators found; ``exhaustive`` tells whether the search was complete."""

    def __init__(self, p: int, exhaustive: bool, tried: int):
        super().__init__(f"no local basis at p={p} after {tried} candidates"
                         + (" (exhaustive)" if exhaustive else ""))
        self.p = p
        self.exhaustive = exhaustive
        self.tried = tried


@dataclass
class SkewOrder:
    """A maximal order ``O`` in a skew field ``D`` (a number field or a quaternion algebra)."""
    D: Algebra
    O: ZLattice
    F: NumberField
    quat: QuatAlgebra | None = None

    @property
    def dim(self) -> int:
        return self.D.dim

    @property
    def commutative(self) -> bool:
        return self.quat is None

    def left_ideal(self, gens: Sequence[Sequence]) -> ZLattice:
        return ZLattice.from_generators([self.D.mul(o, g) for g in gens for o in self.O.vectors()],
                                        self.dim)

    def right_ideal(self, gens: Sequence[Sequence]) -> ZLattice:
        return ZLattice.from_generators([self.D.mul(g, o) for g in gens for o in self.O.vectors()],
                                        self.dim)

    def rmul(self, L: ZLattice, x: Sequence) -> ZLattice:
        """L·x."""
        return L.transform(self.D.right_matrix(x))

    def lmul(self, x: Sequence, L: ZLattice) -> ZLattice:
        """x·L."""
        return L.transform(self.D.left_matrix(x))

    def pip(self, a: ZLattice) -> tuple | None:
        """ξ with a = Oξ, or None if a is not principal."""
        if a == self.O:
            return tuple(self.D.one)
        if self.quat is None:
            return pip_nf(self.F, a)
        return pip_quat(self.quat, a, self.O)


def field_order(F: NumberField) -> SkewOrder:
    return SkewOrder(F.alg, F.O, F)


def smallest_integer(L: ZLattice, one: Sequence) -> int:
    """The smallest positive integer k with k·1 in the full lattice L."""
    c = L.coords(one)
    if c is None:
        raise ValueError("lattice does not span the identity")
    return lcm(*(x.denominator for x in c))


def integral_scale(L: ZLattice, O: ZLattice) -> int:
    """The smallest positive integer k with kL inside O."""
    k = 1
    for v in L.vectors():
        k = lcm(k, *(x.denominator for x in O.coords(v)))
    return k


def element(L: ZLattice, coeffs: Sequence[int]) -> tuple:
    vs = L.vectors()
    return tuple(sum((c * v[s] for c, v in zip(coeffs, vs)), Fraction(0)) for s in range(L.dim))


# ---------------------------------------------------------------- vectors over D

def vec_lmul(D: Algebra, a: Sequence, x: Sequence[Sequence]) -> tuple:
    return tuple(D.mul(a, xi) for xi in x)


def vec_rmul(D: Algebra, x: Sequence[Sequence], a: Sequence) -> tuple:
    return tuple(D.mul(xi, a) for xi in x)


def vec_add(x, y) -> tuple:
    return tuple(Algebra.add(a, b) for a, b in zip(x, y))


def vec_sub(x, y) -> tuple:
    return tuple(Algebra.sub(a, b) for a, b in zip(x, y))


def flatten(x: Sequence[Sequence]) -> list[Fraction]:
    return [c for xi in x for c in xi]


def module_lattice(D: Algebra, pairs: Sequence[tuple[ZLattice, Sequence]], r: int) -> ZLattice:
    """The Z-lattice sum of b·x over (ideal b, vector x)."""
    gens = [flatten(vec_lmul(D, b, x)) for L, x in pairs for b in L.vectors()]
    return ZLattice.from_generators(gens, r * D.dim)


# ---------------------------------------------------------------- extended Euclid

def ext_euclid_pair(S: SkewOrder, a: ZLattice, b: ZLattice,
                    c: ZLattice | None = None) -> tuple[tuple, tuple]:
    """α in c⁻¹a and β in c⁻¹b with α + β = 1, where c = a + b."""
    D = S.D
    if c is None:
        c = a + b
    elif a + b != c:
        raise ValueError("a + b differs from c")
    cinv = lat_inverse(D, c)
    ca, cb = lat_mul(D, cinv, a), lat_mul(D, cinv, b)
    order = right_order(D, c)
    # a basis of the right order whose first element is 1
    u = order.int_coords(D.one)
    U = complete_to_basis(u)
    basis = [element(order, col) for col in transpose(U)]
    Binv = inverse(transpose([list(v) for v in basis]))

    def int_matrix(L: ZLattice) -> list[list[int]]:
        cols = [matvec(Binv, v) for v in L.vectors()]
        if any(x.denominator != 1 for col in cols for x in col):
            raise ArithmeticError("ideal is not inside the right order")
        return [[int(col[i]) for col in cols] for i in range(len(basis))]

    Ha, Hb = int_matrix(ca), int_matrix(cb)
    n = len(basis)
    M = [ra + rb for ra, rb in zip(Ha, Hb)]
    H, T = hnf_with_transform(M)
    e1 = [int(i == 0) for i in range(n)]
    col = next((k for k in range(len(T)) if [row[k] for row in H] == e1), None)
    if col is None:
        raise ArithmeticError("c⁻¹a + c⁻¹b is not the right order of c")
    z = [row[col] for row in T]
    alpha = element(ca, z[:n])
    beta = element(cb, z[n:])
    if Algebra.add(alpha, beta) != tuple(D.one):
        raise ArithmeticError("Bezout coefficients do not sum to 1")
    return alpha, beta


def ext_euclid_many(S: SkewOrder, ideals: Sequence[ZLattice],
                    c: ZLattice | None = None) -> list[tuple]:
    """α_j in c⁻¹a_j summing to 1, by induction on the number of ideals."""
    D = S.D
    total = ideals[0]
    for a in ideals[1:]:
        total = total + a
    if c is None:
        c = total
    elif c != total:
        raise ValueError("the ideals do not sum to c")
    if len(ideals) == 1:
        return [tuple(D.one)]
    head = ideals[0]
    for a in ideals[1:-1]:
        head = head + a
    betas = ext_euclid_many(S, ideals[:-1], head)
    xi, eta = ext_euclid_pair(S, head, ideals[-1], c)
    return [D.mul(xi, bj) for bj in betas] + [eta]


# ---------------------------------------------------------------- pseudo-HNF

@dataclass
class PseudoMatrix:
    """Columns A_j (vectors in D^r) with coefficient left ideals b_j."""
    cols: list[tuple]
    ideals: list[ZLattice]
    r: int

    def span(self, D: Algebra) -> ZLattice:
        return module_lattice(D, list(zip(self.ideals, self.cols)), self.r)


def pseudo_hnf(S: SkewOrder, P: PseudoMatrix, verify: bool = True) -> PseudoMatrix:
    """An equivalent pseudo-matrix with r columns forming a unit upper triangular matrix."""
    D = S.D
    zero = D.zero()
    cols = list(P.cols)
    ideals = list(P.ideals)
    pivots: list[tuple | None] = [None] * P.r
    pivot_ideals: list[ZLattice | None] = [None] * P.r
    for row in range(P.r - 1, -1, -1):
        nz = [j for j, x in enumerate(cols) if x[row] != zero]
        if not nz:
            raise RankError(f"no pivot in row {row}")
        for j in nz:
            a = cols[j][row]
            ideals[j] = S.rmul(ideals[j], a)
            cols[j] = vec_lmul(D, D.inv(a), cols[j])
        sub = [ideals[j] for j in nz]
        c_ideal = sub[0]
        for a in sub[1:]:
            c_ideal = c_ideal + a
        alphas = ext_euclid_many(S, sub, c_ideal)
        c = tuple(zero for _ in range(P.r))
        for alpha, j in zip(alphas, nz):
            c = vec_add(c, vec_lmul(D, alpha, cols[j]))
        for j in nz:
            cols[j] = vec_sub(cols[j], c)
        pivots[row] = c
        pivot_ideals[row] = c_ideal
        keep = [j for j in range(len(cols)) if any(x != zero for x in cols[j])]
        cols = [cols[j] for j in keep]
        ideals = [ideals[j] for j in keep]
    if cols:
        raise ArithmeticError("columns left over after elimination")
    out = PseudoMatrix(list(pivots), list(pivot_ideals), P.r)  # type: ignore[arg-type]
    if verify and out.span(D) != P.span(D):
        raise ArithmeticError("pseudo-HNF changed the module")
    return out


# ---------------------------------------------------------------- local bases and Roiter

def local_basis(L: ZLattice, order: Sequence[Sequence], action: Callable, p: int, d: int,
                rng: random.Random, budget: int | None = None,
                exhaustive_limit: int = 1 << 16) -> list[tuple]:
    """x_1..x_d in L such that the span of action(o, x_j) has index in L prime to p."""
    n = L.rank
    basis = L.vectors()
    # contribution of each basis vector, as integer coordinates mod p
    images = []
    for b in basis:
        rows = []
        for o in order:
            c = L.int_coords(action(o, b))
            if c is None:
                raise ValueError("lattice is not stable under the order")
            rows.append([x % p for x in c])
        images.append(rows)

    def ok(coeffs: Sequence[Sequence[int]]) -> bool:
        rows = []
        for cj in coeffs:
            for k in range(len(order)):
                rows.append([sum(c * images[i][k][t] for i, c in enumerate(cj) if c) % p
                             for t in range(n)])
        return rank_mod_p(rows, p) == n

    def to_elements(coeffs):
        return [element(L, cj) for cj in coeffs]

    if budget is None:
        budget = 64 * d * p
    tried = 0
    for _ in range(budget):
        tried += 1
        coeffs = [[rng.randrange(p) for _ in range(n)] for _ in range(d)]
        if ok(coeffs):
            return to_elements(coeffs)
    if p ** (n * d) <= exhaustive_limit:
        for flat in product(range(p), repeat=n * d):
            tried += 1
            coeffs = [list(flat[j * n:(j + 1) * n]) for j in range(d)]
            if ok(coeffs):
                return to_elements(coeffs)
        raise LocalBasisFailure(p, True, tried)
    raise LocalBasisFailure(p, False, tried)


def prime_support(n: Fraction | int) -> list[int]:
    n = Fraction(n)
    return sorted(set(factorint(n.numerator)) | set(factorint(n.denominator)))


def crt_weights(primes: Sequence[int]) -> list[int]:
    """Integers β_i with β_i ≡ 1 mod p_i and β_i ≡ 0 mod p_j for j ≠ i."""
    out = []
    for i, p in enumerate(primes):
        m = 1
        for j, q in enumerate(primes):
            if j != i:
                m *= q
        out.append(m * pow(m, -1, p) if p > 1 else m)
    return out


@dataclass
class RoiterMap:
    xi: tuple
    image: ZLattice
    index: Fraction
    primes: list[int] = field(default_factory=list)


def roiter_map(S: SkewOrder, M: ZLattice, N: ZLattice, a: int, seed: int = 0,
               side: str = "left") -> RoiterMap:
    """ξ with Mξ ⊆ N and [N : Mξ] prime to a, for rank-one left ideals M, N.

    With side="right" the ideals are right ideals and the map is x ↦ ξx.
    """
    D = S.D
    rng = random.Random(seed)
    if side == "left":
        def action(o, x): return D.mul(o, x)
        def apply(L, x): return S.rmul(L, x)
    else:
        def action(o, x): return D.mul(x, o)
        def apply(L, x): return S.lmul(x, L)
    primes = prime_support(a)
    if M.is_subset(N):
        idx = lattice_index(N, M)
        if all(idx.numerator % p for p in primes):
            return RoiterMap(tuple(D.one), M, idx, primes)
    order = S.O.vectors()
    parts = []
    for p in primes:
        omega = local_basis(M, order, action, p, 1, rng)[0]
        nu = local_basis(N, order, action, p, 1, rng)[0]
        wi = D.inv(omega)
        xi_p = D.mul(wi, nu) if side == "left" else D.mul(nu, wi)
        img = apply(M, xi_p)
        k = integral_scale(img, N)
        if k % p == 0:
            raise ArithmeticError("local generators do not match at p")
        parts.append(Algebra.scale(xi_p, k))
    if parts:
        xi = D.zero()
        for beta, x in zip(crt_weights(primes), parts):
            xi = Algebra.add(xi, Algebra.scale(x, beta))
    else:
        xi = Algebra.scale(D.one, integral_scale(M, N))
    image = apply(M, xi)
    if not image.is_full or not image.is_subset(N):
        raise ArithmeticError("Roiter map is not an injection into N")
    idx = lattice_index(N, image)
    if any(a % p == 0 for p in prime_support(idx)):
        raise ArithmeticError("Roiter map cokernel meets the given primes")
    return RoiterMap(xi, image, idx, primes)


# ---------------------------------------------------------------- Steinitz form

@dataclass
class SteinitzForm:
    free_part: list[tuple]
    steinitz_ideal: ZLattice
    last_element: tuple

    def pairs(self, S: SkewOrder) -> list[tuple[ZLattice, tuple]]:
        return [(S.O, z) for z in self.free_part] + [(self.steinitz_ideal, self.last_element)]


def _integralize(S: SkewOrder, a: ZLattice, x: tuple) -> tuple[ZLattice, tuple]:
    k = integral_scale(a, S.O)
    if k == 1:
        return a, x
    return a.scale(k), tuple(Algebra.scale(xi, Fraction(1, k)) for xi in x)


def steinitz(S: SkewOrder, pairs: Sequence[tuple[ZLattice, Sequence]], seed: int = 0,
             verify: bool = True) -> SteinitzForm:
    """Rewrite a1·x1 ⊕ ... ⊕ ar·xr as O z1 ⊕ ... ⊕ O z_{r-1} ⊕ b z_r."""
    D = S.D
    r = len(pairs[0][1])
    pairs = [(a, tuple(tuple(xi) for xi in x)) for a, x in pairs]
    X = module_lattice(D, pairs, r)
    if verify:
        if X.rank != sum(a.rank for a, _ in pairs):
            raise NotDirectError("the summands are not independent")
    if all(a == S.O for a, _ in pairs):
        return SteinitzForm([x for _, x in pairs[:-1]], S.O, pairs[-1][1])
    cur_a, cur_x = pairs[0]
    free = []
    for step, (a2, x2) in enumerate(pairs[1:]):
        a1, x1 = _integralize(S, cur_a, cur_x)
        a2, x2 = _integralize(S, a2, x2)
        alpha = smallest_integer(a1, D.one)
        rm = roiter_map(S, a2, S.O, alpha, seed=seed + step)
        a2t = rm.image
        x2t = vec_lmul(D, D.inv(rm.xi), x2)
        al1, al2 = ext_euclid_pair(S, a1, a2t, S.O)
        free.append(vec_add(vec_lmul(D, al1, x1), vec_lmul(D, al2, x2t)))
        cur_a = a1.intersect(a2t)
        cur_x = vec_sub(x1, x2t)
    out = SteinitzForm(free, cur_a, cur_x)
    if verify:
        Y = module_lattice(D, out.pairs(S), r)
        if Y != X:
            raise ArithmeticError("Steinitz form does not reproduce the module")
    return out


def same_ideal_class(S: SkewOrder, a: ZLattice, b: ZLattice) -> tuple | None:
    """ξ in D with a = bξ for left ideals a, b, or None when no such ξ exists.

    Decided by a principal ideal test on b⁻¹a over the right order of b; this
    needs right order of b equal to the base order, which holds for commutative D.
    """
    if not S.commutative:
        raise Unsupported("ideal class comparison implemented for commutative orders")
    q = lat_mul(S.D, lat_inverse(S.D, b), a)
    xi = S.pip(q)
    if xi is None:
        return None
    if S.rmul(b, xi) != a:
        raise ArithmeticError("class comparison failed to verify")
    return xi
