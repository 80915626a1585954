"""Nice maximal orders in M_n(D) and freeness over a component maximal order.

Elements of M_n(D) use the coordinates of ``matrix_algebra``; vectors of
D^n are tuples of n elements of D.  A module over a component is a lattice
in A^d, the d blocks being consecutive.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Sequence

from .algebra import (
    Algebra, is_order, lat_inverse, lat_mul, left_order, mat_to_vec, matrix_algebra, vec_to_mat,
)
from .linalg import ZLattice, dual_and_intersect, glue_at_prime, lattice_index
from .numberfield import Unsupported
from .pseudo import (
    PseudoMatrix, SkewOrder, field_order, flatten, local_basis, prime_support, pseudo_hnf,
    same_ideal_class, steinitz, vec_lmul,
)

REPSET_LIMIT = 1 << 20


# ---------------------------------------------------------------- matrices over D

def mat_mul(D: Algebra, a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(len(b[0])):
            s = D.zero()
            for k in range(len(b)):
                s = Algebra.add(s, D.mul(a[i][k], b[k][j]))
            row.append(s)
        out.append(row)
    return out


def mat_inv_commutative(D: Algebra, a):
    """Inverse of a square matrix over a commutative D, by Gauss-Jordan elimination."""
    n = len(a)
    zero, one = D.zero(), tuple(D.one)
    m = [list(a[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != zero), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = D.inv(m[c][c])
        m[c] = [D.mul(inv, x) for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != zero:
                f = m[r][c]
                m[r] = [Algebra.sub(x, D.mul(f, y)) for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def unit_matrix_entry(D: Algebra, n: int, i: int, j: int, x: Sequence) -> tuple:
    """x placed at position (i, j) of an n x n matrix, as an element of M_n(D)."""
    z = D.zero()
    return mat_to_vec(D, [[tuple(x) if (a, b) == (i, j) else z for b in range(n)]
                          for a in range(n)])


# ---------------------------------------------------------------- nice orders

@dataclass
class NiceOrder:
    delta: SkewOrder
    a_ideal: ZLattice            # right ideal of delta
    n: int
    lattice: ZLattice = field(repr=False, default=None)  # type: ignore[assignment]
    a_inverse: ZLattice = field(repr=False, default=None)  # type: ignore[assignment]
    left_order: ZLattice = field(repr=False, default=None)  # type: ignore[assignment]


def build_nice(S: SkewOrder, a: ZLattice, n: int, check: bool = True) -> NiceOrder:
    """The order with Δ blocks, last column a⁻¹, last row a and corner O_l(a)."""
    D = S.D
    if check and not lat_mul(D, a, S.O).is_subset(a):
        raise ValueError("not a right ideal of the given order")
    ainv = lat_inverse(D, a)
    lo = left_order(D, a)
    if n == 1:
        return NiceOrder(S, a, 1, lo, ainv, lo)
    gens = []
    for i in range(n):
        for j in range(n):
            if i < n - 1 and j < n - 1:
                block = S.O
            elif i < n - 1:
                block = ainv
            elif j < n - 1:
                block = a
            else:
                block = lo
            gens.extend(unit_matrix_entry(D, n, i, j, x) for x in block.vectors())
    L = ZLattice.from_generators(gens, n * n * D.dim)
    if check and not is_order(matrix_algebra(D, n), L):
        raise ArithmeticError("block lattice is not an order")
    return NiceOrder(S, a, n, L, ainv, lo)


@dataclass
class NiceConjugation:
    S: list[list[tuple]]
    Sinv: list[list[tuple]]
    nice: NiceOrder
    bad_primes: list[int]
    route: dict[int, str]


def full_matrix_order(S: SkewOrder, n: int) -> ZLattice:
    D = S.D
    return ZLattice.from_generators(
        [unit_matrix_entry(D, n, i, j, x) for i in range(n) for j in range(n)
         for x in S.O.vectors()], n * n * D.dim)


def conjugate_by(D: Algebra, n: int, S, Sinv, L: ZLattice) -> ZLattice:
    """S·L·S⁻¹ for a lattice L in M_n(D)."""
    out = []
    for v in L.vectors():
        m = vec_to_mat(D, v, n)
        out.append(mat_to_vec(D, mat_mul(D, mat_mul(D, S, m), Sinv)))
    return ZLattice.from_generators(out, n * n * D.dim)


def _apply_to_column_lattice(D: Algebra, n: int, u, L: ZLattice) -> ZLattice:
    """u·L for a lattice L in D^n (column vectors) and u in M_n(D)."""
    t = D.dim
    out = []
    for v in L.vectors():
        col = [[tuple(v[i * t:(i + 1) * t])] for i in range(n)]
        out.append(flatten([r[0] for r in mat_mul(D, u, col)]))
    return ZLattice.from_generators(out, n * t)


def _representative_intersection(D: Algebra, n: int, M: ZLattice, uM: ZLattice, u, p: int):
    """uM_p ∩ M from representatives of M/uM; None when the quotient is too large."""
    size = lattice_index(M, uM)
    if size.denominator != 1 or size > REPSET_LIMIT:
        return None
    t = D.dim
    Mv = M.vectors()
    coords = [M.int_coords(v) for v in uM.vectors()]
    # the HNF pivots of uM in M-coordinates bound a box of coset representatives
    sub = ZLattice.from_generators(coords, M.rank)
    piv = [max(i for i, x in enumerate(c) if x) for c in sub.basis]
    box = [1] * M.rank
    for c, pv in zip(sub.basis, piv):
        box[pv] = c[pv]
    uinv = mat_inv_commutative(D, u)
    keep = []
    for cs in product(*(range(b) for b in box)):
        a = [sum((ci * v[s] for ci, v in zip(cs, Mv)), Fraction(0)) for s in range(M.dim)]
        col = [[tuple(a[i * t:(i + 1) * t])] for i in range(n)]
        w = flatten([r[0] for r in mat_mul(D, uinv, col)])
        c = M.coords(w)
        if all(x.denominator % p for x in c):
            keep.append(a)
    return ZLattice.from_generators(keep + uM.vectors(), M.dim)


def conjugate_to_nice(S: SkewOrder, Lam: ZLattice, n: int, seed: int = 0,
                      max_repset: int = REPSET_LIMIT) -> NiceConjugation:
    """S and a with Lam = S·Λ_{a,n}·S⁻¹, for a maximal order Lam in M_n(D)."""
    if not S.commutative and n >= 2:
        raise Unsupported("matrix rings over quaternion skew fields are not handled")
    D = S.D
    A = matrix_algebra(D, n)
    t = D.dim
    full = full_matrix_order(S, n)
    M = ZLattice.from_generators(
        [flatten([tuple(x) if i == k else D.zero() for k in range(n)])
         for i in range(n) for x in S.O.vectors()], n * t)
    idx = lattice_index(full, Lam + full)
    bad = prime_support(idx)
    rng = random.Random(seed)
    route: dict[int, str] = {}
    pieces = []
    for p in bad:
        LL = lat_mul(A, Lam, full)
        u_vec = _local_generator(A, LL, full, p, rng)
        # a central multiple of u lies in M_n(Δ), so that uM ⊆ M
        k = lcm(*(x.denominator for x in full.coords(u_vec)))
        u_vec = Algebra.scale(u_vec, k)
        u = vec_to_mat(D, u_vec, n)
        uM = _apply_to_column_lattice(D, n, u, M)
        piece = None
        if lattice_index(M, uM) <= max_repset:
            piece = _representative_intersection(D, n, M, uM, u, p)
        if piece is None:
            piece = glue_at_prime(M, uM, p)
            route[p] = "dual"
        else:
            route[p] = "representatives"
        pieces.append(piece)
    N = M
    for piece in pieces:
        N = dual_and_intersect(N, piece)
    # Steinitz form of N as a Δ-module (right = left for commutative D)
    vecs = [tuple(tuple(v[i * t:(i + 1) * t]) for i in range(n)) for v in N.vectors()]
    P = PseudoMatrix(vecs, [S.O] * len(vecs), n)
    H = pseudo_hnf(S, P)
    st = steinitz(S, list(zip(H.ideals, H.cols)), seed=seed)
    zs = st.free_part + [st.last_element]
    Smat = [[zs[j][i] for j in range(n)] for i in range(n)]
    Sinv = mat_inv_commutative(D, Smat)
    nice = build_nice(S, st.steinitz_ideal, n)
    if conjugate_by(D, n, Smat, Sinv, nice.lattice) != Lam:
        raise ArithmeticError("conjugation to nice form failed to verify")
    return NiceConjugation(Smat, Sinv, nice, bad, route)


def _local_generator(A: Algebra, L: ZLattice, order: ZLattice, p: int, rng) -> tuple:
    """u with L_p = u·order_p for a right order-module L."""
    return local_basis(L, order.vectors(), lambda o, x: A.mul(x, o), p, 1, rng)[0]


# ---------------------------------------------------------------- step 5

def component_order(comp) -> SkewOrder:
    """The base order Δ of D used for a Wedderburn component."""
    if comp.D is None:
        return field_order(comp.F)
    if comp.n != 1:
        raise Unsupported("matrix rings over quaternion skew fields are not handled")
    return SkewOrder(comp.D.alg, comp.max_order, comp.F, comp.D)


@dataclass
class MaxOrderResult:
    status: str                      # "basis", "not_free", "unknown"
    basis: list[tuple] = field(default_factory=list)
    reason: str = ""
    steinitz_ideal: ZLattice | None = None
    pip: tuple | None = None
    conj: NiceConjugation | None = None


def _blocks(v: Sequence, size: int, d: int) -> list[tuple]:
    return [tuple(v[j * size:(j + 1) * size]) for j in range(d)]


def _span_over(A: Algebra, order: ZLattice, gens: Sequence[Sequence], d: int) -> ZLattice:
    size = A.dim
    out = []
    for g in gens:
        bl = _blocks(g, size, d)
        for o in order.vectors():
            out.append([c for b in bl for c in A.mul(o, b)])
    return ZLattice.from_generators(out, d * size)


def max_order_free_test(S: SkewOrder, n: int, order: ZLattice, X: ZLattice, d: int,
                        cancellation: bool, seed: int = 0) -> MaxOrderResult:
    """A basis of X over the maximal order ``order`` of M_n(D), or evidence of non-freeness.

    ``cancellation`` says whether failure of the ideal-class test proves
    non-freeness; without it the answer is "unknown".
    """
    D = S.D
    if n == 1:
        if order != S.O:
            raise ValueError("for n = 1 the base order must be the component order")
        t = D.dim
        vecs = [tuple(_blocks(v, t, d)) for v in X.vectors()]
        H = pseudo_hnf(S, PseudoMatrix(vecs, [S.O] * len(vecs), d))
        st = steinitz(S, list(zip(H.ideals, H.cols)), seed=seed)
        xi = S.pip(st.steinitz_ideal)
        if xi is None:
            decisive = cancellation or d == 1
            return MaxOrderResult("not_free" if decisive else "unknown", [],
                                  "Steinitz ideal is not principal", st.steinitz_ideal)
        basis = [flatten(z) for z in st.free_part] + [flatten(vec_lmul(D, xi, st.last_element))]
        basis = [tuple(b) for b in basis]
        if _span_over(D, order, basis, d) != X:
            raise ArithmeticError("component basis failed to verify")
        return MaxOrderResult("basis", basis, "", st.steinitz_ideal, xi)
    conj = conjugate_to_nice(S, order, n, seed=seed)
    return _nice_free_test(S, n, conj, X, d, cancellation, seed)


def _nice_free_test(S: SkewOrder, n: int, conj: NiceConjugation, X: ZLattice, d: int,
                    cancellation: bool, seed: int) -> MaxOrderResult:
    D = S.D
    A = matrix_algebra(D, n)
    t = D.dim
    size = A.dim
    Sm, Sinv = conj.S, conj.Sinv
    nice = conj.nice

    def left(m, v):
        return [c for b in _blocks(v, size, d)
                for c in mat_to_vec(D, mat_mul(D, m, vec_to_mat(D, b, n)))]
    Xn = ZLattice.from_generators([left(Sinv, v) for v in X.vectors()], d * size)
    # e11·X as vectors in D^{dn}: row 0 of each block
    def row0(v):
        return tuple(tuple(v[j * size + k * t: j * size + (k + 1) * t])
                     for j in range(d) for k in range(n))
    e11 = unit_matrix_entry(D, n, 0, 0, D.one)
    cut = ZLattice.from_generators(
        [[c for b in _blocks(v, size, d) for c in A.mul(e11, b)] for v in Xn.vectors()],
        d * size)
    vecs = [row0(v) for v in cut.vectors()]
    H = pseudo_hnf(S, PseudoMatrix(vecs, [S.O] * len(vecs), d * n))
    st_x = steinitz(S, list(zip(H.ideals, H.cols)), seed=seed)
    ainv = nice.a_inverse
    unit = [tuple(tuple(D.one) if k == j else D.zero() for k in range(d)) for j in range(d)]
    st_a = steinitz(S, [(ainv, u) for u in unit], seed=seed + 1)
    xi = same_ideal_class(S, st_x.steinitz_ideal, st_a.steinitz_ideal)
    if xi is None:
        return MaxOrderResult("not_free" if cancellation else "unknown", [],
                              "e11-cut Steinitz class differs from that of the twisted ideals",
                              st_x.steinitz_ideal, conj=conj)
    bs = st_x.free_part + [vec_lmul(D, xi, st_x.last_element)]
    # ψ: y_k -> bs[d(n-1)+k]; b'_j = ψ(e_j)
    ys = st_a.free_part + [st_a.last_element]
    Y = [[ys[k][j] for k in range(d)] for j in range(d)]      # columns y_k
    Yinv = mat_inv_commutative(D, Y)
    tail = bs[d * (n - 1):]
    twisted = []
    for j in range(d):
        # e_j = Σ_k c_k y_k with c = Y⁻¹ e_j
        w = tuple(D.zero() for _ in range(d * n))
        for k in range(d):
            w = tuple(Algebra.add(a, b) for a, b in zip(w, vec_lmul(D, Yinv[k][j], tail[k])))
        twisted.append(w)
    head = bs[:d * (n - 1)]
    omegas = []
    for j in range(d):
        parts = head[j * (n - 1):(j + 1) * (n - 1)] + [twisted[j]]
        # ω_j = Σ_k e_{k,1} ω_{j,k}: row k of each block is row 0 of ω_{j,k}
        blocks = []
        for blk in range(d):
            m = [[D.zero()] * n for _ in range(n)]
            for k, part in enumerate(parts):
                for col in range(n):
                    m[k][col] = part[blk * n + col]
            blocks.append(mat_to_vec(D, m))
        omegas.append([c for b in blocks for c in b])
    if _span_over(A, nice.lattice, omegas, d) != Xn:
        raise ArithmeticError("nice-order basis failed to verify")
    basis = [tuple(left(Sm, w)) for w in omegas]
    return MaxOrderResult("basis", basis, "", st_x.steinitz_ideal, xi, conj)
