"""Finite-dimensional Q-algebras given by structure constants, and lattices in them.

Every concrete ring in the package (number fields, quaternion algebras,
matrix rings over them, group algebras) is an ``Algebra``; orders and
ideals are ``ZLattice`` objects in its coordinate space.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

from .linalg import (
    ZLattice, integral_preimage, inverse, matmul, solve, to_fraction,
)

Vec = tuple[Fraction, ...]


class Algebra:
    """A Q-algebra with basis e_0..e_{n-1}; ``table[i][j]`` lists (k, c) with e_i e_j = sum c e_k."""

    def __init__(self, table: Sequence[Sequence[Iterable[tuple[int, Fraction]]]],
                 one: Sequence, name: str = ""):
        self.dim = len(table)
        self.table = [[tuple((k, to_fraction(c)) for k, c in cell if c) for cell in row]
                      for row in table]
        self.one: Vec = tuple(to_fraction(x) for x in one)
        self.name = name

    @staticmethod
    def from_dense(mult: Sequence[Sequence[Sequence]], one: Sequence, name: str = "") -> "Algebra":
        table = [[[(k, c) for k, c in enumerate(cell) if c] for cell in row] for row in mult]
        return Algebra(table, one, name)

    def __repr__(self):
        return f"Algebra({self.name or self.dim})"

    # elements
    def zero(self) -> Vec:
        return (Fraction(0),) * self.dim

    def basis_element(self, i: int) -> Vec:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def elem(self, coords: Sequence) -> Vec:
        if len(coords) != self.dim:
            raise ValueError("wrong number of coordinates")
        return tuple(to_fraction(x) for x in coords)

    def mul(self, x: Sequence, y: Sequence) -> Vec:
        out = [Fraction(0)] * self.dim
        ynz = [(j, b) for j, b in enumerate(y) if b]
        for i, a in enumerate(x):
            if not a:
                continue
            row = self.table[i]
            for j, b in ynz:
                ab = a * b
                for k, c in row[j]:
                    out[k] += ab * c
        return tuple(out)

    def prod(self, *xs: Sequence) -> Vec:
        out = self.one
        for x in xs:
            out = self.mul(out, x)
        return out

    @staticmethod
    def add(x: Sequence, y: Sequence) -> Vec:
        return tuple(a + b for a, b in zip(x, y))

    @staticmethod
    def sub(x: Sequence, y: Sequence) -> Vec:
        return tuple(a - b for a, b in zip(x, y))

    @staticmethod
    def scale(x: Sequence, q) -> Vec:
        q = to_fraction(q)
        return tuple(a * q for a in x)

    def left_matrix(self, x: Sequence) -> list[list[Fraction]]:
        """Matrix of y -> x*y."""
        cols = [self.mul(x, self.basis_element(j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def right_matrix(self, x: Sequence) -> list[list[Fraction]]:
        """Matrix of y -> y*x."""
        cols = [self.mul(self.basis_element(j), x) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def trace(self, x: Sequence) -> Fraction:
        return sum(self.left_matrix(x)[i][i] for i in range(self.dim))

    def inv(self, x: Sequence) -> Vec:
        sol = solve(self.left_matrix(x), self.one)
        if sol is None:
            raise ZeroDivisionError("element is not invertible")
        y = tuple(sol)
        if self.mul(y, x) != self.one:
            raise ZeroDivisionError("element has no two-sided inverse")
        return y

    def is_invertible(self, x: Sequence) -> bool:
        try:
            self.inv(x)
        except ZeroDivisionError:
            return False
        return True

    def pow(self, x: Sequence, e: int) -> Vec:
        if e < 0:
            return self.pow(self.inv(x), -e)
        out, base = self.one, tuple(x)
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    @cached_property
    def is_commutative(self) -> bool:
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if sorted(self.table[i][j]) != sorted(self.table[j][i]):
                    return False
        return True

    def center_basis(self) -> list[Vec]:
        """Q-basis of the center, from the linear conditions x e_j = e_j x."""
        from .linalg import nullspace
        rows = []
        for j in range(self.dim):
            e = self.basis_element(j)
            L = self.right_matrix(e)
            R = self.left_matrix(e)
            rows.extend([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(L, R)])
        return [tuple(v) for v in nullspace(rows, self.dim)]

    def check_associative(self) -> bool:
        es = [self.basis_element(i) for i in range(self.dim)]
        for a, b, c in product(es, repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                return False
        return True


def direct_sum(algs: Sequence[Algebra], name: str = "") -> Algebra:
    offs = []
    n = 0
    for A in algs:
        offs.append(n)
        n += A.dim
    table = [[() for _ in range(n)] for _ in range(n)]
    one: list[Fraction] = []
    for A, o in zip(algs, offs):
        for i in range(A.dim):
            for j in range(A.dim):
                table[o + i][o + j] = tuple((o + k, c) for k, c in A.table[i][j])
        one.extend(A.one)
    return Algebra(table, one, name)


def matrix_algebra(D: Algebra, n: int, name: str = "") -> Algebra:
    """M_n(D) with coordinate index (row*n + col)*dim(D) + t."""
    t = D.dim
    N = n * n * t
    table = [[() for _ in range(N)] for _ in range(N)]
    for a, b, c in product(range(n), repeat=3):
        for s in range(t):
            for u in range(t):
                i = (a * n + b) * t + s
                j = (b * n + c) * t + u
                table[i][j] = tuple(((a * n + c) * t + k, v) for k, v in D.table[s][u])
    one = [Fraction(0)] * N
    for a in range(n):
        for s in range(t):
            one[(a * n + a) * t + s] = D.one[s]
    return Algebra(table, one, name or f"M{n}({D.name})")


# ---------------------------------------------------------------- matrices over D

def mat_to_vec(D: Algebra, m: Sequence[Sequence[Sequence]]) -> Vec:
    """Flatten an n x n matrix of D-elements into M_n(D) coordinates."""
    out: list[Fraction] = []
    for row in m:
        for x in row:
            out.extend(to_fraction(c) for c in x)
    return tuple(out)


def vec_to_mat(D: Algebra, v: Sequence, n: int) -> list[list[Vec]]:
    t = D.dim
    return [[tuple(v[(a * n + b) * t:(a * n + b + 1) * t]) for b in range(n)] for a in range(n)]


# ---------------------------------------------------------------- lattices

def lat_mul(A: Algebra, L: ZLattice, M: ZLattice) -> ZLattice:
    """The Z-span of all products l*m."""
    Lv, Mv = L.vectors(), M.vectors()
    return ZLattice.from_generators((A.mul(x, y) for x in Lv for y in Mv), A.dim)


def lat_from_elements(A: Algebra, elems: Iterable[Sequence]) -> ZLattice:
    return ZLattice.from_generators(elems, A.dim)


def _coord_rows(M: ZLattice, mat: Sequence[Sequence]) -> list[list[Fraction]]:
    Binv = inverse(M.matrix())
    return matmul(Binv, mat)


def left_colon(A: Algebra, L: ZLattice, M: ZLattice) -> ZLattice:
    """{x : x L ⊆ M}."""
    rows: list[list[Fraction]] = []
    Binv = inverse(M.matrix())
    for l in L.vectors():
        rows.extend(matmul(Binv, A.right_matrix(l)))
    return integral_preimage(rows, A.dim)


def right_colon(A: Algebra, L: ZLattice, M: ZLattice) -> ZLattice:
    """{x : L x ⊆ M}."""
    rows: list[list[Fraction]] = []
    Binv = inverse(M.matrix())
    for l in L.vectors():
        rows.extend(matmul(Binv, A.left_matrix(l)))
    return integral_preimage(rows, A.dim)


def left_order(A: Algebra, L: ZLattice) -> ZLattice:
    return left_colon(A, L, L)


def right_order(A: Algebra, L: ZLattice) -> ZLattice:
    return right_colon(A, L, L)


def lat_inverse(A: Algebra, L: ZLattice) -> ZLattice:
    """{x : L x L ⊆ L}."""
    rows: list[list[Fraction]] = []
    Binv = inverse(L.matrix())
    Lv = L.vectors()
    rights = [A.right_matrix(m) for m in Lv]
    for l in Lv:
        Ll = A.left_matrix(l)
        for R in rights:
            rows.extend(matmul(Binv, matmul(R, Ll)))
    return integral_preimage(rows, A.dim)


def is_order(A: Algebra, L: ZLattice) -> bool:
    if not L.is_full or not L.contains(A.one):
        return False
    vs = L.vectors()
    return all(L.contains(A.mul(x, y)) for x in vs for y in vs)


def is_left_module(A: Algebra, O: ZLattice, L: ZLattice) -> bool:
    return all(L.contains(A.mul(o, x)) for o in O.vectors() for x in L.vectors())


def is_right_module(A: Algebra, O: ZLattice, L: ZLattice) -> bool:
    return all(L.contains(A.mul(x, o)) for o in O.vectors() for x in L.vectors())


def ring_closure(A: Algebra, gens: Iterable[Sequence], max_den: int | None = None) -> ZLattice:
    """The ring generated by 1 and gens, as a lattice. Raises if it is not finitely generated
    within the denominator cap."""
    L = ZLattice.from_generators([A.one] + [tuple(g) for g in gens], A.dim)
    while True:
        new = L + lat_mul(A, L, L)
        if max_den is not None and new.den > max_den:
            raise ArithmeticError("ring closure is not integral")
        if new == L:
            return L
        L = new


def trace_discriminant(A: Algebra, L: ZLattice) -> Fraction:
    from .linalg import det
    vs = L.vectors()
    return det([[A.trace(A.mul(x, y)) for y in vs] for x in vs])


def structure_constants(A: Algebra, O: ZLattice) -> list[list[list[int]]]:
    """Integer c[i][j][k] with b_i b_j = sum_k c[i][j][k] b_k for an order O."""
    vs = O.vectors()
    out = []
    for x in vs:
        row = []
        for y in vs:
            c = O.int_coords(A.mul(x, y))
            if c is None:
                raise ValueError("lattice is not closed under multiplication")
            row.append(c)
        out.append(row)
    return out


def charpoly(m: Sequence[Sequence]) -> list[Fraction]:
    """Coefficients c_0..c_n of det(xI - m) (Faddeev–LeVerrier), c_n = 1."""
    n = len(m)
    a = [[to_fraction(x) for x in r] for r in m]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        Mk = matmul(a, Mk)
        for i in range(n):
            Mk[i][i] += coeffs[n - k + 1]
        AM = matmul(a, Mk)
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    return coeffs


def is_integral_element(A: Algebra, x: Sequence) -> bool:
    return all(c.denominator == 1 for c in charpoly(A.left_matrix(x)))


# ---------------------------------------------------------------- radicals and maximal orders

def _mat_pow_mod(m: list[list[int]], e: int, mod: int) -> list[list[int]]:
    n = len(m)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [[x % mod for x in r] for r in m]
    while e:
        if e & 1:
            out = [[sum(x * y for x, y in zip(r, c)) % mod for c in zip(*base)] for r in out]
        base = [[sum(x * y for x, y in zip(r, c)) % mod for c in zip(*base)] for r in base]
        e >>= 1
    return out


def _kernel_mod_p(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    a = [[x % p for x in r] for r in rows]
    piv: list[int] = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(a)) if a[i][c]), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
    out = []
    for f in range(ncols):
        if f in piv:
            continue
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-a[i][f]) % p
        out.append(v)
    return out


def radical_mod_p(A: Algebra, O: ZLattice, p: int) -> ZLattice:
    """The p-radical {x in O : x mod p lies in the Jacobson radical of O/pO}.

    Uses the trace functionals of Rónyai / Cohen–Ivanyos–Wales, which work in any
    characteristic.
    """
    n = A.dim
    c = structure_constants(A, O)

    def lmat(x: list[int]) -> list[list[int]]:
        # matrix of y -> x*y in O-coordinates
        m = [[0] * n for _ in range(n)]
        for i, xi in enumerate(x):
            if xi:
                for j in range(n):
                    for k, v in enumerate(c[i][j]):
                        if v:
                            m[k][j] += xi * v
        return m

    def omul(x: list[int], y: list[int]) -> list[int]:
        out = [0] * n
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        for k, v in enumerate(c[i][j]):
                            if v:
                                out[k] += xi * yj * v
        return out

    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    cur = [list(b) for b in basis]  # lifts of a basis of I_{i-1} mod p
    i = 0
    while p ** i <= n:
        mod = p ** (i + 1)
        rows = []
        for b in basis:
            row = []
            for a in cur:
                m = lmat(omul(a, b))
                t = _mat_pow_mod(m, p ** i, mod)
                tr = sum(t[r][r] for r in range(n)) % mod
                row.append(tr // p ** i)
            rows.append(row)
        ker = _kernel_mod_p(rows, len(cur), p)
        cur = [[sum(k[j] * cur[j][s] for j in range(len(cur))) for s in range(n)] for k in ker]
        i += 1
        if not cur:
            break
    vs = O.vectors()
    gens = [[sum(Fraction(x[j]) * vs[j][s] for j in range(n)) for s in range(n)] for x in cur]
    gens += [[p * t for t in v] for v in vs]
    return ZLattice.from_generators(gens, n)


def _prime_factors(n: int) -> list[int]:
    from sympy import factorint
    return sorted(factorint(abs(n)).keys())


def maximal_order(A: Algebra, O: ZLattice, target_disc: Fraction | None = None,
                  primes: Iterable[int] | None = None) -> ZLattice:
    """Enlarge the order O to a maximal order.

    At each prime the order is first replaced by the idealizer of its p-radical
    until stable; remaining index-p overorders are found by searching (1/p)O/O.
    With ``target_disc`` the result's trace discriminant is checked.
    """
    if not is_order(A, O):
        raise ValueError("input is not an order")
    disc = trace_discriminant(A, O)
    if primes is None:
        primes = [p for p in _prime_factors(int(disc)) if int(disc) % (p * p) == 0]
    for p in primes:
        while True:
            J = radical_mod_p(A, O, p)
            O2 = left_order(A, J)
            if O2 != O:
                O = O2
                continue
            O2 = _overorder_search(A, O, p)
            if O2 is None:
                break
            O = O2
    if target_disc is not None and trace_discriminant(A, O) != target_disc:
        raise ArithmeticError("maximalization did not reach the expected discriminant")
    return O


def _overorder_search(A: Algebra, O: ZLattice, p: int) -> ZLattice | None:
    vs = O.vectors()
    n = A.dim
    for coeffs in product(range(p), repeat=n):
        if not any(coeffs):
            continue
        # canonical line representative: first nonzero coefficient equals 1
        first = next(c for c in coeffs if c)
        if first != 1:
            continue
        y = tuple(sum(Fraction(c, p) * v[s] for c, v in zip(coeffs, vs)) for s in range(n))
        if not is_integral_element(A, y):
            continue
        try:
            R = ring_closure(A, vs + [y], max_den=O.den * p ** 8)
        except ArithmeticError:
            continue
        if R != O and is_order(A, R) and all(is_integral_element(A, v) for v in R.vectors()):
            return R
    return None
