"""Exact integer and rational linear algebra.

Matrices are lists of rows. Lattices are stored by their column Hermite
normal form: every basis vector is a column, operations act on the right,
so ``M @ U == (0 | H)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Iterable, Sequence

Q = Fraction


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


# ---------------------------------------------------------------- matrices

def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(r) for r in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def cols_to_rows(cols: Sequence[Sequence], nrows: int) -> list[list]:
    if not cols:
        return [[] for _ in range(nrows)]
    return [list(r) for r in zip(*cols)]


def rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the pivot column list."""
    a = [[to_fraction(x) for x in row] for row in m]
    rows = len(a)
    ncols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def det(m: Sequence[Sequence]) -> Fraction:
    a = [[to_fraction(x) for x in row] for row in m]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(map(to_fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    r, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in r]


def solve(m: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some solution x of m x = b over Q, or None."""
    ncols = len(m[0])
    aug = [list(map(to_fraction, row)) + [to_fraction(v)] for row, v in zip(m, b)]
    r, piv = rref(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv):
        x[c] = r[i][ncols]
    return x


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel {x : m x = 0} over Q."""
    if ncols is None:
        ncols = len(m[0])
    if not m:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    r, piv = rref(m)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, c in enumerate(piv):
            x[c] = -r[i][f]
        basis.append(x)
    return basis


def common_denominator(vals: Iterable[Fraction]) -> int:
    d = 1
    for v in vals:
        d = lcm(d, to_fraction(v).denominator)
    return d


# ---------------------------------------------------------------- HNF

def _hnf_columns(cols: list[list[int]], m: int, trans: list[list[int]] | None):
    """In-place column HNF of the m-row matrix whose columns are ``cols``.

    Rows are processed bottom-up; pivots end up in the rightmost columns.
    ``trans`` (columns of U) receives the same column operations.
    """
    n = len(cols)
    k = n - 1
    for i in range(m - 1, -1, -1):
        if k < 0:
            break
        ck = cols[k]
        for j in range(k - 1, -1, -1):
            cj = cols[j]
            b = cj[i]
            if b == 0:
                continue
            a = ck[i]
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            newk = [x * u + y * v for u, v in zip(ck, cj)]
            newj = [ag * v - bg * u for u, v in zip(ck, cj)]
            cols[k], cols[j] = newk, newj
            ck = newk
            if trans is not None:
                tk, tj = trans[k], trans[j]
                trans[k] = [x * u + y * v for u, v in zip(tk, tj)]
                trans[j] = [ag * v - bg * u for u, v in zip(tk, tj)]
        piv = ck[i]
        if piv == 0:
            continue
        if piv < 0:
            ck = [-u for u in ck]
            cols[k] = ck
            piv = -piv
            if trans is not None:
                trans[k] = [-u for u in trans[k]]
        for j in range(k + 1, n):
            q = cols[j][i] // piv
            if q:
                cols[j] = [u - q * v for u, v in zip(cols[j], ck)]
                if trans is not None:
                    trans[j] = [u - q * v for u, v in zip(trans[j], trans[k])]
        k -= 1
    return k + 1


def hnf_with_transform(M: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Column HNF with transformation: returns (H, U), M·U = H = (0 | H')."""
    m = len(M)
    n = len(M[0])
    cols = [[int(M[i][j]) for i in range(m)] for j in range(n)]
    trans = [[int(i == j) for i in range(n)] for j in range(n)]
    _hnf_columns(cols, m, trans)
    return cols_to_rows(cols, m), cols_to_rows(trans, n)


def hnf_basis(cols: Iterable[Sequence[int]], m: int) -> list[list[int]]:
    """Nonzero columns of the HNF of the lattice spanned by ``cols``.

    Generators are fed in chunks so intermediate entries stay bounded.
    """
    basis: list[list[int]] = []
    chunk: list[list[int]] = []
    for c in cols:
        c = [int(x) for x in c]
        if any(c):
            chunk.append(c)
        if len(chunk) >= max(m, 4):
            basis = _reduce(basis + chunk, m)
            chunk = []
    if chunk:
        basis = _reduce(basis + chunk, m)
    return basis


def _reduce(cols: list[list[int]], m: int) -> list[list[int]]:
    cols = [list(c) for c in cols]
    start = _hnf_columns(cols, m, None)
    return cols[start:]


# ---------------------------------------------------------------- lattices

@dataclass(frozen=True)
class ZLattice:
    """The lattice (1/den)·span(basis columns) inside Q^dim.

    ``basis`` holds the columns of an integer column HNF, so two lattices are
    equal exactly when their fields agree.
    """
    basis: tuple[tuple[int, ...], ...]
    den: int
    dim: int

    @staticmethod
    def from_generators(gens: Iterable[Sequence], dim: int) -> "ZLattice":
        gens = [[to_fraction(x) for x in g] for g in gens]
        den = common_denominator(x for g in gens for x in g)
        icols = [[int(x * den) for x in g] for g in gens]
        return ZLattice._canonical(hnf_basis(icols, dim), den, dim)

    @staticmethod
    def _canonical(cols: list[list[int]], den: int, dim: int) -> "ZLattice":
        g = den
        for c in cols:
            for x in c:
                if x:
                    g = gcd(g, x)
                    if g == 1:
                        break
            if g == 1:
                break
        if g > 1:
            cols = [[x // g for x in c] for c in cols]
            den //= g
        return ZLattice(tuple(tuple(c) for c in cols), den, dim)

    @staticmethod
    def standard(dim: int) -> "ZLattice":
        return ZLattice(tuple(tuple(int(i == j) for i in range(dim)) for j in range(dim)), 1, dim)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in c] for c in self.basis]

    def matrix(self) -> list[list[Fraction]]:
        """Basis as a rational matrix (columns are basis vectors)."""
        return cols_to_rows(self.vectors(), self.dim)

    def _pivots(self) -> list[int]:
        piv = []
        for c in self.basis:
            piv.append(max(i for i, x in enumerate(c) if x))
        return piv

    def coords(self, v: Sequence) -> list[Fraction] | None:
        """Rational coordinates of v in the basis, or None if v is outside the span."""
        w = [to_fraction(x) * self.den for x in v]
        piv = self._pivots()
        out = [Fraction(0)] * self.rank
        for j in range(self.rank - 1, -1, -1):
            p = piv[j]
            c = self.basis[j]
            t = w[p] / c[p]
            out[j] = t
            if t:
                w = [a - t * b for a, b in zip(w, c)]
        if any(w):
            return None
        return out

    def int_coords(self, v: Sequence) -> list[int] | None:
        c = self.coords(v)
        if c is None or any(x.denominator != 1 for x in c):
            return None
        return [int(x) for x in c]

    def contains(self, v: Sequence) -> bool:
        return self.int_coords(v) is not None

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def is_subset(self, other: "ZLattice") -> bool:
        return all(other.contains(v) for v in self.vectors())

    def __add__(self, other: "ZLattice") -> "ZLattice":
        return ZLattice.from_generators(self.vectors() + other.vectors(), self.dim)

    def scale(self, q) -> "ZLattice":
        q = to_fraction(q)
        if q == 0:
            raise ValueError("zero scale")
        return ZLattice.from_generators([[x * q for x in v] for v in self.vectors()], self.dim)

    def transform(self, m: Sequence[Sequence]) -> "ZLattice":
        """Image under the linear map with matrix m (dim_out x dim)."""
        out = len(m)
        return ZLattice.from_generators([matvec(m, v) for v in self.vectors()], out)

    @property
    def is_full(self) -> bool:
        return self.rank == self.dim

    def volume(self) -> Fraction:
        """Covolume of a full-rank lattice (product of HNF pivots / den^dim)."""
        if not self.is_full:
            raise ValueError("volume of a lattice of deficient rank")
        v = 1
        for c, p in zip(self.basis, self._pivots()):
            v *= c[p]
        return Fraction(v, self.den ** self.dim)

    def dual(self, gram: Sequence[Sequence] | None = None) -> "ZLattice":
        """{v : v^T G x in Z for all x in self} for a full-rank lattice."""
        b = self.matrix()
        bt = transpose(b)
        if gram is not None:
            bt = matmul(bt, [[to_fraction(x) for x in r] for r in gram])
        inv = inverse(bt)
        return ZLattice.from_generators(transpose(inv), self.dim)

    def intersect(self, other: "ZLattice", gram=None) -> "ZLattice":
        return dual_and_intersect(self, other, gram)

    def random_element(self, rng, bound: int = 3) -> list[Fraction]:
        out = [Fraction(0)] * self.dim
        for c in self.basis:
            t = rng.randint(-bound, bound)
            if t:
                out = [a + Fraction(t * b, self.den) for a, b in zip(out, c)]
        return out


def lattice_index(L1: ZLattice, L2: ZLattice) -> Fraction:
    """Generalized index [L1 : L2] = vol(L2) / vol(L1) for full-rank lattices."""
    if L1.dim != L2.dim:
        raise ValueError("ambient dimensions differ")
    return L2.volume() / L1.volume()


def dual_and_intersect(X: ZLattice, Y: ZLattice, gram=None) -> ZLattice:
    """X ∩ Y computed as (X* + Y*)* for full-rank lattices."""
    if gram is None:
        gram = identity(X.dim)
    return (X.dual(gram) + Y.dual(gram)).dual(gram)


def kernel_intersect(X: ZLattice, Y: ZLattice) -> ZLattice:
    """X ∩ Y by solving B_X a = B_Y b over Z; works for any ranks."""
    den = lcm(X.den, Y.den)
    bx = [[x * (den // X.den) for x in c] for c in X.basis]
    by = [[-y * (den // Y.den) for y in c] for c in Y.basis]
    cols = bx + by
    m = X.dim
    n = len(cols)
    trans = [[int(i == j) for i in range(n)] for j in range(n)]
    cols = [list(c) for c in cols]
    start = _hnf_columns(cols, m, trans)
    gens = []
    for t in trans[:start]:
        a = t[:X.rank]
        gens.append([sum(Fraction(ai * c[r], X.den) for ai, c in zip(a, X.basis)) for r in range(m)])
    if not gens:
        return ZLattice((), 1, m)
    return ZLattice.from_generators(gens, m)


def integral_preimage(rows: Iterable[Sequence], n: int) -> ZLattice:
    """{x in Q^n : r·x in Z for every row r}; the rows must span Q^n."""
    R = ZLattice.from_generators(rows, n)
    if not R.is_full:
        raise ValueError("conditions do not determine a full lattice")
    return R.dual()


def glue_at_prime(M: ZLattice, K: ZLattice, p: int) -> ZLattice:
    """The lattice equal to K after localizing at p and to M at every other prime."""
    T = dual_and_intersect(M, K)
    im = lattice_index(M, T)
    ik = lattice_index(K, T)
    a = p_part(im.numerator, p)
    mk = ik.numerator // p_part(ik.numerator, p)
    return ZLattice.from_generators(
        T.vectors() + [[x * a for x in v] for v in M.vectors()]
        + [[x * mk for x in v] for v in K.vectors()], M.dim)


def p_part(n: int, p: int) -> int:
    n = abs(n)
    out = 1
    while n and n % p == 0:
        n //= p
        out *= p
    return out


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    a = [[int(x) % p for x in r] for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r


def complete_to_basis(u: Sequence[int]) -> list[list[int]]:
    """A unimodular matrix (rows) whose first column is the primitive vector u."""
    n = len(u)
    _, U = hnf_with_transform([list(u)])
    # u^T U = (0,...,0,1), so the last row of U^{-1} is u^T.
    Uinv = inverse(U)
    V = transpose([[int(x) for x in r] for r in Uinv])
    last = [row[n - 1] for row in V]
    if last != list(u):
        raise ValueError("vector is not primitive")
    order = [n - 1] + list(range(n - 1))
    return [[row[j] for j in order] for row in V]


# ---------------------------------------------------------------- short vectors

def _ldl(gram: Sequence[Sequence]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2."""
    n = len(gram)
    a = [[to_fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        s = a[i][i] - sum(mu[k][i] ** 2 * d[k] for k in range(i))
        if s <= 0:
            raise ValueError("Gram matrix is not positive definite")
        d[i] = s
        for j in range(i + 1, n):
            mu[i][j] = (a[i][j] - sum(mu[k][i] * mu[k][j] * d[k] for k in range(i))) / s
    return d, mu


def _floor_sqrt_frac_upper(x: Fraction) -> int:
    """An integer >= sqrt(x)."""
    if x <= 0:
        return 0
    return isqrt(x.numerator // x.denominator) + 1


def short_vectors(gram: Sequence[Sequence], bound, exact: bool = False) -> list[list[int]]:
    """Nonzero integer x with x^T G x <= bound (== bound if exact), one per ±pair.

    The representative kept is the one whose last nonzero coordinate is positive.
    """
    bound = to_fraction(bound)
    n = len(gram)
    d, mu = _ldl(gram)
    out: list[list[int]] = []
    x = [0] * n

    def rec(i: int, remaining: Fraction):
        c = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        r2 = remaining / d[i]
        s = _floor_sqrt_frac_upper(r2)
        lo = int(c) - s - 1
        hi = int(c) + s + 1
        for t in range(lo, hi + 1):
            diff = t - c
            used = d[i] * diff * diff
            if used > remaining:
                continue
            x[i] = t
            if i == 0:
                if any(x):
                    last = next(v for v in reversed(x) if v)
                    if last > 0:
                        if not exact or remaining - used == 0:
                            out.append(list(x))
            else:
                rec(i - 1, remaining - used)
        x[i] = 0

    rec(n - 1, bound)
    out.sort(key=lambda v: (quad_form(gram, v), [abs(t) for t in v], v))
    return out


def quad_form(gram: Sequence[Sequence], v: Sequence) -> Fraction:
    return sum((to_fraction(gram[i][j]) * v[i] * v[j]
                for i in range(len(v)) for j in range(len(v))), Fraction(0))


def integer_solution(gens: Sequence[Sequence], target: Sequence) -> list[int] | None:
    """Integers c with sum c_i gens[i] = target, or None."""
    vals = [to_fraction(x) for g in gens for x in g] + [to_fraction(x) for x in target]
    den = common_denominator(vals)
    m = len(target)
    cols = [[int(to_fraction(x) * den) for x in g] for g in gens]
    k = len(cols)
    trans = [[int(i == j) for i in range(k)] for j in range(k)]
    start = _hnf_columns(cols, m, trans)
    w = [int(to_fraction(x) * den) for x in target]
    y = [0] * (k - start)
    for idx in range(k - 1, start - 1, -1):
        c = cols[idx]
        p = max(i for i, x in enumerate(c) if x)
        q, r = divmod(w[p], c[p])
        if r:
            return None
        y[idx - start] = q
        if q:
            w = [a - q * b for a, b in zip(w, c)]
    if any(w):
        return None
    return [sum(t[i] * yy for t, yy in zip(trans[start:], y)) for i in range(k)]
