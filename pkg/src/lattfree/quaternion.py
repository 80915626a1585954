"""Quaternion algebras (a, b | F) as Q-algebras, their orders, units and ideals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import isqrt
from typing import Sequence

from sympy import factorint

from .algebra import (
    Algebra, lat_inverse, lat_mul, left_order, maximal_order, right_order,
)
from .linalg import ZLattice, det, lattice_index, short_vectors, to_fraction
from .numberfield import NumberField, Unsupported, rationals

# products of the basis 1, i, j, ij: (t, u) -> (sign, power of a, power of b, w)
_QTABLE = {
    (0, 0): (1, 0, 0, 0), (0, 1): (1, 0, 0, 1), (0, 2): (1, 0, 0, 2), (0, 3): (1, 0, 0, 3),
    (1, 0): (1, 0, 0, 1), (1, 1): (1, 1, 0, 0), (1, 2): (1, 0, 0, 3), (1, 3): (1, 1, 0, 2),
    (2, 0): (1, 0, 0, 2), (2, 1): (-1, 0, 0, 3), (2, 2): (1, 0, 1, 0), (2, 3): (-1, 0, 1, 1),
    (3, 0): (1, 0, 0, 3), (3, 1): (-1, 1, 0, 2), (3, 2): (1, 0, 1, 1), (3, 3): (-1, 1, 1, 0),
}


class QuatAlgebra:
    """(a, b | F): i^2 = a, j^2 = b, ij = -ji. Coordinates are 4 blocks of F-coordinates."""

    def __init__(self, a, b, base: NumberField | None = None):
        self.F = F = base or rationals()
        self.a = self._felem(a)
        self.b = self._felem(b)
        if not any(self.a) or not any(self.b):
            raise ValueError("a and b must be nonzero")
        n = F.degree
        self.deg = n
        self.dim = 4 * n
        table = [[() for _ in range(self.dim)] for _ in range(self.dim)]
        for (t, u), (sgn, pa, pb, w) in _QTABLE.items():
            c = F.rational(sgn)
            for _ in range(pa):
                c = F.mul(c, self.a)
            for _ in range(pb):
                c = F.mul(c, self.b)
            for s in range(n):
                for v in range(n):
                    fs = F.mul(F.alg.basis_element(s), F.alg.basis_element(v))
                    prod = F.mul(fs, c)
                    table[t * n + s][u * n + v] = tuple((w * n + k, x) for k, x in enumerate(prod) if x)
        one = [Fraction(0)] * self.dim
        one[0] = Fraction(1)
        self.alg = Algebra(table, one, f"({self._fstr(self.a)},{self._fstr(self.b)}|{F.name})")

    def _felem(self, x):
        if isinstance(x, (int, Fraction, str)):
            return self.F.rational(to_fraction(x))
        return tuple(to_fraction(c) for c in x)

    @staticmethod
    def _fstr(x):
        return str(x[0]) if all(c == 0 for c in x[1:]) else str(tuple(str(c) for c in x))

    def __repr__(self):
        return f"QuatAlgebra{self.alg.name}"

    # elements
    def elem(self, *parts) -> tuple[Fraction, ...]:
        """Element x0 + x1 i + x2 j + x3 ij from F-elements (or rationals)."""
        parts = list(parts) + [0] * (4 - len(parts))
        out: list[Fraction] = []
        for p in parts:
            out.extend(self._felem(p))
        return tuple(out)

    def parts(self, x: Sequence) -> list[tuple]:
        n = self.deg
        return [tuple(x[t * n:(t + 1) * n]) for t in range(4)]

    def mul(self, x, y):
        return self.alg.mul(x, y)

    def conjugate(self, x):
        n = self.deg
        return tuple(c if k < n else -c for k, c in enumerate(x))

    def reduced_norm(self, x) -> tuple:
        return tuple(self.mul(x, self.conjugate(x))[:self.deg])

    def reduced_trace(self, x) -> tuple:
        return tuple(2 * c for c in x[:self.deg])

    def nrd_q(self, x) -> Fraction:
        """Absolute norm N_{F/Q}(nrd(x))."""
        return self.F.norm(self.reduced_norm(x))

    def embed_center(self, f) -> tuple:
        return self.elem(f)

    # places
    @cached_property
    def ramified_real(self) -> list[int]:
        F = self.F
        return [k for k in range(len(F.real_places))
                if F.sign_at(self.a, k) < 0 and F.sign_at(self.b, k) < 0]

    @property
    def is_totally_definite(self) -> bool:
        F = self.F
        return len(F.real_places) == F.degree and len(self.ramified_real) == F.degree

    def norm_form_gram(self, L: ZLattice) -> list[list[Fraction]]:
        """Gram matrix of Tr_{F/Q}(nrd) on the basis of L (positive definite iff totally definite)."""
        vs = L.vectors()
        F = self.F

        def form(x, y):
            return F.trace(self.reduced_trace(self.mul(x, self.conjugate(y)))) / 2
        return [[form(x, y) for y in vs] for x in vs]


# ---------------------------------------------------------------- Hilbert symbols

def _squarefree(q) -> int:
    q = to_fraction(q)
    n = q.numerator * q.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def local_solvable(a, b, p: int) -> bool:
    """Whether a x^2 + b y^2 = z^2 has a nontrivial solution over Q_p, by a search mod p or 8
    for a solution satisfying Hensel's criterion."""
    a, b = _squarefree(a), _squarefree(b)
    if a % p == 0 and b % p == 0:
        a, b = a, _squarefree(Fraction(-a * b, p * p))
    if p == 2:
        mod = 8
        for x, y, z in product(range(mod), repeat=3):
            if x % 2 == 0 and y % 2 == 0 and z % 2 == 0:
                continue
            if (a * x * x + b * y * y - z * z) % mod:
                continue
            if z % 2 or (a * x) % 2 or (b * y) % 2:
                return True
        return False
    for x, y, z in product(range(p), repeat=3):
        if not (x or y or z):
            continue
        if (a * x * x + b * y * y - z * z) % p:
            continue
        if z % p or (a * x) % p or (b * y) % p:
            return True
    return False


def hilbert_symbol(a, b, p: int) -> int:
    """(a, b)_p for a prime p; p = -1 is the real place."""
    if p == -1:
        return -1 if a < 0 and b < 0 else 1
    if p < 2:
        raise ValueError(f"not a place of Q: {p}")
    return 1 if local_solvable(a, b, p) else -1


@dataclass(frozen=True)
class RamificationData:
    finite_ramified: tuple[int, ...]
    infinite_ramified: bool

    def m_p(self, p: int) -> int:
        return 2 if p in self.finite_ramified else 1


def ramified_primes(D: QuatAlgebra) -> RamificationData:
    if D.F.degree != 1:
        raise Unsupported("ramification is computed only over Q")
    a, b = D.a[0], D.b[0]
    sa, sb = _squarefree(a), _squarefree(b)
    primes = set(factorint(2 * abs(sa) * abs(sb)).keys())
    ram = tuple(sorted(p for p in primes if hilbert_symbol(sa, sb, p) == -1))
    return RamificationData(ram, a < 0 and b < 0)


# ---------------------------------------------------------------- orders

def standard_order(D: QuatAlgebra) -> ZLattice:
    """Z-span of the integral-basis multiples of 1, i, j, ij (needs integral a, b)."""
    return ZLattice.standard(D.dim)


def reduced_discriminant(D: QuatAlgebra, O: ZLattice) -> Fraction:
    """sqrt|det(trd(b_i b_j))| for an order over Z in a quaternion algebra over Q."""
    if D.F.degree != 1:
        raise Unsupported("reduced discriminant over Q only")
    vs = O.vectors()
    d = abs(det([[D.reduced_trace(D.mul(x, y))[0] for y in vs] for x in vs]))
    r = isqrt(d.numerator) if d.denominator == 1 else None
    if r is None or r * r != d:
        raise ArithmeticError("discriminant is not a square")
    return Fraction(r)


def maximalize_order(D: QuatAlgebra, O: ZLattice) -> ZLattice:
    if D.F.degree == 1:
        ram = ramified_primes(D)
        target = 1
        for p in ram.finite_ramified:
            target *= p
        M = maximal_order(D.alg, O)
        if reduced_discriminant(D, M) != target:
            raise ArithmeticError("maximal order discriminant mismatch")
        return M
    return maximal_order(D.alg, O)


def one_sided_ideal_ops(D: QuatAlgebra, kind: str, M: ZLattice, N: ZLattice | None = None) -> ZLattice:
    A = D.alg
    if kind == "left_order":
        return left_order(A, M)
    if kind == "right_order":
        return right_order(A, M)
    if kind == "inverse":
        return lat_inverse(A, M)
    if kind == "product":
        return lat_mul(A, M, N)
    if kind == "sum":
        return M + N
    raise ValueError(f"unknown operation {kind!r}")


def left_ideal(D: QuatAlgebra, O: ZLattice, gens: Sequence[Sequence]) -> ZLattice:
    return ZLattice.from_generators([D.mul(o, g) for g in gens for o in O.vectors()], D.dim)


def right_ideal(D: QuatAlgebra, O: ZLattice, gens: Sequence[Sequence]) -> ZLattice:
    return ZLattice.from_generators([D.mul(g, o) for g in gens for o in O.vectors()], D.dim)


def unit_group_definite(D: QuatAlgebra, O: ZLattice) -> list[tuple]:
    """All units of an order in a definite quaternion algebra over Q."""
    if D.F.degree != 1 or not D.is_totally_definite:
        raise Unsupported("unit enumeration needs a definite algebra over Q")
    vs = O.vectors()
    G = D.norm_form_gram(O)
    out = []
    for v in short_vectors(G, 1, exact=True):
        x = tuple(sum((c * b[s] for c, b in zip(v, vs)), Fraction(0)) for s in range(D.dim))
        out.append(x)
        out.append(tuple(-t for t in x))
    out.sort()
    return out


def ideal_reduced_norm(D: QuatAlgebra, O: ZLattice, a: ZLattice) -> Fraction:
    """nr(a) for a lattice a with O-index [O : a] = nr(a)^2 (quaternion over Q)."""
    idx = lattice_index(O, a)
    num, den = isqrt(idx.numerator), isqrt(idx.denominator)
    if num * num != idx.numerator or den * den != idx.denominator:
        raise ArithmeticError("index is not a square")
    return Fraction(num, den)


def pip_quat(D: QuatAlgebra, a: ZLattice, O: ZLattice) -> tuple | None:
    """ξ with a = O ξ for a left O-ideal a, searching elements of norm nr(a)."""
    return pip_quat_certified(D, a, O)[0]


def pip_quat_certified(D: QuatAlgebra, a: ZLattice, O: ZLattice) -> tuple[tuple | None, int]:
    if D.F.degree != 1 or not D.is_totally_definite:
        raise Unsupported("generator search needs a definite algebra over Q")
    n = ideal_reduced_norm(D, O, a)
    vs = a.vectors()
    G = D.norm_form_gram(a)
    checked = 0
    for v in short_vectors(G, n, exact=True):
        checked += 1
        x = tuple(sum((c * b[s] for c, b in zip(v, vs)), Fraction(0)) for s in range(D.dim))
        if left_ideal(D, O, [x]) == a:
            return x, checked
    return None, checked


def hurwitz_order(D: QuatAlgebra) -> ZLattice:
    """ℤ<1, i, j, (1+i+j+ij)/2> in (-1,-1|Q)."""
    h = Fraction(1, 2)
    return ZLattice.from_generators(
        [D.elem(1), D.elem(0, 1), D.elem(0, 0, 1), D.elem(h, h, h, h)], D.dim)


def lipschitz_order(D: QuatAlgebra) -> ZLattice:
    return ZLattice.standard(D.dim)
