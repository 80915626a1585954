"""Number fields of small degree: elements, fractional ideals, units, CRT and principal ideals.

Elements are coordinate tuples in the chosen integral basis, so the ring of
integers is always the standard lattice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import isqrt
from typing import Sequence

from .algebra import Algebra, lat_mul, left_colon
from .linalg import (
    ZLattice, det, dual_and_intersect, integer_solution, inverse, lattice_index, matvec,
    short_vectors, to_fraction,
)


class Unsupported(Exception):
    """Raised when a computation is outside the supported scope."""


def _poly_mulmod(a: list[Fraction], b: list[Fraction], f: list[int]) -> list[Fraction]:
    n = len(f) - 1
    prod = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] -= c * f[i]
    out = prod[:n] + [Fraction(0)] * max(0, n - len(prod))
    return out[:n]


class NumberField:
    """Q(θ) with θ a root of ``min_poly`` (integer coefficients, constant term first)."""

    def __init__(self, min_poly: Sequence[int], integral_basis: Sequence[Sequence] | None = None,
                 name: str = "", check: bool = True):
        self.min_poly = [int(c) for c in min_poly]
        if self.min_poly[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        self.degree = n = len(self.min_poly) - 1
        if integral_basis is None:
            integral_basis = [[int(i == j) for j in range(n)] for i in range(n)]
        self.integral_basis = [[to_fraction(x) for x in row] for row in integral_basis]
        if self.integral_basis[0] != [Fraction(int(j == 0)) for j in range(n)]:
            raise ValueError("first integral basis element must be 1")
        self.name = name or f"Q[x]/({self.poly_str()})"
        if check:
            self._check()
        self._to_int = inverse([list(r) for r in zip(*self.integral_basis)])
        table = []
        for i in range(n):
            row = []
            for j in range(n):
                pw = _poly_mulmod(self.integral_basis[i], self.integral_basis[j], self.min_poly)
                c = self.from_power(pw)
                row.append([(k, v) for k, v in enumerate(c) if v])
            table.append(row)
        self.alg = Algebra(table, [1] + [0] * (n - 1), self.name)
        self.O = ZLattice.standard(n)
        self.unit_hint: list[tuple] | None = None
        self.torsion_hint: tuple[tuple, int] | None = None

    def poly_str(self) -> str:
        terms = []
        for k in range(len(self.min_poly) - 1, -1, -1):
            c = self.min_poly[k]
            if c:
                terms.append(f"{c}*x^{k}")
        return " + ".join(terms)

    def _check(self):
        import sympy
        x = sympy.Symbol("x")
        P = sympy.Poly(list(reversed(self.min_poly)), x)
        if not P.is_irreducible:
            raise ValueError("minimal polynomial is reducible")
        B = [[to_fraction(v) for v in row] for row in self.integral_basis]
        if det(B) == 0:
            raise ValueError("integral basis is singular")

    def __repr__(self):
        return f"NumberField({self.name})"

    # elements
    def from_power(self, v: Sequence) -> tuple[Fraction, ...]:
        v = list(v) + [0] * (self.degree - len(v))
        return tuple(matvec(self._to_int, [to_fraction(x) for x in v]))

    def to_power(self, x: Sequence) -> list[Fraction]:
        out = [Fraction(0)] * self.degree
        for c, row in zip(x, self.integral_basis):
            if c:
                out = [a + c * b for a, b in zip(out, row)]
        return out

    @cached_property
    def theta(self) -> tuple[Fraction, ...]:
        return self.from_power([0, 1] if self.degree > 1 else [0])

    def elem(self, coords: Sequence) -> tuple[Fraction, ...]:
        return self.alg.elem(coords)

    def rational(self, q) -> tuple[Fraction, ...]:
        return tuple([to_fraction(q)] + [Fraction(0)] * (self.degree - 1))

    def mul(self, x, y):
        return self.alg.mul(x, y)

    def inv(self, x):
        return self.alg.inv(x)

    def norm(self, x) -> Fraction:
        return det(self.alg.left_matrix(x))

    def trace(self, x) -> Fraction:
        return self.alg.trace(x)

    def is_integral(self, x) -> bool:
        return all(to_fraction(c).denominator == 1 for c in x)

    def conj(self, x):
        """The nontrivial automorphism of a quadratic field."""
        if self.degree == 1:
            return tuple(x)
        if self.degree != 2:
            raise Unsupported("conjugation is only defined for quadratic fields")
        t = self.trace(x)
        return tuple(a - b for a, b in zip(self.rational(t), x))

    @cached_property
    def discriminant(self) -> Fraction:
        O = self.O.vectors()
        return det([[self.trace(self.mul(a, b)) for b in O] for a in O])

    @cached_property
    def poly_discriminant(self) -> int:
        import sympy
        x = sympy.Symbol("x")
        return int(sympy.discriminant(sympy.Poly(list(reversed(self.min_poly)), x)))

    @cached_property
    def is_power_basis(self) -> bool:
        n = self.degree
        return all(self.integral_basis[i] == [Fraction(int(i == j)) for j in range(n)]
                   for i in range(n))

    # real places
    @cached_property
    def real_places(self) -> list[tuple[Fraction, Fraction]]:
        import sympy
        x = sympy.Symbol("x")
        P = sympy.Poly(list(reversed(self.min_poly)), x)
        out = []
        for (a, b), _ in P.intervals():
            out.append((Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))))
        return out

    @property
    def is_totally_imaginary(self) -> bool:
        return not self.real_places

    def _minpoly_at(self, t: Fraction) -> Fraction:
        v = Fraction(0)
        for c in reversed(self.min_poly):
            v = v * t + c
        return v

    def sign_at(self, x: Sequence, place: int) -> int:
        """Sign of the real embedding of x at the given place, decided exactly."""
        if not any(x):
            return 0
        g = self.to_power(x)
        a, b = self.real_places[place]
        if a == b:
            v = sum(c * a ** k for k, c in enumerate(g))
            return (v > 0) - (v < 0)
        fa = self._minpoly_at(a)
        for _ in range(400):
            lo, hi = _interval_poly(g, a, b)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            m = (a + b) / 2
            fm = self._minpoly_at(m)
            if fm == 0:
                v = sum(c * m ** k for k, c in enumerate(g))
                return (v > 0) - (v < 0)
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        raise ArithmeticError("sign refinement did not terminate")

    def approx_embedding(self, x: Sequence, place: int, digits: int = 30) -> float:
        a, b = self.real_places[place]
        fa = self._minpoly_at(a)
        while b - a > Fraction(1, 10 ** digits):
            m = (a + b) / 2
            fm = self._minpoly_at(m)
            if fm == 0:
                a = b = m
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        g = self.to_power(x)
        return float(sum(c * a ** k for k, c in enumerate(g)))


def _interval_poly(g: list[Fraction], a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    lo = hi = Fraction(0)
    for c in reversed(g):
        cands = [lo * a, lo * b, hi * a, hi * b]
        lo, hi = min(cands) + c, max(cands) + c
    return lo, hi


RATIONALS = None


def rationals() -> NumberField:
    global RATIONALS
    if RATIONALS is None:
        RATIONALS = NumberField([0, 1], name="Q", check=False)
    return RATIONALS


def quadratic_field(D: int) -> NumberField:
    """Q(sqrt D) for squarefree D != 0, 1 with its ring of integers."""
    if D % 4 == 1:
        # θ = (1 + sqrt D)/2, root of x^2 - x - (D-1)/4
        return NumberField([-(D - 1) // 4, -1, 1], name=f"Q(sqrt({D}))")
    return NumberField([-D, 0, 1], name=f"Q(sqrt({D}))")


# ---------------------------------------------------------------- ideals

def ideal_from_gens(F: NumberField, gens: Sequence[Sequence]) -> ZLattice:
    O = F.O.vectors()
    return ZLattice.from_generators([F.mul(b, g) for g in gens for b in O], F.degree)


def principal_ideal(F: NumberField, x: Sequence) -> ZLattice:
    return ideal_from_gens(F, [x])


def is_ideal(F: NumberField, a: ZLattice) -> bool:
    if not a.is_full:
        return False
    return all(a.contains(F.mul(b, v)) for b in F.O.vectors() for v in a.vectors())


def ideal_norm(F: NumberField, a: ZLattice) -> Fraction:
    return lattice_index(F.O, a)


def ideal_arith(F: NumberField, kind: str, a: ZLattice, b: ZLattice | None = None) -> ZLattice:
    if kind == "sum":
        return a + b
    if kind == "product":
        return lat_mul(F.alg, a, b)
    if kind == "intersect":
        return dual_and_intersect(a, b)
    if kind == "inverse":
        return left_colon(F.alg, a, F.O)
    raise ValueError(f"unknown ideal operation {kind!r}")


def ideal_inverse(F: NumberField, a: ZLattice) -> ZLattice:
    return left_colon(F.alg, a, F.O)


def ideal_contains(a: ZLattice, x) -> bool:
    return a.contains(x)


def bezout(F: NumberField, a: ZLattice, b: ZLattice) -> tuple[tuple, tuple]:
    """x in a, y in b with x + y = 1 (requires a + b = O_F)."""
    sol = integer_solution(a.vectors() + b.vectors(), F.rational(1))
    if sol is None:
        raise ValueError("ideals are not coprime")
    ka = a.rank
    x = tuple(sum((c * v[s] for c, v in zip(sol[:ka], a.vectors())), Fraction(0))
              for s in range(F.degree))
    y = tuple(Fraction(int(s == 0)) - t for s, t in enumerate(x))
    return x, y


def crt_elements(F: NumberField, primes: Sequence[ZLattice]) -> list[tuple]:
    """β_i ≡ 1 mod p_i and β_i ∈ p_j for j != i."""
    out = []
    for i, p in enumerate(primes):
        others = F.O
        for j, q in enumerate(primes):
            if j != i:
                others = lat_mul(F.alg, others, q)
        if others == F.O:
            out.append(F.rational(1))
            continue
        _, beta = bezout(F, p, others)
        out.append(beta)
    return out


def _poly_factor_mod(f: Sequence[int], p: int) -> list[tuple[list[int], int]]:
    import sympy
    x = sympy.Symbol("x")
    P = sympy.Poly(list(reversed(f)), x, modulus=p)
    out = []
    for g, e in P.factor_list()[1]:
        coeffs = [int(c) % p for c in reversed(g.all_coeffs())]
        out.append((coeffs, e))
    return out


@dataclass(frozen=True)
class PrimeIdeal:
    lat: ZLattice
    p: int
    e: int
    f: int


def primes_above(F: NumberField, p: int) -> list[PrimeIdeal]:
    pO = F.O.scale(p)
    if F.degree == 1:
        return [PrimeIdeal(pO, p, 1, 1)]
    index2 = F.poly_discriminant / F.discriminant
    if F.is_power_basis or index2.numerator % p != 0:
        out = []
        for g, e in _poly_factor_mod(F.min_poly, p):
            gth = F.rational(0)
            pw = F.rational(1)
            for c in g:
                gth = tuple(a + c * b for a, b in zip(gth, pw))
                pw = F.mul(pw, F.theta)
            P = pO + principal_ideal(F, gth)
            out.append(PrimeIdeal(P, p, e, len(g) - 1))
        return out
    return _primes_brute(F, p)


def _primes_brute(F: NumberField, p: int) -> list[PrimeIdeal]:
    n = F.degree
    if p ** n > 200000:
        raise Unsupported("prime decomposition out of range")
    pO = F.O.scale(p)
    cands = set()
    for c in product(range(p), repeat=n):
        if not any(c):
            continue
        I = pO + principal_ideal(F, tuple(Fraction(t) for t in c))
        if I != F.O:
            cands.add(I)
    maximal = [I for I in cands if not any(J != I and I.is_subset(J) for J in cands)]
    if not maximal:
        maximal = [pO]
    out = []
    for P in sorted(maximal, key=lambda L: (L.basis, L.den)):
        f = 0
        idx = int(ideal_norm(F, P))
        while idx > 1:
            idx //= p
            f += 1
        e = valuation(F, pO, P)
        out.append(PrimeIdeal(P, p, e, f))
    return out


def valuation(F: NumberField, a: ZLattice, P: ZLattice) -> int:
    """v_P of an integral ideal a."""
    Pinv = ideal_inverse(F, P)
    v = 0
    while a.is_subset(P):
        a = lat_mul(F.alg, a, Pinv)
        v += 1
        if v > 10 ** 4:
            raise ArithmeticError("valuation loop")
    return v


def prime_divisors(F: NumberField, a: ZLattice) -> list[PrimeIdeal]:
    """Prime ideals dividing the integral ideal a."""
    from sympy import factorint
    N = ideal_norm(F, a)
    out = []
    for p in sorted(factorint(int(N)).keys()):
        for P in primes_above(F, p):
            if a.is_subset(P.lat):
                out.append(P)
    return out


# ---------------------------------------------------------------- units

@dataclass
class UnitData:
    torsion_generator: tuple
    torsion_order: int
    fundamental_units: list[tuple]
    totally_positive_generators: list[tuple] = field(default_factory=list)
    index_in_full: int = 1

    @property
    def generators(self) -> list[tuple]:
        return [self.torsion_generator] + list(self.fundamental_units)


def norm_gram(F: NumberField, basis: Sequence[Sequence]) -> list[list[Fraction]]:
    """Gram matrix of a positive definite form on the lattice spanned by basis:
    the norm form for imaginary quadratic fields, Tr(x x̄) in general CM fields of degree <= 2,
    and Tr(x^2) for totally real fields."""
    if F.degree == 1:
        return [[a[0] * b[0] for b in basis] for a in basis]
    if F.degree == 2 and F.is_totally_imaginary:
        def form(x, y):
            return F.trace(F.mul(x, F.conj(y))) / 2
    elif len(F.real_places) == F.degree:
        def form(x, y):
            return F.trace(F.mul(x, y))
    else:
        raise Unsupported("no definite norm form for this field")
    return [[form(a, b) for b in basis] for a in basis]


def _roots_of_unity(F: NumberField) -> tuple[tuple, int]:
    if F.real_places:
        return F.rational(-1), 2
    if F.degree != 2:
        raise Unsupported("torsion units only computed for quadratic fields")
    basis = F.O.vectors()
    G = norm_gram(F, basis)
    units = []
    for v in short_vectors(G, 1):
        x = tuple(sum(c * b[s] for c, b in zip(v, basis)) for s in range(F.degree))
        units.append(x)
        units.append(tuple(-t for t in x))
    best, order = F.rational(-1), 2
    for u in units:
        k, y = 1, u
        while y != F.rational(1):
            y = F.mul(y, u)
            k += 1
        if k > order:
            best, order = u, k
    return best, order


def _real_quadratic_unit(F: NumberField) -> tuple:
    d = F.discriminant
    D = int(d) if int(d) % 4 else int(d) // 4
    sq = isqrt(D)
    if D % 4 == 1:
        P, Qd = 1, 2
    else:
        P, Qd = 0, 1
    # θ in terms of the field generator: ω = (P + sqrt D)/Q, and sqrt D expressed in the basis
    sqrtD = _sqrt_element(F, D)
    omega = tuple((F.rational(Fraction(P, Qd))[s] + sqrtD[s] / Qd) for s in range(2))
    h2, h1 = 0, 1
    k2, k1 = 1, 0
    for _ in range(100000):
        if Qd > 0:
            a = (P + sq) // Qd
        else:
            a = -((P + sq) // (-Qd) + 1)
        h2, h1 = h1, a * h1 + h2
        k2, k1 = k1, a * k1 + k2
        x = tuple(F.rational(h1)[s] - k1 * omega[s] for s in range(2))
        if abs(F.norm(x)) == 1:
            if F.sign_at(x, 0) < 0:
                x = tuple(-t for t in x)
            if F.approx_embedding(x, 0) < 1:
                x = F.inv(x)
            return x
        P = a * Qd - P
        Qd = (D - P * P) // Qd
    raise ArithmeticError("fundamental unit search did not terminate")


def _sqrt_element(F: NumberField, D: int) -> tuple:
    """An element s with s^2 = D and positive at place 0."""
    # s = u + v θ ; solve by trying θ's minimal polynomial x^2 + bx + c: sqrt(b^2 - 4c) = 2θ + b
    c0, b0, _ = F.min_poly
    disc = b0 * b0 - 4 * c0
    s = tuple(F.rational(b0)[i] + 2 * F.theta[i] for i in range(2))
    k = Fraction(disc, D)
    r = isqrt(k.numerator) if k.denominator == 1 else None
    if r is None or r * r != k:
        raise ValueError("discriminant mismatch")
    s = tuple(t / r for t in s)
    if F.sign_at(s, 0) < 0:
        s = tuple(-t for t in s)
    return s


def unit_group(F: NumberField) -> UnitData:
    if F.degree == 1:
        return UnitData(F.rational(-1), 2, [])
    if F.unit_hint is not None:
        if F.torsion_hint is not None:
            tors, order = F.torsion_hint
        elif F.degree == 2 or F.real_places:
            tors, order = _roots_of_unity(F)
        else:
            raise Unsupported("torsion units unavailable")
        return UnitData(tors, order, list(F.unit_hint))
    if F.degree == 2:
        tors, order = _roots_of_unity(F)
        if F.is_totally_imaginary:
            return UnitData(tors, order, [])
        return UnitData(tors, order, [_real_quadratic_unit(F)])
    raise Unsupported(f"unit group of {F.name} is not available")


def totally_positive_units(F: NumberField, ramified_real: Sequence[int]) -> UnitData:
    """Generators of the units positive at every listed real place."""
    ud = unit_group(F)
    gens = ud.generators
    places = list(ramified_real)
    signs = [[int(F.sign_at(g, pl) < 0) for pl in places] for g in gens]
    # kernel of Z^r -> F_2^places, generated by 2 e_i and lifts of the kernel mod 2
    from .algebra import _kernel_mod_p
    r = len(gens)
    ker = _kernel_mod_p([[signs[i][j] for i in range(r)] for j in range(len(places))], r, 2) \
        if places else [[int(i == j) for i in range(r)] for j in range(r)]
    out = []
    for k in ker:
        x = F.rational(1)
        for g, e in zip(gens, k):
            for _ in range(e):
                x = F.mul(x, g)
        out.append(x)
    if places:
        for g in gens:
            out.append(F.mul(g, g))
    out = _dedupe_units(F, out)
    image_rank = r - len(ker)
    ud.totally_positive_generators = out
    ud.index_in_full = 2 ** image_rank
    return ud


def _dedupe_units(F: NumberField, xs: list[tuple]) -> list[tuple]:
    seen = []
    for x in xs:
        if x != F.rational(1) and x not in seen:
            seen.append(x)
    return seen or [F.rational(1)]


# ---------------------------------------------------------------- principal ideals

@dataclass
class PipResult:
    generator: tuple | None
    candidates_checked: int
    norm_bound: Fraction


def pip_nf(F: NumberField, a: ZLattice) -> tuple | None:
    return pip_nf_certified(F, a).generator


def pip_nf_certified(F: NumberField, a: ZLattice) -> PipResult:
    """Search for ξ with ξ O_F = a by enumerating ideal elements of bounded norm."""
    N = ideal_norm(F, a)
    if F.degree == 1:
        v = a.vectors()[0][0]
        return PipResult(F.rational(abs(v)), 1, N)
    if F.degree != 2:
        raise Unsupported("principal ideal test is only live for degree <= 2")
    basis = a.vectors()
    G = norm_gram(F, basis)
    if F.is_totally_imaginary:
        bound = N
    else:
        eps = unit_group(F).fundamental_units[0]
        bound = N * (abs(F.trace(eps)) + 2)
    checked = 0
    for v in short_vectors(G, bound):
        checked += 1
        x = tuple(sum((c * b[s] for c, b in zip(v, basis)), Fraction(0)) for s in range(2))
        if abs(F.norm(x)) == N:
            if principal_ideal(F, x) == a:
                return PipResult(x, checked, bound)
    return PipResult(None, checked, bound)
