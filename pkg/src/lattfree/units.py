"""Images of unit groups of maximal orders in finite quotients.

For a component order Λ (either a maximal order Δ of D, or a nice order in
M_n(D) over a commutative D) and a central ideal g, the RepSet lists the
image of GL_d(Λ) in GL_d(Λ/gΛ), one lift per image element.  The image is
found as the closure of the images of an explicit generating set.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import sympy
from sympy import factorint

from .algebra import Algebra, mat_to_vec, matrix_algebra, structure_constants, vec_to_mat
from .linalg import ZLattice, integral_preimage, inverse, matmul, nullspace, short_vectors
from .nice import NiceConjugation, mat_mul
from .numberfield import (
    NumberField, Unsupported, bezout, crt_elements, prime_divisors, primes_above,
    principal_ideal, totally_positive_units,
)
from .pseudo import SkewOrder, element, ext_euclid_pair, roiter_map, smallest_integer
from .quaternion import ramified_primes, unit_group_definite

CLOSURE_CAP = 1 << 20


class ClosureTooLarge(Exception):
    def __init__(self, size: int, cap: int):
        super().__init__(f"image group exceeds {cap} elements (reached {size})")
        self.size = size
        self.cap = cap


def center_embed(S: SkewOrder, f: Sequence) -> tuple:
    if S.quat is not None:
        return S.quat.embed_center(f)
    return tuple(Fraction(c) for c in f)


def center_ideal(S: SkewOrder, g) -> ZLattice:
    """A center ideal given as a positive integer or as a lattice of O_F."""
    if isinstance(g, int):
        return S.F.O.scale(g)
    return g


# ---------------------------------------------------------------- finite rings

class ResidueRing:
    """Δ/gΔ with elements stored as reduced integer coordinates in a basis of Δ."""

    def __init__(self, S: SkewOrder, g):
        self.S = S
        self.g = center_ideal(S, g)
        D = S.D
        self.basis = S.O.vectors()
        gD = ZLattice.from_generators(
            [D.mul(center_embed(S, x), o) for x in self.g.vectors() for o in self.basis], D.dim)
        self.ideal = gD
        coords = [S.O.int_coords(v) for v in gD.vectors()]
        self.sub = ZLattice.from_generators(coords, len(self.basis))
        self.dim = len(self.basis)
        self.pivots = {max(i for i, x in enumerate(c) if x): c for c in self.sub.basis}
        self.size = 1
        for i, c in self.pivots.items():
            self.size *= c[i]
        self.table = structure_constants(D, S.O)
        self.zero = (0,) * self.dim
        self.one = self.reduce(S.O.int_coords(D.one))
        self._mul = lru_cache(maxsize=1 << 20)(self._mul_raw)

    def reduce(self, v: Sequence[int]) -> tuple:
        v = list(v)
        for i in range(self.dim - 1, -1, -1):
            c = self.pivots[i]
            q = v[i] // c[i]
            if q:
                v = [a - q * b for a, b in zip(v, c)]
        return tuple(v)

    def residue(self, x: Sequence) -> tuple:
        c = self.S.O.int_coords(x)
        if c is None:
            raise ValueError("element is not in the order")
        return self.reduce(c)

    def lift(self, r: Sequence[int]) -> tuple:
        return element(self.S.O, r)

    def add(self, x, y):
        return self.reduce([a + b for a, b in zip(x, y)])

    def sub_(self, x, y):
        return self.reduce([a - b for a, b in zip(x, y)])

    def neg(self, x):
        return self.reduce([-a for a in x])

    def mul(self, x, y):
        return self._mul(x, y)

    def _mul_raw(self, x, y):
        out = [0] * self.dim
        for i, a in enumerate(x):
            if a:
                row = self.table[i]
                for j, b in enumerate(y):
                    if b:
                        ab = a * b
                        for k, c in enumerate(row[j]):
                            if c:
                                out[k] += ab * c
        return self.reduce(out)

    def spanning_set(self) -> list[tuple]:
        """Residues of a Z-basis of Δ."""
        out = []
        for i in range(self.dim):
            r = self.reduce([int(i == j) for j in range(self.dim)])
            if r != self.zero and r not in out:
                out.append(r)
        return out

    def elements(self):
        from itertools import product
        boxes = [range(self.pivots[i][i]) for i in range(self.dim)]
        for c in product(*boxes):
            yield tuple(c)


# matrices over a residue ring: tuples of k*k residues, row-major

def rmat_mul(R: ResidueRing, a, b, k: int):
    out = []
    for i in range(k):
        for j in range(k):
            s = R.zero
            for t in range(k):
                x, y = a[i * k + t], b[t * k + j]
                if x != R.zero and y != R.zero:
                    s = R.add(s, R.mul(x, y))
            out.append(s)
    return tuple(out)


def rmat_identity(R: ResidueRing, k: int):
    return tuple(R.one if i == j else R.zero for i in range(k) for j in range(k))


def rmat_from(R: ResidueRing, m: Sequence[Sequence]) -> tuple:
    return tuple(R.residue(x) for row in m for x in row)


# ---------------------------------------------------------------- matrices over D

def dmat_identity(D: Algebra, k: int):
    z, one = D.zero(), tuple(D.one)
    return [[one if i == j else z for j in range(k)] for i in range(k)]


def elementary(D: Algebra, k: int, i: int, j: int, b) -> list[list[tuple]]:
    m = dmat_identity(D, k)
    m[i][j] = tuple(b)
    return m


def diag_first(D: Algebra, k: int, v) -> list[list[tuple]]:
    m = dmat_identity(D, k)
    m[0][0] = tuple(v)
    return m


def embed_block(D: Algebra, k: int, m: Sequence[Sequence]) -> list[list[tuple]]:
    out = dmat_identity(D, k)
    for i in range(len(m)):
        for j in range(len(m)):
            out[i][j] = tuple(m[i][j])
    return out


def dmat_in_order(S: SkewOrder, m) -> bool:
    return all(S.O.contains(x) for row in m for x in row)


# ---------------------------------------------------------------- closure

@dataclass
class RepSet:
    """The image of a matrix group in GL_k(Δ/gΔ), discovered breadth-first.

    ``images[i]`` is reached from ``images[parent[i][0]]`` by right
    multiplication with generator ``parent[i][1]``.  ``gens`` holds genuine
    lifts (matrix, inverse) over Δ, or None when only images are known.
    """
    ring: ResidueRing
    k: int
    images: list[tuple]
    parent: list[tuple[int, int]]
    gens: list[tuple] | None
    method: str = ""
    _lifts: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.images)

    def image_set(self) -> set:
        return set(self.images)

    def residue_lift(self, idx: int) -> list[list[tuple]]:
        """The canonical lift of the residues (not necessarily invertible)."""
        R, k = self.ring, self.k
        im = self.images[idx]
        return [[R.lift(im[i * k + j]) for j in range(k)] for i in range(k)]

    def lift(self, idx: int) -> tuple[list[list[tuple]], list[list[tuple]]]:
        """A matrix over Δ with image images[idx] together with its inverse."""
        if self.gens is None:
            raise Unsupported("this representative set carries images only")
        D = self.ring.S.D
        if idx == 0:
            one = dmat_identity(D, self.k)
            return one, one
        if idx not in self._lifts:
            chain = []
            j = idx
            while j != 0:
                chain.append(self.parent[j][1])
                j = self.parent[j][0]
            m = dmat_identity(D, self.k)
            mi = dmat_identity(D, self.k)
            for g in reversed(chain):
                m = mat_mul(D, m, self.gens[g][0])
                mi = mat_mul(D, self.gens[g][1], mi)
            self._lifts[idx] = (m, mi)
        return self._lifts[idx]


TABLE_LIMIT = 1024


def _tables(R: ResidueRing):
    """Addition and multiplication tables on element indices (small rings only)."""
    elems = list(R.elements())
    pos = {e: i for i, e in enumerate(elems)}
    add = [pos[R.add(a, b)] for a in elems for b in elems]
    mul = [pos[R.mul(a, b)] for a in elems for b in elems]
    return elems, pos, add, mul


def _indexed_mul(k: int, N: int, add, mul, zero: int):
    rng = range(k)

    def prod(a, b):
        out = []
        for i in rng:
            row = a[i * k:(i + 1) * k]
            for j in rng:
                s = zero
                for t in rng:
                    x = row[t]
                    if x != zero:
                        y = b[t * k + j]
                        if y != zero:
                            s = add[s * N + mul[x * N + y]]
                out.append(s)
        return tuple(out)
    return prod


def closure(R: ResidueRing, k: int, gen_images: Sequence[tuple], cap: int = CLOSURE_CAP):
    """Breadth-first closure of the generated subgroup of GL_k(R)."""
    if R.size <= TABLE_LIMIT:
        elems, pos, add, mul = _tables(R)
        prod = _indexed_mul(k, len(elems), add, mul, pos[R.zero])
        start = tuple(pos[x] for x in rmat_identity(R, k))
        gens = [tuple(pos[x] for x in g) for g in gen_images]
        decode = lambda m: tuple(elems[x] for x in m)
    else:
        prod = lambda a, b: rmat_mul(R, a, b, k)
        start = rmat_identity(R, k)
        gens = list(gen_images)
        decode = None
    images = [start]
    parent = [(0, -1)]
    index = {start: 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        x = images[i]
        for g, gi in enumerate(gens):
            y = prod(x, gi)
            if y not in index:
                if len(images) >= cap:
                    raise ClosureTooLarge(len(images), cap)
                index[y] = len(images)
                images.append(y)
                parent.append((i, g))
                queue.append(len(images) - 1)
    if decode is not None:
        images = [decode(m) for m in images]
    return images, parent


def _repset(R: ResidueRing, k: int, gens: list[tuple], method: str, cap: int) -> RepSet:
    gen_images = []
    kept = []
    for m, mi in gens:
        im = rmat_from(R, m)
        if im != rmat_identity(R, k) and im not in gen_images:
            gen_images.append(im)
            kept.append((m, mi))
    images, parent = closure(R, k, gen_images, cap)
    return RepSet(R, k, images, parent, kept, method)


# ---------------------------------------------------------------- generators

def elementary_generators(R: ResidueRing, k: int) -> list[tuple]:
    """E_ij(b) over a Z-spanning set of Δ/gΔ, as (matrix, inverse) lifts over Δ."""
    if k < 2:
        raise ValueError("elementary matrices need k >= 2")
    D = R.S.D
    out = []
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            for b in R.spanning_set():
                x = R.lift(b)
                out.append((elementary(D, k, i, j, x),
                            elementary(D, k, i, j, Algebra.scale(x, -1))))
    return out


def norm_representatives(S: SkewOrder) -> list[tuple]:
    """Units of Δ whose reduced norms generate the totally positive units (at ramified places)."""
    if S.quat is None:
        ud = totally_positive_units(S.F, [])
        return [tuple(u) for u in ud.generators if tuple(u) != S.F.rational(1)]
    if S.F.degree == 1 and S.quat.is_totally_definite:
        return []       # only 1 is a totally positive unit of Z, with preimage 1
    raise Unsupported("reduced norm representatives unavailable for this skew field")


def unit_generators(S: SkewOrder) -> list[tuple]:
    """Generators of Δ^× when they can be computed."""
    if S.quat is None:
        from .numberfield import unit_group
        return [tuple(u) for u in unit_group(S.F).generators]
    if S.F.degree == 1 and S.quat.is_totally_definite:
        return unit_group_definite(S.quat, S.O)
    raise Unsupported("unit generators unavailable for this skew field")


# ---------------------------------------------------------------- reduced norm over M_2(D)

def reduced_norm_matrix(S: SkewOrder, m: Sequence[Sequence]) -> Fraction:
    """nr of a k x k matrix over a quaternion algebra over Q, from the regular representation.

    The characteristic polynomial of left multiplication on M_k(D) is a power
    of the reduced characteristic polynomial, whose constant term is the norm.
    """
    D = S.D
    k = len(m)
    A = matrix_algebra(D, k)
    x = mat_to_vec(D, m)
    from .algebra import charpoly
    cp = charpoly(A.left_matrix(x))
    X = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(cp)], X)
    deg = 2 * k
    power = A.dim // deg
    _, factors = sympy.factor_list(poly)
    red = sympy.Poly(1, X)
    for f, e in factors:
        if e % power:
            raise ArithmeticError("characteristic polynomial is not a perfect power")
        red = red * f ** (e // power)
    red = red.monic()
    if red.degree() != deg:
        raise ArithmeticError("reduced characteristic polynomial has the wrong degree")
    c0 = red.all_coeffs()[-1]
    return Fraction(int(c0.p), int(c0.q)) * (1 if deg % 2 == 0 else -1)


# ---------------------------------------------------------------- SK1

@dataclass
class SK1Generator:
    prime: int
    w: tuple                 # generator of the quadratic subfield W inside D
    min_poly: tuple[int, int]  # (t, n): w^2 - t w + n = 0
    alpha: tuple
    rho: tuple
    omega: tuple
    eta_i: tuple
    beta: tuple
    eta: tuple
    S: list[list[tuple]]
    T: list[list[tuple]]
    matrix: list[list[tuple]]        # S⁻¹T
    inverse: list[list[tuple]]       # T⁻¹S
    group_order: int
    field: NumberField | None = None   # W, power basis 1, w
    omega_w: tuple | None = None       # ω in W coordinates
    prime_ideal: ZLattice | None = None  # pO_W


@dataclass
class SK1Data:
    generators: list[SK1Generator]

    @property
    def group_order(self) -> int:
        out = 1
        for g in self.generators:
            out *= g.group_order
        return out


def _fundamental(disc: int) -> bool:
    if disc % 4 == 1 or (disc % 4 + 4) % 4 == 1:
        return all(e == 1 for e in factorint(abs(disc)).values())
    if disc % 4 == 0:
        m = disc // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorint(abs(m)).values())
    return False


def _find_w(S: SkewOrder, ram: Sequence[int], bound: int = 40):
    """An element w of Δ generating an imaginary quadratic field inert at every ramified prime,
    with Z[w] the full ring of integers of Q(w)."""
    Q = S.quat
    D = S.D
    vs = S.O.vectors()
    gram = Q.norm_form_gram(S.O)
    cands = []
    for v in short_vectors(gram, bound):
        x = tuple(sum((c * b[s] for c, b in zip(v, vs)), Fraction(0)) for s in range(D.dim))
        t = Q.reduced_trace(x)[0]
        n = Q.reduced_norm(x)[0]
        if any(x[1:]) and t.denominator == 1 and n.denominator == 1:
            cands.append((n, t, list(v), x))
    cands.sort(key=lambda c: (c[0], abs(c[1]), c[1], c[2]))
    for n, t, _, x in cands:
        t, n = int(t), int(n)
        disc = t * t - 4 * n
        if disc >= 0 or not _fundamental(disc):
            continue
        X = sympy.Symbol("x")
        if all(sympy.Poly(X ** 2 - t * X + n, X, modulus=p).is_irreducible for p in ram):
            return x, t, n
    raise Unsupported("no inert quadratic subfield found within the search bound")


def sk1_generators(S: SkewOrder) -> SK1Data:
    """Generators S⁻¹T of SK1(Δ), one per finite ramified prime, for definite Δ over Q."""
    Q = S.quat
    if Q is None or Q.F.degree != 1 or not Q.is_totally_definite:
        raise Unsupported("SK1 generators are computed for definite quaternion orders over Q")
    D = S.D
    ram = list(ramified_primes(Q).finite_ramified)
    w, t, n = _find_w(S, ram)
    W = NumberField([n, -t, 1], name=f"Q(w), w^2 {'-' if t >= 0 else '+'} {abs(t)}w + {n}")

    def to_D(a):                      # W (power basis) -> D
        return Algebra.add(Algebra.scale(D.one, a[0]), Algebra.scale(w, a[1]))

    def sigma(a):
        return (a[0] + t * a[1], -a[1])

    # α with α w = w^σ α, i.e. (L_w^σ - R_w) α = 0 on the coordinates of α
    wsig = to_D(sigma((Fraction(0), Fraction(1))))
    Lm = D.left_matrix(wsig)
    Rm = D.right_matrix(w)
    sys = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(Lm, Rm)]
    ker = nullspace(sys, D.dim)
    if not ker:
        raise ArithmeticError("no conjugating element found")
    alpha = tuple(ker[0])
    alpha = Algebra.scale(alpha, _clear(S.O, alpha))
    if D.mul(alpha, w) != D.mul(wsig, alpha):
        raise ArithmeticError("conjugating element fails its defining relation")
    gens = []
    for p in ram:
        gens.append(_sk1_at(S, W, to_D, sigma, alpha, p, w, t, n))
    return SK1Data(gens)


def _clear(O: ZLattice, x) -> int:
    from math import lcm
    return lcm(*(c.denominator for c in O.coords(x)))


def _sk1_at(S, W, to_D, sigma, alpha, p, w, t, n) -> SK1Generator:
    D = S.D
    # ρ: a norm-minimal nonzero element of αΔ ∩ W
    aD = S.lmul(alpha, S.O)
    Binv = inverse(aD.matrix())
    emb = [list(D.one), list(w)]
    rows = matmul(Binv, [list(r) for r in zip(*emb)])
    Lw = integral_preimage(rows, 2)
    gram_w = [[W.trace(W.mul(W.elem(x), W.conj(W.elem(y)))) / 2 for y in Lw.vectors()]
              for x in Lw.vectors()]
    best = None
    for v in short_vectors(gram_w, max(gram_w[0][0], gram_w[1][1])):
        x = element(Lw, v)
        nx = W.norm(x)
        key = (nx, list(v))
        if any(x) and (best is None or key < best[0]):
            best = (key, x)
    rho = tuple(best[1])
    # primitive root of O_W / P, P = pO_W (p inert)
    P = primes_above(W, p)
    if len(P) != 1 or P[0].f != 2:
        raise ArithmeticError("prime is not inert in W")
    Plat = P[0].lat
    q2 = p * p
    xi = _primitive_root(W, Plat, p, q2 - 1)
    # η_i ≡ ξ^σ mod P and ≡ 1 mod the other primes dividing ρ
    others = [Q.lat for Q in prime_divisors(W, principal_ideal(W, rho)) if Q.lat != Plat]
    primes = [Plat] + others
    cs = crt_elements(W, primes)
    eta_i = W.mul(cs[0], sigma(xi))
    for c in cs[1:]:
        eta_i = tuple(a + b for a, b in zip(eta_i, c))
    omega = sigma(eta_i)            # σ has order 2
    # β ω^σ - η ρ = 1
    x, y = bezout(W, principal_ideal(W, eta_i), principal_ideal(W, rho))
    beta = W.mul(x, W.inv(eta_i))
    eta = tuple(-c for c in W.mul(y, W.inv(rho)))
    ainv = D.inv(alpha)
    Sm = [[to_D(omega), D.mul(ainv, to_D(rho))], [D.mul(to_D(eta), alpha), to_D(beta)]]
    Tm = [[to_D(sigma(omega)), to_D(rho)], [to_D(eta), to_D(beta)]]
    if not dmat_in_order(S, Sm) or not dmat_in_order(S, Tm):
        raise ArithmeticError("S or T has entries outside the order")
    Sinv = quat_mat_inverse(D, Sm)
    Tinv = quat_mat_inverse(D, Tm)
    g = mat_mul(D, Sinv, Tm)
    gi = mat_mul(D, Tinv, Sm)
    if not dmat_in_order(S, g) or not dmat_in_order(S, gi):
        raise ArithmeticError("S⁻¹T is not invertible over the order")
    if mat_mul(D, g, gi) != dmat_identity(D, 2):
        raise ArithmeticError("inverse check failed")
    if reduced_norm_matrix(S, g) != 1:
        raise ArithmeticError("S⁻¹T does not have reduced norm 1")
    return SK1Generator(p, w, (t, n), alpha, to_D(rho), to_D(omega), to_D(eta_i), to_D(beta),
                        to_D(eta), Sm, Tm, g, gi, (q2 - 1) // (p - 1), W, omega, Plat)


def _primitive_root(W: NumberField, P: ZLattice, p: int, order: int) -> tuple:
    """The first residue (in a fixed enumeration) of multiplicative order ``order`` mod P."""
    from itertools import product
    fs = factorint(order)
    for c in product(range(p), repeat=W.degree):
        x = tuple(Fraction(v) for v in c)
        if not any(x) or P.contains(x):
            continue
        if all(not P.contains(tuple(a - b for a, b in zip(_pow(W, x, order // q), W.rational(1))))
               for q in fs):
            if P.contains(tuple(a - b for a, b in zip(_pow(W, x, order), W.rational(1)))):
                return x
    raise ArithmeticError("no primitive root found")


def _pow(W: NumberField, x, e: int):
    out = W.rational(1)
    while e:
        if e & 1:
            out = W.mul(out, x)
        x = W.mul(x, x)
        e >>= 1
    return out


def quat_mat_inverse(D: Algebra, m):
    """Inverse of a matrix over a skew field by Gauss-Jordan with left pivots."""
    n = len(m)
    zero, one = D.zero(), tuple(D.one)
    a = [list(m[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != zero), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = D.inv(a[c][c])
        a[c] = [D.mul(inv, x) for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != zero:
                f = a[r][c]
                a[r] = [Algebra.sub(x, D.mul(f, y)) for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


# ---------------------------------------------------------------- representative sets over Δ

def unit_representatives(S: SkewOrder, g, k: int, method: str = "generators",
                         cap: int = CLOSURE_CAP) -> RepSet:
    """The image of GL_k(Δ) in GL_k(Δ/gΔ).

    For k = 1 the default closes up images of unit generators; method="ktheory"
    instead extracts diag(a, 1) from the closure in GL_2 (images only).
    """
    R = ResidueRing(S, g)
    D = S.D
    if k == 1:
        if method == "generators":
            gens = [([[u]], [[D.inv(u)]]) for u in unit_generators(S)]
            return _repset(R, 1, gens, "generators", cap)
        if method == "ktheory":
            return _ktheory_units(S, R, cap)
        raise ValueError(f"unknown method {method!r}")
    gens = elementary_generators(R, k)
    for v in norm_representatives(S):
        gens.append((diag_first(D, k, v), diag_first(D, k, D.inv(v))))
    if S.quat is not None:
        for gen in sk1_generators(S).generators:
            gens.append((embed_block(D, k, gen.matrix), embed_block(D, k, gen.inverse)))
    return _repset(R, k, gens, "elementary", cap)


def _ktheory_units(S: SkewOrder, R: ResidueRing, cap: int) -> RepSet:
    gens = elementary_generators(R, 2)
    if S.quat is not None:
        for gen in sk1_generators(S).generators:
            gens.append((gen.matrix, gen.inverse))
    big = _repset(R, 2, gens, "ktheory-gl2", cap)
    vprime = []
    for im in big.images:
        if im[1] == R.zero and im[2] == R.zero and im[3] == R.one:
            vprime.append((im[0],))
    gen_images = [(R.residue(v),) for v in norm_representatives(S)] + vprime
    gen_images = [x for x in dict.fromkeys(gen_images) if x != (R.one,)]
    images, parent = closure(R, 1, gen_images, cap)
    return RepSet(R, 1, images, parent, None, "ktheory")


# ---------------------------------------------------------------- reduction for nice orders

@dataclass
class ReductionData:
    xi: tuple
    b_ideal: ZLattice
    b_elem: tuple
    y_elem: tuple
    Phi1: list[list[tuple]]
    Phi2: list[list[tuple]]
    n: int
    d: int

    @property
    def k(self) -> int:
        return self.n * self.d


def reduction_step(S: SkewOrder, conj_a: ZLattice, g, n: int, d: int, seed: int = 0) -> ReductionData:
    """ξ, b with a = ξb and b + gΔ = Δ; b + y = 1; the diagonal twists Φ1, Φ2."""
    D = S.D
    g_lat = center_ideal(S, g)
    g0 = smallest_integer(g_lat, S.F.rational(1))
    gD = ResidueRing(S, g).ideal
    try:
        gen = S.pip(conj_a) if S.commutative else None
    except Unsupported:
        gen = None
    if gen is not None:
        # a principal: a = ξΔ, so b = Δ and the Euclid pair is (1, 0)
        xi, b_ideal = tuple(gen), S.O
        b_elem, y_elem = tuple(D.one), D.zero()
    else:
        rm = roiter_map(S, conj_a, S.O, g0, seed=seed, side="right")
        xi = D.inv(rm.xi)
        b_ideal = rm.image
        if b_ideal + gD != S.O:
            raise ArithmeticError("b + gΔ is not Δ")
        b_elem, y_elem = ext_euclid_pair(S, b_ideal, gD, S.O)
    Phi1 = dmat_identity(D, n)
    Phi2 = dmat_identity(D, n)
    Phi1[n - 1][n - 1] = D.inv(xi)
    Phi2[n - 1][n - 1] = D.mul(xi, b_elem)
    return ReductionData(xi, b_ideal, b_elem, y_elem, Phi1, Phi2, n, d)


def f1_blocks(D: Algebra, red: ReductionData, A: Sequence[Sequence]) -> list[list[list[list[tuple]]]]:
    """(Φ2 A_ij Φ1) for a dn x dn matrix A: a d x d array of n x n blocks."""
    n, d = red.n, red.d
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            blk = [[A[i * n + a][j * n + b] for b in range(n)] for a in range(n)]
            row.append(mat_mul(D, mat_mul(D, red.Phi2, blk), red.Phi1))
        out.append(row)
    return out


def f2_matrix(D: Algebra, red: ReductionData, B) -> list[list[tuple]]:
    """(Φ1 B_ij Φ2) assembled into a dn x dn matrix."""
    n, d = red.n, red.d
    out = [[None] * (n * d) for _ in range(n * d)]
    for i in range(d):
        for j in range(d):
            blk = mat_mul(D, mat_mul(D, red.Phi1, B[i][j]), red.Phi2)
            for a in range(n):
                for b in range(n):
                    out[i * n + a][j * n + b] = blk[a][b]
    return out


def check_reduction(S: SkewOrder, red: ReductionData, g, nice_lattice: ZLattice,
                    gens: Sequence[tuple]) -> None:
    """f1 lands in the nice order and f1, f2 are mutually inverse mod g on the generators."""
    D = S.D
    n = red.n
    gD = ResidueRing(S, g).ideal
    gL = ZLattice.from_generators(
        [mat_to_vec(D, mat_mul(D, [[center_embed(S, c) if i == j else D.zero() for j in range(n)]
                                   for i in range(n)], vec_to_mat(D, v, n)))
         for c in center_ideal(S, g).vectors() for v in nice_lattice.vectors()],
        nice_lattice.dim)
    for m, _ in gens:
        blocks = f1_blocks(D, red, m)
        if not all(nice_lattice.contains(mat_to_vec(D, b)) for row in blocks for b in row):
            raise ArithmeticError("f1 leaves the nice order")
        back = f2_matrix(D, red, blocks)
        if not all(gD.contains(Algebra.sub(x, y)) for rx, ry in zip(back, m) for x, y in zip(rx, ry)):
            raise ArithmeticError("f2 o f1 is not the identity mod g")
        again = f1_blocks(D, red, back)
        for ra, rb in zip(again, blocks):
            for a, b in zip(ra, rb):
                if not gL.contains(Algebra.sub(mat_to_vec(D, a), mat_to_vec(D, b))):
                    raise ArithmeticError("f1 o f2 is not the identity mod g")


@dataclass
class ComponentRepSet:
    """Representatives of GL_d(Λ) -> GL_d(Λ/gΛ) for a component order Λ, in the component's
    original coordinates: each entry of a d x d matrix is an element of M_n(D) (or of D)."""
    base: RepSet
    n: int
    d: int
    to_component: Callable
    lift_component: Callable | None

    def __len__(self):
        return len(self.base)

    def residue_matrix(self, idx: int):
        return self.to_component(self.base.residue_lift(idx))

    def lift(self, idx: int):
        if self.lift_component is None:
            raise Unsupported("no genuine lifts")
        return self.lift_component(idx)


def component_representatives(S: SkewOrder, n: int, d: int, g, conj: NiceConjugation | None,
                              seed: int = 0, cap: int = CLOSURE_CAP,
                              method: str = "generators") -> ComponentRepSet:
    D = S.D
    if n == 1:
        rs = unit_representatives(S, g, d, method=method, cap=cap)

        def to_comp(m):
            return [[tuple(x) for x in row] for row in m]
        lift = (lambda idx: rs.lift(idx)) if rs.gens is not None else None
        return ComponentRepSet(rs, 1, d, to_comp, lift)
    if conj is None:
        raise ValueError("a nice conjugation is required for n >= 2")
    red = reduction_step(S, conj.nice.a_ideal, g, n, d, seed=seed)
    rs = unit_representatives(S, g, n * d, cap=cap)
    check_reduction(S, red, g, conj.nice.lattice, rs.gens)
    Sm, Sinv = conj.S, conj.Sinv

    def to_comp(A):
        blocks = f1_blocks(D, red, A)
        return [[mat_to_vec(D, mat_mul(D, mat_mul(D, Sm, b), Sinv)) for b in row] for row in blocks]

    # genuine lifts: products of I + f1(g - I) over the generator chain
    k = n * d
    ident_k = dmat_identity(D, k)
    zero_n = [[D.zero()] * n for _ in range(n)]
    ident_n = dmat_identity(D, n)

    def gen_lift(m):
        diff = [[Algebra.sub(m[i][j], ident_k[i][j]) for j in range(k)] for i in range(k)]
        blocks = f1_blocks(D, red, diff)
        return [[_madd(D, blocks[i][j], ident_n if i == j else zero_n) for j in range(d)]
                for i in range(d)]

    glifts = [(gen_lift(m), gen_lift(mi)) for m, mi in rs.gens]
    cache: dict[int, tuple] = {}

    def lift(idx):
        if idx in cache:
            return cache[idx]
        chain = []
        j = idx
        while j != 0:
            chain.append(rs.parent[j][1])
            j = rs.parent[j][0]
        m = _bid(D, n, d)
        mi = _bid(D, n, d)
        for gi in reversed(chain):
            m = _bmul(D, m, glifts[gi][0])
            mi = _bmul(D, glifts[gi][1], mi)
        conj_m = [[mat_to_vec(D, mat_mul(D, mat_mul(D, Sm, b), Sinv)) for b in row] for row in m]
        conj_mi = [[mat_to_vec(D, mat_mul(D, mat_mul(D, Sm, b), Sinv)) for b in row] for row in mi]
        cache[idx] = (conj_m, conj_mi)
        return cache[idx]

    return ComponentRepSet(rs, n, d, to_comp, lift)


def _madd(D, a, b):
    return [[Algebra.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _bid(D, n, d):
    z = [[D.zero()] * n for _ in range(n)]
    return [[dmat_identity(D, n) if i == j else z for j in range(d)] for i in range(d)]


def _bmul(D, a, b):
    d = len(a)
    n = len(a[0][0])
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            s = [[D.zero()] * n for _ in range(n)]
            for t in range(d):
                s = _madd(D, s, mat_mul(D, a[i][t], b[t][j]))
            row.append(s)
        out.append(row)
    return out
