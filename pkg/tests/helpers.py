"""Random rings, ideals and pseudo-matrices shared by the test modules."""
from fractions import Fraction
from functools import lru_cache

from lattfree.algebra import lat_inverse, lat_mul
from lattfree.linalg import ZLattice
from lattfree.numberfield import quadratic_field, rationals
from lattfree.pseudo import PseudoMatrix, SkewOrder, field_order
from lattfree.quaternion import QuatAlgebra, hurwitz_order

RING_NAMES = ["Z", "Z[i]", "Z[sqrt-5]", "Hurwitz"]


@lru_cache(maxsize=None)
def ring(name: str) -> SkewOrder:
    if name == "Z":
        return field_order(rationals())
    if name == "Z[i]":
        return field_order(quadratic_field(-1))
    if name == "Z[sqrt-5]":
        return field_order(quadratic_field(-5))
    H = QuatAlgebra(-1, -1, rationals())
    return SkewOrder(H.alg, hurwitz_order(H), H.F, H)


def element(S: SkewOrder, rng, bound: int = 3) -> tuple:
    return tuple(S.O.random_element(rng, bound))


def nonzero_element(S: SkewOrder, rng, bound: int = 3) -> tuple:
    while True:
        x = element(S, rng, bound)
        if any(x):
            return x


def left_ideal(S: SkewOrder, rng, bound: int = 3) -> ZLattice:
    gens = [nonzero_element(S, rng, bound)]
    if S.dim > 1 and rng.random() < 0.7:
        gens.append(element(S, rng, bound))
    return S.left_ideal([g for g in gens if any(g)])


def fractional_left_ideal(S: SkewOrder, rng) -> ZLattice:
    a = left_ideal(S, rng, 2)
    return a.scale(Fraction(1, rng.choice([1, 1, 2, 3])))


def in_quotient(S: SkewOrder, c: ZLattice, a: ZLattice, x) -> bool:
    """x ∈ c⁻¹a."""
    return lat_mul(S.D, lat_inverse(S.D, c), a).contains(x)


def pseudo_matrix(S: SkewOrder, rng, r: int, k: int) -> PseudoMatrix:
    """k random columns in D^r (full rank) with random fractional coefficient ideals."""
    from lattfree.pseudo import module_lattice
    while True:
        cols = [tuple(element(S, rng, 2) for _ in range(r)) for _ in range(k)]
        ideals = [fractional_left_ideal(S, rng) for _ in range(k)]
        P = PseudoMatrix(cols, ideals, r)
        if module_lattice(S.D, list(zip(ideals, cols)), r).rank == r * S.dim:
            return P
