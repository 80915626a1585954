from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from lattfree.algebra import is_order, lat_mul
from lattfree.linalg import ZLattice, lattice_index
from lattfree.numberfield import Unsupported, rationals
from lattfree.quaternion import (
    QuatAlgebra, hilbert_symbol, hurwitz_order, left_ideal, lipschitz_order, maximalize_order,
    one_sided_ideal_ops, pip_quat, pip_quat_certified, ramified_primes, reduced_discriminant,
    standard_order, unit_group_definite,
)

Q = rationals()
H = QuatAlgebra(-1, -1, Q)
HO = hurwitz_order(H)
coef = st.integers(-5, 5).map(Fraction)
quat = st.lists(coef, min_size=4, max_size=4).map(tuple)


def test_norm_and_trace_examples():
    one = H.elem(1)
    assert H.nrd_q(one) == 1 and H.reduced_trace(one) == (2,)
    x = H.elem(0, 1, 1, 0)
    assert H.nrd_q(x) == 2 and H.reduced_trace(x) == (0,)


@given(quat, quat)
def test_norm_multiplicative(x, y):
    assert H.nrd_q(H.mul(x, y)) == H.nrd_q(x) * H.nrd_q(y)
    assert H.nrd_q(H.conjugate(x)) == H.nrd_q(x)
    s = tuple(a + b for a, b in zip(x, H.conjugate(x)))
    assert s == (H.reduced_trace(x)[0], 0, 0, 0)
    assert H.mul(x, H.conjugate(x)) == (H.nrd_q(x), 0, 0, 0)


def test_maximalize_examples():
    assert maximalize_order(H, lipschitz_order(H)) == HO
    assert maximalize_order(H, HO) == HO
    assert reduced_discriminant(H, HO) == 2
    O5 = ZLattice.from_generators([H.elem(1), H.elem(0, 5), H.elem(0, 0, 5), H.elem(0, 0, 0, 5)], 4)
    assert is_order(H.alg, O5)
    big = maximalize_order(H, O5)
    assert O5.is_subset(big)
    idx = lattice_index(big, O5)
    assert idx.denominator == 1 and all(p in (2, 5) for p in _primes(idx.numerator))
    assert reduced_discriminant(H, big) == 2


def _primes(n):
    from sympy import factorint
    return list(factorint(n))


@pytest.mark.parametrize("a,b,ram", [(-1, -1, (2,)), (-1, -3, (3,)), (-1, -11, (11,)),
                                     (-2, -5, (5,))])
def test_ramification_and_maximal_discriminant(a, b, ram):
    D = QuatAlgebra(a, b, Q)
    R = ramified_primes(D)
    assert R.finite_ramified == ram and R.infinite_ramified
    assert (len(R.finite_ramified) + 1) % 2 == 0
    O = maximalize_order(D, standard_order(D))
    from math import prod
    assert reduced_discriminant(D, O) == prod(ram)


def test_split_algebra():
    R = ramified_primes(QuatAlgebra(1, 7, Q))
    assert R.finite_ramified == () and not R.infinite_ramified


@given(st.integers(-30, 30).filter(bool), st.integers(-30, 30).filter(bool))
def test_hilbert_reciprocity(a, b):
    from sympy import primefactors
    places = {2} | set(primefactors(a)) | set(primefactors(b))
    total = 1
    for p in places:
        total *= hilbert_symbol(a, b, p)
    total *= hilbert_symbol(a, b, -1)
    assert total == 1


def test_unit_groups_against_box_enumeration():
    assert len(unit_group_definite(H, HO)) == 24
    assert len(unit_group_definite(H, lipschitz_order(H))) == 8
    D = QuatAlgebra(-1, -11, Q)
    O = maximalize_order(D, standard_order(D))
    units = unit_group_definite(D, O)
    vs = O.vectors()
    box = set()
    for c in product(range(-4, 5), repeat=4):
        x = tuple(sum((ci * v[s] for ci, v in zip(c, vs)), Fraction(0)) for s in range(4))
        if D.nrd_q(x) == 1:
            box.add(x)
    assert set(units) == box
    for u in units:
        for v in units:
            assert D.mul(u, v) in box


def test_one_sided_ideal_identities():
    A = H.alg
    assert one_sided_ideal_ops(H, "inverse", HO) == HO
    assert one_sided_ideal_ops(H, "left_order", HO) == HO
    M = ZLattice.from_generators([H.mul(x, o) for x in (H.elem(2), H.elem(1, 1))
                                  for o in HO.vectors()], 4)
    Minv = one_sided_ideal_ops(H, "inverse", M)
    assert lat_mul(A, M, Minv) == one_sided_ideal_ops(H, "left_order", M)
    assert lat_mul(A, Minv, M) == one_sided_ideal_ops(H, "right_order", M)
    assert one_sided_ideal_ops(H, "inverse", Minv) == M
    assert lat_mul(A, M, Minv) == HO


@given(quat.filter(any), st.randoms(use_true_random=False))
def test_pip_round_trip(xi, rng):
    a = left_ideal(H, HO, [xi])
    noise = [H.mul(tuple(Fraction(rng.randint(-2, 2)) for _ in range(4)), xi) for _ in range(4)]
    assert ZLattice.from_generators([H.mul(o, xi) for o in HO.vectors()] + noise, 4) == a
    g = pip_quat(H, a, HO)
    assert g is not None and left_ideal(H, HO, [g]) == a


def test_pip_examples():
    assert left_ideal(H, HO, [pip_quat(H, HO, HO)]) == HO
    two_sided = left_ideal(H, HO, [H.elem(1, 1)])
    g, checked = pip_quat_certified(H, two_sided, HO)
    assert H.nrd_q(g) == 2 and checked >= 1


def test_indefinite_unit_enumeration_unsupported():
    with pytest.raises(Unsupported):
        unit_group_definite(QuatAlgebra(-1, 3, Q), standard_order(QuatAlgebra(-1, 3, Q)))
