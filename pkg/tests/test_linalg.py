from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lattfree.linalg import (
    ZLattice, complete_to_basis, det, glue_at_prime, hnf_with_transform, integer_solution,
    integral_preimage, inverse, kernel_intersect, dual_and_intersect, lattice_index, matmul,
    nullspace, quad_form, rank, rank_mod_p, short_vectors, solve, xgcd,
)

small = st.integers(-20, 20)


def int_matrix(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd_bezout(a, b):
    g, x, y = xgcd(a, b)
    assert a * x + b * y == g
    assert g >= 0
    if a or b:
        assert a % g == 0 and b % g == 0


@given(st.integers(1, 4).flatmap(lambda m: st.integers(1, 5).flatmap(
    lambda n: int_matrix(m, n))))
def test_hnf_transform_is_unimodular(M):
    H, U = hnf_with_transform(M)
    assert matmul(M, U) == H
    assert abs(det(U)) == 1


@given(int_matrix(3, 3), int_matrix(3, 3))
def test_lattice_equality_is_basis_independent(M, V):
    if det(V) not in (1, -1):
        V = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    gens = [list(c) for c in zip(*M)]
    moved = [list(c) for c in zip(*matmul(M, V))]
    assert ZLattice.from_generators(gens, 3) == ZLattice.from_generators(moved, 3)


@given(int_matrix(3, 3))
def test_lattice_contains_generators(M):
    gens = [[Fraction(x, 2) for x in r] for r in M]
    L = ZLattice.from_generators(gens, 3)
    assert all(L.contains(g) for g in gens)
    for v in L.vectors():
        assert L.int_coords(v) is not None


@given(int_matrix(3, 3), int_matrix(3, 3))
def test_intersection_routes_agree(A, B):
    X = ZLattice.from_generators(A, 3)
    Y = ZLattice.from_generators(B, 3)
    K = kernel_intersect(X, Y)
    assert K.is_subset(X) and K.is_subset(Y)
    if X.is_full and Y.is_full:
        assert dual_and_intersect(X, Y) == K
        # [X : X∩Y] = [X+Y : Y]
        assert lattice_index(X, K) == lattice_index(X + Y, Y)


@given(int_matrix(3, 3))
def test_inverse_and_solve(M):
    if det(M) == 0:
        assert nullspace(M)
        return
    Mi = inverse(M)
    assert matmul(M, Mi) == [[int(i == j) for j in range(3)] for i in range(3)]
    b = [1, 2, 3]
    x = solve(M, b)
    assert [sum(r[j] * x[j] for j in range(3)) for r in M] == b


@given(int_matrix(2, 4))
def test_rank_and_nullspace_dimensions(M):
    assert rank(M) + len(nullspace(M, 4)) == 4


def test_rank_mod_p_examples():
    assert rank_mod_p([[2, 4], [1, 2]], 2) == 1
    assert rank_mod_p([[2, 4], [1, 3]], 2) == 1
    assert rank_mod_p([[1, 0], [0, 3]], 3) == 1
    assert rank_mod_p([[1, 0], [0, 3]], 5) == 2


@given(st.lists(st.integers(-30, 30), min_size=2, max_size=4))
def test_complete_to_basis(u):
    from math import gcd
    from functools import reduce
    g = reduce(gcd, u)
    if g != 1:
        with pytest.raises(ValueError):
            complete_to_basis(u)
        return
    V = complete_to_basis(u)
    assert [row[0] for row in V] == u
    assert abs(det(V)) == 1


def test_short_vectors_identity_form():
    gram = [[1, 0], [0, 1]]
    # sorted by norm, then absolute values, then the vector itself
    assert short_vectors(gram, 1) == [[0, 1], [1, 0]]
    # norm <= 2 adds (1, 1) and (-1, 1)
    assert len(short_vectors(gram, 2)) == 4
    assert short_vectors(gram, 2, exact=True) == [[-1, 1], [1, 1]]


@given(st.integers(1, 5), st.integers(-2, 2), st.integers(1, 5), st.integers(1, 12))
def test_short_vectors_match_brute_force(a, b, c, bound):
    if a * c - b * b <= 0:
        return
    gram = [[a, b], [b, c]]
    found = {tuple(v) for v in short_vectors(gram, bound)}
    brute = set()
    for x in range(-12, 13):
        for y in range(-12, 13):
            if (x, y) != (0, 0) and quad_form(gram, (x, y)) <= bound:
                if (y > 0) or (y == 0 and x > 0):
                    brute.add((x, y))
    assert found == brute


def test_integral_preimage_and_glue():
    # {x : x/2 ∈ Z} = 2Z
    assert integral_preimage([[Fraction(1, 2)]], 1) == ZLattice.from_generators([[2]], 1)
    M = ZLattice.standard(2)
    K = ZLattice.from_generators([[2, 0], [0, 6]], 2)
    G = glue_at_prime(M, K, 2)
    assert G == ZLattice.from_generators([[2, 0], [0, 2]], 2)
    G3 = glue_at_prime(M, K, 3)
    assert G3 == ZLattice.from_generators([[1, 0], [0, 3]], 2)


def test_integer_solution():
    assert integer_solution([[2], [3]], [1]) is not None
    sol = integer_solution([[2, 0], [0, 2]], [1, 0])
    assert sol is None
