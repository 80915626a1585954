from fractions import Fraction

from hypothesis import given, strategies as st

from lattfree.algebra import (
    charpoly, direct_sum, is_order, lat_inverse, lat_mul, left_colon, mat_to_vec,
    matrix_algebra, maximal_order, ring_closure, right_colon, trace_discriminant, vec_to_mat,
)
from lattfree.linalg import ZLattice, det
from lattfree.numberfield import quadratic_field, rationals
from lattfree.quaternion import QuatAlgebra, lipschitz_order, hurwitz_order

coeff = st.integers(-4, 4).map(Fraction)
H = QuatAlgebra(-1, -1, rationals())
M2 = matrix_algebra(rationals().alg, 2)


def elem(A):
    return st.lists(coeff, min_size=A.dim, max_size=A.dim).map(tuple)


@given(elem(H.alg), elem(H.alg), elem(H.alg))
def test_quaternion_product_is_associative(x, y, z):
    A = H.alg
    assert A.mul(A.mul(x, y), z) == A.mul(x, A.mul(y, z))


@given(elem(M2), elem(M2))
def test_matrix_algebra_matches_matrix_product(x, y):
    D = rationals().alg
    a, b = vec_to_mat(D, x, 2), vec_to_mat(D, y, 2)
    prod = [[tuple(sum((a[i][k][0] * b[k][j][0] for k in range(2)), Fraction(0)) for _ in [0])
             for j in range(2)] for i in range(2)]
    assert M2.mul(x, y) == mat_to_vec(D, prod)


@given(elem(H.alg))
def test_inverse_is_two_sided(x):
    A = H.alg
    if not any(x):
        return
    xi = A.inv(x)
    assert A.mul(x, xi) == A.one == A.mul(xi, x)


@given(elem(M2))
def test_cayley_hamilton(x):
    m = M2.left_matrix(x)
    c = charpoly(m)
    n = len(m)
    # sum c_k m^k = 0
    acc = [[Fraction(0)] * n for _ in range(n)]
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    from lattfree.linalg import matmul
    for k in range(n + 1):
        acc = [[a + c[k] * p for a, p in zip(r1, r2)] for r1, r2 in zip(acc, power)]
        power = matmul(power, m)
    assert all(v == 0 for r in acc for v in r)
    assert c[0] == (-1) ** n * det(m)


def test_direct_sum_unit_and_products():
    Q = rationals().alg
    K = quadratic_field(-1).alg
    S = direct_sum([Q, K])
    assert S.dim == 3 and S.one == (1, 1, 0)
    x = (Fraction(2), Fraction(0), Fraction(1))
    assert S.mul(x, x) == (4, -1, 0)
    assert S.is_commutative


def test_colon_ideals_and_inverse():
    A = H.alg
    O = hurwitz_order(H)
    two = O.scale(2)
    assert left_colon(A, two, O) == O.scale(Fraction(1, 2))
    assert right_colon(A, two, O) == O.scale(Fraction(1, 2))
    assert lat_inverse(A, two) == O.scale(Fraction(1, 2))
    assert lat_mul(A, O, O) == O


def test_orders_and_maximalization():
    A = H.alg
    L = lipschitz_order(H)
    O = hurwitz_order(H)
    assert is_order(A, L) and is_order(A, O)
    assert L.is_subset(O)
    big = maximal_order(A, L)
    assert big == O
    # regular trace = 2 * reduced trace; reduced discriminant 2 gives 2^4 * 2^2
    assert abs(trace_discriminant(A, O)) == 64
    assert abs(trace_discriminant(A, L)) == 64 * 4


def test_ring_closure():
    K = quadratic_field(5)
    golden = K.theta  # root of x^2 - x - 1
    R = ring_closure(K.alg, [golden])
    assert R == K.O
    assert ring_closure(K.alg, []) == ZLattice.from_generators([K.alg.one], 2)
