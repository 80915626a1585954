import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import ring
from lattfree.algebra import Algebra
from lattfree.nice import build_nice, component_order, conjugate_to_nice, mat_mul
from lattfree.numberfield import ideal_from_gens
from lattfree.quaternion import unit_group_definite
from lattfree.serialize import quaternion_order
from lattfree.units import (
    ClosureTooLarge, ResidueRing, check_reduction, closure, component_representatives,
    dmat_identity, elementary_generators, reduced_norm_matrix, reduction_step, rmat_from,
    rmat_identity, rmat_mul, sk1_generators, unit_representatives,
)
from lattfree.wedderburn import load

Z = ring("Z")
Zi = ring("Z[i]")
K5 = ring("Z[sqrt-5]")


def test_residue_ring_sizes(hurwitz):
    assert ResidueRing(Z, 6).size == 6
    assert ResidueRing(Zi, 3).size == 9
    assert ResidueRing(hurwitz, 2).size == 16
    assert len(list(ResidueRing(hurwitz, 2).elements())) == 16


@given(st.integers(0, 10**6))
@settings(max_examples=25)
def test_residue_map_is_a_ring_homomorphism(seed):
    S = ring("Hurwitz")
    R = ResidueRing(S, 3)
    rng = random.Random(seed)
    x, y = S.O.random_element(rng, 5), S.O.random_element(rng, 5)
    assert R.residue(S.D.mul(x, y)) == R.mul(R.residue(x), R.residue(y))
    assert R.residue(Algebra.add(x, y)) == R.add(R.residue(x), R.residue(y))
    assert R.residue(R.lift(R.residue(x))) == R.residue(x)


def test_elementary_generator_counts(hurwitz):
    assert len(elementary_generators(ResidueRing(Z, 2), 2)) == 2
    gens = elementary_generators(ResidueRing(hurwitz, 2), 2)
    assert len(gens) == 8
    for m, mi in gens:
        assert mat_mul(hurwitz.D, m, mi) == dmat_identity(hurwitz.D, 2)
    with pytest.raises(ValueError):
        elementary_generators(ResidueRing(Z, 2), 1)


def test_integer_unit_images():
    assert sorted(unit_representatives(Z, 5, 1).images) == [((1,),), ((4,),)]
    assert unit_representatives(Z, 2, 1).images == [((1,),)]
    assert len(unit_representatives(Z, 8, 1)) == 2


def test_hurwitz_images_match_unit_group(hurwitz):
    R = ResidueRing(hurwitz, 2)
    direct = {(R.residue(u),) for u in unit_group_definite(hurwitz.quat, hurwitz.O)}
    rs = unit_representatives(hurwitz, 2, 1)
    assert rs.image_set() == direct
    assert len(rs) == 12


def _check_repset(rs, S, sample=None):
    R, k = rs.ring, rs.k
    imgs = rs.image_set()
    assert len(imgs) == len(rs.images)
    rng = random.Random(0)
    for _ in range(30):
        a, b = rng.choice(rs.images), rng.choice(rs.images)
        assert rmat_mul(R, a, b, k) in imgs
    idxs = range(len(rs)) if sample is None else rng.sample(range(len(rs)), sample)
    for idx in idxs:
        m, mi = rs.lift(idx)
        assert mat_mul(S.D, m, mi) == dmat_identity(S.D, k) == mat_mul(S.D, mi, m)
        assert all(S.O.contains(x) for row in m + mi for x in row)
        assert rmat_from(R, m) == rs.images[idx]
        assert rmat_from(R, mi) in imgs


def test_repset_invariants(hurwitz):
    rs = unit_representatives(Z, 4, 2)
    assert len(rs) == 96          # |SL2(Z/4)| * |{±1}| = 48 * 2
    _check_repset(rs, Z, sample=40)
    _check_repset(unit_representatives(hurwitz, 2, 1), hurwitz)
    _check_repset(unit_representatives(Zi, 3, 2), Zi, sample=40)


@pytest.mark.parametrize("name,g", [("Z", 4), ("Z", 6), ("Z[i]", 2), ("Z[i]", 3)])
def test_elementary_closure_equals_finite_elementary_group(name, g):
    S = ring(name)
    R = ResidueRing(S, g)
    k = 2
    spanning = [rmat_from(R, m) for m, _ in elementary_generators(R, k)]
    everything = []
    for r in R.elements():
        if r == R.zero:
            continue
        for i, j in ((0, 1), (1, 0)):
            m = list(rmat_identity(R, k))
            m[i * k + j] = r
            everything.append(tuple(m))
    a, _ = closure(R, k, spanning)
    b, _ = closure(R, k, everything)
    assert set(a) == set(b)


def test_closure_cap():
    R = ResidueRing(Z, 4)
    gens = [rmat_from(R, m) for m, _ in elementary_generators(R, 2)]
    with pytest.raises(ClosureTooLarge):
        closure(R, 2, gens, cap=10)


def _check_sk1(S, ramified, order):
    data = sk1_generators(S)
    assert [g.prime for g in data.generators] == ramified
    D, Q = S.D, S.quat
    for gen in data.generators:
        assert gen.group_order == order
        assert all(S.O.contains(x) for row in gen.S for x in row)
        assert all(S.O.contains(x) for row in gen.matrix + gen.inverse for x in row)
        assert mat_mul(D, gen.matrix, gen.inverse) == dmat_identity(D, 2)
        assert reduced_norm_matrix(S, gen.matrix) == 1
        # σ is the quaternion conjugation on W, and α intertwines it
        assert D.mul(Q.conjugate(gen.omega), gen.alpha) == D.mul(gen.alpha, gen.omega)
        W, P, p = gen.field, gen.prime_ideal, gen.prime
        one = W.rational(1)
        x = one
        orders = []
        for e in range(1, p * p):
            x = W.mul(x, gen.omega_w)
            if P.contains(tuple(a - b for a, b in zip(x, one))):
                orders.append(e)
                break
        assert orders == [p * p - 1]


def test_sk1_hurwitz(hurwitz):
    _check_sk1(hurwitz, [2], 3)


def test_sk1_minus1_minus3():
    _check_sk1(quaternion_order(-1, -3), [3], 4)


def test_ktheory_route_matches_generators_on_small_modulus():
    S = quaternion_order(-1, -3)
    a = unit_representatives(S, 2, 1)
    b = unit_representatives(S, 2, 1, method="ktheory")
    assert a.image_set() == b.image_set()
    assert b.gens is None


def test_reduction_trivial_examples():
    red = reduction_step(Z, Z.O, 3, 2, 1)
    assert red.xi == (1,) and red.b_ideal == Z.O
    assert red.Phi1 == red.Phi2 == dmat_identity(Z.D, 2)
    red = reduction_step(Z, Z.O.scale(2), 3, 2, 1)
    assert abs(red.xi[0]) == 2 and red.b_ideal == Z.O
    assert red.b_elem == (1,) and red.y_elem == (0,)


@pytest.mark.parametrize("g", [3, 7])
def test_reduction_nonprincipal(g):
    K = K5.F
    a = ideal_from_gens(K, [K.rational(2), (1, 1)])
    red = reduction_step(K5, a, g, 2, 1)
    assert K5.lmul(red.xi, red.b_ideal) == a
    R = ResidueRing(K5, g)
    assert red.b_ideal + R.ideal == K5.O
    assert red.b_ideal.contains(red.b_elem) and R.ideal.contains(red.y_elem)
    nice = build_nice(K5, a, 2)
    check_reduction(K5, red, g, nice.lattice, elementary_generators(R, 2))


@pytest.mark.parametrize("gid,g,d", [("D4", 4, 1), ("Q12", 6, 1), ("D4", 2, 2)])
def test_component_representative_lifts(gid, g, d):
    wd = load(gid)
    comp = next(c for c in wd.components if c.n == 2)
    S = component_order(comp)
    conj = conjugate_to_nice(S, comp.max_order, 2)
    crs = component_representatives(S, 2, d, g, conj)
    A, M = comp.alg, comp.max_order
    gM = M.scale(g)
    rng = random.Random(1)
    for idx in rng.sample(range(len(crs)), min(15, len(crs))):
        m, mi = crs.lift(idx)
        r = crs.residue_matrix(idx)
        for i in range(d):
            for j in range(d):
                s = A.zero()
                for t in range(d):
                    s = Algebra.add(s, A.mul(m[i][t], mi[t][j]))
                assert s == (tuple(A.one) if i == j else A.zero())
                assert M.contains(m[i][j])
                assert gM.contains(Algebra.sub(m[i][j], r[i][j]))
