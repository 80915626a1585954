import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lattfree.algebra import lat_mul
from lattfree.linalg import ZLattice, det, matmul
from lattfree.wedderburn import (
    central_idempotents, check_idempotents, conductor, h2prime_report, is_two_sided_ideal,
    load, module_span, project_lattice, registry_ids,
)

IDS = registry_ids()


@pytest.mark.parametrize("gid", IDS)
def test_idempotents_and_group_table(gid):
    wd = load(gid)
    G = wd.group
    G.check()
    QG = wd.QG
    es = central_idempotents(wd)
    check_idempotents(wd, es)
    total = QG.zero()
    for i, e in enumerate(es):
        assert QG.mul(e, e) == e
        for j, f in enumerate(es):
            if i != j:
                assert not any(QG.mul(e, f))
        for g in range(G.order):
            x = QG.basis_element(g)
            assert QG.mul(x, e) == QG.mul(e, x)
        total = tuple(a + b for a, b in zip(total, e))
    assert total == QG.one
    # component images of the idempotents are the component units
    for i, e in enumerate(es):
        assert wd.to_W(e) == wd.component_one(i)
    assert sum(c.dim for c in wd.components) == G.order


@pytest.mark.parametrize("gid", IDS)
def test_wedderburn_map_is_a_homomorphism(gid):
    wd = load(gid)
    G, W = wd.group, wd.W
    for g in range(G.order):
        for h in range(G.order):
            assert W.mul(wd.group_image(g), wd.group_image(h)) == wd.group_image(G.mul[g][h])


def test_c2_idempotents():
    wd = load("C2")
    es = sorted(central_idempotents(wd))
    half = Fraction(1, 2)
    assert es == sorted([(half, half), (half, -half)])


def test_q8_quaternion_idempotent():
    wd = load("Q8")
    G = wd.group
    z = next(g for g in range(G.order) if g != 0 and G.mul[g][g] == 0 and
             all(G.mul[g][h] == G.mul[h][g] for h in range(G.order)))
    target = [Fraction(0)] * G.order
    target[0], target[z] = Fraction(1, 2), Fraction(-1, 2)
    assert tuple(target) in central_idempotents(wd)


@pytest.mark.parametrize("gid", ["C2", "C4", "C2xC2", "D4", "Q8", "Q12", "A4"])
def test_conductor_is_largest_ideal_in_group_ring(gid):
    wd = load(gid)
    A, M, W = wd.group_ring, wd.maximal_order, wd.W
    cd = conductor(wd, A, M)
    c = cd.conductor
    assert c.is_subset(A) and is_two_sided_ideal(W, M, c)
    assert lat_mul(W, c, M).is_subset(A)
    assert cd.f_total.is_subset(A) and cd.f_total.is_subset(c)
    # any element of M outside c fails xM ⊆ A or Mx ⊆ A on a sample
    rng = random.Random(gid)
    for _ in range(10):
        x = M.random_element(rng, 2)
        if c.contains(x):
            continue
        Mx = lat_mul(W, M, ZLattice.from_generators([x], W.dim))
        assert not lat_mul(W, Mx, M).is_subset(A)


def test_conductor_trivial_and_c2():
    wd = load("C2")
    M = wd.maximal_order
    cd = conductor(wd, M, M)
    assert cd.conductor == M
    assert cd.g_generators == [1, 1]
    cd = conductor(wd, wd.group_ring, M)
    assert cd.conductor == M.scale(2)
    assert cd.g_generators == [2, 2]


def test_conductor_rejects_non_suborder():
    wd = load("C2")
    with pytest.raises(ValueError):
        conductor(wd, wd.maximal_order, wd.group_ring)


def test_h2prime_examples():
    assert h2prime_report(load("Q8"), 1).verdict == "full"
    for d in (1, 2, 3):
        assert h2prime_report(load("C2xC2"), d).verdict == "full"
    rep = h2prime_report(load("Q8xC2"), 1)
    assert rep.verdict == "weakened: NOT_FREE unprovable"
    assert not rep.cancellation_ok


def test_project_lattice_c2():
    wd = load("C2")
    X = ZLattice.from_generators([wd.to_W(v) for v in ([1, 0], [0, 1])], 2)
    for i in range(2):
        P = project_lattice(wd, X, i, 1)
        assert P == ZLattice.standard(1)
        # back in Q[C2] the image is Z·e±, with e± = (1 ± g)/2
        back = ZLattice.from_generators([wd.from_W(wd.embed(i, v)) for v in P.vectors()], 2)
        assert back.den == 2 and back.contains(central_idempotents(wd)[i])


def test_project_lattice_trivial_group():
    wd = load("C1")
    X = ZLattice.from_generators([[3]], 1)
    assert project_lattice(wd, X, 0, 1) == X


@given(st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=4, max_size=4))
@settings(max_examples=15)
def test_projection_invariant_under_basis_change(U):
    if abs(det(U)) != 1:
        return
    wd = load("C4")
    X = module_span(wd, wd.group_ring, [wd.to_W([1, 1, 0, 2])], 1)
    moved = matmul([list(c) for c in zip(*X.vectors())], U)
    Y = ZLattice.from_generators([list(c) for c in zip(*moved)], 4)
    assert X == Y
    for i in range(len(wd.components)):
        assert project_lattice(wd, X, i, 1) == project_lattice(wd, Y, i, 1)
