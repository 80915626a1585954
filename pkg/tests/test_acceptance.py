"""Acceptance suite: one test per criterion, each recording a pass/fail line.

The lines are collected in conftest.ACCEPTANCE_LINES and printed in the
terminal summary, sorted by criterion number.
"""
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import product

import pytest

import conftest
from helpers import RING_NAMES, element, left_ideal, nonzero_element, pseudo_matrix, ring
from lattfree.freeness import (
    FREE, NOT_FREE, NOT_LOCALLY_FREE, UNKNOWN, is_free, recheck_local_failure, verify_certificate,
)
from lattfree.instances import quadratic_integers, split_c2, twisted_regular
from lattfree.linalg import ZLattice, det, lattice_index
from lattfree.numberfield import ideal_from_gens, pip_nf_certified
from lattfree.pseudo import ext_euclid_many, module_lattice, pseudo_hnf, steinitz
from lattfree.quaternion import lipschitz_order, ramified_primes, unit_group_definite
from lattfree.units import ResidueRing, reduced_norm_matrix, sk1_generators, unit_representatives
from lattfree.wedderburn import central_idempotents, conductor, load, registry_ids
from lattfree.nice import mat_mul
from lattfree.units import dmat_identity


@contextmanager
def criterion(n: int, limit: float, what: str):
    """Time the block and record one line; a failed assertion or timeout is recorded as FAIL."""
    budget = "no limit" if limit == float("inf") else f"limit {limit:g}s"
    start = time.perf_counter()
    status = "FAIL"
    note = ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if elapsed < limit:
            status = "PASS"
        else:
            note = " (time limit exceeded)"
    except BaseException as e:
        note = f" ({type(e).__name__}: {e})".splitlines()[0]
        raise
    finally:
        elapsed = time.perf_counter() - start
        conftest.ACCEPTANCE_LINES.append(
            f"criterion {n}: {status} {what} [{elapsed:.1f}s, {budget}]{note}")
    assert elapsed < limit, f"criterion {n} took {elapsed:.1f}s, limit {limit:g}s"


def test_criterion_1_idempotents():
    with criterion(1, 5, "idempotents for every registry group"):
        for gid in registry_ids():
            wd = load(gid)
            QG = wd.QG
            es = central_idempotents(wd)
            total = QG.zero()
            for i, e in enumerate(es):
                assert QG.mul(e, e) == e
                assert all(not any(QG.mul(e, f)) for j, f in enumerate(es) if j != i)
                for g in range(wd.group.order):
                    x = QG.basis_element(g)
                    assert QG.mul(x, e) == QG.mul(e, x)
                total = tuple(a + b for a, b in zip(total, e))
            assert total == QG.one


def test_criterion_2_hurwitz_anchors(hurwitz):
    with criterion(2, 10, "Hurwitz units 24, Lipschitz 8, ramification {2}, SK1 order 3"):
        H, O = hurwitz.quat, hurwitz.O
        assert len(unit_group_definite(H, O)) == 24
        assert len(unit_group_definite(H, lipschitz_order(H))) == 8
        ram = ramified_primes(H)
        assert ram.finite_ramified == (2,) and ram.infinite_ramified
        data = sk1_generators(hurwitz)
        assert [g.prime for g in data.generators] == [2]
        gen = data.generators[0]
        assert gen.group_order == 3
        assert reduced_norm_matrix(hurwitz, gen.matrix) == 1
        assert all(O.contains(x) for row in gen.matrix + gen.inverse for x in row)
        assert mat_mul(hurwitz.D, gen.matrix, gen.inverse) == dmat_identity(hurwitz.D, 2)


def test_criterion_3_conductor():
    with criterion(3, 1, "conductor of Z[C2] in Ze+ + Ze- is 2M"):
        wd = load("C2")
        M, A = wd.maximal_order, wd.group_ring
        # every two-sided M-ideal is a*Z e+ + b*Z e-; keep those inside Z[C2]
        e_plus, e_minus = (wd.component_one(i) for i in range(2))
        inside = []
        for a, b in product(range(1, 7), repeat=2):
            I = ZLattice.from_generators([tuple(a * x for x in e_plus),
                                          tuple(b * x for x in e_minus)], wd.dim)
            if I.is_subset(A):
                inside.append(I)
        largest = [I for I in inside if all(J.is_subset(I) for J in inside)]
        assert largest == [M.scale(2)]
        assert conductor(wd, A).conductor == M.scale(2)


_RNGS = {}


def _rng(kind, name):
    return _RNGS.setdefault((kind, name), random.Random(f"{kind}-{name}"))


def test_criterion_4_pseudo_hnf_and_steinitz():
    with criterion(4, 120, "200 pseudo-matrices over each ring: span and Steinitz index 1"):
        for name, _ in product(RING_NAMES, range(200)):
            S = ring(name)
            rng = _rng("pseudo", name)
            P = pseudo_matrix(S, rng, 2, rng.choice([2, 3]))
            X = P.span(S.D)
            out = pseudo_hnf(S, P, verify=False)
            assert out.span(S.D) == X
            form = steinitz(S, list(zip(out.ideals, out.cols)))
            assert lattice_index(X, module_lattice(S.D, form.pairs(S), 2)) == 1


def _in_quotient(S, c, a, x):
    from lattfree.algebra import lat_inverse, lat_mul
    return lat_mul(S.D, lat_inverse(S.D, c), a).contains(x)


def test_criterion_5_extended_euclid():
    with criterion(5, 60, "100 Euclid pairs/triples over each ring"):
        for name, k in product(RING_NAMES, range(100)):
            S = ring(name)
            rng = _rng("euclid", name)
            ideals = [left_ideal(S, rng) for _ in range(2 + k % 2)]
            c = ideals[0]
            for a in ideals[1:]:
                c = c + a
            alphas = ext_euclid_many(S, ideals, c)
            total = S.D.zero()
            for a, x in zip(ideals, alphas):
                assert _in_quotient(S, c, a, x)
                total = tuple(u + v for u, v in zip(total, x))
            assert total == tuple(S.D.one)


def test_criterion_6_principal_ideals():
    with criterion(6, 120, "100 scrambled principal ideals over each ring, (2, 1+sqrt-5) not principal"):
        for name, _ in product(RING_NAMES, range(100)):
            S = ring(name)
            rng = _rng("pip", name)
            xi = nonzero_element(S, rng)
            a = S.left_ideal([xi])
            scrambled = [S.D.mul(element(S, rng), xi) for _ in range(3)] + [xi]
            a2 = ZLattice.from_generators(scrambled + [S.D.mul(o, xi) for o in S.O.vectors()],
                                          S.dim)
            assert a2 == a
            g = S.pip(a2)
            assert g is not None and S.left_ideal([g]) == a
        # no element of norm 2 exists in (2, 1+sqrt-5), checked over the whole norm box
        K = ring("Z[sqrt-5]").F
        res = pip_nf_certified(K, ideal_from_gens(K, [K.rational(2), (1, 1)]))
        assert res.generator is None and res.norm_bound == 2


@pytest.mark.parametrize("D", [5, 13, 17])
def test_criterion_7_rings_of_integers(D):
    with criterion(7, 30, f"O_L free over Z[C2] for L = Q(sqrt {D})"):
        inst = quadratic_integers(D)
        cert = is_free(inst)
        assert cert.verdict == FREE
        assert verify_certificate(inst, cert)


def test_criterion_7_split_lattice():
    with criterion(7, 30, "Ze+ + Ze- is NOT_LOCALLY_FREE with exhaustive witness at 2"):
        inst = split_c2()
        cert = is_free(inst)
        assert cert.verdict == NOT_LOCALLY_FREE
        assert "p = 2" in cert.reasons[0] and "exhaustive" in cert.reasons[0]
        assert recheck_local_failure(inst, 2)


def _invertible_theta(wd, rng):
    QG, n = wd.QG, wd.group.order
    while True:
        theta = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n))
        if det([QG.mul(QG.basis_element(g), theta) for g in range(n)]) != 0:
            return theta


def test_criterion_8_twisted_regular_modules():
    with criterion(8, 600, "20 random invertible twists for each of C4, C2xC2, D4, Q8, Q12"):
        for gid in ["C4", "C2xC2", "D4", "Q8", "Q12"]:
            wd = load(gid)
            rng = random.Random(f"theta-{gid}")
            for k in range(20):
                inst = twisted_regular(gid, _invertible_theta(wd, rng))
                cert = is_free(inst, seed=k)
                assert cert.verdict == FREE, (gid, k, cert.reasons)
                assert verify_certificate(inst, cert)


def test_criterion_9_truncated_search_is_unknown():
    with criterion(9, float("inf"), "truncated search on Q8xC2 gives UNKNOWN, never NOT_FREE"):
        wd = load("Q8xC2")
        inst = twisted_regular("Q8xC2", _invertible_theta(wd, random.Random("Q8xC2")))
        cert = is_free(inst, tuple_cap=1000)
        assert cert.verdict == UNKNOWN
        assert cert.verdict != NOT_FREE
        assert any("cap" in r for r in cert.reasons)


def test_criterion_10_unit_image_cross_check(hurwitz):
    with criterion(10, 30, "Hurwitz mod 2: RepSet image equals direct unit image"):
        R = ResidueRing(hurwitz, 2)
        direct = {(R.residue(u),) for u in unit_group_definite(hurwitz.quat, hurwitz.O)}
        for method in ("generators", "ktheory"):
            rs = unit_representatives(hurwitz, 2, 1, method=method)
            assert rs.image_set() == direct
