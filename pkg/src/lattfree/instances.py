"""Ready-made freeness instances: twisted regular modules and quadratic rings of integers."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .freeness import ProblemInstance
from .wedderburn import load


def left_regular(gid: str, registry=None) -> list[list[list[Fraction]]]:
    """Matrices of left multiplication by each group element on Q[G]."""
    G = load(gid, registry).group
    n = G.order
    out = []
    for g in range(n):
        m = [[Fraction(0)] * n for _ in range(n)]
        for h in range(n):
            m[G.mul[g][h]][h] = Fraction(1)
        out.append(m)
    return out


def twisted_regular(gid: str, theta: Sequence, order="group_ring", registry=None) -> ProblemInstance:
    """X = Z[G]·θ inside Q[G] (free of rank one when θ is invertible)."""
    wd = load(gid, registry)
    QG = wd.QG
    theta = tuple(Fraction(c) for c in theta)
    basis = [QG.mul(QG.basis_element(g), theta) for g in range(wd.group.order)]
    return ProblemInstance(gid, basis, left_regular(gid, registry), order, 1, registry)


def regular(gid: str, registry=None) -> ProblemInstance:
    n = load(gid, registry).group.order
    return twisted_regular(gid, [1] + [0] * (n - 1), registry=registry)


def quadratic_integers(D: int, order="group_ring") -> ProblemInstance:
    """O_L for L = Q(√D) as a Z[C2]-lattice, coordinates in the basis 1, √D."""
    if D % 4 == 1:
        basis = [(1, 0), (Fraction(1, 2), Fraction(1, 2))]
    else:
        basis = [(1, 0), (0, 1)]
    action = [[[1, 0], [0, 1]], [[1, 0], [0, -1]]]
    return ProblemInstance("C2", basis, action, order, 1)


def split_c2() -> ProblemInstance:
    """Ze+ ⊕ Ze- inside Q[C2]: not locally free over Z[C2] at 2."""
    half = Fraction(1, 2)
    basis = [(half, half), (half, -half)]
    return ProblemInstance("C2", basis, left_regular("C2"), "group_ring", 1)
