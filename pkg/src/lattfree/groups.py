"""Finite groups as multiplication tables, with word labels for elements."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Hashable, Sequence


@dataclass(frozen=True)
class GroupTable:
    id: str
    labels: tuple[str, ...]
    mul: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.labels)

    @property
    def identity(self) -> int:
        return 0

    @property
    def inverse(self) -> tuple[int, ...]:
        return tuple(next(j for j in range(self.order) if self.mul[i][j] == 0)
                     for i in range(self.order))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown group element {label!r} in {self.id}") from None

    def check(self) -> None:
        n = self.order
        m = self.mul
        if any(m[0][i] != i or m[i][0] != i for i in range(n)):
            raise ValueError(f"{self.id}: element 0 is not the identity")
        for i in range(n):
            if sorted(m[i]) != list(range(n)):
                raise ValueError(f"{self.id}: row {i} is not a permutation")
        for a, b, c in product(range(n), repeat=3):
            if m[m[a][b]][c] != m[a][m[b][c]]:
                raise ValueError(f"{self.id}: associativity fails at {a},{b},{c}")

    def word(self, i: int) -> list[int]:
        """A word in the generators (indices into ``generators``) representing element i."""
        return _words(self)[i]


_WORD_CACHE: dict[str, list[list[int]]] = {}


def _words(G: GroupTable) -> list[list[int]]:
    key = G.id + str(G.labels)
    if key not in _WORD_CACHE:
        words: list[list[int] | None] = [None] * G.order
        words[0] = []
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for k, g in enumerate(G.generators):
                    y = G.mul[x][g]
                    if words[y] is None:
                        words[y] = words[x] + [k]
                        nxt.append(y)
            frontier = nxt
        _WORD_CACHE[key] = words  # type: ignore[assignment]
    return _WORD_CACHE[key]


def _label(word: list[int], names: Sequence[str]) -> str:
    if not word:
        return "e"
    parts = []
    k = 0
    while k < len(word):
        j = k
        while j < len(word) and word[j] == word[k]:
            j += 1
        e = j - k
        parts.append(names[word[k]] + (f"^{e}" if e > 1 else ""))
        k = j
    return "*".join(parts)


def from_generators(gid: str, mul: Callable[[Hashable, Hashable], Hashable], identity: Hashable,
                    gens: Sequence[Hashable], names: Sequence[str]) -> GroupTable:
    """Enumerate a group breadth-first from its generators; labels are the first words found."""
    elems = [identity]
    words: list[list[int]] = [[]]
    seen = {identity: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for k, g in enumerate(gens):
                y = mul(elems[i], g)
                if y not in seen:
                    seen[y] = len(elems)
                    elems.append(y)
                    words.append(words[i] + [k])
                    nxt.append(seen[y])
        frontier = nxt
    n = len(elems)
    table = tuple(tuple(seen[mul(elems[i], elems[j])] for j in range(n)) for i in range(n))
    labels = tuple(_label(w, names) for w in words)
    gen_idx = tuple(seen[g] for g in gens)
    return GroupTable(gid, labels, table, gen_idx)


def cyclic(n: int) -> GroupTable:
    return from_generators(f"C{n}", lambda a, b: (a + b) % n, 0, [1 % n] if n > 1 else [], ["g"])


def dihedral(m: int) -> GroupTable:
    """Dihedral group of order 2m: r^m = s^2 = 1, s r s = r^-1."""
    def mul(x, y):
        k1, e1 = x
        k2, e2 = y
        return ((k1 + (-1) ** e1 * k2) % m, (e1 + e2) % 2)
    return from_generators(f"D{m}", mul, (0, 0), [(1, 0), (0, 1)], ["r", "s"])


def dicyclic(m: int) -> GroupTable:
    """Generalized quaternion group of order 4m: a^{2m} = 1, b^2 = a^m, b a b^-1 = a^-1."""
    def mul(x, y):
        k1, e1 = x
        k2, e2 = y
        if e1 == 0:
            return ((k1 + k2) % (2 * m), e2)
        if e2 == 0:
            return ((k1 - k2) % (2 * m), 1)
        return ((k1 - k2 + m) % (2 * m), 0)
    return from_generators(f"Q{4 * m}", mul, (0, 0), [(1, 0), (0, 1)], ["a", "b"])


def abelian(orders: Sequence[int], gid: str, names: Sequence[str]) -> GroupTable:
    def mul(x, y):
        return tuple((a + b) % n for a, b, n in zip(x, y, orders))
    gens = [tuple(int(i == j) for j in range(len(orders))) for i in range(len(orders))]
    return from_generators(gid, mul, tuple(0 for _ in orders), gens, names)


def q8_times_c2() -> GroupTable:
    q = dicyclic(2)

    def mul(x, y):
        return (q.mul[x[0]][y[0]], (x[1] + y[1]) % 2)
    a, b = q.generators
    return from_generators("Q8xC2", mul, (0, 0), [(a, 0), (b, 0), (0, 1)], ["a", "b", "c"])


def alternating4() -> GroupTable:
    def mul(x, y):
        # (x*y)(i) = x(y(i))
        return tuple(x[y[i]] for i in range(4))
    t = (1, 2, 0, 3)
    u = (1, 0, 3, 2)
    return from_generators("A4", mul, (0, 1, 2, 3), [t, u], ["t", "u"])


def by_id(gid: str) -> GroupTable:
    if gid.startswith("C") and gid[1:].isdigit():
        return cyclic(int(gid[1:]))
    if gid.startswith("Cn:"):
        return cyclic(int(gid[3:]))
    table = {
        "C2xC2": lambda: abelian([2, 2], "C2xC2", ["x", "y"]),
        "C2xC4": lambda: abelian([2, 4], "C2xC4", ["x", "y"]),
        "D4": lambda: dihedral(4),
        "D6": lambda: dihedral(6),
        "Q8": lambda: dicyclic(2),
        "Q12": lambda: dicyclic(3),
        "Q16": lambda: dicyclic(4),
        "Q8xC2": q8_times_c2,
        "A4": alternating4,
    }
    if gid not in table:
        raise KeyError(f"unknown group {gid!r}")
    return table[gid]()
