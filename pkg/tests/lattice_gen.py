"""Seeded generators of small finite matrix groups and lattices for the tests."""
from __future__ import annotations

import random

from galmod.groups import CapExceeded, enumerate_group
from galmod.lattice import GLattice
from galmod.linalg import IntegerMatrix, determinant

# finite-order blocks: rotations of order 3, 4, 6 and a reflection
BLOCKS_2 = [
    [[0, -1], [1, -1]],
    [[0, -1], [1, 0]],
    [[0, -1], [1, 1]],
    [[0, 1], [1, 0]],
    [[1, 1], [0, -1]],
]


def signed_permutation(rng: random.Random, n: int) -> list[list[int]]:
    p = list(range(n))
    rng.shuffle(p)
    return [[(rng.choice((1, -1)) if rng.random() < 0.3 else 1) if p[i] == j else 0 for j in range(n)]
            for i in range(n)]


def block_matrix(rng: random.Random, n: int) -> list[list[int]]:
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    if n >= 2:
        i = rng.randrange(n - 1)
        b = rng.choice(BLOCKS_2)
        for a in range(2):
            for c in range(2):
                m[i + a][i + c] = b[a][c]
    if rng.random() < 0.3:
        k = rng.randrange(n)
        m[k][k] = -m[k][k] if all(m[k][j] == 0 for j in range(n) if j != k) else m[k][k]
    return m


def conjugate(rng: random.Random, m: list[list[int]]) -> list[list[int]]:
    """``B m B^-1`` for an elementary ``B = I + c E_ij``."""
    n = len(m)
    if n < 2:
        return m
    i, j = rng.sample(range(n), 2)
    c = rng.choice((-1, 1))
    B = IntegerMatrix([[int(a == b) + (c if (a, b) == (i, j) else 0) for b in range(n)] for a in range(n)])
    Binv = IntegerMatrix([[int(a == b) - (c if (a, b) == (i, j) else 0) for b in range(n)] for a in range(n)])
    return (B @ IntegerMatrix(m) @ Binv).rows


def random_generators(rng: random.Random, n: int, k: int, entry_bound: int = 2) -> list[list[list[int]]]:
    gens = []
    for _ in range(k):
        while True:
            r = rng.random()
            if r < 0.35:
                m = signed_permutation(rng, n)
            elif r < 0.7:
                m = block_matrix(rng, n)
            else:
                m = [[rng.randint(-entry_bound, entry_bound) for _ in range(n)] for _ in range(n)]
            if rng.random() < 0.5:
                m = conjugate(rng, m)
            if all(abs(x) <= entry_bound for row in m for x in row) and determinant(IntegerMatrix(m)) in (1, -1):
                gens.append(m)
                break
    return gens


def random_lattice(rng: random.Random, max_order: int = 12, max_rank: int = 4, entry_bound: int = 2,
                   min_order: int = 2, tries: int = 2000) -> GLattice:
    """A natural lattice of a random finite group with order in ``[min_order, max_order]``."""
    for _ in range(tries):
        n = rng.randint(1, max_rank)
        k = rng.randint(1, 2)
        gens = random_generators(rng, n, k, entry_bound)
        try:
            G = enumerate_group([(f"g{i}", m) for i, m in enumerate(gens)], element_cap=max_order)
        except CapExceeded:
            continue
        if G.order >= min_order:
            return GLattice.natural(G)
    raise RuntimeError("no finite group found")


def random_permutation_group(rng: random.Random, max_order: int = 24, max_points: int = 5, min_order: int = 2):
    """Permutation-matrix group on a few points, order in ``[min_order, max_order]``."""
    while True:
        n = rng.randint(2, max_points)
        gens = []
        for i in range(rng.randint(1, 2)):
            p = list(range(n))
            rng.shuffle(p)
            gens.append((f"p{i}", [[int(p[c] == r) for c in range(n)] for r in range(n)]))
        try:
            G = enumerate_group(gens, element_cap=max_order)
        except CapExceeded:
            continue
        if G.order >= min_order:
            return G
