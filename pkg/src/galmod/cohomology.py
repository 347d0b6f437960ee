"""First cohomology of finite groups with coefficients in lattices.

``coflabby`` is the older spelling of what most of the literature calls
*coflasque*: a lattice whose H^1 vanishes on every subgroup.
"""
from __future__ import annotations

from dataclasses import dataclass

from .groups import FiniteMatrixGroup, Subgroup
from .lattice import GLattice
from .linalg import (
    IntegerMatrix,
    invariant_factors,
    kernel_basis,
    solve_matrix,
)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z/d1 x Z/d2 x ...`` with ``d1 | d2 | ...`` and every ``di >= 2``."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = self.invariant_factors
        if any(d < 2 for d in f):
            raise ValueError(f"invariant factors must be >= 2, got {f}")
        if any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"invariant factors must form a divisibility chain, got {f}")

    @classmethod
    def from_diagonal(cls, diag) -> "FiniteAbelianGroup":
        return cls(tuple(d for d in diag if d > 1))

    @property
    def order(self) -> int:
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


def lattice_quotient(Z: IntegerMatrix, B: IntegerMatrix) -> FiniteAbelianGroup:
    """``span(Z) / span(B)`` for ``span(B)`` a full-rank sublattice of saturated ``span(Z)``."""
    if Z.ncols == 0:
        return FiniteAbelianGroup()
    Y = solve_matrix(Z, B)
    if Y is None:
        raise AssertionError("coboundaries are not cocycles")
    factors = invariant_factors(Y) if Y.ncols else []
    if len(factors) != Z.ncols:
        raise AssertionError("H^1 of a finite group on a lattice came out infinite")
    return FiniteAbelianGroup.from_diagonal(factors)


def h1(M: GLattice, H: Subgroup) -> FiniteAbelianGroup:
    """``H^1(H, M)`` by the generator-cocycle method.

    A cocycle is fixed by its values ``c_1..c_k`` on the generators of ``H``.
    Walking ``H`` breadth first expresses ``c_w`` for every element as a
    linear function of those unknowns; each product not used by the walk
    gives a relation ``c_{w g} = c_w + w c_g``.  Z^1 is the kernel of the
    relations, B^1 is spanned by ``(g_j m - m)_j``.
    """
    G = M.group
    if H.parent is not G:
        raise ValueError("subgroup of a different group")
    gens = [g for g in H.generators if g]
    n, k = M.rank, len(gens)
    if k == 0 or n == 0:
        return FiniteAbelianGroup()
    t = G.table
    width = k * n
    # C[w] is an n x (k n) matrix, kept as a list of sparse rows
    C: dict[int, list[dict]] = {0: [{} for _ in range(n)]}
    relations: list[dict] = []
    order = [0]
    head = 0
    while head < len(order):
        w = order[head]
        head += 1
        Aw = M.action(w).row_dicts()
        Cw = C[w]
        for j, g in enumerate(gens):
            # c_{w g} = c_w + A(w) E_j
            rows = []
            for a in range(n):
                r = dict(Cw[a])
                for b, v in Aw[a].items():
                    key = j * n + b
                    r[key] = r.get(key, 0) + v
                rows.append({c: v for c, v in r.items() if v})
            y = t[w][g]
            if y not in C:
                C[y] = rows
                order.append(y)
            else:
                for a in range(n):
                    r = dict(C[y][a])
                    for c, v in rows[a].items():
                        r[c] = r.get(c, 0) - v
                    r = {c: v for c, v in r.items() if v}
                    if r:
                        relations.append(r)
    if len(order) != H.order:
        raise AssertionError("subgroup generators do not generate the member set")
    ident = IntegerMatrix.identity(n)
    D = (M.action(gens[0]) - ident).vstack(*[M.action(g) - ident for g in gens[1:]])
    if relations:
        Z = kernel_basis(IntegerMatrix.from_sparse(len(relations), width, relations))
    else:
        Z = IntegerMatrix.identity(width)
    return lattice_quotient(Z, D)


def h1_cyclic_oracle(M: GLattice, g: int) -> FiniteAbelianGroup:
    """``H^1(<g>, M) = ker(N) / (g - 1) M`` with ``N`` the norm ``sum_i g^i``."""
    G = M.group
    n = M.rank
    order = G.element_order(g)
    A = M.action(g)
    ident = IntegerMatrix.identity(n)
    N = IntegerMatrix.zeros(n, n)
    P = ident
    for _ in range(order):
        N = N + P
        P = P @ A
    if not P.is_identity():
        raise AssertionError("action order does not divide the element order")
    K = kernel_basis(N)
    return lattice_quotient(K, A - ident)


def is_coflabby(M: GLattice, G: FiniteMatrixGroup | None = None) -> tuple[bool, list[tuple[Subgroup, FiniteAbelianGroup]]]:
    """True when H^1(H, M) vanishes on every subgroup class; also the failures."""
    G = G or M.group
    if G is not M.group:
        raise ValueError("lattice is defined over a different group")
    failing = []
    for H in G.subgroup_classes:
        c = h1(M, H)
        if not c.is_trivial():
            failing.append((H, c))
    return not failing, failing
