"""G-lattices, equivariant maps and the intertwiner computations on them.

Convention: matrices act on column vectors by left multiplication, so
``action(g) @ action(h) == action(g*h)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .groups import FiniteMatrixGroup, Subgroup, enumerate_group
from .linalg import (
    IntegerMatrix,
    is_unimodular,
    kernel_basis,
    rank as matrix_rank,
)

DEFAULT_ISO_BOUND = 3
# hard ceiling on unimodular-witness candidates examined per query
SEARCH_BUDGET = 200_000


class LatticeError(ValueError):
    pass


class GLattice:
    """A free Z-module of finite rank with an action of a finite matrix group.

    The action is given either per element, as images of the group generators
    (extended along each element's word), or as a function of the element
    index.  Lattices with a permuted basis also carry the permutations, which
    the intertwiner and invariant computations exploit.
    """

    def __init__(self, group: FiniteMatrixGroup, rank: int, *,
                 actions: Sequence[IntegerMatrix] | None = None,
                 generator_images: Sequence[IntegerMatrix] | None = None,
                 action_fn: Callable[[int], IntegerMatrix] | None = None,
                 permutations: Sequence[Sequence[int]] | None = None,
                 name: str = "M"):
        self.group = group
        self.rank = rank
        self.name = name
        self._cache: dict[int, IntegerMatrix] = {}
        # set on permutation lattices built from coset data
        self.descriptor = None
        self.basis_cosets: tuple | None = None
        self._fn = action_fn
        self._gen_images = None
        self.permutations = tuple(tuple(p) for p in permutations) if permutations is not None else None
        self._pure_perm = permutations is not None and actions is None and generator_images is None and action_fn is None
        if actions is not None:
            if len(actions) != group.order:
                raise LatticeError("need one action matrix per group element")
            self._cache = dict(enumerate(actions))
        elif generator_images is not None:
            if len(generator_images) != len(group.generators):
                raise LatticeError("need one image per group generator")
            self._gen_images = tuple(generator_images)
        elif action_fn is None and permutations is None:
            raise LatticeError("no action given")

    # construction helpers -----------------------------------------------

    @classmethod
    def natural(cls, group: FiniteMatrixGroup, name: str = "M") -> "GLattice":
        """The defining representation: each element acts by its own matrix."""
        return cls(group, group.rank, actions=group.elements, name=name)

    @classmethod
    def trivial(cls, group: FiniteMatrixGroup, rank: int = 1, name: str = "Z") -> "GLattice":
        ident = IntegerMatrix.identity(rank)
        return cls(group, rank, action_fn=lambda i: ident, name=name)

    @classmethod
    def from_permutations(cls, group: FiniteMatrixGroup, perms: Sequence[Sequence[int]],
                          name: str = "P") -> "GLattice":
        """Lattice whose element ``i`` sends basis vector ``x`` to ``perms[i][x]``."""
        n = len(perms[0]) if perms else 0
        return cls(group, n, permutations=perms, name=name)

    # action ------------------------------------------------------------

    def action(self, i: int) -> IntegerMatrix:
        m = self._cache.get(i)
        if m is not None:
            return m
        if self._pure_perm:
            p = self.permutations[i]
            rows: list[dict] = [{} for _ in range(self.rank)]
            for x, y in enumerate(p):
                rows[y] = {x: 1}
            m = IntegerMatrix.from_sparse(self.rank, self.rank, rows)
        elif self._fn is not None:
            m = self._fn(i)
        else:
            m = IntegerMatrix.identity(self.rank)
            for j in self.group.words[i]:
                m = m @ self._gen_images[j]
        if len(self._cache) < 512:
            self._cache[i] = m
        return m

    def generator_actions(self) -> list[IntegerMatrix]:
        return [self.action(i) for i in self.group.generator_indices]

    def validate(self) -> None:
        """Check unimodularity and the homomorphism property on all elements."""
        G = self.group
        gens = G.generator_indices
        imgs = [self.action(g) for g in gens]
        for g, m in zip(gens, imgs):
            if m.shape != (self.rank, self.rank) or not is_unimodular(m):
                raise LatticeError(f"action of generator {G.word_name(g)!r} is not unimodular")
        if not self.action(0).is_identity():
            raise LatticeError("identity does not act trivially")
        for i in range(G.order):
            a = self.action(i)
            for j, m in enumerate(imgs):
                if a @ m != self.action(G.right_multiply(i, j)):
                    raise LatticeError(
                        f"action is not multiplicative at {G.word_name(i)}*{G.generator_names[j]}")

    def is_permutation_basis(self) -> bool:
        return self.permutations is not None

    def __repr__(self) -> str:
        return f"GLattice({self.name}, rank={self.rank}, group order={self.group.order})"


@dataclass
class GMap:
    source: GLattice
    target: GLattice
    matrix: IntegerMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise LatticeError(
                f"map matrix has shape {self.matrix.shape}, expected {(self.target.rank, self.source.rank)}")

    def is_equivariant(self) -> bool:
        G = self.source.group
        for g in G.generator_indices:
            if self.matrix @ self.source.action(g) != self.target.action(g) @ self.matrix:
                return False
        return True

    def compose(self, other: "GMap") -> "GMap":
        """``self`` after ``other``."""
        return GMap(other.source, self.target, self.matrix @ other.matrix)


def _stacked(mats: Sequence[IntegerMatrix], ncols: int) -> IntegerMatrix:
    if not mats:
        return IntegerMatrix.zeros(0, ncols)
    return mats[0].vstack(*mats[1:])


def _orbit_sums(perms: Sequence[Sequence[int]], elements: Sequence[int], n: int) -> list[list[int]]:
    """Orbits of the permutation images of ``elements`` on ``range(n)``."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in elements:
        p = perms[g]
        for x in range(n):
            a, b = find(x), find(p[x])
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    orbits: dict[int, list[int]] = {}
    for x in range(n):
        orbits.setdefault(find(x), []).append(x)
    return [orbits[k] for k in sorted(orbits)]


def invariant_sublattice(M: GLattice, H: Subgroup) -> IntegerMatrix:
    """Saturated basis (columns, Hermite-normalized) of the ``H``-fixed vectors."""
    if M.permutations is not None:
        orbits = _orbit_sums(M.permutations, H.generators, M.rank)
        return IntegerMatrix.from_column_dicts(M.rank, [{x: 1 for x in o} for o in orbits])
    ident = IntegerMatrix.identity(M.rank)
    blocks = [M.action(g) - ident for g in H.generators]
    if not blocks:
        return ident
    return kernel_basis(_stacked(blocks, M.rank))


def invariant_rank(M: GLattice, H: Subgroup) -> int:
    if M.permutations is not None:
        return len(_orbit_sums(M.permutations, H.generators, M.rank))
    ident = IntegerMatrix.identity(M.rank)
    blocks = [M.action(g) - ident for g in H.generators]
    if not blocks:
        return M.rank
    return M.rank - matrix_rank(_stacked(blocks, M.rank))


def _check_same_group(M: GLattice, N: GLattice) -> None:
    if M.group is not N.group:
        raise LatticeError("lattices are defined over different groups")


def _hom_generic(M: GLattice, N: GLattice) -> list[IntegerMatrix]:
    m, n = M.rank, N.rank
    # unknown T is n x m, flattened row-major: T[a][b] -> a*m + b
    rows: list[dict] = []
    for g in M.group.generator_indices:
        B = N.action(g).row_dicts()
        AT = M.action(g).column_dicts()
        for a in range(n):
            for c in range(m):
                r: dict = {}
                # (T A)[a][c] = sum_b T[a][b] A[b][c]
                for b, v in AT[c].items():
                    r[a * m + b] = r.get(a * m + b, 0) + v
                # (B T)[a][c] = sum_d B[a][d] T[d][c]
                for d, v in B[a].items():
                    k = d * m + c
                    r[k] = r.get(k, 0) - v
                r = {k: v for k, v in r.items() if v}
                if r:
                    rows.append(r)
    if not rows:
        basis_cols = IntegerMatrix.identity(n * m).column_dicts()
    else:
        K = kernel_basis(IntegerMatrix.from_sparse(len(rows), n * m, rows))
        basis_cols = K.column_dicts()
    out = []
    for col in basis_cols:
        T = [dict() for _ in range(n)]
        for k, v in col.items():
            T[k // m][k % m] = v
        out.append(IntegerMatrix.from_sparse(n, m, T))
    return out


def _transitive_data(G: FiniteMatrixGroup, perms, orbit: list[int]):
    """Stabilizer of ``orbit[0]`` and, for each point, an element moving the base point there."""
    x0 = orbit[0]
    stab = []
    carrier: dict[int, int] = {}
    for g in range(G.order):
        y = perms[g][x0]
        if y == x0:
            stab.append(g)
        if y not in carrier:
            carrier[y] = g
    return stab, carrier


def _hom_into_permutation(M: GLattice, N: GLattice) -> list[IntegerMatrix]:
    """Hom_G(M, Z[X]) via Frobenius reciprocity, one block per orbit."""
    G = M.group
    m, n = M.rank, N.rank
    perms = N.permutations
    out = []
    for orbit in _orbit_sums(perms, G.generator_indices, n):
        stab, carrier = _transitive_data(G, perms, orbit)
        # row functionals fixed by the stabilizer: psi A_h = psi
        ident = IntegerMatrix.identity(m)
        blocks = [M.action(h).T - ident for h in stab if h]
        psis = kernel_basis(_stacked(blocks, m)) if blocks else ident
        for psi in psis.columns() if psis.ncols else []:
            rows: list[dict] = [{} for _ in range(n)]
            for x in orbit:
                g = carrier[x]
                # phi_x = psi A_{g^-1}
                A = M.action(G.inverse(g))
                vec = [sum(psi[k] * A[k, j] for k in range(m)) for j in range(m)]
                rows[x] = {j: v for j, v in enumerate(vec) if v}
            out.append(IntegerMatrix.from_sparse(n, m, rows))
    return out


def _hom_from_permutation(M: GLattice, N: GLattice) -> list[IntegerMatrix]:
    """Hom_G(Z[X], N): a base point of each orbit goes to a stabilizer-fixed vector."""
    G = M.group
    m, n = M.rank, N.rank
    perms = M.permutations
    out = []
    for orbit in _orbit_sums(perms, G.generator_indices, m):
        stab, carrier = _transitive_data(G, perms, orbit)
        ident = IntegerMatrix.identity(n)
        blocks = [N.action(h) - ident for h in stab if h]
        vs = kernel_basis(_stacked(blocks, n)) if blocks else ident
        for v in vs.columns() if vs.ncols else []:
            cols: list[dict] = [{} for _ in range(m)]
            for x in orbit:
                w = N.action(carrier[x]) @ v
                cols[x] = {i: a for i, a in enumerate(w) if a}
            out.append(IntegerMatrix.from_column_dicts(n, cols))
    return out


def hom_lattice(M: GLattice, N: GLattice) -> list[IntegerMatrix]:
    """Z-basis of the equivariant maps ``M -> N`` (``N.rank x M.rank`` matrices)."""
    _check_same_group(M, N)
    if N.permutations is not None and N.rank > M.rank:
        return _hom_into_permutation(M, N)
    if M.permutations is not None:
        return _hom_from_permutation(M, N)
    if N.permutations is not None:
        return _hom_into_permutation(M, N)
    return _hom_generic(M, N)


def restrict_action(M: GLattice, H: Subgroup) -> GLattice:
    """The lattice ``M`` seen as an ``H``-lattice; ``H`` becomes a group of its own."""
    G = M.group
    if H.parent is not G:
        raise LatticeError("subgroup of a different group")
    gens = H.generators
    if gens:
        named = [(G.word_name(g), G.elements[g]) for g in gens]
    else:
        named = [("e", G.elements[0])]
    K = enumerate_group(named, element_cap=max(G.element_cap, H.order))
    to_parent = [G.index_of(x) for x in K.elements]
    perms = None
    if M.permutations is not None:
        perms = [M.permutations[i] for i in to_parent]
    if M._pure_perm:
        R = GLattice.from_permutations(K, perms, name=M.name)
    else:
        R = GLattice(K, M.rank, action_fn=lambda i: M.action(to_parent[i]), permutations=perms, name=M.name)
    R.parent_map = to_parent
    return R


@dataclass
class IsoVerdict:
    """Outcome of an equivariant isomorphism test: ``yes``, ``no`` or ``unknown``."""

    status: str
    witness: IntegerMatrix | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status == "yes"


def _combinations(k: int, bound: int):
    """Integer vectors in ``[-bound, bound]^k``, by increasing sup-norm."""
    for r in range(1, bound + 1):
        for vec in itertools.product(range(-r, r + 1), repeat=k):
            if max(abs(v) for v in vec) == r:
                yield vec


def equivariant_isomorphic(M: GLattice, N: GLattice, search_bound: int = DEFAULT_ISO_BOUND) -> IsoVerdict:
    """Bounded search for a unimodular intertwiner ``M -> N``.

    ``no`` is only returned for certain obstructions (rank, or invariant
    ranks on some subgroup class); a failed search gives ``unknown``.
    """
    _check_same_group(M, N)
    if M.rank != N.rank:
        return IsoVerdict("no", reason=f"ranks differ ({M.rank} vs {N.rank})")
    for H in M.group.subgroup_classes:
        a, b = invariant_rank(M, H), invariant_rank(N, H)
        if a != b:
            return IsoVerdict("no", reason=f"invariant ranks differ on {H.name} (order {H.order}): {a} vs {b}")
    if all(M.action(g) == N.action(g) for g in M.group.generator_indices):
        return IsoVerdict("yes", IntegerMatrix.identity(M.rank))
    basis = hom_lattice(M, N)
    if not basis:
        return IsoVerdict("no", reason="no nonzero equivariant map")
    for T in basis:
        if is_unimodular(T):
            return IsoVerdict("yes", T)
    tried = 0
    for coeffs in _combinations(len(basis), search_bound):
        tried += 1
        if tried > SEARCH_BUDGET:
            return IsoVerdict("unknown", reason=f"search budget of {SEARCH_BUDGET} candidates exhausted")
        T = None
        for c, B in zip(coeffs, basis):
            if c:
                T = B.scale(c) if T is None else T + B.scale(c)
        if T is not None and is_unimodular(T):
            return IsoVerdict("yes", T)
    return IsoVerdict("unknown", reason=f"no unimodular intertwiner with coefficients in [-{search_bound}, {search_bound}]")
