"""Permutation lattices, coflasque resolutions and invertibility.

A coflasque resolution of a G-lattice ``M`` is an exact sequence
``0 -> C -> P -> M -> 0`` with ``P`` a permutation lattice and ``C``
coflasque.  It splits exactly when ``M`` is invertible (a direct summand of a
permutation lattice), and since every such sequence splits or none does, one
exact section search over ``Z`` decides invertibility.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .cohomology import FiniteAbelianGroup, is_coflabby, lattice_quotient
from .groups import FiniteMatrixGroup, Subgroup
from .lattice import (
    DEFAULT_ISO_BOUND,
    GLattice,
    GMap,
    IsoVerdict,
    LatticeError,
    _orbit_sums,
    equivariant_isomorphic,
    hom_lattice,
    invariant_rank,
    invariant_sublattice,
)
from .linalg import (
    IntegerMatrix,
    Obstruction,
    hermite_columns,
    is_surjective,
    is_unimodular,
    kernel_with_coordinates,
    particular_solution,
)

# below this rank the kernel's coflasqueness is also checked by direct H^1
DIRECT_H1_LIMIT = 24
# ceiling on candidate descriptors tried by is_permutation
CANDIDATE_BUDGET = 2_000


class ResolutionError(RuntimeError):
    pass


class CoflasquenessViolated(ResolutionError):
    """Internal invariant breach: the constructed kernel has nonzero H^1."""


class NotSurjective(LatticeError):
    pass


class NotInjective(LatticeError):
    pass


class MissingSplitting(LatticeError):
    pass


@dataclass(frozen=True)
class PermutationDescriptor:
    """A multiset of subgroup classes; part ``H`` stands for the coset lattice Z[G/H]."""

    parts: tuple[Subgroup, ...]

    @property
    def rank(self) -> int:
        return sum(H.index for H in self.parts)

    @property
    def indices(self) -> list[int]:
        return [H.index for H in self.parts]

    def summary(self) -> list[dict]:
        """Parts grouped by class, in descriptor order."""
        out: list[dict] = []
        for H in self.parts:
            if out and out[-1]["subgroup"] == H.name:
                out[-1]["multiplicity"] += 1
            else:
                out.append({"subgroup": H.name, "order": H.order, "index": H.index, "multiplicity": 1})
        return out

    def __str__(self) -> str:
        bits = []
        for p in self.summary():
            term = f"Z[G/{p['subgroup']}]"
            bits.append(term if p["multiplicity"] == 1 else f"{p['multiplicity']}*{term}")
        return " + ".join(bits) or "0"


def coset_action(G: FiniteMatrixGroup, H: Subgroup) -> tuple[list[int], list[list[int]]]:
    """Left cosets ``gH`` (representatives in BFS order) and the permutation each element induces."""
    t = G.table
    coset_of = [-1] * G.order
    reps: list[int] = []
    for g in range(G.order):
        if coset_of[g] < 0:
            c = len(reps)
            reps.append(g)
            for h in H.members:
                coset_of[t[g][h]] = c
    perms = [[coset_of[t[x][r]] for r in reps] for x in range(G.order)]
    return reps, perms


def permutation_lattice(G: FiniteMatrixGroup, descriptor: PermutationDescriptor, name: str = "P") -> GLattice:
    """``sum_H Z[G/H]`` with basis ordered by part, then by coset representative."""
    offsets = []
    total = 0
    cosets = []
    data = {}
    for k, H in enumerate(descriptor.parts):
        if H.parent is not G:
            raise LatticeError(f"part {H.name} is not a subgroup of this group")
        if H not in data:
            data[H] = coset_action(G, H)
        reps, _ = data[H]
        offsets.append(total)
        cosets.extend((k, r) for r in reps)
        total += len(reps)
    perms = []
    for x in range(G.order):
        p: list[int] = []
        for k, H in enumerate(descriptor.parts):
            off = offsets[k]
            p.extend(off + y for y in data[H][1][x])
        perms.append(p)
    P = GLattice.from_permutations(G, perms, name=name) if total else GLattice.trivial(G, 0, name=name)
    P.descriptor = descriptor
    P.basis_cosets = tuple(cosets)
    return P


def basis_labels(P: GLattice) -> list[str]:
    """Human-readable coset labels ``part#k:rep`` for a descriptor-built lattice."""
    G = P.group
    return [f"{P.descriptor.parts[k].name}#{k}:{G.word_name(r)}" for k, r in P.basis_cosets]


@dataclass
class Resolution:
    """``0 -> C --iota--> P --f--> M -> 0`` with optional splitting maps."""

    M: GLattice
    P: GLattice
    C: GLattice
    iota: GMap
    f: GMap
    section: GMap | None = None
    retraction: GMap | None = None
    # per subgroup class: H^1(H, C), all trivial for a valid resolution
    coflabby_certificate: list[tuple[Subgroup, FiniteAbelianGroup]] = field(default_factory=list)
    coflabby_method: str = ""

    @property
    def descriptor(self) -> PermutationDescriptor | None:
        return self.P.descriptor

    def verify(self) -> dict[str, bool]:
        """Exact checks of every structural invariant."""
        f, i = self.f.matrix, self.iota.matrix
        checks = {
            "f_surjective": is_surjective(f),
            "iota_injective_saturated": is_surjective(i.T) if i.ncols else True,
            "f_after_iota_zero": (f @ i).is_zero(),
            "ranks_add_up": self.P.rank == self.C.rank + self.M.rank,
            "f_equivariant": self.f.is_equivariant(),
            "iota_equivariant": self.iota.is_equivariant(),
            "C_coflabby": bool(self.coflabby_certificate) and all(g.is_trivial() for _, g in self.coflabby_certificate),
        }
        if self.section is not None:
            checks["section_identity"] = (f @ self.section.matrix).is_identity()
            checks["section_equivariant"] = self.section.is_equivariant()
        if self.retraction is not None:
            checks["retraction_identity"] = (self.retraction.matrix @ i).is_identity()
            checks["retraction_equivariant"] = self.retraction.is_equivariant()
        return checks


def _surjection_matrix(M: GLattice, P: GLattice, vectors: Sequence[list[int]]) -> IntegerMatrix:
    """``f(gH (x) v) = g v`` on the coset basis of ``P``."""
    cols = []
    for k, r in P.basis_cosets:
        w = M.action(r) @ vectors[k]
        cols.append({i: a for i, a in enumerate(w) if a})
    return IntegerMatrix.from_column_dicts(M.rank, cols)


def kernel_h1_via_sequence(M: GLattice, P: GLattice, f: IntegerMatrix, H: Subgroup) -> FiniteAbelianGroup:
    """``H^1(H, ker f) = M^H / f(P^H)`` for a permutation lattice ``P``.

    Exact because H^1(H, P) vanishes for permutation lattices; this avoids
    cocycle computations on kernels of rank in the thousands.
    """
    MH = invariant_sublattice(M, H)
    PH = invariant_sublattice(P, H)
    return lattice_quotient(MH, f @ PH)


def _coflasque_defect(M: GLattice, P: GLattice, f: IntegerMatrix) -> list[tuple[Subgroup, FiniteAbelianGroup]]:
    return [(H, kernel_h1_via_sequence(M, P, f, H)) for H in M.group.subgroup_classes]


def _assemble(M: GLattice, P: GLattice, f: IntegerMatrix) -> Resolution:
    G = M.group
    if not is_surjective(f):
        raise CoflasquenessViolated("constructed map onto M is not surjective")
    K, R = kernel_with_coordinates(f)
    C = GLattice(G, K.ncols, action_fn=lambda i: R @ (P.action(i) @ K), name="C")
    iota = GMap(C, P, K)
    fmap = GMap(P, M, f)
    cert = _coflasque_defect(M, P, f)
    method = "exact sequence"
    if any(not g.is_trivial() for _, g in cert):
        bad = ", ".join(f"{H.name}: {g}" for H, g in cert if not g.is_trivial())
        raise CoflasquenessViolated(f"kernel has nonzero H^1 ({bad})")
    if C.rank <= DIRECT_H1_LIMIT:
        ok, failing = is_coflabby(C)
        if not ok:
            raise CoflasquenessViolated("direct H^1 disagrees with the exact-sequence computation")
        method = "exact sequence + cocycles"
    return Resolution(M, P, C, iota, fmap, coflabby_certificate=cert, coflabby_method=method)


def coflasque_resolution(M: GLattice, prune: bool = False) -> Resolution:
    """The standard resolution ``P = sum_[H] Z[G/H] (x) M^H -> M``.

    Every subgroup class contributes one coset lattice per basis vector of
    ``M^H`` (Hermite-normalized), so ``P^H -> M^H`` is onto for every ``H``
    and the kernel is coflasque.  With ``prune`` the parts are then dropped
    greedily, largest index first, as long as surjectivity and coflasqueness
    survive; the result is still a coflasque resolution, just smaller.
    """
    G = M.group
    parts: list[Subgroup] = []
    vectors: list[list[int]] = []
    for H in G.subgroup_classes:
        B = invariant_sublattice(M, H)
        for col in B.columns() if B.ncols else []:
            parts.append(H)
            vectors.append(col)
    if prune:
        parts, vectors = _prune(M, parts, vectors)
    P = permutation_lattice(G, PermutationDescriptor(tuple(parts)))
    f = _surjection_matrix(M, P, vectors)
    return _assemble(M, P, f)


def _prune(M: GLattice, parts: list[Subgroup], vectors: list[list[int]]):
    """Greedy removal keeping ``f(P^H) = M^H`` for every class ``H``.

    That equality is exactly coflasqueness of the kernel (and, for the trivial
    subgroup, surjectivity).  Each part's share of ``f(P^H)`` is spanned by its
    orbit sums, so it is computed once and reused for every trial.
    """
    G = M.group
    classes = G.subgroup_classes
    targets = [hermite_columns(invariant_sublattice(M, H)) for H in classes]
    cosets: dict = {}
    share: list[list[list[list[int]]]] = []
    for K, v in zip(parts, vectors):
        if K not in cosets:
            cosets[K] = coset_action(G, K)
        reps, perms = cosets[K]
        imgs = [M.action(r) @ v for r in reps]
        row = []
        for H in classes:
            cols = [[sum(imgs[x][i] for x in o) for i in range(M.rank)]
                    for o in _orbit_sums(perms, H.generators, len(reps))]
            row.append(hermite_columns(IntegerMatrix.from_columns(cols, M.rank)).columns())
        share.append(row)

    def valid(idx):
        for h, T in enumerate(targets):
            cols = [c for k in idx for c in share[k][h]]
            if hermite_columns(IntegerMatrix.from_columns(cols, M.rank)) != T:
                return False
        return True

    keep = list(range(len(parts)))
    # try removals from the largest index down; ties from the end of the list
    order = sorted(range(len(parts)), key=lambda k: (-parts[k].index, -k))
    for k in order:
        trial = [j for j in keep if j != k]
        if trial and valid(trial):
            keep = trial
    return [parts[k] for k in keep], [vectors[k] for k in keep]


def _split_search(bases: list[IntegerMatrix], compose, n: int,
                  shape: tuple[int, int]) -> tuple[IntegerMatrix | None, Obstruction | None]:
    """Find integers ``x`` with ``compose(sum x_k B_k) = I_n``; ``shape`` is that of the ``B_k``."""
    if n == 0:
        return IntegerMatrix.zeros(*shape), None
    if not bases:
        return None, Obstruction((), (), 0, "there are no nonzero equivariant maps")
    products = [compose(B) for B in bases]
    rows: list[dict] = [{} for _ in range(n * n)]
    for k, Q in enumerate(products):
        for a, r in enumerate(Q.row_dicts()):
            for b, v in r.items():
                rows[a * n + b][k] = v
    A = IntegerMatrix.from_sparse(n * n, len(bases), rows)
    rhs = [1 if a == b else 0 for a in range(n) for b in range(n)]
    x, obs = particular_solution(A, rhs)
    if x is None:
        return None, obs
    S = IntegerMatrix.zeros(*shape)
    for c, B in zip(x, bases):
        if c:
            S = S + B.scale(c)
    return S, None


def section_search(f: GMap) -> tuple[GMap | None, Obstruction | None]:
    if not is_surjective(f.matrix):
        raise NotSurjective("map is not surjective")
    M, P = f.target, f.source
    S, obs = _split_search(hom_lattice(M, P), lambda B: f.matrix @ B, M.rank, (P.rank, M.rank))
    if S is None:
        return None, obs
    s = GMap(M, P, S)
    assert (f.matrix @ S).is_identity() and s.is_equivariant()
    return s, None


def section_of_surjection(f: GMap) -> GMap | None:
    """An equivariant ``s`` with ``f s = id``, decided exactly over Z."""
    return section_search(f)[0]


def retraction_of_inclusion(iota: GMap) -> GMap | None:
    """An equivariant ``r`` with ``r iota = id``, or ``None``."""
    i = iota.matrix
    if i.ncols and not is_surjective(i.T):
        raise NotInjective("map is not injective with saturated image")
    C, P = iota.source, iota.target
    R, _ = _split_search(hom_lattice(P, C), lambda B: B @ i, C.rank, (C.rank, P.rank))
    if R is None:
        return None
    r = GMap(P, C, R)
    assert (R @ i).is_identity() and r.is_equivariant()
    return r


class Invertibility(NamedTuple):
    invertible: bool
    witness: GMap | Obstruction
    resolution: Resolution


def is_invertible(M: GLattice, resolution: Resolution | None = None) -> Invertibility:
    """Decide whether ``M`` is a direct summand of a permutation lattice.

    The witness is a section of the resolution's surjection when ``M`` is
    invertible, and otherwise the Smith-form obstruction of the linear system
    a section would have to satisfy.
    """
    res = resolution or coflasque_resolution(M)
    s, obs = section_search(res.f)
    if s is not None:
        res.section = s
        return Invertibility(True, s, res)
    return Invertibility(False, obs, res)


def _row_streams(S: IntegerMatrix, F: IntegerMatrix):
    """Rows of ``S @ F`` one at a time, dense."""
    frows = F.rows
    width = F.ncols
    for r in S.row_dicts():
        acc = [0] * width
        for k, v in r.items():
            fr = frows[k]
            if v == 1:
                acc = [a + b for a, b in zip(acc, fr)]
            else:
                acc = [a + v * b for a, b in zip(acc, fr)]
        yield acc


def idempotent_check(s: IntegerMatrix, f: IntegerMatrix) -> bool:
    """Exact ``e @ e == e`` for ``e = s @ f``, compared row by row.

    ``e @ e`` is evaluated as ``s @ ((f @ s) @ f)`` so no dense square product
    is formed; both sides are materialized one row at a time.
    """
    fsf = (f @ s) @ f
    return all(a == b for a, b in zip(_row_streams(s, f), _row_streams(s, fsf)))


@dataclass
class Complement:
    """``N = image(id - s f)`` inside ``P`` together with its certificates."""

    lattice: GLattice
    basis: IntegerMatrix
    block_unimodular: bool
    idempotent: bool


def complement_summand(res: Resolution, check_idempotent: bool = True) -> Complement:
    """The complement ``N`` of ``s(M)`` in ``P``, so that ``M + N = P``.

    ``image(id - s f)`` equals ``ker f`` because ``f s = id``; the kernel basis
    of the resolution is reused.  The block matrix ``(s | basis)`` is checked
    to be unimodular, which certifies ``M (+) N = P`` equivariantly.
    """
    if res.section is None:
        raise MissingSplitting("resolution carries no section")
    s, f, K = res.section.matrix, res.f.matrix, res.iota.matrix
    if not (f @ s).is_identity():
        raise MissingSplitting("stored section does not satisfy f s = id")
    # (id - s f) K = K - s (f K) = K, since f K = 0
    if not (f @ K).is_zero():
        raise ResolutionError("kernel basis is not killed by f")
    block = s.hstack(K)
    ok = is_unimodular(block)
    idem = idempotent_check(s, f) if check_idempotent else True
    N = res.C
    return Complement(GLattice(N.group, N.rank, action_fn=N.action, name="N"), K, ok, idem)


@dataclass
class PermutationVerdict:
    status: str
    descriptor: PermutationDescriptor | None = None
    witness: IntegerMatrix | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status == "yes"


def _orbit_table(G: FiniteMatrixGroup) -> list[list[int]]:
    """``table[h][k]`` = number of orbits of class ``k`` on ``G/H_h``."""
    classes = G.subgroup_classes
    out = []
    for H in classes:
        _, perms = coset_action(G, H)
        out.append([len(_orbit_sums(perms, K.generators, H.index)) for K in classes])
    return out


def _candidates(classes, orbit_table, target, rank):
    """Multisets (non-decreasing class indices) matching the invariant ranks."""
    nparts = target[-1]  # the whole group is the last class
    ncls = len(classes)
    out: list[list[int]] = []

    def rec(start, chosen, left_rank, sums):
        if len(out) > CANDIDATE_BUDGET:
            return
        if len(chosen) == nparts:
            if left_rank == 0 and sums == target:
                out.append(list(chosen))
            return
        for h in range(start, ncls):
            idx = classes[h].index
            if idx > left_rank:
                continue
            new = [a + b for a, b in zip(sums, orbit_table[h])]
            if any(a > b for a, b in zip(new, target)):
                continue
            chosen.append(h)
            rec(h, chosen, left_rank - idx, new)
            chosen.pop()

    rec(0, [], rank, [0] * len(target))
    return out


def is_permutation(M: GLattice, bound: int = DEFAULT_ISO_BOUND) -> PermutationVerdict:
    """Recognize ``M`` as a permutation lattice.

    Candidates are multisets of subgroup classes whose coset lattices have the
    same rank and the same invariant ranks on every class as ``M``; each is
    then tested with :func:`equivariant_isomorphic` at ``bound``.
    """
    G = M.group
    classes = G.subgroup_classes
    target = [invariant_rank(M, K) for K in classes]
    cands = _candidates(classes, _orbit_table(G), target, M.rank)
    if not cands:
        return PermutationVerdict("no", reason="no sum of coset lattices has the invariant ranks of this lattice")
    exhausted = len(cands) > CANDIDATE_BUDGET
    for cand in cands[:CANDIDATE_BUDGET]:
        desc = PermutationDescriptor(tuple(classes[h] for h in cand))
        P = permutation_lattice(G, desc)
        v: IsoVerdict = equivariant_isomorphic(P, M, bound)
        if v.status == "yes":
            return PermutationVerdict("yes", desc, v.witness)
    why = f"{len(cands)} candidate descriptor(s) pass the rank screens but no witness was found at bound {bound}"
    if exhausted:
        why = f"candidate budget of {CANDIDATE_BUDGET} exhausted"
    return PermutationVerdict("unknown", reason=why)
