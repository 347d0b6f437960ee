"""Finite groups of unimodular integer matrices.

A group is enumerated once, breadth first, from named generators.  Elements are
addressed by their index in that enumeration; index 0 is the identity.  Each
element remembers the shortlex-least word in the generators (sorted by name)
that produces it, which is what lets derived lattices extend a generator action
multiplicatively.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .linalg import IntegerMatrix, determinant

DEFAULT_ELEMENT_CAP = 100_000


class GroupError(ValueError):
    pass


class NonUnimodularGenerator(GroupError):
    def __init__(self, name: str, det: int | None = None):
        self.name = name
        if det is None:
            msg = f"generator {name!r} is not a square matrix of the common rank"
        else:
            msg = f"generator {name!r} is not unimodular (determinant {det})"
        super().__init__(msg)


class CapExceeded(RuntimeError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"group closure exceeds element cap {cap}; the action image is too large")


class FiniteMatrixGroup:
    """Closure of a list of named unimodular matrices under multiplication."""

    def __init__(self, rank: int, names: Sequence[str], generators: Sequence[IntegerMatrix],
                 elements: list[IntegerMatrix], words: list[tuple[int, ...]],
                 right_mult: list[list[int]], element_cap: int, parents: list[int]):
        self.rank = rank
        self.generator_names = tuple(names)
        self.generators = tuple(generators)
        self.elements = tuple(elements)
        self.words = tuple(words)
        self.element_cap = element_cap
        # right_mult[i][j] = index of elements[i] @ generators[j]
        self._right = right_mult
        self._parent = parents
        self._index = {m.key(): i for i, m in enumerate(elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        gens = ", ".join(self.generator_names)
        return f"FiniteMatrixGroup(rank={self.rank}, order={self.order}, generators=[{gens}])"

    def index_of(self, matrix: IntegerMatrix) -> int | None:
        return self._index.get(matrix.key())

    @cached_property
    def generator_indices(self) -> tuple[int, ...]:
        return tuple(self._index[g.key()] for g in self.generators)

    def right_multiply(self, i: int, gen: int) -> int:
        return self._right[i][gen]

    def word_name(self, i: int) -> str:
        w = self.words[i]
        if not w:
            return "e"
        return "*".join(self.generator_names[j] for j in w)

    @cached_property
    def table(self) -> list[list[int]]:
        """Full multiplication table, ``table[i][j]`` = index of ``g_i g_j``."""
        n = self.order
        right = self._right
        out = []
        for i in range(n):
            row = [0] * n
            # walk the BFS tree: elements[j] = elements[parent(j)] * gen
            row[0] = i
            for j in range(1, n):
                row[j] = right[row[self._parent[j]]][self.words[j][-1]]
            out.append(row)
        return out

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    @cached_property
    def inverses(self) -> tuple[int, ...]:
        t = self.table
        return tuple(row.index(0) for row in t)

    def inverse(self, i: int) -> int:
        return self.inverses[i]

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = self.table[x][i]
            k += 1
        return k

    def closure(self, gens: Sequence[int]) -> frozenset[int]:
        """Member set of the subgroup generated by ``gens`` (element indices)."""
        t = self.table
        seen = {0}
        frontier = [0]
        gens = [g for g in gens if g != 0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = t[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def subgroup(self, gens: Sequence[int]) -> "Subgroup":
        members = self.closure(gens)
        return Subgroup(self, tuple(sorted(members)), tuple(g for g in gens if g != 0))

    def subgroup_from_names(self, names: Sequence[str]) -> "Subgroup":
        idx = []
        for n in names:
            if n not in self.generator_names:
                raise GroupError(f"unknown generator {n!r}; known: {', '.join(self.generator_names)}")
            idx.append(self.generator_indices[self.generator_names.index(n)])
        return self.subgroup(idx)

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)), self.generator_indices)

    def trivial(self) -> "Subgroup":
        return Subgroup(self, (0,), ())

    @cached_property
    def subgroup_classes(self) -> list["Subgroup"]:
        return _subgroup_classes(self)


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteMatrixGroup
    members: tuple[int, ...]
    gens: tuple[int, ...] | None = None
    class_size: int | None = field(default=None, compare=False)
    label: str | None = field(default=None, compare=False)

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set (element indices of the parent)."""
        if self.gens is not None:
            return self.gens
        gens: list[int] = []
        span = frozenset([0])
        for x in self.members:
            if x not in span:
                gens.append(x)
                span = self.parent.closure(gens)
            if len(span) == self.order:
                break
        return tuple(gens)

    def __contains__(self, i: int) -> bool:
        return i in self.member_set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other.members == self.members

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    @property
    def name(self) -> str:
        return self.label or f"<{', '.join(self.parent.word_name(g) for g in self.generators) or 'e'}>"

    def __repr__(self) -> str:
        return f"Subgroup({self.name}, order={self.order})"


def enumerate_group(generators: Sequence[tuple[str, IntegerMatrix]] | dict,
                    element_cap: int = DEFAULT_ELEMENT_CAP) -> FiniteMatrixGroup:
    """Breadth-first closure of named generators.

    Elements come out identity first, then by word length, then
    lexicographically by generator name.  Raises
    :class:`NonUnimodularGenerator` or :class:`CapExceeded`.
    """
    items = list(generators.items()) if isinstance(generators, dict) else list(generators)
    names = [n for n, _ in items]
    if len(set(names)) != len(names):
        raise GroupError("duplicate generator names")
    mats = [m if isinstance(m, IntegerMatrix) else IntegerMatrix(m) for _, m in items]
    if mats:
        n = mats[0].nrows
    else:
        raise GroupError("at least one generator is required (use the identity for the trivial group)")
    for name, m in zip(names, mats):
        if m.shape != (n, n):
            raise NonUnimodularGenerator(name)
        d = determinant(m)
        if d not in (1, -1):
            raise NonUnimodularGenerator(name, d)
    # BFS in name order; ``right`` stays indexed by the caller's generator order
    order = sorted(range(len(mats)), key=lambda j: names[j])
    ident = IntegerMatrix.identity(n)
    elements = [ident]
    words: list[tuple[int, ...]] = [()]
    parents = [0]
    index = {ident.key(): 0}
    right: list[list[int]] = []
    head = 0
    while head < len(elements):
        x = elements[head]
        row = [0] * len(mats)
        for j in order:
            y = x @ mats[j]
            k = y.key()
            idx = index.get(k)
            if idx is None:
                if len(elements) >= element_cap:
                    raise CapExceeded(element_cap)
                idx = len(elements)
                index[k] = idx
                elements.append(y)
                words.append(words[head] + (j,))
                parents.append(head)
            row[j] = idx
        right.append(row)
        head += 1
    return FiniteMatrixGroup(n, names, mats, elements, words, right, element_cap, parents)


def _subgroup_classes(G: FiniteMatrixGroup) -> list[Subgroup]:
    """One representative per conjugacy class of subgroups.

    Cyclic subgroups first, then joins with cyclic subgroups until nothing new
    appears; every subgroup is generated by its cyclic subgroups so this is
    complete.  Representatives are the conjugate with the smallest sorted
    member list; classes are ordered by order, then member list.
    """
    t = G.table
    n = G.order
    cyclic: dict[frozenset, int] = {}
    for g in range(n):
        c = G.closure([g])
        if c not in cyclic:
            cyclic[c] = g
    all_subs: dict[frozenset, tuple[int, ...]] = {c: ((g,) if g else ()) for c, g in cyclic.items()}
    queue = list(all_subs)
    cyc_items = list(cyclic.items())
    while queue:
        nxt = []
        for A in queue:
            gens_a = all_subs[A]
            for C, g in cyc_items:
                if g in A:
                    continue
                J = G.closure(gens_a + (g,))
                if J not in all_subs:
                    all_subs[J] = gens_a + (g,)
                    nxt.append(J)
        queue = nxt

    inv = G.inverses
    conj = [[t[t[g][x]][inv[g]] for x in range(n)] for g in range(n)]
    seen: set[frozenset] = set()
    classes = []
    for S in sorted(all_subs, key=lambda s: (len(s), sorted(s))):
        if S in seen:
            continue
        orbit = {frozenset(conj[g][x] for x in S) for g in range(n)}
        seen |= orbit
        rep = min(orbit, key=lambda s: sorted(s))
        gens = all_subs.get(rep)
        classes.append((rep, gens, len(orbit)))
    classes.sort(key=lambda c: (len(c[0]), sorted(c[0])))
    out = []
    for k, (rep, gens, size) in enumerate(classes):
        out.append(Subgroup(G, tuple(sorted(rep)), gens, class_size=size, label=f"H{k}"))
    return out


def subgroup_classes(G: FiniteMatrixGroup) -> list[Subgroup]:
    return G.subgroup_classes


def class_of(H: Subgroup) -> Subgroup:
    """The catalog representative conjugate to ``H``."""
    G = H.parent
    t, inv = G.table, G.inverses
    target = H.member_set
    for rep in G.subgroup_classes:
        if rep.order != H.order:
            continue
        for g in range(G.order):
            if frozenset(t[t[g][x]][inv[g]] for x in rep.members) == target:
                return rep
    raise GroupError("subgroup not found in the class catalog")
