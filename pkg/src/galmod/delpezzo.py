"""Picard lattices of Del Pezzo surfaces of degree 5 and 6.

Coordinates: a vector ``(a, b1, ..., br)`` stands for ``a*l0 - sum bi*li``.
In these coordinates the pairing is still ``diag(1, -1, ..., -1)``, the
simple reflections of degree 5 are the coordinate formulas verbatim, and the
anticanonical-type class ``-3 l0 + sum li`` is ``(-3, -1, ..., -1)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .groups import DEFAULT_ELEMENT_CAP, FiniteMatrixGroup, Subgroup, class_of, enumerate_group
from .lattice import GLattice, GMap, _orbit_sums, restrict_action
from .linalg import IntegerMatrix, kernel_basis
from .resolutions import (
    CoflasquenessViolated,
    PermutationDescriptor,
    Resolution,
    kernel_h1_via_sequence,
)
from .cohomology import is_coflabby


class UnsupportedDegree(ValueError):
    pass


class NotARoot(ValueError):
    pass


@dataclass(frozen=True)
class PicardLattice:
    degree: int
    rank: int
    basis_names: tuple[str, ...]
    pairing: IntegerMatrix
    canonical: tuple[int, ...]

    def vector(self, **coeffs: int) -> list[int]:
        """Coordinates of ``sum c_i * l_i`` given as ``l0=..., l1=...``."""
        v = [0] * self.rank
        for name, c in coeffs.items():
            i = self.basis_names.index(name)
            v[i] = c if i == 0 else -c
        return v


def picard_preset(degree: int) -> PicardLattice:
    if degree not in (5, 6):
        raise UnsupportedDegree(f"only degrees 5 and 6 are supported, got {degree}")
    r = 9 - degree
    names = tuple(f"l{i}" for i in range(r + 1))
    pairing = IntegerMatrix.diagonal([1] + [-1] * r)
    return PicardLattice(degree, r + 1, names, pairing, tuple([-3] + [-1] * r))


def intersection(P: PicardLattice, u, v) -> int:
    if len(u) != P.rank or len(v) != P.rank:
        raise ValueError(f"vectors must have length {P.rank}")
    Jv = P.pairing @ list(v)
    return sum(a * b for a, b in zip(u, Jv))


def roots(P: PicardLattice) -> list[list[int]]:
    """All ``x`` with ``(K, x) = 0`` and ``(x, x) = -2``, lexicographically.

    Orthogonality to ``K`` gives ``sum bi = 3a``, so Cauchy-Schwarz bounds
    ``a^2 (9/r - 1) <= 2`` and ``sum bi^2 = a^2 + 2``: a finite box.
    """
    r = P.rank - 1
    if 9 <= r:
        raise UnsupportedDegree("pairing is not negative definite on the orthogonal complement")
    amax = math.isqrt(int(2 * r // (9 - r)))
    bmax = math.isqrt(amax * amax + 2)
    out = []
    for a in range(-amax, amax + 1):
        for bs in itertools.product(range(-bmax, bmax + 1), repeat=r):
            x = [a, *bs]
            if intersection(P, list(P.canonical), x) == 0 and intersection(P, x, x) == -2:
                out.append(x)
    return out


def reflection_matrix(P: PicardLattice, root) -> IntegerMatrix:
    """Matrix of ``x -> x + (x, root) root``."""
    root = list(root)
    if intersection(P, root, root) != -2:
        raise NotARoot(f"{root} does not have self-intersection -2")
    Jr = P.pairing @ root
    rows = [[int(i == j) + root[i] * Jr[j] for j in range(P.rank)] for i in range(P.rank)]
    return IntegerMatrix(rows)


def simple_reflections_dp5() -> list[tuple[str, IntegerMatrix]]:
    """sigma_1..sigma_3 swap ``b_i, b_{i+1}``; sigma_4 is the quadratic-transformation formula."""
    out = []
    for i in range(1, 4):
        m = [[int(r == c) for c in range(5)] for r in range(5)]
        m[i][i] = m[i + 1][i + 1] = 0
        m[i][i + 1] = m[i + 1][i] = 1
        out.append((f"s{i}", IntegerMatrix(m)))
    # (a, b1, b2, b3, b4) -> (2a-b1-b2-b3, a-b2-b3, a-b1-b3, a-b1-b2, b4)
    out.append(("s4", IntegerMatrix([
        [2, -1, -1, -1, 0],
        [1, 0, -1, -1, 0],
        [1, -1, 0, -1, 0],
        [1, -1, -1, 0, 0],
        [0, 0, 0, 0, 1],
    ])))
    return out


def simple_roots(P: PicardLattice) -> list[tuple[str, list[int]]]:
    if P.degree == 5:
        return [
            ("s1", P.vector(l1=1, l2=-1)),
            ("s2", P.vector(l2=1, l3=-1)),
            ("s3", P.vector(l3=1, l4=-1)),
            ("s4", P.vector(l0=1, l1=-1, l2=-1, l3=-1)),
        ]
    return [
        ("s1", P.vector(l1=1, l2=-1)),
        ("s2", P.vector(l2=1, l3=-1)),
        ("s4", P.vector(l0=1, l1=-1, l2=-1, l3=-1)),
    ]


def weyl_group(P: PicardLattice, element_cap: int = DEFAULT_ELEMENT_CAP) -> FiniteMatrixGroup:
    if P.degree == 5:
        gens = simple_reflections_dp5()
    else:
        gens = [(name, reflection_matrix(P, r)) for name, r in simple_roots(P)]
    return enumerate_group(gens, element_cap=element_cap)


def picard_glattice(P: PicardLattice, element_cap: int = DEFAULT_ELEMENT_CAP) -> GLattice:
    """The Picard lattice with the full Weyl group acting through its own matrices."""
    return GLattice.natural(weyl_group(P, element_cap), name=f"Pic(dP{P.degree})")


def h_vectors_dp5() -> list[list[int]]:
    """``h_i = l0 - l_i`` for i = 1..4 and ``h_5 = 2 l0 - l1 - l2 - l3 - l4``."""
    P = picard_preset(5)
    hs = [P.vector(l0=1, **{f"l{i}": -1}) for i in range(1, 5)]
    hs.append(P.vector(l0=2, l1=-1, l2=-1, l3=-1, l4=-1))
    return hs


# basis of the rank-6 permutation lattice: e, e1, ..., e5
DP5_P_LABELS = ("e", "e1", "e2", "e3", "e4", "e5")
DP5_KERNEL_GENERATOR = (2, 1, 1, 1, 1, 1)
DP5_RETRACTION = (-2, 1, 1, 1, 1, 1)


def _dp5_point_permutations(G: FiniteMatrixGroup) -> list[list[int]]:
    """Permutation of ``(e, e1..e5)`` for each Weyl element: sigma_i swaps e_i, e_{i+1}."""
    gen_perm = {}
    for name in G.generator_names:
        i = int(name[1:])
        p = list(range(6))
        p[i], p[i + 1] = p[i + 1], p[i]
        gen_perm[G.generator_names.index(name)] = p
    perms = []
    for w in G.words:
        p = list(range(6))
        for j in w:
            q = gen_perm[j]
            p = [p[q[x]] for x in range(6)]
        perms.append(p)
    return perms


def explicit_resolution_dp5(W: Subgroup | None = None) -> Resolution:
    """The hand-built resolution ``0 -> Z -> Ze + sum Ze_i -> Pic -> 0``.

    ``f(e) = K`` and ``f(e_i) = h_i``; the kernel is spanned by
    ``x = 2e + e1 + ... + e5`` and ``e -> -2, e_i -> 1`` is a retraction.
    With ``W`` (a subgroup of the degree-5 Weyl group) everything is
    restricted to ``W``.
    """
    pic = picard_preset(5)
    if W is None:
        M = picard_glattice(pic)
        perms = _dp5_point_permutations(M.group)
    else:
        full = W.parent
        if full.generator_names != ("s1", "s2", "s3", "s4") or full.order != 120:
            raise ValueError("W must be a subgroup of the degree-5 Weyl group")
        all_perms = _dp5_point_permutations(full)
        M = restrict_action(GLattice.natural(full, name="Pic(dP5)"), W)
        perms = [all_perms[i] for i in M.parent_map]
    G = M.group
    P = GLattice.from_permutations(G, perms, name="P")
    P.descriptor = _descriptor_from_orbits(P)
    f = IntegerMatrix.from_columns([list(pic.canonical)] + h_vectors_dp5(), 5)
    C = GLattice.trivial(G, 1, name="C")
    iota = GMap(C, P, IntegerMatrix.from_columns([list(DP5_KERNEL_GENERATOR)], 6))
    fmap = GMap(P, M, f)
    r = GMap(P, C, IntegerMatrix([list(DP5_RETRACTION)]))
    cert = [(H, kernel_h1_via_sequence(M, P, f, H)) for H in G.subgroup_classes]
    ok, _ = is_coflabby(C)
    if not ok or any(not g.is_trivial() for _, g in cert):
        raise CoflasquenessViolated("kernel of the explicit resolution has nonzero H^1")
    return Resolution(M, P, C, iota, fmap, retraction=r, coflabby_certificate=cert,
                      coflabby_method="exact sequence + cocycles")


def _descriptor_from_orbits(P: GLattice) -> PermutationDescriptor:
    """One part per orbit of the permuted basis: the class of a point stabilizer."""
    G = P.group
    parts = []
    for orbit in _orbit_sums(P.permutations, G.generator_indices, P.rank):
        x0 = orbit[0]
        stab = [g for g in range(G.order) if P.permutations[g][x0] == x0]
        parts.append(class_of(G.subgroup(stab)))
    # catalog order, so equal parts are adjacent; the basis order is not implied
    catalog = {H: k for k, H in enumerate(G.subgroup_classes)}
    return PermutationDescriptor(tuple(sorted(parts, key=catalog.__getitem__)))


def dp5_orbit_sizes(W: Subgroup) -> list[int]:
    """Orbit sizes of ``W`` on ``{e1, ..., e5}``, largest first."""
    perms = _dp5_point_permutations(W.parent)
    shifted = [[p[x + 1] - 1 for x in range(5)] for p in perms]
    orbits = _orbit_sums(shifted, W.generators, 5)
    return sorted((len(o) for o in orbits), reverse=True)


def kernel_of_explicit_f() -> IntegerMatrix:
    pic = picard_preset(5)
    f = IntegerMatrix.from_columns([list(pic.canonical)] + h_vectors_dp5(), 5)
    return kernel_basis(f)
