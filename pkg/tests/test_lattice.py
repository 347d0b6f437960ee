import random

import pytest

from galmod.groups import enumerate_group
from galmod.lattice import (
    GLattice,
    GMap,
    LatticeError,
    _hom_from_permutation,
    _hom_generic,
    _hom_into_permutation,
    equivariant_isomorphic,
    hom_lattice,
    invariant_rank,
    invariant_sublattice,
    restrict_action,
)
from galmod.linalg import IntegerMatrix, hermite_columns
from galmod.resolutions import PermutationDescriptor, permutation_lattice

from lattice_gen import random_lattice, random_permutation_group


def span_key(mats, n, m):
    if not mats:
        return None
    cols = [[T[a, b] for a in range(n) for b in range(m)] for T in mats]
    return hermite_columns(IntegerMatrix.from_columns(cols, n * m))


def sign_lattice():
    return GLattice.natural(enumerate_group([("g", [[-1]])]))


def test_validate_catches_non_homomorphism():
    G = enumerate_group([("a", [[0, 1], [1, 0]])])
    bad = GLattice(G, 1, actions=[IntegerMatrix([[1]]), IntegerMatrix([[2]])])
    with pytest.raises(LatticeError):
        bad.validate()


def test_generator_images_extend_along_words(dp5_group):
    imgs = list(dp5_group.generators)
    M = GLattice(dp5_group, 5, generator_images=imgs)
    for i in range(dp5_group.order):
        assert M.action(i) == dp5_group.elements[i]
    M.validate()


def test_gmap_shape_checked():
    M = sign_lattice()
    with pytest.raises(LatticeError):
        GMap(M, M, IntegerMatrix.identity(2))


@pytest.mark.parametrize("seed", range(15))
def test_invariants_permutation_vs_kernel(seed):
    rng = random.Random(seed)
    G = random_permutation_group(rng, max_order=24)
    classes = G.subgroup_classes
    desc = PermutationDescriptor(tuple(rng.choice(classes) for _ in range(rng.randint(1, 3))))
    P = permutation_lattice(G, desc)
    # same action without the permutation shortcut
    Q = GLattice(G, P.rank, action_fn=P.action)
    for H in classes:
        assert invariant_sublattice(P, H) == invariant_sublattice(Q, H)
        assert invariant_rank(P, H) == invariant_rank(Q, H)


@pytest.mark.parametrize("seed", range(20))
def test_hom_fast_paths_agree_with_generic(seed):
    rng = random.Random(100 + seed)
    M = random_lattice(rng, max_order=12, max_rank=3)
    G = M.group
    desc = PermutationDescriptor(tuple(rng.choice(G.subgroup_classes) for _ in range(rng.randint(1, 2))))
    P = permutation_lattice(G, desc)
    Pg = GLattice(G, P.rank, action_fn=P.action)
    into = _hom_into_permutation(M, P)
    out = _hom_from_permutation(P, M)
    assert span_key(into, P.rank, M.rank) == span_key(_hom_generic(M, Pg), P.rank, M.rank)
    assert span_key(out, M.rank, P.rank) == span_key(_hom_generic(Pg, M), M.rank, P.rank)
    for T in into:
        assert GMap(M, P, T).is_equivariant()
    for T in out:
        assert GMap(P, M, T).is_equivariant()


def test_hom_generic_is_saturated():
    M = sign_lattice()
    T = GLattice.trivial(M.group, 1)
    assert hom_lattice(M, T) == []
    assert [B.rows for B in hom_lattice(M, M)] == [[[1]]]


def test_invariant_sublattice_of_sign_lattice():
    M = sign_lattice()
    H = M.group.whole()
    assert invariant_sublattice(M, H).ncols == 0
    assert invariant_rank(M, M.group.trivial()) == 1


def test_restrict_action_keeps_matrices(dp5_lattice, dp5_group):
    H = dp5_group.subgroup_from_names(["s1", "s3"])
    R = restrict_action(dp5_lattice, H)
    assert R.group.order == 4
    for i in range(R.group.order):
        assert R.action(i) == dp5_group.elements[R.parent_map[i]]


def test_equivariant_isomorphic_yes_and_no():
    G = enumerate_group([("a", [[0, 1], [1, 0]])])
    M = GLattice.natural(G)
    P = permutation_lattice(G, PermutationDescriptor((G.subgroup_classes[0],)))
    v = equivariant_isomorphic(P, M)
    assert v.status == "yes"
    assert GMap(P, M, v.witness).is_equivariant()
    Z2 = GLattice.trivial(G, 2)
    assert equivariant_isomorphic(Z2, M).status == "no"


def test_equivariant_isomorphic_needs_search():
    # conjugating the regular C2 lattice by a shear keeps it a permutation lattice
    B = IntegerMatrix([[1, 2], [0, 1]])
    Binv = IntegerMatrix([[1, -2], [0, 1]])
    swap = IntegerMatrix([[0, 1], [1, 0]])
    G = enumerate_group([("a", B @ swap @ Binv)])
    M = GLattice.natural(G)
    P = permutation_lattice(G, PermutationDescriptor((G.subgroup_classes[0],)))
    v = equivariant_isomorphic(P, M)
    assert v.status == "yes"
    assert GMap(P, M, v.witness).is_equivariant()


def test_different_groups_rejected():
    A, B = sign_lattice(), sign_lattice()
    with pytest.raises(LatticeError):
        hom_lattice(A, B)


def test_weyl_invariants_are_the_canonical_line(dp5_lattice, dp5_group):
    # only multiples of the canonical class are fixed by the whole Weyl group
    K = invariant_sublattice(dp5_lattice, dp5_group.whole())
    assert K.columns() in ([[3, 1, 1, 1, 1]], [[-3, -1, -1, -1, -1]])
