import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galmod.groups import enumerate_group
from galmod.lattice import GLattice, GMap, equivariant_isomorphic, restrict_action
from galmod.linalg import IntegerMatrix, kernel_basis, hermite_columns
from galmod.resolutions import (
    MissingSplitting,
    NotSurjective,
    PermutationDescriptor,
    Resolution,
    basis_labels,
    coflasque_resolution,
    complement_summand,
    idempotent_check,
    is_invertible,
    is_permutation,
    permutation_lattice,
    retraction_of_inclusion,
    section_of_surjection,
)

from lattice_gen import random_lattice, random_permutation_group


def sign_lattice():
    return GLattice.natural(enumerate_group([("g", [[-1]])]))


def check_resolution(res: Resolution):
    checks = res.verify()
    assert all(checks.values()), checks
    f, i = res.f.matrix, res.iota.matrix
    if res.P.rank > 200:
        # verify() already certifies exactness; skip the costly second normal form
        return
    if i.ncols:
        assert hermite_columns(kernel_basis(f)) == hermite_columns(i)
    else:
        assert kernel_basis(f).ncols == 0


def test_permutation_lattice_shapes(dp5_group):
    G = dp5_group
    whole, trivial = G.subgroup_classes[-1], G.subgroup_classes[0]
    P = permutation_lattice(G, PermutationDescriptor((whole,)))
    assert P.rank == 1 and all(P.action(g).is_identity() for g in G.generator_indices)
    R = permutation_lattice(G, PermutationDescriptor((trivial,)))
    assert R.rank == 120
    P6 = permutation_lattice(G, PermutationDescriptor((whole, G.subgroup_classes[16])))
    assert P6.rank == 6
    P6.validate()
    assert basis_labels(P6)[0].startswith("H18#0")


def test_trivial_lattice_resolution():
    G = enumerate_group([("a", [[0, 1], [1, 0]])])
    T = GLattice.trivial(G, 1)
    res = coflasque_resolution(T, prune=True)
    assert res.P.rank == 1 and res.C.rank == 0
    check_resolution(res)


def test_sign_lattice_resolution_and_no_splitting():
    M = sign_lattice()
    res = coflasque_resolution(M)
    check_resolution(res)
    # only the trivial subgroup has nonzero invariants, so P is the regular lattice
    assert res.P.rank == 2 and res.C.rank == 1
    assert all(res.C.action(g).is_identity() for g in range(2))
    assert section_of_surjection(res.f) is None
    assert retraction_of_inclusion(res.iota) is None
    inv = is_invertible(M)
    assert not inv.invertible
    assert list(inv.witness.invariant_factors) == [2]
    with pytest.raises(MissingSplitting):
        complement_summand(res)


def test_section_of_isomorphism():
    G = enumerate_group([("a", [[0, 1], [1, 0]])])
    M = GLattice.natural(G)
    s = section_of_surjection(GMap(M, M, IntegerMatrix.identity(2)))
    assert s.matrix.is_identity()


def test_not_surjective_rejected():
    G = enumerate_group([("a", [[1]])])
    M = GLattice.natural(G)
    with pytest.raises(NotSurjective):
        section_of_surjection(GMap(M, M, IntegerMatrix([[2]])))


def test_dp5_full_resolution(dp5_lattice):
    res = coflasque_resolution(dp5_lattice)
    assert res.P.rank == res.C.rank + 5
    check_resolution(res)
    inv = is_invertible(dp5_lattice, res)
    assert inv.invertible
    comp = complement_summand(inv.resolution)
    assert comp.block_unimodular and comp.idempotent


def test_dp5_pruned_resolution_has_rank_six(dp5_lattice, dp5_group):
    res = coflasque_resolution(dp5_lattice, prune=True)
    check_resolution(res)
    assert sorted(H.index for H in res.descriptor.parts) == [1, 5]
    assert res.C.rank == 1


def test_permutation_lattice_is_invertible_with_zero_complement():
    rng = random.Random(7)
    G = random_permutation_group(rng)
    desc = PermutationDescriptor((G.subgroup_classes[0], G.subgroup_classes[-1]))
    P = permutation_lattice(G, desc)
    assert is_invertible(P).invertible
    v = is_permutation(P)
    assert v.status == "yes"
    assert sorted(H.index for H in v.descriptor.parts) == sorted(H.index for H in desc.parts)


def test_is_permutation_verdicts(dp5_group):
    assert is_permutation(sign_lattice()).status == "no"
    T = GLattice.trivial(dp5_group, 3)
    v = is_permutation(T)
    assert v.status == "yes"
    assert [H.order for H in v.descriptor.parts] == [120, 120, 120]


def test_is_permutation_witness_is_isomorphism():
    B = IntegerMatrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    Binv = IntegerMatrix([[1, -1, 0], [0, 1, 0], [0, 0, 1]])
    cyc = IntegerMatrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    G = enumerate_group([("r", B @ cyc @ Binv)])
    M = GLattice.natural(G)
    v = is_permutation(M)
    assert v.status == "yes"
    P = permutation_lattice(G, v.descriptor)
    assert GMap(P, M, v.witness).is_equivariant()
    assert equivariant_isomorphic(P, M).status == "yes"


def test_idempotent_check_detects_failure():
    s = IntegerMatrix([[1], [0]])
    f = IntegerMatrix([[1, 1]])
    assert idempotent_check(s, f)
    assert not idempotent_check(IntegerMatrix([[2], [0]]), f)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_resolutions_are_valid(seed):
    M = random_lattice(random.Random(seed))
    res = coflasque_resolution(M)
    check_resolution(res)
    inv = is_invertible(M, res)
    if inv.invertible:
        comp = complement_summand(inv.resolution)
        assert comp.block_unimodular and comp.idempotent
        assert comp.lattice.rank + M.rank == res.P.rank
    else:
        assert inv.witness.reason


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_pruned_and_full_resolutions_agree_on_invertibility(seed):
    M = random_lattice(random.Random(seed))
    full = is_invertible(M).invertible
    pruned = coflasque_resolution(M, prune=True)
    check_resolution(pruned)
    assert is_invertible(M, pruned).invertible == full


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_invertibility_is_restriction_stable(seed):
    M = random_lattice(random.Random(seed))
    if not is_invertible(M).invertible:
        return
    for H in M.group.subgroup_classes:
        assert is_invertible(restrict_action(M, H)).invertible


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_section_and_retraction_exist_together(seed):
    M = random_lattice(random.Random(seed))
    res = coflasque_resolution(M, prune=True)
    s = section_of_surjection(res.f)
    r = retraction_of_inclusion(res.iota)
    assert (s is None) == (r is None)
