"""Exact computations with Galois lattices: permutation and invertible
modules, coflasque resolutions, first cohomology, and the resulting
zero-dimensional motive reports."""

from .cohomology import FiniteAbelianGroup, h1, h1_cyclic_oracle, is_coflabby
from .delpezzo import (
    NotARoot,
    PicardLattice,
    UnsupportedDegree,
    explicit_resolution_dp5,
    h_vectors_dp5,
    intersection,
    picard_preset,
    reflection_matrix,
    roots,
    simple_reflections_dp5,
    weyl_group,
)
from .groups import (
    CapExceeded,
    FiniteMatrixGroup,
    NonUnimodularGenerator,
    Subgroup,
    enumerate_group,
    subgroup_classes,
)
from .lattice import GLattice, GMap, equivariant_isomorphic, hom_lattice, invariant_sublattice, restrict_action
from .linalg import (
    DimensionMismatch,
    IntegerMatrix,
    Obstruction,
    is_unimodular,
    kernel_basis,
    smith_normal_form,
    solve_linear_integer,
)
from .motive import (
    DecompositionReport,
    EtaleAlgebraDescriptor,
    MotiveExpression,
    MotiveTerm,
    decompose_motive,
    dp5_motive,
    etale_from_descriptor,
    parse,
    render,
)
from .resolutions import (
    PermutationDescriptor,
    Resolution,
    coflasque_resolution,
    complement_summand,
    is_invertible,
    is_permutation,
    permutation_lattice,
    retraction_of_inclusion,
    section_of_surjection,
)

__version__ = "0.1.0"
