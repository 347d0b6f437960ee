import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galmod.linalg import (
    DimensionMismatch,
    IntegerMatrix,
    determinant,
    hermite_columns,
    integer_obstruction,
    invariant_factors,
    is_surjective,
    is_unimodular,
    kernel_basis,
    kernel_with_coordinates,
    particular_solution,
    rank,
    smith_normal_form,
    solve_linear_integer,
    solve_matrix,
)


def matrices(max_dim=5, lo=-9, hi=9):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def minors_gcd(rows, k):
    """gcd of all k x k minors, by cofactor expansion."""

    def det(m):
        if len(m) == 1:
            return m[0][0]
        return sum((-1) ** j * m[0][j] * det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))

    g = 0
    for rs in itertools.combinations(range(len(rows)), k):
        for cs in itertools.combinations(range(len(rows[0])), k):
            g = math.gcd(g, det([[rows[i][j] for j in cs] for i in rs]))
    return g


def determinantal_factors(rows):
    """Invariant factors from determinantal divisors d_k = gcd of k-minors."""
    out, prev = [], 1
    for k in range(1, min(len(rows), len(rows[0])) + 1):
        d = minors_gcd(rows, k)
        if d == 0:
            break
        out.append(d // prev)
        prev = d
    return out


# --- smith normal form -------------------------------------------------------

def test_snf_identity():
    S, U, V = smith_normal_form(IntegerMatrix.identity(3))
    assert S.is_identity()
    assert U @ IntegerMatrix.identity(3) @ V == S


def test_snf_two_by_two_example():
    A = IntegerMatrix([[2, 4], [6, 8]])
    S, U, V = smith_normal_form(A)
    assert S == IntegerMatrix.diagonal([2, 4])
    assert U @ A @ V == S
    # oracle: gcd of entries 2, |det| 8
    assert determinantal_factors(A.rows) == [2, 4]


def test_snf_zero():
    S, _, _ = smith_normal_form(IntegerMatrix([[0]]))
    assert S == IntegerMatrix([[0]])


@settings(max_examples=150, deadline=None)
@given(matrices(max_dim=4))
def test_snf_matches_determinantal_divisors(rows):
    A = IntegerMatrix(rows)
    S, U, V = smith_normal_form(A)
    assert U @ A @ V == S
    assert is_unimodular(U) and is_unimodular(V)
    d = [S[i, i] for i in range(min(S.shape)) if S[i, i]]
    assert d == determinantal_factors(rows)
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    for i in range(S.nrows):
        for j in range(S.ncols):
            if i != j:
                assert S[i, j] == 0


def test_invariant_factors_of_zero_matrix():
    assert invariant_factors(IntegerMatrix.zeros(2, 3)) == []


# --- determinant / rank --------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_determinant_matches_leibniz(rows):
    n = len(rows)
    leibniz = 0
    for p in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= rows[i][p[i]]
        leibniz += term
    assert determinant(IntegerMatrix(rows)) == leibniz


def test_is_unimodular():
    assert is_unimodular(IntegerMatrix([[2, 1], [1, 1]]))
    assert not is_unimodular(IntegerMatrix([[2, 0], [0, 1]]))
    with pytest.raises(DimensionMismatch):
        is_unimodular(IntegerMatrix([[1, 0]]))


def test_rank_large_entries_are_exact():
    big = 10 ** 40
    A = IntegerMatrix([[big, big + 1], [big - 1, big]])
    assert determinant(A) == 1
    assert rank(A) == 2


# --- kernels -------------------------------------------------------------------

def test_kernel_examples():
    assert kernel_basis(IntegerMatrix([[1, 1]])).columns() == [[1, -1]]
    assert kernel_basis(IntegerMatrix.zeros(2, 2)).is_identity()
    assert kernel_basis(IntegerMatrix([[2, 4]])).columns() == [[2, -1]]


def brute_kernel_points(rows, bound=3):
    n = len(rows[0])
    A = IntegerMatrix(rows)
    return [list(v) for v in itertools.product(range(-bound, bound + 1), repeat=n) if not any(A @ list(v))]


@settings(max_examples=80, deadline=None)
@given(matrices(max_dim=3, lo=-4, hi=4))
def test_kernel_is_saturated_and_complete(rows):
    A = IntegerMatrix(rows)
    K = kernel_basis(A)
    assert (A @ K).is_zero() if K.ncols else True
    assert K.ncols == A.ncols - rank(A)
    # every small integer kernel vector is an integer combination of the basis
    for v in brute_kernel_points(rows, bound=2):
        if K.ncols:
            assert solve_matrix(K, IntegerMatrix.from_columns([v], A.ncols)) is not None
        else:
            assert not any(v)


def test_kernel_with_coordinates_left_inverse():
    A = IntegerMatrix([[1, 2, 3], [4, 5, 6]])
    K, R = kernel_with_coordinates(A)
    assert (R @ K).is_identity()
    assert (A @ K).is_zero()


# --- solving -------------------------------------------------------------------

def test_solve_identity():
    x0, K = solve_linear_integer(IntegerMatrix.identity(2), [7, -2])
    assert x0 == [7, -2] and K.ncols == 0


def test_solve_parity_obstruction():
    assert solve_linear_integer(IntegerMatrix([[2]]), [3]) is None
    obs = integer_obstruction(IntegerMatrix([[2]]), [3])
    assert obs is not None and list(obs.invariant_factors) == [2]


def test_solve_two_three():
    x0, K = solve_linear_integer(IntegerMatrix([[2, 3]]), [1])
    assert x0 == [-1, 1]
    assert K.columns() == [[3, -2]]


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_linear_integer(IntegerMatrix([[1, 2]]), [1, 2])


@settings(max_examples=120, deadline=None)
@given(matrices(max_dim=3, lo=-4, hi=4), st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_solve_agrees_with_bounded_search(rows, b):
    A = IntegerMatrix(rows)
    b = b[: A.nrows]
    got = solve_linear_integer(A, b)
    if got is not None:
        x0, K = got
        assert A @ x0 == b
        assert (A @ K).is_zero() if K.ncols else True
    else:
        assert integer_obstruction(A, b) is not None
        # no solution in a box either (a necessary consequence)
        for x in itertools.product(range(-4, 5), repeat=A.ncols):
            assert A @ list(x) != b


def test_particular_solution_reports_obstruction():
    x, obs = particular_solution(IntegerMatrix([[2, 0], [0, 2]]), [1, 2])
    assert x is None and "2" in obs.reason


def test_surjective_and_hermite():
    assert is_surjective(IntegerMatrix([[2, 3]]))
    assert not is_surjective(IntegerMatrix([[2, 4]]))
    assert hermite_columns(IntegerMatrix([[2, 3]])).is_identity()


def test_matrix_algebra():
    A = IntegerMatrix([[1, 2], [3, 4]])
    assert A.T.rows == [[1, 3], [2, 4]]
    assert (A + A).rows == [[2, 4], [6, 8]]
    assert (A - A).is_zero()
    assert A.hstack(A).shape == (2, 4)
    assert A.vstack(A).shape == (4, 2)
    with pytest.raises(DimensionMismatch):
        A @ IntegerMatrix([[1, 2, 3]])
