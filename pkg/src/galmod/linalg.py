"""Exact integer linear algebra.

Matrices are stored as a tuple of sparse rows (``dict`` column -> value) so the
same code serves the tiny 5x5 reflection matrices and the rank ~1600
permutation lattices that show up in coflasque resolutions.  All arithmetic is
on Python ``int``; nothing here ever touches floating point.

Every normal form is built on one primitive, :func:`_echelon`, an integer row
echelon reduction that records the row transform ``U`` and (transposed) its
inverse.  Pivots are chosen by smallest absolute value, ties broken by the
lowest row index, which keeps the output deterministic and limits entry growth.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "DimensionMismatch",
    "IntegerMatrix",
    "Obstruction",
    "smith_normal_form",
    "invariant_factors",
    "solve_linear_integer",
    "integer_obstruction",
    "solve_matrix",
    "particular_solution",
    "is_surjective",
    "kernel_basis",
    "kernel_with_coordinates",
    "image_basis",
    "hermite_columns",
    "is_unimodular",
    "determinant",
    "rank",
]


class DimensionMismatch(ValueError):
    pass


def _clean(row: dict) -> dict:
    return {j: v for j, v in row.items() if v}


class IntegerMatrix:
    """Immutable integer matrix acting on column vectors."""

    __slots__ = ("nrows", "ncols", "_rows", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]] = (), ncols: int | None = None):
        dense = [list(r) for r in rows]
        if ncols is None:
            ncols = len(dense[0]) if dense else 0
        for r in dense:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
        self.nrows = len(dense)
        self.ncols = ncols
        self._rows = tuple({j: int(v) for j, v in enumerate(r) if v} for r in dense)
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def from_sparse(cls, nrows: int, ncols: int, rows: Sequence[dict]) -> "IntegerMatrix":
        m = cls.__new__(cls)
        m.nrows, m.ncols = nrows, ncols
        m._rows = tuple(rows) if len(rows) == nrows else tuple(rows) + tuple({} for _ in range(nrows - len(rows)))
        m._hash = None
        return m

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls.from_sparse(n, n, [{i: 1} for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntegerMatrix":
        return cls.from_sparse(nrows, ncols, [{} for _ in range(nrows)])

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntegerMatrix":
        n = len(values)
        return cls.from_sparse(n, n, [{i: v} if v else {} for i, v in enumerate(values)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int | None = None) -> "IntegerMatrix":
        if nrows is None:
            if not columns:
                raise DimensionMismatch("cannot infer row count of an empty column list")
            nrows = len(columns[0])
        rows: list[dict] = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise DimensionMismatch("ragged columns")
            for i, v in enumerate(col):
                if v:
                    rows[i][j] = int(v)
        return cls.from_sparse(nrows, len(columns), rows)

    @classmethod
    def from_column_dicts(cls, nrows: int, columns: Sequence[dict]) -> "IntegerMatrix":
        rows: list[dict] = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows[i][j] = v
        return cls.from_sparse(nrows, len(columns), rows)

    # access ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> list[list[int]]:
        n = self.ncols
        out = []
        for r in self._rows:
            dense = [0] * n
            for j, v in r.items():
                dense[j] = v
            out.append(dense)
        return out

    @property
    def entries(self) -> list[int]:
        return [v for r in self.rows for v in r]

    def row_dict(self, i: int) -> dict:
        return self._rows[i]

    def row_dicts(self) -> tuple[dict, ...]:
        return self._rows

    def column_dicts(self) -> list[dict]:
        cols: list[dict] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def columns(self) -> list[list[int]]:
        return self.T.rows

    def column(self, j: int) -> list[int]:
        return [r.get(j, 0) for r in self._rows]

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._rows[i].get(j, 0)

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def key(self) -> tuple:
        """Hashable canonical form."""
        return (self.nrows, self.ncols, tuple(tuple(sorted(r.items())) for r in self._rows))

    # algebra ------------------------------------------------------------

    @property
    def T(self) -> "IntegerMatrix":
        return IntegerMatrix.from_sparse(self.ncols, self.nrows, self.column_dicts())

    def __matmul__(self, other):
        if isinstance(other, IntegerMatrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            orows = other._rows
            out = []
            for r in self._rows:
                acc: dict = {}
                for k, a in r.items():
                    for j, b in orows[k].items():
                        acc[j] = acc.get(j, 0) + a * b
                out.append(_clean(acc))
            return IntegerMatrix.from_sparse(self.nrows, other.ncols, out)
        vec = list(other)
        if len(vec) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        return [sum(v * vec[j] for j, v in r.items()) for r in self._rows]

    def _combine(self, other: "IntegerMatrix", sign: int) -> "IntegerMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape {self.shape} vs {other.shape}")
        out = []
        for a, b in zip(self._rows, other._rows):
            r = dict(a)
            for j, v in b.items():
                r[j] = r.get(j, 0) + sign * v
            out.append(_clean(r))
        return IntegerMatrix.from_sparse(self.nrows, self.ncols, out)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "IntegerMatrix":
        return self.scale(-1)

    def scale(self, c: int) -> "IntegerMatrix":
        if c == 0:
            return IntegerMatrix.zeros(self.nrows, self.ncols)
        return IntegerMatrix.from_sparse(self.nrows, self.ncols, [{j: c * v for j, v in r.items()} for r in self._rows])

    def hstack(self, *others: "IntegerMatrix") -> "IntegerMatrix":
        rows = [dict(r) for r in self._rows]
        offset = self.ncols
        for o in others:
            if o.nrows != self.nrows:
                raise DimensionMismatch("hstack row mismatch")
            for i, r in enumerate(o._rows):
                for j, v in r.items():
                    rows[i][offset + j] = v
            offset += o.ncols
        return IntegerMatrix.from_sparse(self.nrows, offset, rows)

    def vstack(self, *others: "IntegerMatrix") -> "IntegerMatrix":
        rows = list(self._rows)
        for o in others:
            if o.ncols != self.ncols:
                raise DimensionMismatch("vstack column mismatch")
            rows.extend(o._rows)
        return IntegerMatrix.from_sparse(len(rows), self.ncols, rows)

    def select_rows(self, idx: Sequence[int]) -> "IntegerMatrix":
        return IntegerMatrix.from_sparse(len(idx), self.ncols, [self._rows[i] for i in idx])

    def select_columns(self, idx: Sequence[int]) -> "IntegerMatrix":
        pos = {j: k for k, j in enumerate(idx)}
        rows = [{pos[j]: v for j, v in r.items() if j in pos} for r in self._rows]
        return IntegerMatrix.from_sparse(self.nrows, len(idx), rows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return not any(self._rows)

    def is_identity(self) -> bool:
        return self.is_square() and all(r == {i: 1} for i, r in enumerate(self._rows))

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        if self.nrows * self.ncols <= 100:
            return f"IntegerMatrix({self.rows})"
        return f"IntegerMatrix(<{self.nrows}x{self.ncols}, nnz={self.nnz()}>)"


# ---------------------------------------------------------------------------
# the elimination core


class _Reducer:
    """Row operations on sparse rows, optionally mirrored on U and U^-T."""

    def __init__(self, rows: list[dict], track: bool):
        self.rows = rows
        n = len(rows)
        self.track = track
        if track:
            self.U = [{i: 1} for i in range(n)]
            self.UinvT = [{i: 1} for i in range(n)]

    @staticmethod
    def _axpy(target: dict, src: dict, q: int) -> None:
        # target -= q * src
        for j, v in src.items():
            w = target.get(j, 0) - q * v
            if w:
                target[j] = w
            else:
                target.pop(j, None)

    def sub(self, i: int, p: int, q: int) -> None:
        """row_i -= q * row_p."""
        self._axpy(self.rows[i], self.rows[p], q)
        if self.track:
            self._axpy(self.U[i], self.U[p], q)
            self._axpy(self.UinvT[p], self.UinvT[i], -q)

    def swap(self, i: int, j: int) -> None:
        if i == j:
            return
        r = self.rows
        r[i], r[j] = r[j], r[i]
        if self.track:
            self.U[i], self.U[j] = self.U[j], self.U[i]
            self.UinvT[i], self.UinvT[j] = self.UinvT[j], self.UinvT[i]

    def negate(self, i: int) -> None:
        self.rows[i] = {j: -v for j, v in self.rows[i].items()}
        if self.track:
            self.U[i] = {j: -v for j, v in self.U[i].items()}
            self.UinvT[i] = {j: -v for j, v in self.UinvT[i].items()}


def _echelon(red: _Reducer, ncols: int, reduce_above: bool = False) -> list[tuple[int, int]]:
    """Bring ``red.rows`` to integer row echelon form in place.

    Returns the pivot positions ``(row, col)``; pivots are positive.  With
    ``reduce_above`` the entries above each pivot are reduced into
    ``[0, pivot)``, giving the Hermite normal form.
    """
    rows = red.rows
    n = len(rows)
    # column -> rows (>= current) that may hold a nonzero there
    col_index: dict[int, set] = {}
    for i, r in enumerate(rows):
        for j in r:
            col_index.setdefault(j, set()).add(i)
    pivots: list[tuple[int, int]] = []
    current = 0

    def touch(i: int) -> None:
        for j in rows[i]:
            col_index.setdefault(j, set()).add(i)

    for c in range(ncols):
        if current >= n:
            break
        cand = sorted(i for i in col_index.get(c, ()) if i >= current and c in rows[i])
        if not cand:
            continue
        while len(cand) > 1:
            p = min(cand, key=lambda i: (abs(rows[i][c]), i))
            pv = rows[p][c]
            nxt = [p]
            for i in cand:
                if i == p:
                    continue
                q = rows[i][c] // pv
                red.sub(i, p, q)
                touch(i)
                if c in rows[i]:
                    nxt.append(i)
            cand = sorted(nxt)
        p = cand[0]
        if p != current:
            red.swap(p, current)
            # the swapped rows changed position; refresh their index entries
            touch(p)
            touch(current)
        if rows[current][c] < 0:
            red.negate(current)
        pivots.append((current, c))
        current += 1
    if reduce_above:
        for r, c in pivots:
            d = rows[r][c]
            for i in range(r):
                v = rows[i].get(c, 0)
                if v:
                    q = v // d
                    if q:
                        red.sub(i, r, q)
    return pivots


def _copy_rows(m: IntegerMatrix) -> list[dict]:
    return [dict(r) for r in m.row_dicts()]


# ---------------------------------------------------------------------------
# public operations


def rank(A: IntegerMatrix) -> int:
    red = _Reducer(_copy_rows(A), track=False)
    return len(_echelon(red, A.ncols))


def determinant(A: IntegerMatrix) -> int:
    if not A.is_square():
        raise DimensionMismatch(f"determinant of non-square {A.shape} matrix")
    rows = _copy_rows(A)
    red = _Reducer(rows, track=False)
    sign = 1
    # count swaps and negations by wrapping the reducer
    orig_swap, orig_neg = red.swap, red.negate

    def swap(i, j):
        nonlocal sign
        if i != j:
            sign = -sign
        orig_swap(i, j)

    def negate(i):
        nonlocal sign
        sign = -sign
        orig_neg(i)

    red.swap, red.negate = swap, negate
    pivots = _echelon(red, A.ncols)
    if len(pivots) < A.nrows:
        return 0
    d = sign
    for r, c in pivots:
        d *= rows[r][c]
    return d


def is_unimodular(A: IntegerMatrix) -> bool:
    if not A.is_square():
        raise DimensionMismatch(f"is_unimodular needs a square matrix, got {A.shape}")
    red = _Reducer(_copy_rows(A), track=False)
    pivots = _echelon(red, A.ncols)
    return len(pivots) == A.nrows and all(red.rows[r][c] == 1 for r, c in pivots)


def hermite_columns(B: IntegerMatrix) -> IntegerMatrix:
    """Canonical basis for the column span of ``B``.

    The columns are returned as the nonzero rows of the row Hermite normal form
    of ``B^T``: positive pivots, entries above a pivot reduced into
    ``[0, pivot)``.
    """
    red = _Reducer(_copy_rows(B.T), track=False)
    pivots = _echelon(red, B.nrows, reduce_above=True)
    rows = [red.rows[r] for r, _ in pivots]
    return IntegerMatrix.from_sparse(len(rows), B.nrows, rows).T


def image_basis(B: IntegerMatrix) -> IntegerMatrix:
    """A basis (columns) of the column span of ``B`` without normalization."""
    red = _Reducer(_copy_rows(B.T), track=False)
    pivots = _echelon(red, B.nrows)
    rows = [red.rows[r] for r, _ in pivots]
    return IntegerMatrix.from_sparse(len(rows), B.nrows, rows).T


def kernel_with_coordinates(A: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Saturated kernel basis ``K`` with a coordinate map ``R``.

    ``A @ K == 0`` and ``R @ K == I``; for any ``v`` with ``A v = 0`` the
    vector ``R v`` holds its coordinates in ``K``.  No normalization is done,
    so this stays sparse on large structured inputs.
    """
    n = A.ncols
    red = _Reducer(_copy_rows(A.T), track=True)
    r = len(_echelon(red, A.nrows))
    K = IntegerMatrix.from_sparse(n - r, n, red.U[r:]).T
    R = IntegerMatrix.from_sparse(n - r, n, red.UinvT[r:])
    return K, R


def kernel_basis(A: IntegerMatrix) -> IntegerMatrix:
    """Basis (as columns) of the integer kernel of ``A``, Hermite-normalized.

    Integer kernels are pure sublattices, so the basis is saturated; each
    column is checked to be primitive.
    """
    K, _ = kernel_with_coordinates(A)
    if K.ncols == 0:
        return K
    K = hermite_columns(K)
    for col in K.column_dicts():
        g = 0
        for v in col.values():
            g = _gcd(g, v)
        assert g == 1, "kernel basis column is not primitive"
    return K


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _is_diagonal(rows: list[dict]) -> bool:
    seen_zero = False
    for i, r in enumerate(rows):
        if not r:
            seen_zero = True
            continue
        if seen_zero or len(r) != 1 or i not in r:
            return False
    return True


def smith_normal_form(A: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Return ``(S, U, V)`` with ``S == U @ A @ V``.

    ``S`` is diagonal with nonnegative entries ``d1 | d2 | ...`` followed by
    zeros; ``U`` and ``V`` are unimodular.
    """
    m, n = A.shape
    rows = _copy_rows(A)
    U = [{i: 1} for i in range(m)]
    VT = [{i: 1} for i in range(n)]

    def transposed(rows, ncols):
        cols: list[dict] = [{} for _ in range(ncols)]
        for i, r in enumerate(rows):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    while True:
        rows, U = _row_pass_tracked(rows, U, n)
        cols = transposed(rows, n)
        cols, VT = _row_pass_tracked(cols, VT, m)
        rows = transposed(cols, m)
        if not _is_diagonal(rows):
            continue
        diag = [rows[i][i] for i in range(min(m, n)) if i < len(rows) and rows[i]]
        bad = None
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                if diag[j] % diag[i]:
                    bad = (i, j)
                    break
            if bad:
                break
        if bad is None:
            break
        i, j = bad
        # column i += column j, then re-reduce
        rows[j][i] = rows[j][j]
        VT[i] = dict(VT[i])
        for k, v in VT[j].items():
            w = VT[i].get(k, 0) + v
            if w:
                VT[i][k] = w
            else:
                VT[i].pop(k, None)
    S = IntegerMatrix.from_sparse(m, n, rows)
    Um = IntegerMatrix.from_sparse(m, m, U)
    Vm = IntegerMatrix.from_sparse(n, n, VT).T
    return S, Um, Vm


def _row_pass_tracked(rows: list[dict], U: list[dict], ncols: int) -> tuple[list[dict], list[dict]]:
    red = _Reducer(rows, track=False)
    # track U only (no inverse needed for SNF)
    red.track = False
    orig_sub, orig_swap, orig_neg = red.sub, red.swap, red.negate

    def sub(i, p, q):
        orig_sub(i, p, q)
        _Reducer._axpy(U[i], U[p], q)

    def swap(i, j):
        orig_swap(i, j)
        if i != j:
            U[i], U[j] = U[j], U[i]

    def negate(i):
        orig_neg(i)
        U[i] = {k: -v for k, v in U[i].items()}

    red.sub, red.swap, red.negate = sub, swap, negate
    _echelon(red, ncols)
    return red.rows, U


def invariant_factors(A: IntegerMatrix) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    S, _, _ = smith_normal_form(A)
    return [S[i, i] for i in range(min(S.shape)) if S[i, i]]


@dataclass(frozen=True)
class Obstruction:
    """Why ``A x = b`` has no integer solution.

    With ``S = U A V`` in Smith form and ``c = U b``, either some ``c[i]`` is
    not divisible by ``d[i]`` or ``c[i] != 0`` for an index past the rank.
    """

    invariant_factors: tuple[int, ...]
    transformed_rhs: tuple[int, ...]
    index: int
    reason: str

    def as_dict(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "transformed_rhs": list(self.transformed_rhs),
            "index": self.index,
            "reason": self.reason,
        }


def _solve_snf(snf, b: Sequence[int]):
    S, U, V = snf
    m, n = S.shape
    c = U @ list(b)
    d = [S[i, i] for i in range(min(m, n)) if S[i, i]]
    r = len(d)
    y = [0] * n
    for i in range(m):
        if i < r:
            if c[i] % d[i]:
                return None, Obstruction(tuple(d), tuple(c), i, f"{d[i]} does not divide {c[i]}")
            y[i] = c[i] // d[i]
        elif c[i]:
            return None, Obstruction(tuple(d), tuple(c), i, f"nonzero entry {c[i]} beyond rank {r}")
    return V @ y, None


def _centered_mod(a: int, d: int) -> int:
    r = a % d
    if 2 * r > d:
        r -= d
    return r


def _reduce_mod_lattice(x: list[int], K: IntegerMatrix) -> list[int]:
    """Reduce ``x`` against a Hermite-normalized column basis ``K``."""
    x = list(x)
    for col in K.column_dicts():
        if not col:
            continue
        p = min(col)
        d = col[p]
        target = _centered_mod(x[p], d)
        q = (x[p] - target) // d
        if q:
            for i, v in col.items():
                x[i] -= q * v
    return x


def solve_linear_integer(A: IntegerMatrix, b: Sequence[int]):
    """Integer solutions of ``A x = b``.

    Returns ``(x0, kernel)`` where ``kernel`` holds a basis of the integer
    kernel of ``A`` as columns, or ``None`` when no integer solution exists.
    ``x0`` is reduced against the kernel so it is canonical.
    """
    b = list(b)
    if len(b) != A.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.nrows} equations")
    x0, _ = _solve_snf(smith_normal_form(A), b)
    if x0 is None:
        return None
    K = kernel_basis(A)
    # Hermite columns have their pivot at the top; reduce from the last pivot up
    if K.ncols:
        x0 = _reduce_mod_lattice(x0, K)
    return x0, K


def integer_obstruction(A: IntegerMatrix, b: Sequence[int]) -> Obstruction | None:
    b = list(b)
    if len(b) != A.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.nrows} equations")
    _, obs = _solve_snf(smith_normal_form(A), b)
    return obs


def particular_solution(A: IntegerMatrix, b: Sequence[int]) -> tuple[list[int] | None, Obstruction | None]:
    """One integer solution of ``A x = b`` (no kernel), or the Smith-form obstruction."""
    b = list(b)
    if len(b) != A.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.nrows} equations")
    return _solve_snf(smith_normal_form(A), b)


def is_surjective(A: IntegerMatrix) -> bool:
    """True when the columns of ``A`` span all of ``Z^rows``."""
    return hermite_columns(A).is_identity()


def solve_matrix(A: IntegerMatrix, B: IntegerMatrix) -> IntegerMatrix | None:
    """One integer ``X`` with ``A @ X == B``, or ``None``."""
    if A.nrows != B.nrows:
        raise DimensionMismatch(f"{A.shape} vs {B.shape}")
    snf = smith_normal_form(A)
    cols = []
    for col in B.columns() if B.ncols else []:
        x, _ = _solve_snf(snf, col)
        if x is None:
            return None
        cols.append(x)
    if not cols:
        return IntegerMatrix.zeros(A.ncols, 0)
    return IntegerMatrix.from_columns(cols, A.ncols)
