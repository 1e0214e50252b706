"""
Carnot Conformal
Exact Linear Algebra - rational matrices, elimination, nullspaces dan symmetric forms
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import DimensionMismatchError, NotInColumnSpaceError, RankDeficiencyError


Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(value):
    """
    Convert int, Fraction or rational string ke Fraction

    Args:
        value: int, Fraction or str such as "3/4"

    Returns:
        Fraction: exact value

    Raises:
        TypeError: floats and other inexact types
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def vector(values):
    """Tuple of Fractions"""
    return tuple(to_rational(v) for v in values)


def zero_vector(n):
    return (ZERO,) * n


def unit_vector(n, index):
    return tuple(ONE if i == index else ZERO for i in range(n))


def dot(u, v):
    if len(u) != len(v):
        raise DimensionMismatchError(f"dot product of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def add_vectors(u, v):
    if len(u) != len(v):
        raise DimensionMismatchError(f"sum of lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def scale_vector(c, v):
    c = to_rational(c)
    return tuple(c * a for a in v)


def is_zero_vector(v):
    return not any(v)


@dataclass(frozen=True)
class Matrix:
    """Dense rational matrix, row-major"""
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatchError(
                f"entry table does not match shape {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows, cols=None):
        data = tuple(tuple(to_rational(x) for x in row) for row in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns, rows=None):
        columns = [tuple(to_rational(x) for x in c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        data = tuple(tuple(c[i] for c in columns) for i in range(rows))
        return cls(rows, len(columns), data)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, tuple((ZERO,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(unit_vector(n, i) for i in range(n)))

    @classmethod
    def diagonal(cls, values):
        values = vector(values)
        n = len(values)
        return cls(n, n, tuple(
            tuple(values[i] if i == j else ZERO for j in range(n)) for i in range(n)
        ))

    @classmethod
    def block_diagonal(cls, blocks):
        n_rows = sum(b.rows for b in blocks)
        n_cols = sum(b.cols for b in blocks)
        data = []
        col_offset = 0
        for block in blocks:
            for row in block.entries:
                data.append((ZERO,) * col_offset + row + (ZERO,) * (n_cols - col_offset - block.cols))
            col_offset += block.cols
        return cls(n_rows, n_cols, tuple(data))

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    @property
    def T(self):
        return Matrix(self.cols, self.rows, tuple(
            tuple(r[j] for r in self.entries) for j in range(self.cols)
        ))

    def transpose(self):
        return self.T

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionMismatchError(
                    f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
                )
            other_cols = other.T.entries
            return Matrix(self.rows, other.cols, tuple(
                tuple(_row_dot(r, c) for c in other_cols) for r in self.entries
            ))
        other = tuple(other)
        if self.cols != len(other):
            raise DimensionMismatchError(
                f"cannot apply {self.rows}x{self.cols} matrix to vector of length {len(other)}"
            )
        return tuple(_row_dot(r, other) for r in self.entries)

    def __add__(self, other):
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)
        ))

    def __sub__(self, other):
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)
        ))

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = to_rational(c)
        return Matrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.entries))

    def _check_same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError(
                f"shape {self.rows}x{self.cols} differs from {other.rows}x{other.cols}"
            )

    @property
    def is_square(self):
        return self.rows == self.cols

    def is_zero(self):
        return not any(any(r) for r in self.entries)

    def is_symmetric(self):
        return self.is_square and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def trace(self):
        if not self.is_square:
            raise DimensionMismatchError("trace of a non-square matrix")
        return sum((self.entries[i][i] for i in range(self.rows)), ZERO)

    def submatrix(self, row_indices, col_indices):
        row_indices, col_indices = list(row_indices), list(col_indices)
        return Matrix(len(row_indices), len(col_indices), tuple(
            tuple(self.entries[i][j] for j in col_indices) for i in row_indices
        ))

    def flatten(self):
        return tuple(x for r in self.entries for x in r)


def _row_dot(r, c):
    return sum((a * b for a, b in zip(r, c) if a and b), ZERO)


@dataclass(frozen=True)
class SymmetricForm:
    """Symmetric bilinear form given by its Gram matrix"""
    matrix: Matrix

    def __post_init__(self):
        if not self.matrix.is_symmetric():
            raise ValueError("Gram matrix is not symmetric")

    @property
    def dim(self):
        return self.matrix.rows

    def __call__(self, x, y):
        return dot(x, self.matrix @ y)

    def restrict(self, basis):
        """Gram matrix of the form on span(basis), basis vectors in ambient coordinates"""
        images = [self.matrix @ b for b in basis]
        return SymmetricForm(Matrix.from_rows(
            [[dot(b, img) for img in images] for b in basis], cols=len(basis)
        ))


# =============================================================================
# DENSE ELIMINATION (Bareiss fraction-free)
# =============================================================================

def _integer_row(row):
    scale = lcm(*(x.denominator for x in row))
    return [x.numerator * (scale // x.denominator) for x in row]


def rref(m):
    """
    Reduced row-echelon form via fraction-free (Bareiss) elimination

    Rows are first scaled to integers, eliminated fraction-free, and only
    the final pivots are normalized back to reduced Fractions.

    Args:
        m (Matrix): input

    Returns:
        tuple: (Matrix in RREF with the same shape, tuple of pivot columns)
    """
    n_rows, n_cols = m.rows, m.cols
    rows = [_integer_row(r) for r in m.entries]
    pivots = []
    previous = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        p = rows[r][c]
        pivot = rows[r]
        for i in range(r + 1, n_rows):
            target = rows[i]
            a = target[c]
            for k in range(c + 1, n_cols):
                value, remainder = divmod(p * target[k] - a * pivot[k], previous)
                if remainder:
                    raise ArithmeticError("Bareiss division was not exact")
                target[k] = value
            target[c] = 0
        previous = p
        pivots.append(c)
        r += 1

    reduced = [[Fraction(x) for x in row] for row in rows]
    for i, c in enumerate(pivots):
        p = reduced[i][c]
        reduced[i] = [x / p for x in reduced[i]]
    for i in reversed(range(len(pivots))):
        c = pivots[i]
        for above in range(i):
            f = reduced[above][c]
            if f:
                reduced[above] = [a - f * b for a, b in zip(reduced[above], reduced[i])]
    for i in range(len(pivots), n_rows):
        reduced[i] = [ZERO] * n_cols
    return Matrix(n_rows, n_cols, tuple(tuple(r) for r in reduced)), tuple(pivots)


def rank(m):
    return len(rref(m)[1])


def nullspace(m):
    """
    Basis of { x : m x = 0 }, one vector per free column

    Args:
        m (Matrix): input

    Returns:
        list[tuple]: basis vectors (cols - rank of them)
    """
    reduced, pivots = rref(m)
    return _free_column_basis(m.cols, pivots, lambda i, f: reduced.entries[i][f])


def _free_column_basis(n_cols, pivots, entry):
    pivot_set = set(pivots)
    basis = []
    for f in range(n_cols):
        if f in pivot_set:
            continue
        v = [ZERO] * n_cols
        v[f] = ONE
        for i, c in enumerate(pivots):
            value = entry(i, f)
            if value:
                v[c] = -value
        basis.append(tuple(v))
    return basis


def solve(a, b):
    """
    One particular solution of a x = b, or None kalau inconsistent

    Args:
        a (Matrix): coefficient matrix
        b: right-hand side vector

    Returns:
        tuple | None: solution with free variables set to zero
    """
    b = vector(b)
    if len(b) != a.rows:
        raise DimensionMismatchError(f"right-hand side has length {len(b)}, expected {a.rows}")
    augmented = Matrix(a.rows, a.cols + 1, tuple(r + (x,) for r, x in zip(a.entries, b)))
    reduced, pivots = rref(augmented)
    if pivots and pivots[-1] == a.cols:
        return None
    x = [ZERO] * a.cols
    for i, c in enumerate(pivots):
        x[c] = reduced.entries[i][a.cols]
    return tuple(x)


def inverse(a):
    """
    Exact inverse of a square matrix

    Raises:
        RankDeficiencyError: singular input
    """
    if not a.is_square:
        raise DimensionMismatchError("inverse of a non-square matrix")
    n = a.rows
    identity = Matrix.identity(n)
    augmented = Matrix(n, 2 * n, tuple(r + s for r, s in zip(a.entries, identity.entries)))
    reduced, pivots = rref(augmented)
    if pivots[:n] != tuple(range(n)):
        raise RankDeficiencyError("matrix is singular")
    return Matrix(n, n, tuple(r[n:] for r in reduced.entries))


def min_norm_preimage(m, b):
    """
    Minimal standard-norm solution of m x = b

    Computed as x = m^T y with (m m^T) y = b; any solution y gives the same x,
    which lies in the row space of m and is therefore orthogonal to nullspace(m).

    Args:
        m (Matrix): linear map
        b: vector in the column space of m

    Returns:
        tuple: x

    Raises:
        NotInColumnSpaceError: b has no preimage
    """
    mt = m.T
    y = solve(m @ mt, b)
    if y is None:
        raise NotInColumnSpaceError("not in column space")
    return mt @ y


def signature(form):
    """
    Inertia (n_plus, n_minus, n_zero) by symmetric congruence elimination

    Args:
        form (SymmetricForm): form to classify

    Returns:
        tuple[int, int, int]: counts of positive, negative and zero squares
    """
    a = [list(r) for r in form.matrix.entries]
    n = len(a)
    plus = minus = 0
    k = 0
    while k < n:
        pivot = next((i for i in range(k, n) if a[i][i] != 0), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0),
                None,
            )
            if pair is None:
                break
            # all diagonal entries vanish: add row/column j to i, new diagonal is 2 a[i][j]
            i, j = pair
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            pivot = i
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            for row in a:
                row[k], row[pivot] = row[pivot], row[k]
        p = a[k][k]
        if p > 0:
            plus += 1
        else:
            minus += 1
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for t in range(k, n):
                    a[i][t] -= f * a[k][t]
        for i in range(k + 1, n):
            a[k][i] = ZERO
        k += 1
    return plus, minus, n - plus - minus


# =============================================================================
# SPARSE INCREMENTAL ELIMINATION
# =============================================================================

class RowReducer:
    """
    Incremental sparse Gauss-Jordan elimination over the rationals.

    Rows are dicts column -> Fraction. The stored rows are always in reduced
    row-echelon form: each row's smallest column is its pivot, the pivot is 1,
    and no other stored row has an entry in that column.
    """

    def __init__(self, n_cols):
        self.n_cols = n_cols
        self._rows = {}

    @property
    def rank(self):
        return len(self._rows)

    @property
    def pivots(self):
        return tuple(sorted(self._rows))

    def reduce(self, row):
        """Residual of row modulo the stored row space (new dict)"""
        residual = {k: to_rational(v) for k, v in row.items() if v}
        for c in [c for c in residual if c in self._rows]:
            coef = residual.get(c)
            if not coef:
                continue
            for k, v in self._rows[c].items():
                value = residual.get(k, ZERO) - coef * v
                if value:
                    residual[k] = value
                else:
                    residual.pop(k, None)
        return residual

    def add(self, row):
        """
        Add a row to the system

        Returns:
            bool: True kalau row was independent of the stored rows
        """
        residual = self.reduce(row)
        if not residual:
            return False
        pivot = min(residual)
        if pivot >= self.n_cols or pivot < 0:
            raise DimensionMismatchError(f"column {pivot} outside 0..{self.n_cols - 1}")
        inv = ONE / residual[pivot]
        residual = {k: v * inv for k, v in residual.items()}
        for other in self._rows.values():
            coef = other.get(pivot)
            if coef:
                for k, v in residual.items():
                    value = other.get(k, ZERO) - coef * v
                    if value:
                        other[k] = value
                    else:
                        other.pop(k, None)
        self._rows[pivot] = residual
        return True

    def extend(self, rows):
        for row in rows:
            self.add(row)
        return self

    def contains(self, row):
        return not self.reduce(row)

    def basis(self):
        """Stored rows as dense tuples, ordered by pivot"""
        return [
            tuple(self._rows[c].get(k, ZERO) for k in range(self.n_cols))
            for c in self.pivots
        ]

    def nullspace(self):
        pivots = self.pivots
        return _free_column_basis(
            self.n_cols, pivots, lambda i, f: self._rows[pivots[i]].get(f, ZERO)
        )


def sparse(v):
    """Dense vector -> dict of nonzero entries"""
    return {i: x for i, x in enumerate(v) if x}


def densify(row, n):
    return tuple(row.get(i, ZERO) for i in range(n))


def nullspace_of_rows(rows, n_cols):
    """Nullspace of a sparse row system, rows given as dicts"""
    return RowReducer(n_cols).extend(rows).nullspace()


# =============================================================================
# SUBSPACES (given by spanning vectors)
# =============================================================================

def _check_ambient(vectors, n):
    for v in vectors:
        if len(v) != n:
            raise DimensionMismatchError(f"vector of length {len(v)} in ambient dimension {n}")


def span(vectors, n):
    """
    Canonical (reduced echelon) basis of span(vectors)

    Args:
        vectors: iterable of vectors
        n (int): ambient dimension

    Returns:
        list[tuple]: basis, empty for the zero subspace
    """
    vectors = list(vectors)
    _check_ambient(vectors, n)
    return RowReducer(n).extend(sparse(v) for v in vectors).basis()


def subspace_sum(a, b, n):
    return span(list(a) + list(b), n)


def subspace_intersection(a, b, n):
    """Basis of span(a) ∩ span(b), via the nullspace of [a | -b]"""
    a, b = span(a, n), span(b, n)
    if not a or not b:
        return []
    columns = list(a) + [scale_vector(-1, v) for v in b]
    coefficients = nullspace(Matrix.from_columns(columns, rows=n))
    vectors = []
    for c in coefficients:
        v = zero_vector(n)
        for coef, basis_vector in zip(c[:len(a)], a):
            if coef:
                v = add_vectors(v, scale_vector(coef, basis_vector))
        vectors.append(v)
    return span(vectors, n)


def contains(basis, v):
    """Membership of v in span(basis)"""
    n = len(v)
    _check_ambient(basis, n)
    return RowReducer(n).extend(sparse(b) for b in basis).contains(sparse(v))


def coordinates(basis, v):
    """
    Coefficients of v in terms of basis (assumed independent), or None

    Returns:
        tuple | None: c with sum(c_i basis_i) = v
    """
    if not basis:
        return () if is_zero_vector(v) else None
    return solve(Matrix.from_columns(basis, rows=len(v)), v)
