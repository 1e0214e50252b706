"""
Carnot Conformal
Algebra - structure-constant Lie algebras, stratified algebras, graded maps dan validation
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Mapping, Optional

from .errors import DimensionMismatchError
from .exactlin import (
    ONE,
    ZERO,
    Matrix,
    RowReducer,
    densify,
    inverse,
    nullspace_of_rows,
    sparse,
    span,
    to_rational,
    unit_vector,
)
from .report_schema import ValidationReport, Violation
from .utils import basis_label, get_logger


log = get_logger("algebra")


def add_scaled(target, source, coef=ONE):
    """target += coef * source, both sparse dicts; zeros are dropped"""
    if not coef:
        return target
    for k, v in source.items():
        value = target.get(k, ZERO) + coef * v
        if value:
            target[k] = value
        else:
            target.pop(k, None)
    return target


def _clean(vec):
    return {k: to_rational(v) for k, v in vec.items() if v}


@dataclass(frozen=True, eq=False)
class LieTable:
    """
    Finite-dimensional algebra given by sparse structure constants.

    constants maps (a, b) to the sparse vector [e_a, e_b]; absent pairs are zero.
    Optional degrees label a homogeneous basis, and grading_element is a
    vector whose ad acts as -degree on every basis vector.
    """
    dim: int
    constants: Mapping = field(default_factory=dict)
    degrees: Optional[tuple] = None
    grading_element: Optional[tuple] = None

    @classmethod
    def from_constants(cls, dim, constants, degrees=None, grading_element=None, antisymmetrize=True):
        table = {}
        # supplied pairs include explicit zeros, which must not be overwritten by the fill
        supplied = set()
        for (a, b), value in constants.items():
            if not (0 <= a < dim and 0 <= b < dim):
                raise DimensionMismatchError(f"bracket index ({a},{b}) outside 0..{dim - 1}")
            supplied.add((a, b))
            value = _clean(value)
            if value:
                table[(a, b)] = value
        if antisymmetrize:
            for (a, b), value in list(table.items()):
                if (b, a) not in supplied and a != b:
                    table[(b, a)] = {k: -v for k, v in value.items()}
        return cls(dim, table, tuple(degrees) if degrees is not None else None,
                   tuple(grading_element) if grading_element is not None else None)

    def bracket_basis(self, a, b):
        """[e_a, e_b] as a sparse dict (shared, do not mutate)"""
        return self.constants.get((a, b), {})

    def bracket_sparse(self, x, y):
        result = {}
        for a, xa in x.items():
            for b, yb in y.items():
                value = self.constants.get((a, b))
                if value:
                    add_scaled(result, value, xa * yb)
        return result

    def bracket(self, x, y):
        if len(x) != self.dim or len(y) != self.dim:
            raise DimensionMismatchError(f"bracket expects vectors of length {self.dim}")
        return densify(self.bracket_sparse(sparse(x), sparse(y)), self.dim)

    def ad_basis(self, a):
        """Matrix of ad(e_a): column k is [e_a, e_k]"""
        return self._ad_matrices[a]

    @cached_property
    def _ad_matrices(self):
        return [
            Matrix.from_columns(
                [densify(self.bracket_basis(a, k), self.dim) for k in range(self.dim)],
                rows=self.dim,
            )
            for a in range(self.dim)
        ]

    def ad(self, x):
        m = Matrix.zeros(self.dim, self.dim)
        for a, coef in sparse(x).items():
            m = m + self.ad_basis(a).scale(coef)
        return m

    def antisymmetry_violations(self):
        bad = []
        for a in range(self.dim):
            if self.bracket_basis(a, a):
                bad.append((a, a))
            for b in range(a + 1, self.dim):
                forward, backward = self.bracket_basis(a, b), self.bracket_basis(b, a)
                if add_scaled(dict(forward), backward):
                    bad.append((a, b))
        return bad

    def jacobi_violations(self, limit=None):
        """Basis triples a<b<c with [a,[b,c]] + [b,[c,a]] + [c,[a,b]] != 0"""
        bad = []
        for a, b, c in combinations(range(self.dim), 3):
            total = self.bracket_sparse({a: ONE}, self.bracket_basis(b, c))
            add_scaled(total, self.bracket_sparse({b: ONE}, self.bracket_basis(c, a)))
            add_scaled(total, self.bracket_sparse({c: ONE}, self.bracket_basis(a, b)))
            if total:
                bad.append((a, b, c))
                if limit is not None and len(bad) >= limit:
                    break
        return bad

    def bracket_span(self, left, right):
        """Basis of [span(left), span(right)]"""
        reducer = RowReducer(self.dim)
        right = [sparse(v) for v in right]
        for x in left:
            x = sparse(x)
            for y in right:
                reducer.add(self.bracket_sparse(x, y))
        return reducer.basis()

    def derived_algebra(self):
        basis = [unit_vector(self.dim, a) for a in range(self.dim)]
        return self.bracket_span(basis, basis)

    def generated_subalgebra(self, vectors):
        """Smallest subalgebra containing vectors"""
        reducer = RowReducer(self.dim)
        queue = [sparse(v) for v in vectors]
        members = []
        while queue:
            v = queue.pop()
            if not reducer.add(v):
                continue
            members.append(v)
            queue.extend(self.bracket_sparse(v, w) for w in members)
        return reducer.basis()

    def degree_of(self, a):
        return self.degrees[a]

    def has_valid_grading_element(self):
        """True kalau ad(grading_element) = -degree on every basis vector"""
        if self.degrees is None or self.grading_element is None:
            return False
        h = sparse(self.grading_element)
        for a in range(self.dim):
            image = self.bracket_sparse(h, {a: ONE})
            expected = {a: Fraction(-self.degrees[a])} if self.degrees[a] else {}
            if image != expected:
                return False
        return True

    @classmethod
    def direct_sum(cls, first, second):
        shift = first.dim
        constants = dict(first.constants)
        for (a, b), value in second.constants.items():
            constants[(a + shift, b + shift)] = {k + shift: v for k, v in value.items()}
        degrees = None
        grading = None
        if first.degrees is not None and second.degrees is not None:
            degrees = first.degrees + second.degrees
        if first.grading_element is not None and second.grading_element is not None:
            grading = first.grading_element + second.grading_element
        return cls(first.dim + second.dim, constants, degrees, grading)


@dataclass(frozen=True, eq=False)
class StratifiedAlgebra:
    """
    Graded nilpotent Lie algebra g = g_{-1} + ... + g_{-s}.

    Basis vectors are flattened layer by layer: the i-th vector of g_{-j}
    (both 1-based in labels) has flat index offsets[j-1] + i - 1.
    """
    name: str
    layer_dims: tuple
    table: LieTable

    @classmethod
    def from_brackets(cls, name, layer_dims, brackets):
        """
        Build dari flat-index brackets {(a, b): {c: coef}}

        Reverse pairs that are not given are filled by antisymmetry; pairs
        given in both orders are kept as supplied so validate() can flag them.
        """
        layer_dims = tuple(int(d) for d in layer_dims)
        if not layer_dims or any(d <= 0 for d in layer_dims):
            raise ValueError(f"layer dimensions must be positive, got {list(layer_dims)}")
        n = sum(layer_dims)
        degrees = tuple(-j for j, d in enumerate(layer_dims, start=1) for _ in range(d))
        table = LieTable.from_constants(n, brackets, degrees=degrees)
        return cls(name, layer_dims, table)

    @property
    def step(self):
        return len(self.layer_dims)

    @property
    def dim(self):
        return sum(self.layer_dims)

    @cached_property
    def offsets(self):
        offsets, total = [], 0
        for d in self.layer_dims:
            offsets.append(total)
            total += d
        return tuple(offsets)

    def layer_dim(self, j):
        """dim g_{-j}; zero outside 1..s"""
        return self.layer_dims[j - 1] if 1 <= j <= self.step else 0

    def layer_indices(self, j):
        """Flat indices of g_{-j}"""
        if not 1 <= j <= self.step:
            return range(0)
        start = self.offsets[j - 1]
        return range(start, start + self.layer_dims[j - 1])

    def layer_of(self, a):
        return -self.table.degrees[a]

    def index(self, j, i):
        """Flat index of the 1-based label (j, i)"""
        if not 1 <= j <= self.step or not 1 <= i <= self.layer_dims[j - 1]:
            raise IndexError(f"basis label {basis_label(j, i)} outside layers {list(self.layer_dims)}")
        return self.offsets[j - 1] + i - 1

    def label(self, a):
        j = self.layer_of(a)
        return basis_label(j, a - self.offsets[j - 1] + 1)

    def project(self, x, j):
        """Layer-j coordinates of a vector in ambient coordinates"""
        return tuple(x[a] for a in self.layer_indices(j))

    def embed(self, coords, j):
        """Ambient vector from layer-j coordinates"""
        x = [ZERO] * self.dim
        for a, value in zip(self.layer_indices(j), coords):
            x[a] = to_rational(value)
        return tuple(x)

    def basis_vector(self, a):
        return unit_vector(self.dim, a)

    def layer_basis(self, j):
        return [self.basis_vector(a) for a in self.layer_indices(j)]

    def upper_space(self, j):
        """g^{[j+]} = sum of g_{-k} for k >= j"""
        return [v for k in range(j, self.step + 1) for v in self.layer_basis(k)]

    def transform(self, t, name=None):
        """
        Same algebra in a new graded basis: new basis vector a is T e_a

        Args:
            t (GradedMap): invertible degree-0 map
            name (str | None): name of the result

        Returns:
            StratifiedAlgebra: structure constants T^{-1}[T e_a, T e_b]
        """
        matrix = t.to_matrix(self)
        inv = inverse(matrix)
        columns = [matrix.column(a) for a in range(self.dim)]
        constants = {}
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                image = self.table.bracket(columns[a], columns[b])
                value = sparse(inv @ image)
                if value:
                    constants[(a, b)] = value
        return StratifiedAlgebra.from_brackets(name or self.name, self.layer_dims, constants)


@dataclass(frozen=True)
class GradedMap:
    """
    Degree-homogeneous linear map between graded pieces.

    blocks maps a source layer p (the piece g_{-p}) to the matrix of the map
    g_{-p} -> g_{degree-p}, expressed in the basis of the target piece.
    """
    degree: int
    blocks: Mapping

    def block(self, p):
        return self.blocks[p]

    @classmethod
    def from_matrix(cls, alg, matrix, degree=0):
        """Split a full n x n matrix into blocks; off-block entries must vanish"""
        if (matrix.rows, matrix.cols) != (alg.dim, alg.dim):
            raise DimensionMismatchError(f"expected {alg.dim}x{alg.dim} matrix")
        blocks = {}
        covered = set()
        for p in range(1, alg.step + 1):
            target = alg.layer_indices(p - degree)
            source = alg.layer_indices(p)
            blocks[p] = matrix.submatrix(target, source)
            covered.update((r, c) for r in target for c in source)
        for r in range(alg.dim):
            for c in range(alg.dim):
                if matrix[r, c] and (r, c) not in covered:
                    raise ValueError(f"matrix is not homogeneous of degree {degree}")
        return cls(degree, blocks)

    def to_matrix(self, alg):
        """Full matrix on g (targets must lie inside g)"""
        rows = [[ZERO] * alg.dim for _ in range(alg.dim)]
        for p, block in self.blocks.items():
            target = alg.layer_indices(p - self.degree)
            if block.rows and len(target) != block.rows:
                raise DimensionMismatchError(f"block for layer {p} does not land in g")
            for r_local, r in enumerate(target):
                for c_local, c in enumerate(alg.layer_indices(p)):
                    rows[r][c] = block[r_local, c_local]
        return Matrix.from_rows(rows, cols=alg.dim)

    def apply(self, alg, x):
        return self.to_matrix(alg) @ x

    def flatten(self):
        return tuple(x for p in sorted(self.blocks) for x in self.blocks[p].flatten())

    def __add__(self, other):
        return GradedMap(self.degree, {p: self.blocks[p] + other.blocks[p] for p in self.blocks})

    def scale(self, c):
        return GradedMap(self.degree, {p: b.scale(c) for p, b in self.blocks.items()})

    def commutator(self, other, alg):
        """[D, D'] = D D' - D' D for degree-0 maps on g"""
        a, b = self.to_matrix(alg), other.to_matrix(alg)
        return GradedMap.from_matrix(alg, a @ b - b @ a, degree=self.degree + other.degree)

    @classmethod
    def scalar_blocks(cls, alg, values):
        """Degree-0 map acting by values[j-1] on g_{-j}"""
        return cls(0, {
            j: Matrix.identity(alg.layer_dim(j)).scale(values[j - 1]) for j in range(1, alg.step + 1)
        })


# =============================================================================
# OPERATIONS
# =============================================================================

def validate(alg, allow_small=False):
    """
    Check every stratified-algebra axiom and collect violations

    Args:
        alg (StratifiedAlgebra): algebra to check
        allow_small (bool): accept dimension < 3 and mark the result as out of scope

    Returns:
        ValidationReport: valid iff no violation was found
    """
    table = alg.table
    violations = []
    label = alg.label

    for a, b in table.antisymmetry_violations():
        violations.append(Violation(
            kind="antisymmetry",
            indices=[label(a), label(b)],
            message=f"[{label(a)},{label(b)}] != -[{label(b)},{label(a)}]",
        ))

    for (a, b), value in sorted(table.constants.items()):
        expected = alg.layer_of(a) + alg.layer_of(b)
        stray = [c for c in value if alg.layer_of(c) != expected]
        if stray:
            violations.append(Violation(
                kind="grading",
                indices=[label(a), label(b)],
                message=(
                    f"[{label(a)},{label(b)}] has components {', '.join(label(c) for c in stray)} "
                    f"outside g_-{expected}"
                ),
            ))

    for a, b, c in table.jacobi_violations():
        violations.append(Violation(
            kind="jacobi",
            indices=[label(a), label(b), label(c)],
            message=f"Jacobi identity fails on {label(a)}, {label(b)}, {label(c)}",
        ))

    first = list(alg.layer_indices(1))
    for j in range(1, alg.step + 1):
        images = [
            densify(table.bracket_basis(a, b), alg.dim)
            for a in alg.layer_indices(j) for b in first
        ]
        if j < alg.step:
            layer = list(alg.layer_indices(j + 1))
            spanned = span([tuple(v[c] for c in layer) for v in images], len(layer))
            if len(spanned) != len(layer):
                violations.append(Violation(
                    kind="stratification",
                    indices=[f"g_-{j}", "g_-1"],
                    message=(
                        f"[g_-{j}, g_-1] has dimension {len(spanned)}, "
                        f"expected dim g_-{j + 1} = {len(layer)}"
                    ),
                ))
        elif any(any(v) for v in images):
            violations.append(Violation(
                kind="stratification",
                indices=[f"g_-{j}", "g_-1"],
                message=f"[g_-{j}, g_-1] must vanish in the top layer",
            ))

    if alg.dim < 3 and not allow_small:
        violations.append(Violation(
            kind="dimension",
            indices=[],
            message=f"dimension {alg.dim} < 3",
        ))

    report = ValidationReport(
        name=alg.name,
        layers=list(alg.layer_dims),
        valid=not violations,
        outside_paper_scope=allow_small and alg.dim < 3,
        violations=violations,
    )
    log.debug("validated %s: %d violation(s)", alg.name, len(violations))
    return report


def bracket(alg, x, y):
    return alg.table.bracket(x, y)


def descending_central_series(alg):
    """
    g^(1) = g, g^(j+1) = [g, g^(j)], down to the zero subspace

    Returns:
        list[list[tuple]]: bases, the last one empty
    """
    whole = [alg.basis_vector(a) for a in range(alg.dim)]
    series = [whole]
    current = whole
    while current:
        current = alg.table.bracket_span(whole, current)
        series.append(current)
        if len(series) > alg.step + 2:
            raise RuntimeError("descending central series does not terminate; algebra is not nilpotent")
    return series


def center(alg):
    """Basis of { X : [X, g] = 0 } via the stacked ad system"""
    return table_center(alg.table)


def table_center(table):
    rows = []
    for b in range(table.dim):
        per_target = {}
        for a in range(table.dim):
            for c, coef in table.bracket_basis(a, b).items():
                per_target.setdefault(c, {})[a] = coef
        rows.extend(per_target.values())
    return nullspace_of_rows(rows, table.dim)


def dilation(alg, t):
    """
    delta_t: multiplication by t^j on g_{-j}

    Raises:
        ValueError: t <= 0
    """
    t = to_rational(t)
    if t <= 0:
        raise ValueError(f"dilation parameter must be positive, got {t}")
    result = GradedMap.scalar_blocks(alg, [t ** j for j in range(1, alg.step + 1)])
    if not preserves_brackets(alg, result):
        raise RuntimeError(f"dilation by {t} is not an automorphism of {alg.name}")
    return result


def grading_derivation(alg):
    """H: multiplication by j on g_{-j}"""
    result = GradedMap.scalar_blocks(alg, list(range(1, alg.step + 1)))
    if not is_derivation(alg, result):
        raise RuntimeError(f"grading map of {alg.name} is not a derivation")
    return result


def is_derivation(alg, d):
    """D[e_a, e_b] == [D e_a, e_b] + [e_a, D e_b] on all basis pairs"""
    m = d.to_matrix(alg)
    table = alg.table
    images = [m.column(a) for a in range(alg.dim)]
    for a in range(alg.dim):
        for b in range(a + 1, alg.dim):
            left = m @ table.bracket(alg.basis_vector(a), alg.basis_vector(b))
            right = table.bracket(images[a], alg.basis_vector(b))
            right2 = table.bracket(alg.basis_vector(a), images[b])
            if any(l - r - r2 for l, r, r2 in zip(left, right, right2)):
                return False
    return True


def preserves_brackets(alg, t):
    """T[e_a, e_b] == [T e_a, T e_b] on all basis pairs"""
    m = t.to_matrix(alg)
    table = alg.table
    images = [m.column(a) for a in range(alg.dim)]
    for a in range(alg.dim):
        for b in range(a + 1, alg.dim):
            left = m @ table.bracket(alg.basis_vector(a), alg.basis_vector(b))
            if left != table.bracket(images[a], images[b]):
                return False
    return True
