"""
Carnot Conformal
Metric - canonical layer inner products induced from an orthonormal first layer
"""

from dataclasses import dataclass
from functools import lru_cache

from .errors import DimensionMismatchError, RankDeficiencyError
from .exactlin import (
    ZERO,
    Matrix,
    SymmetricForm,
    dot,
    inverse,
    min_norm_preimage,
    rank,
    signature,
    to_rational,
)
from .utils import get_logger


log = get_logger("metric")


def _check_layer(alg, j):
    if not 1 <= j <= alg.step:
        raise ValueError(f"layer {j} outside 1..{alg.step} for {alg.name}")


@lru_cache(maxsize=256)
def tensor_projection_matrix(alg, j):
    """
    Matrix of P_j : g_{-1}^{(x)j} -> g_{-j}

    Columns follow the lexicographic tensor basis E_{i_1} (x) ... (x) E_{i_j};
    column (i_1, ..., i_j) holds the layer-j coordinates of the left-nested
    bracket [ ... [E_{i_1}, E_{i_2}], ..., E_{i_j}].

    Args:
        alg (StratifiedAlgebra): valid algebra
        j (int): layer, 1 <= j <= s

    Returns:
        Matrix: d_j x d_1^j

    Raises:
        RankDeficiencyError: P_j not surjective (stratification is broken)
    """
    _check_layer(alg, j)
    first = list(alg.layer_indices(1))
    nested = [{a: to_rational(1)} for a in first]
    for _ in range(j - 1):
        nested = [
            alg.table.bracket_sparse(prefix, {a: to_rational(1)})
            for prefix in nested
            for a in first
        ]
    layer = list(alg.layer_indices(j))
    columns = [tuple(v.get(c, ZERO) for c in layer) for v in nested]
    p = Matrix.from_columns(columns, rows=len(layer))
    if rank(p) != len(layer):
        raise RankDeficiencyError(
            f"P_{j} of {alg.name} has rank {rank(p)} < dim g_-{j} = {len(layer)}"
        )
    return p


def induced_gram(alg, j):
    """
    Gram matrix of the canonical inner product on g_{-j}

    The first-layer basis is orthonormal, and g_{-j} inherits the inner
    product of (ker P_j)^perp through P_j, which gives G = (P_j P_j^T)^{-1}.

    Args:
        alg (StratifiedAlgebra): valid algebra
        j (int): layer

    Returns:
        SymmetricForm: d_j x d_j Gram
    """
    p = tensor_projection_matrix(alg, j)
    return SymmetricForm(inverse(p @ p.T))


def lift(alg, j, w):
    """
    Minimal-norm tensor tau with P_j(tau) = w

    Args:
        alg (StratifiedAlgebra): valid algebra
        j (int): layer
        w: layer-j coordinates

    Returns:
        tuple: tau in the lexicographic tensor basis
    """
    return min_norm_preimage(tensor_projection_matrix(alg, j), w)


def tensor_norm_squared(tau):
    """Standard norm on g_{-1}^{(x)j}; the first-layer basis is orthonormal"""
    return dot(tau, tau)


@dataclass(frozen=True, eq=False)
class InnerProductAssignment:
    """One Gram per layer; the layers are mutually orthogonal"""
    alg: object
    grams: tuple

    def __post_init__(self):
        if len(self.grams) != self.alg.step:
            raise DimensionMismatchError(
                f"{len(self.grams)} Gram matrices for {self.alg.step} layers"
            )
        for j, gram in enumerate(self.grams, start=1):
            d = self.alg.layer_dim(j)
            if gram.dim != d:
                raise DimensionMismatchError(f"Gram of layer {j} has size {gram.dim}, expected {d}")
            if signature(gram) != (d, 0, 0):
                raise ValueError(f"Gram of layer {j} is not positive definite")

    def gram(self, j):
        return self.grams[j - 1]

    def total_gram(self):
        """Block-diagonal Gram on g"""
        return SymmetricForm(Matrix.block_diagonal([g.matrix for g in self.grams]))

    def inner(self, x, y):
        if len(x) != self.alg.dim or len(y) != self.alg.dim:
            raise DimensionMismatchError(f"vectors must have length {self.alg.dim}")
        total = ZERO
        for j, gram in enumerate(self.grams, start=1):
            total += gram(self.alg.project(x, j), self.alg.project(y, j))
        return total

    def norm_squared(self, x):
        return self.inner(x, x)


def induced_metric(alg):
    """
    Canonical inner product on every layer

    Returns:
        InnerProductAssignment: G_{-1} = I and G_{-j} = (P_j P_j^T)^{-1}
    """
    grams = tuple(induced_gram(alg, j) for j in range(1, alg.step + 1))
    log.debug("induced metric on %s: layer Grams of sizes %s", alg.name, [g.dim for g in grams])
    return InnerProductAssignment(alg, grams)


def norm_squared(assignment, x):
    return assignment.norm_squared(x)


def inner(assignment, x, y):
    return assignment.inner(x, y)


def _j_operator(alg, gram2, z):
    """J_Z on g_{-1}: <J_Z X, Y> = <Z, [X, Y]> with orthonormal g_{-1}"""
    first = list(alg.layer_indices(1))
    second = list(alg.layer_indices(2))
    weights = gram2.matrix @ z
    rows = [[ZERO] * len(first) for _ in first]
    for col, a in enumerate(first):
        for row, b in enumerate(first):
            value = alg.table.bracket_basis(a, b)
            rows[row][col] = sum((weights[k] * value.get(c, ZERO) for k, c in enumerate(second)), ZERO)
    return Matrix.from_rows(rows, cols=len(first))


def h_type_constant(alg, assignment=None):
    """
    lambda with J_Z^2 = -lambda |Z|^2 I for every Z in g_{-2}, or None

    Args:
        alg (StratifiedAlgebra): step-2 algebra
        assignment (InnerProductAssignment | None): defaults to the induced metric

    Returns:
        Fraction | None: None kalau the algebra is not of H-type for this metric
    """
    if alg.step != 2:
        return None
    assignment = assignment or induced_metric(alg)
    gram2 = assignment.gram(2)
    d1, d2 = alg.layer_dim(1), alg.layer_dim(2)
    basis = [tuple(to_rational(int(i == k)) for i in range(d2)) for k in range(d2)]
    js = [_j_operator(alg, gram2, z) for z in basis]
    identity = Matrix.identity(d1)
    lam = None
    # polarized identity J_Z J_W + J_W J_Z = -2 lambda <Z, W> I on basis pairs
    for a in range(d2):
        for b in range(a, d2):
            product = js[a] @ js[b] + js[b] @ js[a]
            g = gram2.matrix[a, b]
            if not g:
                if not product.is_zero():
                    return None
                continue
            value = -product[0, 0] / (2 * g)
            if product != identity.scale(-2 * g * value):
                return None
            if lam is None:
                lam = value
            elif lam != value:
                return None
    if lam is None or lam <= 0:
        return None
    return lam
