"""
Carnot Conformal
Derivations - Der(g), IsoDer(g) dan ConfDer(g) = RH + IsoDer(g)
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy import linalg

from .algebra import GradedMap, grading_derivation, is_derivation
from .errors import DerivationSpaceError
from .exactlin import (
    ONE,
    ZERO,
    Matrix,
    RowReducer,
    coordinates,
    sparse,
)
from .utils import get_logger


log = get_logger("derivations")


class DerivationKind(str, Enum):
    STRATA_PRESERVING = "der"
    ISOMETRIC = "iso"
    CONFORMAL = "conf"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class DerivationSpace:
    """
    Subalgebra of degree-0 derivations, stored by a basis of GradedMaps

    Elements are compared through their full n x n matrices, flattened
    row-major into vectors of length n^2.
    """
    alg: object
    kind: DerivationKind
    basis: tuple

    @property
    def dim(self):
        return len(self.basis)

    @cached_property
    def matrices(self):
        return [d.to_matrix(self.alg) for d in self.basis]

    @cached_property
    def _reducer(self):
        reducer = RowReducer(self.alg.dim ** 2)
        for m in self.matrices:
            reducer.add(sparse(m.flatten()))
        return reducer

    def contains(self, d):
        m = d.to_matrix(self.alg) if isinstance(d, GradedMap) else d
        return self._reducer.contains(sparse(m.flatten()))

    def coordinates(self, d):
        """Coefficients of d in this basis, or None kalau d is outside the span"""
        m = d.to_matrix(self.alg) if isinstance(d, GradedMap) else d
        return coordinates([x.flatten() for x in self.matrices], m.flatten())

    def bracket(self, i, k):
        return self.basis[i].commutator(self.basis[k], self.alg)

    def closure_failures(self):
        """Basis pairs (i, k) with [D_i, D_k] outside the span"""
        bad = []
        for i in range(self.dim):
            for k in range(i + 1, self.dim):
                a, b = self.matrices[i], self.matrices[k]
                if not self.contains(a @ b - b @ a):
                    bad.append((i, k))
        return bad

    def contains_grading(self):
        return self.contains(grading_derivation(self.alg))

    @classmethod
    def custom(cls, alg, maps):
        """
        Validate a user-supplied degree-zero algebra g0

        Args:
            alg (StratifiedAlgebra): base algebra
            maps (list[GradedMap]): spanning set

        Returns:
            DerivationSpace: kind CUSTOM, basis reduced to an independent subset

        Raises:
            DerivationSpaceError: a map is not a strata-preserving derivation,
                or the span is not closed under commutators
        """
        reducer = RowReducer(alg.dim ** 2)
        basis = []
        for position, d in enumerate(maps):
            if d.degree != 0:
                raise DerivationSpaceError(f"g0 element {position} has degree {d.degree}, expected 0")
            if not is_derivation(alg, d):
                raise DerivationSpaceError(f"g0 element {position} is not a derivation of {alg.name}")
            if reducer.add(sparse(d.to_matrix(alg).flatten())):
                basis.append(d)
        space = cls(alg, DerivationKind.CUSTOM, tuple(basis))
        failures = space.closure_failures()
        if failures:
            i, k = failures[0]
            raise DerivationSpaceError(f"g0 is not closed under brackets: [D{i}, D{k}] escapes the span")
        return space


def _block_layout(alg):
    """Variable offset of each diagonal block D_j (d_j x d_j, row-major)"""
    offsets, total = {}, 0
    for j in range(1, alg.step + 1):
        offsets[j] = total
        total += alg.layer_dim(j) ** 2
    return offsets, total


def _var(alg, offsets, a, r_local):
    """Unknown D_j[r_local, local(a)] for the column of basis vector a"""
    j = alg.layer_of(a)
    d = alg.layer_dim(j)
    return offsets[j] + r_local * d + (a - alg.offsets[j - 1])


def _derivation_rows(alg, offsets):
    """
    Sparse equations D[e_a, e_b] - [D e_a, e_b] - [e_a, D e_b] = 0 on all pairs a < b
    """
    table = alg.table
    rows = []
    for a in range(alg.dim):
        for b in range(a + 1, alg.dim):
            per_component = {}

            def put(component, var, coef):
                row = per_component.setdefault(component, {})
                value = row.get(var, ZERO) + coef
                if value:
                    row[var] = value
                else:
                    row.pop(var, None)

            # D[e_a, e_b]
            for k, coef in table.bracket_basis(a, b).items():
                j = alg.layer_of(k)
                for r_local, target in enumerate(alg.layer_indices(j)):
                    put(target, _var(alg, offsets, k, r_local), coef)
            # -[D e_a, e_b]
            for r_local, source in enumerate(alg.layer_indices(alg.layer_of(a))):
                for c, coef in table.bracket_basis(source, b).items():
                    put(c, _var(alg, offsets, a, r_local), -coef)
            # -[e_a, D e_b]
            for r_local, source in enumerate(alg.layer_indices(alg.layer_of(b))):
                for c, coef in table.bracket_basis(a, source).items():
                    put(c, _var(alg, offsets, b, r_local), -coef)
            rows.extend(row for row in per_component.values() if row)
    return rows


def _skew_rows(alg, offsets):
    """D_1 + D_1^T = 0 with the orthonormal first-layer basis"""
    first = list(alg.layer_indices(1))
    rows = []
    for r, a in enumerate(first):
        for c in range(r, len(first)):
            b = first[c]
            row = {}
            # D_1[r, c] + D_1[c, r]
            row[_var(alg, offsets, b, r)] = row.get(_var(alg, offsets, b, r), ZERO) + ONE
            row[_var(alg, offsets, a, c)] = row.get(_var(alg, offsets, a, c), ZERO) + ONE
            rows.append(row)
    return rows


def _solution_to_map(alg, offsets, vec):
    blocks = {}
    for j in range(1, alg.step + 1):
        d = alg.layer_dim(j)
        start = offsets[j]
        blocks[j] = Matrix.from_rows(
            [vec[start + r * d:start + (r + 1) * d] for r in range(d)], cols=d
        )
    return GradedMap(0, blocks)


def _solve_space(alg, kind, extra_rows=None):
    offsets, n_vars = _block_layout(alg)
    reducer = RowReducer(n_vars)
    reducer.extend(_derivation_rows(alg, offsets))
    if extra_rows:
        reducer.extend(extra_rows(alg, offsets))
    basis = tuple(_solution_to_map(alg, offsets, v) for v in reducer.nullspace())
    log.info("%s(%s) has dimension %d", kind.value, alg.name, len(basis))
    return DerivationSpace(alg, kind, basis)


def strata_preserving_derivations(alg):
    """
    Der(g): block-diagonal derivations, one nullspace solve over all layer blocks

    Args:
        alg (StratifiedAlgebra): valid algebra

    Returns:
        DerivationSpace: kind STRATA_PRESERVING
    """
    return _solve_space(alg, DerivationKind.STRATA_PRESERVING)


def _check_base_metric(alg, metric):
    if metric is not None and metric.gram(1).matrix != Matrix.identity(alg.layer_dim(1)):
        raise ValueError("IsoDer expects an orthonormal first-layer basis")


def iso_derivations(alg, metric=None):
    """
    IsoDer(g): derivations skew-symmetric on g_{-1}

    Args:
        alg (StratifiedAlgebra): valid algebra
        metric (InnerProductAssignment | None): induced metric; its first-layer Gram must be I

    Returns:
        DerivationSpace: kind ISOMETRIC
    """
    _check_base_metric(alg, metric)
    return _solve_space(alg, DerivationKind.ISOMETRIC, _skew_rows)


def conf_derivations(alg, metric=None):
    """
    ConfDer(g) = RH + IsoDer(g)

    Raises:
        DerivationSpaceError: H falls inside IsoDer (impossible, H is not skew)
    """
    iso = iso_derivations(alg, metric)
    h = grading_derivation(alg)
    if iso.contains(h):
        raise DerivationSpaceError(f"grading derivation of {alg.name} lies in IsoDer")
    space = DerivationSpace(alg, DerivationKind.CONFORMAL, (h,) + iso.basis)
    log.info("conf(%s) has dimension %d", alg.name, space.dim)
    return space


def _is_skew(block, gram):
    product = block.T @ gram + gram @ block
    return product.is_zero()


def is_skew_on_layers(alg, metric, d):
    """D^T G_{-j} + G_{-j} D = 0 on every layer"""
    return all(
        _is_skew(d.block(j), metric.gram(j).matrix) for j in range(1, alg.step + 1)
    )


def conformal_scale(alg, d):
    """The unique s with tr(D - sH) = 0 on g_{-1}"""
    return d.block(1).trace() / alg.layer_dim(1)


def is_conformal_element(alg, d, metric=None):
    """
    D - sH is skew on g_{-1} (on every layer when a metric is given)

    Args:
        alg (StratifiedAlgebra): base algebra
        d (GradedMap): degree-0 derivation
        metric (InnerProductAssignment | None): induced metric for the all-layer check

    Returns:
        bool: True kalau D is an infinitesimal conformal automorphism
    """
    s = conformal_scale(alg, d)
    rest = d + grading_derivation(alg).scale(-s)
    if metric is None:
        return _is_skew(rest.block(1), Matrix.identity(alg.layer_dim(1)))
    return is_skew_on_layers(alg, metric, rest)


def operator_norm_growth(alg, metric, d, t=1.0, tolerance=1e-9):
    """
    Approximate check of |T on g_{-j}| <= |T on g_{-1}|^j for T = exp(tD)

    Floating point: the exponential and the induced operator norms are
    evaluated with scipy, so the result is only approximate.

    Args:
        alg (StratifiedAlgebra): base algebra
        metric (InnerProductAssignment): induced metric
        d (GradedMap): strata-preserving derivation
        t (float): flow time
        tolerance (float): slack on the comparison

    Returns:
        list[tuple]: (j, |T_j|, |T_1|^j, ok) per layer
    """
    norms = []
    for j in range(1, alg.step + 1):
        block = np.array([[float(x) for x in row] for row in d.block(j).entries])
        gram = np.array([[float(x) for x in row] for row in metric.gram(j).matrix.entries])
        chol = np.linalg.cholesky(gram)
        transfer = linalg.expm(t * block)
        conjugated = chol.T @ transfer @ np.linalg.inv(chol.T)
        norms.append(float(linalg.norm(conjugated, 2)))
    first = norms[0]
    return [
        (j, value, first ** j, value <= first ** j + tolerance)
        for j, value in enumerate(norms, start=1)
    ]
