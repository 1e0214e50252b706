"""
Carnot Conformal
Prolongation - Tanaka prolongation Prol(g, g0) degree by degree, with bracket synthesis
"""

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

from .algebra import GradedMap, LieTable, add_scaled, grading_derivation, table_center
from .config import Settings
from .derivations import (
    DerivationKind,
    DerivationSpace,
    conf_derivations,
    strata_preserving_derivations,
)
from .errors import BracketEscapeError, DegreeCapExceededError, GradingElementMissingError
from .exactlin import (
    ONE,
    ZERO,
    Matrix,
    RowReducer,
    inverse,
    min_norm_preimage,
    nullspace,
    nullspace_of_rows,
    rank,
    sparse,
    unit_vector,
)
from .utils import get_logger


log = get_logger("prolong")


@dataclass(frozen=True)
class ProlongationLayer:
    """
    Basis of g_k (k >= 1). Element u is stored as a GradedMap of degree k whose
    block p is the component u_p : g_{-p} -> g_{k-p}, written in the basis of
    the target piece (an algebra layer, g0, or an earlier prolongation layer).
    """
    degree: int
    elements: tuple

    @property
    def dim(self):
        return len(self.elements)


@dataclass(frozen=True, eq=False)
class Prolongation:
    """
    Graded algebra p = g_{-s} + ... + g_{-1} + g_0 + g_1 + ... + g_t

    Flat basis order: the base algebra's basis (layer g_{-1} first), then
    the g0 basis, then g_1, g_2, ... in degree order.
    """
    alg: object
    g0: DerivationSpace
    layers: tuple = ()
    truncated: bool = False
    max_degree: int = 12
    completed: bool = False
    conditional: bool = False
    table: Optional[LieTable] = None

    @property
    def top_degree(self):
        return len(self.layers)

    def piece_dim(self, m):
        """dim g_m for any degree m"""
        if m < 0:
            return self.alg.layer_dim(-m)
        if m == 0:
            return self.g0.dim
        if m <= len(self.layers):
            return self.layers[m - 1].dim
        return 0

    def piece_elements(self, m):
        """GradedMap basis of the nonnegative piece g_m"""
        if m == 0:
            return self.g0.basis
        if m <= len(self.layers):
            return self.layers[m - 1].elements
        return ()

    def piece_offset(self, m):
        if m < 0:
            return self.alg.offsets[-m - 1] if -m <= self.alg.step else self.dim
        offset = self.alg.dim + self.g0.dim
        if m == 0:
            return self.alg.dim
        return offset + sum(layer.dim for layer in self.layers[:m - 1])

    def piece_indices(self, m):
        start = self.piece_offset(m)
        return range(start, start + self.piece_dim(m))

    @property
    def dim(self):
        return self.alg.dim + self.g0.dim + sum(layer.dim for layer in self.layers)

    @property
    def total_dim(self):
        return self.dim

    @property
    def base_dim(self):
        """dim g + dim g0"""
        return self.alg.dim + self.g0.dim

    @property
    def positive_dim(self):
        return sum(layer.dim for layer in self.layers)

    def layer_dims(self):
        """{degree: dimension} for -s <= degree <= t"""
        return {m: self.piece_dim(m) for m in range(-self.alg.step, self.top_degree + 1)}

    def degree_profile(self):
        return [self.piece_dim(m) for m in range(-self.alg.step, self.top_degree + 1)]

    @property
    def degrees(self):
        return tuple(
            m for m in range(-1, -self.alg.step - 1, -1) for _ in range(self.piece_dim(m))
        ) + tuple(m for m in range(0, self.top_degree + 1) for _ in range(self.piece_dim(m)))

    def grading_vector(self):
        """H in flat coordinates"""
        coords = self.g0.coordinates(grading_derivation(self.alg))
        if coords is None:
            raise GradingElementMissingError(f"H not in g0 for {self.alg.name}")
        vec = [ZERO] * self.dim
        for i, c in zip(self.piece_indices(0), coords):
            vec[i] = c
        return tuple(vec)

    def element_vector(self, m, i):
        """Flat unit vector of the i-th basis element of g_m"""
        return unit_vector(self.dim, self.piece_offset(m) + i)

    def positive_indices(self):
        return range(self.alg.dim + self.g0.dim, self.dim)


# =============================================================================
# DEGREE-BY-DEGREE RECURSION
# =============================================================================

@lru_cache(maxsize=256)
def _layer_bracket_data(alg, p):
    """
    Bracket map beta_p : g_{-1} (x) g_{-(p-1)} -> g_{-p}, its relations and sections

    Tensor e_a (x) f_b has column a * d_{p-1} + b. For p > s the target is
    zero and every tensor is a relation.

    Returns:
        tuple: (beta_p, nullspace basis, minimal-norm preimage of each e_w)
    """
    first = list(alg.layer_indices(1))
    previous = list(alg.layer_indices(p - 1))
    target = list(alg.layer_indices(p))
    columns = []
    for a in first:
        for b in previous:
            value = alg.table.bracket_basis(a, b)
            columns.append(tuple(value.get(c, ZERO) for c in target))
    beta = Matrix.from_columns(columns, rows=len(target))
    relations = nullspace(beta)
    sections = [min_norm_preimage(beta, unit_vector(len(target), w)) for w in range(len(target))]
    return beta, relations, sections


def _combine(forms_list, coefs):
    """sum_i coefs[i] * forms_list[i], each entry a list of linear forms"""
    size = len(forms_list[0]) if forms_list else 0
    result = [{} for _ in range(size)]
    for forms, coef in zip(forms_list, coefs):
        if not coef:
            continue
        for t, form in enumerate(forms):
            add_scaled(result[t], form, coef)
    return result


def _evaluate(form, solution):
    return sum((coef * solution[var] for var, coef in form.items()), ZERO)


def _negative_actions(partial, k, p, d1):
    """
    [e_a, h_i] for e_a in g_{-1} and h_i the basis of g_{k-p+1}, in g_{k-p} coordinates
    """
    alg = partial.alg
    source_degree = k - p + 1
    target_dim = partial.piece_dim(k - p)
    actions = []
    if source_degree >= 0:
        elements = partial.piece_elements(source_degree)
        for a in range(d1):
            actions.append([
                {t: -x for t, x in enumerate(h.block(1).column(a)) if x}
                for h in elements
            ])
        return actions
    layer = -source_degree
    target = list(alg.layer_indices(layer + 1))
    for a in alg.layer_indices(1):
        row = []
        for i in alg.layer_indices(layer):
            value = alg.table.bracket_basis(a, i)
            row.append({t: value[c] for t, c in enumerate(target) if c in value})
        actions.append(row)
    if target_dim != len(target):
        raise RuntimeError("target piece mismatch in prolongation step")
    return actions


def prolong_step(partial, k):
    """
    Compute g_k from the pieces of degree < k

    Unknowns are the entries of u_1 : g_{-1} -> g_{k-1}; variable a * m + c is
    the coefficient of the c-th basis element of g_{k-1} in u_1(e_a). The
    components u_p are linear forms in these unknowns, defined through a
    section of the bracket map, and well-definedness on every relation of
    g_{-1} (x) g_{-(p-1)} (p = 2 .. s+1) gives the linear constraints.

    Args:
        partial (Prolongation): pieces of degree < k
        k (int): degree >= 1

    Returns:
        ProlongationLayer: basis of g_k (possibly empty)
    """
    alg = partial.alg
    if k < 1:
        raise ValueError(f"prolongation degree must be >= 1, got {k}")
    if len(partial.layers) < k - 1 and not partial.completed:
        raise ValueError(f"layers below degree {k} are not built yet")
    d1 = alg.layer_dim(1)
    m = partial.piece_dim(k - 1)
    n_vars = d1 * m
    if n_vars == 0:
        return ProlongationLayer(k, ())

    previous = partial.piece_elements(k - 1)
    # symbolic[p][b][t]: coefficient form of u_p(f_b) along basis t of g_{k-p}
    symbolic = {1: [[{a * m + c: ONE} for c in range(m)] for a in range(d1)]}
    reducer = RowReducer(n_vars)

    for p in range(2, alg.step + 2):
        _, relations, sections = _layer_bracket_data(alg, p)
        dq = alg.layer_dim(p - 1)
        target_dim = partial.piece_dim(k - p)
        if target_dim == 0:
            if p <= alg.step:
                symbolic[p] = [[] for _ in range(alg.layer_dim(p))]
            continue
        columns = [g.block(p - 1) for g in previous]
        actions = _negative_actions(partial, k, p, d1)

        pair_forms = []
        for a in range(d1):
            for b in range(dq):
                forms = [{} for _ in range(target_dim)]
                # [u_1 e_a, f_b]
                for c, block in enumerate(columns):
                    var = a * m + c
                    for t in range(target_dim):
                        x = block[t, b]
                        if x:
                            forms[t][var] = forms[t].get(var, ZERO) + x
                # [e_a, u_{p-1} f_b]
                for i, h_form in enumerate(symbolic[p - 1][b]):
                    for t, x in actions[a][i].items():
                        add_scaled(forms[t], h_form, x)
                pair_forms.append(forms)

        for relation in relations:
            for form in _combine(pair_forms, relation):
                if form:
                    reducer.add(form)
        if p <= alg.step:
            symbolic[p] = [_combine(pair_forms, section) for section in sections]

    elements = []
    for solution in reducer.nullspace():
        blocks = {}
        for p in range(1, alg.step + 1):
            rows = partial.piece_dim(k - p)
            forms = symbolic[p]
            blocks[p] = Matrix.from_rows(
                [[_evaluate(forms[w][t], solution) for w in range(alg.layer_dim(p))] for t in range(rows)],
                cols=alg.layer_dim(p),
            )
        elements.append(GradedMap(k, blocks))
    log.debug("degree %d of %s: %d unknowns, rank %d, dim %d",
              k, alg.name, n_vars, reducer.rank, len(elements))
    return ProlongationLayer(k, tuple(elements))


def _resolve_g0(alg, g0_choice):
    if isinstance(g0_choice, DerivationSpace):
        return g0_choice, g0_choice.kind == DerivationKind.CUSTOM
    if g0_choice in ("conf", DerivationKind.CONFORMAL):
        return conf_derivations(alg), False
    if g0_choice in ("der", DerivationKind.STRATA_PRESERVING):
        return strata_preserving_derivations(alg), False
    if isinstance(g0_choice, (list, tuple)):
        return DerivationSpace.custom(alg, g0_choice), True
    raise ValueError(f"unknown g0 choice {g0_choice!r}; use 'conf', 'der' or a list of derivations")


def prolong(alg, g0_choice="conf", max_degree=None, strict=False):
    """
    Tanaka prolongation Prol(g, g0)

    Iterates prolong_step until the first zero layer. When the layer of
    degree max_degree is still nonzero the result is marked truncated and
    carries no bracket table.

    Args:
        alg (StratifiedAlgebra): valid algebra
        g0_choice: "conf", "der", a DerivationSpace, or a list of GradedMaps (custom)
        max_degree (int | None): degree cap, Settings().max_degree when None
        strict (bool): raise DegreeCapExceededError instead of returning a truncated result

    Returns:
        Prolongation: with synthesized bracket table unless truncated

    Raises:
        GradingElementMissingError: H not in g0
        DegreeCapExceededError: strict and the cap was reached
    """
    if max_degree is None:
        max_degree = Settings().max_degree
    if max_degree < 1:
        raise ValueError(f"max_degree must be >= 1, got {max_degree}")
    g0, conditional = _resolve_g0(alg, g0_choice)
    if not g0.contains_grading():
        raise GradingElementMissingError(f"H not in g0 for {alg.name}")

    partial = Prolongation(alg, g0, (), False, max_degree, False, conditional)
    layers = []
    truncated = False
    for k in range(1, max_degree + 1):
        layer = prolong_step(partial, k)
        log.info("%s: dim g_%d = %d", alg.name, k, layer.dim)
        if layer.dim == 0:
            break
        layers.append(layer)
        partial = replace(partial, layers=tuple(layers))
        if k == max_degree:
            truncated = True

    result = replace(partial, layers=tuple(layers), truncated=truncated, completed=not truncated)
    if truncated:
        log.warning("%s: degree cap %d reached with nonzero layer", alg.name, max_degree)
        if strict:
            raise DegreeCapExceededError(
                f"prolongation of {alg.name} did not terminate by degree {max_degree}",
                prolongation=result,
            )
        return result
    return replace(result, table=synthesize_brackets(result))


# =============================================================================
# BRACKET SYNTHESIS
# =============================================================================

class _BracketBuilder:
    """Memoized basis brackets on the flat basis of a prolongation"""

    def __init__(self, prol):
        self.prol = prol
        self.alg = prol.alg
        self.degrees = prol.degrees
        self.cache = {}
        self.solvers = {}
        self.first = list(self.alg.layer_indices(1))

    def _element(self, a):
        m = self.degrees[a]
        return self.prol.piece_elements(m)[a - self.prol.piece_offset(m)]

    def apply(self, a, b):
        """[u, X] = u_q(X) for u = e_a nonnegative and X = e_b in g_{-q}"""
        u = self._element(a)
        q = -self.degrees[b]
        column = u.block(q).column(b - self.alg.offsets[q - 1])
        target = self.prol.piece_offset(self.degrees[a] - q)
        return {target + t: x for t, x in enumerate(column) if x}

    def basis_bracket(self, a, b):
        key = (a, b)
        if key in self.cache:
            return self.cache[key]
        da, db = self.degrees[a], self.degrees[b]
        if a == b:
            value = {}
        elif da < 0 and db < 0:
            value = dict(self.alg.table.bracket_basis(a, b))
        elif da >= 0 and db < 0:
            value = self.apply(a, b)
        elif da < 0 and db >= 0:
            value = {k: -x for k, x in self.apply(b, a).items()}
        else:
            value = self._synthesize(a, b)
        self.cache[key] = value
        return value

    def bracket(self, x, y):
        result = {}
        for a, xa in x.items():
            for b, yb in y.items():
                add_scaled(result, self.basis_bracket(a, b), xa * yb)
        return result

    def _solver(self, m):
        """Left inverse of u -> u_1 on g_m, as (matrix, left inverse)"""
        if m not in self.solvers:
            elements = self.prol.piece_elements(m)
            if not elements:
                self.solvers[m] = None
            else:
                a = Matrix.from_columns([u.block(1).flatten() for u in elements])
                self.solvers[m] = (a, inverse(a.T @ a) @ a.T)
        return self.solvers[m]

    def _synthesize(self, a, b):
        """[u, v] for u, v of nonnegative degree, fixed by its action on g_{-1}"""
        total = self.degrees[a] + self.degrees[b]
        target = self.prol.piece_offset(total - 1)
        rows = self.prol.piece_dim(total - 1)
        action = [[ZERO] * len(self.first) for _ in range(rows)]
        for col, x in enumerate(self.first):
            image = self.bracket({a: ONE}, self.basis_bracket(b, x))
            add_scaled(image, self.bracket({b: ONE}, self.basis_bracket(a, x)), -ONE)
            for k, value in image.items():
                local = k - target
                if not 0 <= local < rows:
                    raise BracketEscapeError(
                        f"[{a},{b}] acts outside degree {total - 1} on g_-1"
                    )
                action[local][col] = value
        flat = tuple(x for row in action for x in row)
        solver = self._solver(total) if total <= self.prol.top_degree else None
        if solver is None:
            if any(flat):
                raise BracketEscapeError(
                    f"bracket of basis elements {a}, {b} escapes the computed degree {total}"
                )
            return {}
        matrix, left_inverse = solver
        coords = left_inverse @ flat
        if matrix @ coords != flat:
            raise BracketEscapeError(
                f"bracket of basis elements {a}, {b} is not in the computed layer of degree {total}"
            )
        start = self.prol.piece_offset(total)
        return {start + i: c for i, c in enumerate(coords) if c}


def synthesize_brackets(prol):
    """
    Full structure constants of the prolongation

    [u, X] = u(X) for u of degree >= 0 and X in g; two nonnegative elements
    bracket to the unique element of degree j + k acting on X in g_{-1} as
    [u, [v, X]] - [v, [u, X]]. On g0 x g0 this is the commutator of derivations.

    Returns:
        LieTable: with degrees and grading element

    Raises:
        BracketEscapeError: a synthesized bracket has no preimage in the computed layer
    """
    if prol.truncated:
        raise DegreeCapExceededError(
            f"no bracket table for the truncated prolongation of {prol.alg.name}",
            prolongation=prol,
        )
    builder = _BracketBuilder(prol)
    constants = {}
    for a in range(prol.dim):
        for b in range(a + 1, prol.dim):
            value = builder.basis_bracket(a, b)
            if value:
                constants[(a, b)] = value
    table = LieTable.from_constants(
        prol.dim, constants, degrees=prol.degrees, grading_element=prol.grading_vector()
    )
    log.debug("synthesized %d nonzero brackets for %s", len(constants), prol.alg.name)
    return table


# =============================================================================
# CHECKS
# =============================================================================

def check_jacobi(prol):
    """Basis triples violating Jacobi (empty when the table is a Lie algebra)"""
    return prol.table.jacobi_violations()


def check_injectivity(prol):
    """Degrees k >= 0 where u -> u_1 has a kernel"""
    bad = []
    for m in range(0, prol.top_degree + 1):
        elements = prol.piece_elements(m)
        if not elements:
            continue
        firsts = Matrix.from_columns([u.block(1).flatten() for u in elements])
        if rank(firsts) != len(elements):
            bad.append(m)
    return bad


def check_grading_action(prol):
    """Flat indices a with [H, e_a] != -deg(a) e_a"""
    table = prol.table
    h = sparse(table.grading_element)
    bad = []
    for a in range(table.dim):
        expected = {a: -table.degrees[a] * ONE} if table.degrees[a] else {}
        if table.bracket_sparse(h, {a: ONE}) != expected:
            bad.append(a)
    return bad


def check_degree_compatibility(prol):
    """Pairs (a, b) whose bracket has a component outside degree deg(a) + deg(b)"""
    degrees = prol.table.degrees
    return [
        (a, b) for (a, b), value in prol.table.constants.items()
        if any(degrees[c] != degrees[a] + degrees[b] for c in value)
    ]


def trivial_center(prol):
    """ad is faithful on the prolongation"""
    return not table_center(prol.table)


def check_g0_action(prol):
    """Degrees k != 0 with [g0, g_k] != g_k"""
    table = prol.table
    g0 = [prol.element_vector(0, i) for i in range(prol.g0.dim)]
    bad = []
    for m in range(-prol.alg.step, prol.top_degree + 1):
        if m == 0:
            continue
        piece = [prol.element_vector(m, i) for i in range(prol.piece_dim(m))]
        if len(table.bracket_span(g0, piece)) != len(piece):
            bad.append(m)
    return bad


def check_generation(prol):
    """True kalau g_-1 generates exactly the negative part g inside p"""
    first = [unit_vector(prol.dim, a) for a in prol.alg.layer_indices(1)]
    generated = prol.table.generated_subalgebra(first)
    return len(generated) == prol.alg.dim and all(
        c < prol.alg.dim for v in generated for c in sparse(v)
    )


def central_action_kernel(prol, x):
    """
    Kernel of ad(x) restricted to g_1 + ... + g_t

    Args:
        prol (Prolongation): completed prolongation
        x: flat vector, typically central in g

    Returns:
        list[tuple]: kernel basis in coordinates of the positive part
    """
    positive = list(prol.positive_indices())
    x = sparse(x)
    per_component = {}
    for local, b in enumerate(positive):
        for c, coef in prol.table.bracket_sparse(x, {b: ONE}).items():
            per_component.setdefault(c, {})[local] = coef
    return nullspace_of_rows(list(per_component.values()), len(positive))
