"""
Carnot Conformal
Structure - Killing form, solvable radical, centroid dan the rigid / Iwasawa classifier
"""

from .algebra import validate
from .derivations import conf_derivations
from .errors import (
    AlgebraValidationError,
    CertificateNotApplicableError,
    DegreeCapExceededError,
    RadicalNotSolvableError,
)
from .exactlin import (
    ONE,
    ZERO,
    Matrix,
    RowReducer,
    SymmetricForm,
    nullspace_of_rows,
    signature,
    sparse,
    unit_vector,
)
from .metric import induced_metric
from .prolong import prolong
from .report_schema import ClassificationReport, RankOneCertificate, Verdict
from .utils import format_rational, get_logger


log = get_logger("structure")


def _table_of(obj):
    """Accept a LieTable or anything carrying one as .table"""
    if not hasattr(obj, "table"):
        return obj
    if obj.table is None:
        raise DegreeCapExceededError(
            f"no bracket table: prolongation of {obj.alg.name} was truncated at degree {obj.max_degree}",
            prolongation=obj,
        )
    return obj.table


def killing_form(table):
    """
    B(x, y) = tr(ad x ad y) on the basis

    With [e_a, e_c] = sum_d C(a,c,d) e_d the entry is
    sum over c, d of C(a,c,d) C(b,d,c).

    Args:
        table (LieTable | Prolongation): finite-dimensional algebra

    Returns:
        SymmetricForm: n x n
    """
    table = _table_of(table)
    n = table.dim
    entries = [[] for _ in range(n)]
    for (a, c), value in table.constants.items():
        for d, coef in value.items():
            entries[a].append((c, d, coef))
    rows = [[ZERO] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            total = ZERO
            for c, d, coef in entries[a]:
                other = table.constants.get((b, d))
                if other:
                    x = other.get(c)
                    if x:
                        total += coef * x
            rows[a][b] = rows[b][a] = total
    return SymmetricForm(Matrix.from_rows(rows, cols=n))


def centralizer(table, x):
    """{ y : [x, y] = 0 }"""
    table = _table_of(table)
    x = sparse(x)
    per_component = {}
    for b in range(table.dim):
        for c, coef in table.bracket_sparse(x, {b: ONE}).items():
            per_component.setdefault(c, {})[b] = coef
    return nullspace_of_rows(list(per_component.values()), table.dim)


def _span_is_solvable(table, basis, limit):
    current = basis
    for _ in range(limit):
        if not current:
            return True
        following = table.bracket_span(current, current)
        if len(following) == len(current):
            return False
        current = following
    return not current


def derived_series(table):
    """
    L, [L, L], [[L, L], [L, L]], ... until zero or a fixed point

    Returns:
        list[list[tuple]]: bases, the last repeated step not included
    """
    table = _table_of(table)
    current = [unit_vector(table.dim, a) for a in range(table.dim)]
    series = [current]
    while current:
        following = table.bracket_span(current, current)
        if len(following) == len(current):
            break
        series.append(following)
        current = following
    return series


def is_solvable(table):
    return not derived_series(table)[-1]


def solvable_radical(table):
    """
    rad(L) = { x : B(x, [L, L]) = 0 }

    Raises:
        RadicalNotSolvableError: the computed subspace fails the derived-series test
    """
    table = _table_of(table)
    form = killing_form(table)
    derived = table.derived_algebra()
    rows = [sparse(form.matrix @ y) for y in derived]
    radical = nullspace_of_rows(rows, table.dim)
    if not _span_is_solvable(table, radical, table.dim + 1):
        raise RadicalNotSolvableError("derived series of the computed radical does not terminate")
    log.debug("radical of a %d-dim algebra has dimension %d", table.dim, len(radical))
    return radical


def is_H_graded(table, basis):
    """Every degree component of every basis vector stays in the span"""
    table = _table_of(table)
    if not basis:
        return True
    reducer = RowReducer(table.dim).extend(sparse(v) for v in basis)
    degrees = table.degrees
    for v in basis:
        components = {}
        for a, x in sparse(v).items():
            components.setdefault(degrees[a], {})[a] = x
        if any(not reducer.contains(part) for part in components.values()):
            return False
    return True


def centroid_dim(table):
    """
    dim { phi in End(L) : phi ad(x) = ad(x) phi for all basis x }

    When the table carries a grading element, phi commutes with its ad and
    the unknowns are restricted to degree-preserving entries.
    """
    table = _table_of(table)
    n = table.dim
    if table.has_valid_grading_element():
        degrees = table.degrees
        pairs = [(r, c) for r in range(n) for c in range(n) if degrees[r] == degrees[c]]
    else:
        pairs = [(r, c) for r in range(n) for c in range(n)]
    var = {pair: i for i, pair in enumerate(pairs)}
    by_column = {}
    for r, c in pairs:
        by_column.setdefault(c, []).append(r)

    reducer = RowReducer(len(pairs))
    for a in range(n):
        for b in range(n):
            per_component = {}
            # phi([e_a, e_b])
            for k, coef in table.bracket_basis(a, b).items():
                for t in by_column.get(k, ()):
                    row = per_component.setdefault(t, {})
                    row[var[(t, k)]] = row.get(var[(t, k)], ZERO) + coef
            # -[e_a, phi(e_b)]
            for r in by_column.get(b, ()):
                for t, coef in table.bracket_basis(a, r).items():
                    row = per_component.setdefault(t, {})
                    row[var[(r, b)]] = row.get(var[(r, b)], ZERO) - coef
            for row in per_component.values():
                row = {k: v for k, v in row.items() if v}
                if row:
                    reducer.add(row)
    return len(pairs) - reducer.rank


def graded_ideal_search(table):
    """
    Proper nonzero ideals generated by single homogeneous basis vectors

    Returns:
        list[list[tuple]]: distinct ideal bases
    """
    table = _table_of(table)
    n = table.dim
    found = []
    seen = set()
    for a in range(n):
        reducer = RowReducer(n)
        queue = [{a: ONE}]
        while queue:
            v = queue.pop()
            if not reducer.add(v):
                continue
            queue.extend(table.bracket_sparse({b: ONE}, v) for b in range(n))
        if reducer.rank < n:
            key = tuple(reducer.basis())
            if key not in seen:
                seen.add(key)
                found.append(list(key))
    return found


def rank_one_certificate(prol):
    """
    Centralizer Z of H lies in degree 0, B(H, H) > 0 and B on Z has signature (1, dim Z - 1, 0)

    Raises:
        CertificateNotApplicableError: no bracket table, or g_1 = 0
    """
    if prol.table is None:
        raise CertificateNotApplicableError("rank-one certificate needs a completed prolongation")
    if prol.piece_dim(1) == 0:
        raise CertificateNotApplicableError(
            f"{prol.alg.name} has g_1 = 0; the rank-one certificate does not apply"
        )
    table = prol.table
    h = prol.grading_vector()
    z = centralizer(table, h)
    in_degree_zero = all(
        table.degrees[a] == 0 for v in z for a, x in enumerate(v) if x
    )
    form = killing_form(table)
    bhh = form(h, h)
    sig = signature(form.restrict(z))
    expected = (1, len(z) - 1, 0)
    certificate = RankOneCertificate(
        passed=in_degree_zero and bhh > 0 and sig == expected,
        centralizer_dim=len(z),
        centralizer_in_degree_zero=in_degree_zero,
        grading_norm_positive=bhh > 0,
        killing_h_h=format_rational(bhh),
        centralizer_signature=list(sig),
        signature_ok=sig == expected,
    )
    log.info("rank-one certificate for %s: %s", prol.alg.name, "passed" if certificate.passed else "failed")
    return certificate


def classify(alg, max_degree=None, allow_small=False):
    """
    Rigid / Iwasawa dichotomy for g0 = ConfDer(g)

    Args:
        alg (StratifiedAlgebra): valid algebra
        max_degree (int | None): prolongation cap
        allow_small (bool): accept dimension < 3

    Returns:
        ClassificationReport: RIGID when g_1 = 0, IWASAWA when every
            certificate passes, INCONCLUSIVE otherwise

    Raises:
        AlgebraValidationError: alg is not a stratified algebra
        DegreeCapExceededError: prolongation truncated
    """
    check = validate(alg, allow_small=allow_small)
    if not check.valid:
        raise AlgebraValidationError(f"{alg.name} is not a valid stratified algebra", check.violations)
    metric = induced_metric(alg)
    g0 = conf_derivations(alg, metric)
    prol = prolong(alg, g0, max_degree=max_degree)
    if prol.truncated:
        raise DegreeCapExceededError(
            f"prolongation of {alg.name} truncated at degree {prol.max_degree}",
            prolongation=prol,
        )
    table = prol.table
    form = killing_form(table)
    sig = signature(form)
    radical = solvable_radical(table)
    radical_graded = is_H_graded(table, radical)
    notes = []
    centroid = None
    certificate = None

    if prol.piece_dim(1) == 0:
        verdict = Verdict.RIGID
        if prol.total_dim != prol.base_dim:
            verdict = Verdict.INCONCLUSIVE
            notes.append(f"dim p = {prol.total_dim} differs from dim g + dim ConfDer = {prol.base_dim}")
        else:
            notes.append("p = g + ConfDer(g): every conformal map is affine")
        if not radical_graded:
            notes.append("radical is not H-graded")
    else:
        centroid = centroid_dim(table)
        certificate = rank_one_certificate(prol)
        failures = []
        if sig[2] != 0:
            failures.append(f"Killing form degenerate ({sig[2]} zero directions)")
        if radical:
            failures.append(f"radical has dimension {len(radical)}")
        if centroid != 1:
            failures.append(f"centroid has dimension {centroid}")
            if not radical:
                ideals = graded_ideal_search(table)
                failures.append(f"graded ideal search found {len(ideals)} proper ideal(s)")
        for name in certificate.failing():
            failures.append(f"rank-one sub-check {name} failed")
        if failures:
            verdict = Verdict.INCONCLUSIVE
            notes.extend(failures)
        else:
            verdict = Verdict.IWASAWA
            notes.append("p is simple of real rank one (rank-one certificate, paper's criterion)")

    report = ClassificationReport(
        name=alg.name,
        verdict=verdict,
        layer_dims={str(k): v for k, v in prol.layer_dims().items()},
        total_dim=prol.total_dim,
        base_dim=prol.base_dim,
        conf_dim=g0.dim,
        killing_signature=list(sig),
        radical_dim=len(radical),
        radical_graded=radical_graded,
        centroid_dim=centroid,
        rank_one_certificate=certificate,
        conditional=prol.conditional,
        notes=notes,
    )
    log.info("%s classified %s (dim p = %d)", alg.name, verdict.value, prol.total_dim)
    return report
