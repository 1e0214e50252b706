"""
Carnot Conformal
Reports - text rendering of report models
"""

from .report_schema import (
    CatalogReport,
    ClassificationReport,
    DerivationReport,
    MetricReport,
    ProlongationReport,
    SelfTestReport,
    ValidationReport,
    report_to_json,
)


_ICONS = {
    "CHECKMARK": "✓",
    "ERROR": "⚠",
    "INFO": "-",
    "NONE": "",
}


class Layout:
    """Plain-text layout with boxes and labels"""

    def __init__(self, indent=0):
        self.indent = indent
        self.lines = []

    def label(self, text="", icon="NONE"):
        marker = _ICONS.get(icon, "")
        prefix = " " * self.indent + (f"{marker} " if marker else "")
        self.lines.append(prefix + text)

    def box(self):
        child = Layout(self.indent + 2)
        self.lines.append(child)
        return child

    def separator(self):
        self.lines.append("")

    def render(self):
        out = []
        for line in self.lines:
            if isinstance(line, Layout):
                out.append(line.render())
            else:
                out.append(line)
        return "\n".join(x for x in out if x is not None)


def _status(layout, ok, good, bad):
    layout.label(text=good if ok else bad, icon="CHECKMARK" if ok else "ERROR")


def _matrix_lines(layout, rows):
    width = max((len(x) for row in rows for x in row), default=1)
    for row in rows:
        layout.label(text="[ " + "  ".join(x.rjust(width) for x in row) + " ]")


def draw_validation(report: ValidationReport, layout):
    layout.label(text=f"Algebra {report.name}, layers {report.layers}")
    _status(layout, report.valid, "Valid stratified Lie algebra", "Invalid stratified Lie algebra")
    if report.outside_paper_scope:
        layout.label(text="dimension < 3 accepted: outside paper scope", icon="INFO")
    if report.violations:
        box = layout.box()
        box.label(text=f"Violations ({len(report.violations)}):")
        for v in report.violations:
            box.label(text=f"[{v.kind}] {v.message}", icon="ERROR")


def draw_metric(report: MetricReport, layout):
    layout.label(text=f"Canonical inner products on {report.name}, layers {report.layers}")
    for j, gram in enumerate(report.grams, start=1):
        box = layout.box()
        box.label(text=f"Gram on g_-{j}:")
        _matrix_lines(box, gram)
    if report.h_type_constant is not None:
        layout.label(text=f"H-type: J_Z^2 = -{report.h_type_constant} |Z|^2 I", icon="INFO")


def draw_derivations(report: DerivationReport, layout):
    layout.label(text=f"{report.kind} of {report.name}: dimension {report.dimension}")
    for n, matrix in enumerate(report.basis, start=1):
        box = layout.box()
        box.label(text=f"D{n}:")
        _matrix_lines(box, matrix)


def _degree_line(layer_dims):
    return ", ".join(f"{k}: {v}" for k, v in sorted(layer_dims.items(), key=lambda kv: int(kv[0])))


def draw_prolongation(report: ProlongationReport, layout):
    layout.label(text=f"Prol({report.name}, {report.g0}), dim g0 = {report.g0_dim}")
    layout.label(text=f"Layer dims by degree: {_degree_line(report.layer_dims)}")
    layout.label(text=f"Total dimension: {report.total_dim}")
    if report.truncated:
        layout.label(text=f"Truncated: degree cap {report.max_degree} reached with a nonzero layer", icon="ERROR")
    else:
        layout.label(text="Completed: first zero layer reached", icon="CHECKMARK")
    if report.conditional:
        layout.label(text="Custom g0: structural conclusions are conditional", icon="INFO")


def draw_classification(report: ClassificationReport, layout):
    layout.label(text=f"{report.name}: {report.verdict.value}")
    box = layout.box()
    box.label(text=f"Layer dims by degree: {_degree_line(report.layer_dims)}")
    box.label(text=f"dim p = {report.total_dim}, dim g + dim ConfDer = {report.base_dim}, dim ConfDer = {report.conf_dim}")
    box.label(text=f"Killing signature (+, -, 0): {tuple(report.killing_signature)}")
    box.label(text=f"Radical dimension: {report.radical_dim} (H-graded: {report.radical_graded})")
    if report.centroid_dim is not None:
        box.label(text=f"Centroid dimension: {report.centroid_dim}")
    cert = report.rank_one_certificate
    if cert is not None:
        box = layout.box()
        _status(box, cert.passed, "Rank-one certificate (paper's criterion) passed",
                "Rank-one certificate (paper's criterion) failed")
        box.label(text=f"centralizer of H: dim {cert.centralizer_dim}, in degree 0: {cert.centralizer_in_degree_zero}")
        box.label(text=f"B(H, H) = {cert.killing_h_h}")
        box.label(text=f"signature of B on centralizer: {tuple(cert.centralizer_signature)}")
    for note in report.notes:
        layout.label(text=note, icon="INFO")


def draw_catalog(report: CatalogReport, layout):
    layout.label(text=f"Catalog ({len(report.entries)} entries):")
    for entry in report.entries:
        params = ", ".join(f"{k}={v}" for k, v in entry.params.items()) or "-"
        layout.label(text=f"  {entry.name:<26} layers {entry.layers!s:<10} params {params:<12} expected {entry.expected.value}")


def draw_selftest(report: SelfTestReport, layout):
    for r in report.results:
        params = ", ".join(f"{k}={v}" for k, v in r.params.items())
        _status(
            layout, r.ok,
            f"{r.name}({params}): {r.verdict.value}, dim p = {r.total_dim}",
            f"{r.name}({params}): {r.verdict.value}, expected {r.expected.value}",
        )
    _status(layout, report.passed, "Self-test passed", "Self-test FAILED")


_DRAWERS = {
    ValidationReport: draw_validation,
    MetricReport: draw_metric,
    DerivationReport: draw_derivations,
    ProlongationReport: draw_prolongation,
    ClassificationReport: draw_classification,
    CatalogReport: draw_catalog,
    SelfTestReport: draw_selftest,
}


def render_text(report):
    layout = Layout()
    _DRAWERS[type(report)](report, layout)
    return layout.render()


def render(report, output_format="text"):
    """Report as text or stable JSON"""
    if output_format == "json":
        return report_to_json(report)
    return render_text(report)
