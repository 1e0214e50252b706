"""
Carnot Conformal
Main package file - package info dan public entry points
"""

__version__ = "1.0.0"

package_info = {
    "name": "Carnot Conformal",
    "version": (1, 0, 0),
    "description": (
        "Exact rational toolkit for stratified Lie algebras: canonical layer metrics, "
        "derivation algebras, Tanaka prolongation and the rigid / Iwasawa classifier"
    ),
    "report_schema": "carnot-conformal.report/1",
}


from .algebra import (  # noqa: E402
    GradedMap,
    LieTable,
    StratifiedAlgebra,
    bracket,
    center,
    descending_central_series,
    dilation,
    grading_derivation,
    validate,
)
from .config import Settings  # noqa: E402
from .derivations import (  # noqa: E402
    DerivationKind,
    DerivationSpace,
    conf_derivations,
    iso_derivations,
    strata_preserving_derivations,
)
from .metric import (  # noqa: E402
    InnerProductAssignment,
    induced_gram,
    induced_metric,
    norm_squared,
    tensor_projection_matrix,
)
from .prolong import Prolongation, ProlongationLayer, prolong, prolong_step, synthesize_brackets  # noqa: E402
from .structure import (  # noqa: E402
    centroid_dim,
    classify,
    is_H_graded,
    killing_form,
    rank_one_certificate,
    solvable_radical,
)


__all__ = [
    "__version__",
    "package_info",
    "GradedMap",
    "LieTable",
    "StratifiedAlgebra",
    "bracket",
    "center",
    "descending_central_series",
    "dilation",
    "grading_derivation",
    "validate",
    "Settings",
    "DerivationKind",
    "DerivationSpace",
    "conf_derivations",
    "iso_derivations",
    "strata_preserving_derivations",
    "InnerProductAssignment",
    "induced_gram",
    "induced_metric",
    "norm_squared",
    "tensor_projection_matrix",
    "Prolongation",
    "ProlongationLayer",
    "prolong",
    "prolong_step",
    "synthesize_brackets",
    "centroid_dim",
    "classify",
    "is_H_graded",
    "killing_form",
    "rank_one_certificate",
    "solvable_radical",
]
