"""
Carnot Conformal
Errors - exception hierarchy shared by the library and the CLI
"""


class CarnotError(Exception):
    """Base class for every error raised by carnot_conformal"""


class DimensionMismatchError(CarnotError, ValueError):
    """Vectors or matrices with incompatible shapes"""


class NotInColumnSpaceError(CarnotError, ValueError):
    """Right-hand side has no preimage"""


class RankDeficiencyError(CarnotError, ValueError):
    """A map that must be surjective (or a form that must be invertible) is not"""


class AlgebraValidationError(CarnotError, ValueError):
    """Structure constants violate the stratified Lie algebra axioms"""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class DerivationSpaceError(CarnotError, ValueError):
    """A proposed degree-zero algebra is not a subalgebra of Der(g)"""


class GradingElementMissingError(CarnotError, ValueError):
    """H not in g0"""


class DegreeCapExceededError(CarnotError, RuntimeError):
    """The prolongation reached max_degree without a zero layer"""

    def __init__(self, message, prolongation=None):
        super().__init__(message)
        self.prolongation = prolongation


class BracketEscapeError(CarnotError, RuntimeError):
    """A synthesized bracket does not lie in the computed layer"""


class RadicalNotSolvableError(CarnotError, RuntimeError):
    """Derived series of the computed radical does not terminate"""


class CertificateNotApplicableError(CarnotError, ValueError):
    """Rank-one certificate requested for a prolongation it does not apply to"""


class UnknownCatalogEntryError(CarnotError, KeyError):
    """Catalog name not found"""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown catalog entry"
