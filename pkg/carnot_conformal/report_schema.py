"""
Carnot Conformal
Report Schema - Pydantic models untuk machine-readable reports
"""

import json
from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from . import __version__


REPORT_SCHEMA = "carnot-conformal.report/1"


class ReportModel(BaseModel):
    """Common envelope: schema tag plus package version"""
    model_config = ConfigDict(populate_by_name=True)

    schema_id: str = Field(default=REPORT_SCHEMA, alias="schema")
    version: str = Field(default=__version__)


class Violation(BaseModel):
    """One failed structural check, with the offending basis labels"""
    kind: Literal["antisymmetry", "jacobi", "grading", "stratification", "dimension"]
    indices: List[str] = Field(default_factory=list, description="1-based (j,i) basis labels")
    message: str


class ValidationReport(ReportModel):
    report: Literal["validation"] = "validation"
    name: str
    layers: List[int]
    valid: bool
    outside_paper_scope: bool = Field(
        default=False,
        description="Set when the dimension < 3 override was used",
    )
    violations: List[Violation] = Field(default_factory=list)

    def kinds(self):
        return sorted({v.kind for v in self.violations})


class MetricReport(ReportModel):
    report: Literal["metric"] = "metric"
    name: str
    layers: List[int]
    grams: List[List[List[str]]] = Field(description="One Gram matrix per layer, entries 'p/q'")
    h_type_constant: Optional[str] = Field(
        default=None,
        description="lambda with J_Z^2 = -lambda |Z|^2 I when the algebra is of H-type",
    )


class DerivationReport(ReportModel):
    report: Literal["derivations"] = "derivations"
    name: str
    kind: str
    dimension: int
    basis: List[List[List[str]]] = Field(description="Full matrices of the basis derivations")


class ProlongationReport(ReportModel):
    report: Literal["prolongation"] = "prolongation"
    name: str
    g0: str
    g0_dim: int
    layer_dims: Dict[str, int] = Field(description="degree -> dimension, degrees as strings")
    total_dim: int
    truncated: bool
    max_degree: int
    conditional: bool = Field(
        default=False,
        description="Custom g0: structure-theoretic conclusions are conditional on splittability",
    )


class Verdict(str, Enum):
    RIGID = "RIGID"
    IWASAWA = "IWASAWA"
    INCONCLUSIVE = "INCONCLUSIVE"


class RankOneCertificate(BaseModel):
    """Rank-one certificate with individually reported sub-checks"""
    passed: bool
    centralizer_dim: int
    centralizer_in_degree_zero: bool
    grading_norm_positive: bool = Field(description="B(H, H) > 0")
    killing_h_h: str
    centralizer_signature: List[int]
    signature_ok: bool = Field(description="signature of B on Z(H) is (1, dim Z - 1, 0)")

    def failing(self):
        checks = {
            "centralizer_in_degree_zero": self.centralizer_in_degree_zero,
            "grading_norm_positive": self.grading_norm_positive,
            "signature_ok": self.signature_ok,
        }
        return [name for name, ok in checks.items() if not ok]


class ClassificationReport(ReportModel):
    report: Literal["classification"] = "classification"
    name: str
    verdict: Verdict
    layer_dims: Dict[str, int]
    total_dim: int
    base_dim: int
    conf_dim: int
    killing_signature: List[int]
    radical_dim: int
    radical_graded: bool
    centroid_dim: Optional[int] = None
    rank_one_certificate: Optional[RankOneCertificate] = None
    conditional: bool = False
    notes: List[str] = Field(default_factory=list)


class CatalogEntryReport(BaseModel):
    name: str
    params: Dict[str, int]
    layers: List[int]
    expected: Verdict
    description: str


class CatalogReport(ReportModel):
    report: Literal["catalog"] = "catalog"
    entries: List[CatalogEntryReport]


class SelfTestResult(BaseModel):
    name: str
    params: Dict[str, int]
    expected: Verdict
    verdict: Verdict
    total_dim: int
    ok: bool


class SelfTestReport(ReportModel):
    report: Literal["selftest"] = "selftest"
    results: List[SelfTestResult]
    passed: bool


def report_to_json(report):
    """
    Stable JSON text untuk report (sorted keys, fixed indentation)

    Args:
        report (ReportModel): any report

    Returns:
        str: JSON text; identical input gives identical bytes
    """
    payload = report.model_dump(mode="json", by_alias=True)
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
