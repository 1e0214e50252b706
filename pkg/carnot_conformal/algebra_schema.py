"""
Carnot Conformal
Algebra Schema - Pydantic models untuk algebra files (JSON, exact rational strings)
"""

import json
from pathlib import Path
from typing import List

from pydantic import BaseModel, Field, field_validator, model_validator

from .algebra import StratifiedAlgebra
from .utils import basis_label, format_rational, parse_rational


class BracketTerm(BaseModel):
    """One coefficient of a bracket value"""
    basis: List[int] = Field(
        min_length=2,
        max_length=2,
        description="1-based basis label [j, i]: the i-th vector of layer g_-j",
    )
    coeff: str = Field(
        description="Exact rational coefficient as 'p/q' (or 'p'); floats are rejected",
    )

    @field_validator("coeff")
    @classmethod
    def _coeff_is_rational(cls, value):
        parse_rational(value)
        return value


class BracketRecord(BaseModel):
    """[left, right] = sum of value terms"""
    left: List[int] = Field(min_length=2, max_length=2, description="1-based basis label [j, i]")
    right: List[int] = Field(min_length=2, max_length=2, description="1-based basis label [j, i]")
    value: List[BracketTerm] = Field(default_factory=list)


class AlgebraFile(BaseModel):
    """Complete algebra file; omitted bracket pairs are zero"""
    name: str = Field(description="Algebra name used in reports")
    layers: List[int] = Field(
        min_length=1,
        description="Layer dimensions [d_1, ..., d_s], all positive",
    )
    brackets: List[BracketRecord] = Field(default_factory=list)

    @field_validator("layers")
    @classmethod
    def _layers_positive(cls, value):
        if any(d <= 0 for d in value):
            raise ValueError("layer dimensions must be positive")
        return value

    @model_validator(mode="after")
    def _labels_in_range(self):
        def check(label, where):
            j, i = label
            if not 1 <= j <= len(self.layers) or not 1 <= i <= self.layers[j - 1]:
                raise ValueError(f"{where}: basis label {basis_label(j, i)} outside layers {self.layers}")

        for n, record in enumerate(self.brackets):
            check(record.left, f"brackets[{n}].left")
            check(record.right, f"brackets[{n}].right")
            for m, term in enumerate(record.value):
                check(term.basis, f"brackets[{n}].value[{m}].basis")
        return self


def get_algebra_schema():
    """JSON schema of the algebra file format"""
    return AlgebraFile.model_json_schema()


def validate_algebra_file(data: dict) -> AlgebraFile:
    """
    Validate dan parse algebra file dari dict

    Raises:
        ValidationError: Jika file tidak valid
    """
    return AlgebraFile.model_validate(data)


def parse_algebra_text(text: str) -> AlgebraFile:
    return AlgebraFile.model_validate_json(text)


def load_algebra_file(path) -> AlgebraFile:
    return parse_algebra_text(Path(path).read_text(encoding="utf-8"))


def algebra_from_file(document: AlgebraFile) -> StratifiedAlgebra:
    """
    Build StratifiedAlgebra dari validated file

    Repeated records for the same ordered pair are summed.
    """
    offsets, total = [], 0
    for d in document.layers:
        offsets.append(total)
        total += d

    def flat(label):
        j, i = label
        return offsets[j - 1] + i - 1

    brackets = {}
    for record in document.brackets:
        key = (flat(record.left), flat(record.right))
        value = brackets.setdefault(key, {})
        for term in record.value:
            c = flat(term.basis)
            value[c] = value.get(c, 0) + parse_rational(term.coeff)
    return StratifiedAlgebra.from_brackets(document.name, document.layers, brackets)


def algebra_to_file(alg: StratifiedAlgebra) -> AlgebraFile:
    """One record per ordered pair a < b with a nonzero bracket"""
    def label(a):
        j = alg.layer_of(a)
        return [j, a - alg.offsets[j - 1] + 1]

    records = []
    for (a, b), value in sorted(alg.table.constants.items()):
        if a >= b:
            continue
        records.append(BracketRecord(
            left=label(a),
            right=label(b),
            value=[BracketTerm(basis=label(c), coeff=format_rational(x)) for c, x in sorted(value.items())],
        ))
    return AlgebraFile(name=alg.name, layers=list(alg.layer_dims), brackets=records)


def dump_algebra_file(document: AlgebraFile) -> str:
    return json.dumps(document.model_dump(mode="json"), indent=2, ensure_ascii=False)
