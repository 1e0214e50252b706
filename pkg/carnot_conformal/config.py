"""
Carnot Conformal
Settings - defaults for prolongation caps, sampling and output
"""

import os
from typing import Literal

from pydantic import BaseModel, Field


ENV_PREFIX = "CARNOT_CONFORMAL_"


class Settings(BaseModel):
    """Run-time configuration; CLI flags override these values"""
    max_degree: int = Field(
        default=12,
        ge=1,
        description="Highest prolongation degree computed before reporting truncation",
    )
    random_samples: int = Field(
        default=200,
        ge=1,
        description="Random rational samples drawn by property checks",
    )
    output_format: Literal["text", "json"] = Field(
        default="text",
        description="Report format printed by the CLI",
    )
    log_level: str = Field(
        default="WARNING",
        description="Package log level (DEBUG, INFO, WARNING, ...)",
    )
    allow_small: bool = Field(
        default=False,
        description="Accept algebras of dimension < 3 (outside paper scope)",
    )

    @classmethod
    def from_env(cls, environ=None, **overrides):
        """
        Build settings from CARNOT_CONFORMAL_* variables plus explicit overrides

        Args:
            environ (Mapping | None): environment, os.environ when None
            **overrides: values that win over the environment (None is ignored)

        Returns:
            Settings: validated settings
        """
        environ = os.environ if environ is None else environ
        values = {}
        for key, field_name in (
            ("MAX_DEGREE", "max_degree"),
            ("RANDOM_SAMPLES", "random_samples"),
            ("FORMAT", "output_format"),
            ("LOG_LEVEL", "log_level"),
        ):
            raw = environ.get(ENV_PREFIX + key)
            if raw:
                values[field_name] = raw
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(values)
