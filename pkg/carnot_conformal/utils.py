"""
Carnot Conformal
Utility functions - logging, rational formatting and name handling
"""

import logging
import re
import sys
from fractions import Fraction


LOGGER_ROOT = "carnot_conformal"

_handler = None


class _TagFormatter(logging.Formatter):
    """Render records as `[Tag] message`, the console style used across the package"""

    def format(self, record):
        tag = getattr(record, "tag", None) or record.name.rsplit(".", 1)[-1].replace("_", " ").title()
        message = super().format(record)
        return f"[{tag}] {message}"


def get_logger(module_name):
    """
    Logger untuk satu module package

    Args:
        module_name (str): short module name, e.g. "prolong"

    Returns:
        logging.Logger: child of the package logger
    """
    return logging.getLogger(f"{LOGGER_ROOT}.{module_name}")


def configure_logging(level="WARNING", stream=None):
    """
    Install the tag formatter on the package logger (idempotent)

    Args:
        level (str | int): logging level name or number
        stream: target stream, stderr when None
    """
    global _handler
    root = logging.getLogger(LOGGER_ROOT)
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    root.setLevel(level)
    if _handler is None:
        _handler = logging.StreamHandler(stream)
        _handler.setFormatter(_TagFormatter("%(message)s"))
        root.addHandler(_handler)
        root.propagate = False
    else:
        _handler.setStream(stream or sys.stderr)
    return root


def format_rational(value):
    """
    Serialize an exact rational as "p/q" (always with a denominator)

    Args:
        value: Fraction or int

    Returns:
        str: e.g. "1/2", "-3/1"
    """
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


_RATIONAL_PATTERN = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(text):
    """
    Parse "p/q" or "p" into a Fraction; floats are rejected

    Args:
        text (str): rational string

    Returns:
        Fraction: reduced value

    Raises:
        ValueError: malformed string or zero denominator
    """
    if not isinstance(text, str) or not _RATIONAL_PATTERN.match(text):
        raise ValueError(f"not a rational string 'p/q': {text!r}")
    numerator, _, denominator = text.replace(" ", "").partition("/")
    if denominator and int(denominator) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(numerator), int(denominator or 1))


def format_matrix(matrix):
    """Rows of "p/q" strings for a Matrix"""
    return [[format_rational(x) for x in row] for row in matrix.entries]


def basis_label(layer, position):
    """1-based (j,i) label of the i-th vector of g_{-j}"""
    return f"({layer},{position})"
