"""
Common utility functions for the Laplace consistency toolkit.

Micro-modules shared by every mini-module: logging setup, JSON configuration,
exact number parsing and scalar formatting, plus the two exception classes the
command line maps to exit codes.
"""
import sys
import json
import math
import logging
from fractions import Fraction
from numbers import Number
from pathlib import Path
from typing import Any, Dict, Union

Scalar = Union[Fraction, float, complex]

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Loggers handed out by setup_logging, so the CLI can retune them together
_PROJECT_LOGGERS: Dict[str, logging.Logger] = {}


class ProblemInputError(ValueError):
    """Invalid problem data: schema violation or broken system invariant."""


class ConsistencyCheckError(RuntimeError):
    """A self-check on a computed solution failed (0+ values, IVT, residual)."""


# Configure logging
def setup_logging(module_name, log_level=logging.INFO):
    """Set up logging for a module."""
    logger = logging.getLogger(module_name)
    logger.setLevel(log_level)
    logger.propagate = False

    if not logger.handlers:
        # Console handler on stderr, stdout is reserved for reports
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG)
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(console_handler)

    _PROJECT_LOGGERS[module_name] = logger
    return logger


def set_project_log_level(log_level):
    """Apply one level to every logger created through setup_logging."""
    for logger in _PROJECT_LOGGERS.values():
        logger.setLevel(log_level)


def load_config(config_name):
    """
    Load configuration from a JSON file.

    Args:
        config_name (str): Name of the config file (without _config.json suffix)

    Returns:
        dict: Configuration data
    """
    config_path = Path(__file__).parent.parent / "config" / f"{config_name}_config.json"

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"Configuration file {config_path} not found")
    except json.JSONDecodeError:
        raise ValueError(f"Invalid JSON in configuration file {config_path}")


def parse_exact_number(value: Any, field_path: str) -> Fraction:
    """
    Parse a problem-file number into an exact rational.

    Accepts integers, decimals (already read as Fraction or given as text) and
    "p/q" strings. Booleans and anything else are rejected.

    Args:
        value: Raw JSON value
        field_path: Location of the value, used in error messages

    Returns:
        Fraction: Exact value
    """
    if isinstance(value, bool):
        raise ProblemInputError(f"{field_path}: expected a number, got a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ProblemInputError(f"{field_path}: expected a finite number, got {value}")
        # Decimal text of the float, not its binary expansion
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ProblemInputError(f"{field_path}: cannot read '{value}' as an exact number")
    raise ProblemInputError(f"{field_path}: expected a number, got {type(value).__name__}")


def format_number(number, digits=12):
    """
    Format a scalar for reports.

    Exact rationals print as integers or p/q, floats with `digits` significant
    digits, complex values as (a+bj) with both parts formatted the same way.
    """
    if isinstance(number, Fraction):
        if number.denominator == 1:
            return str(number.numerator)
        return f"{number.numerator}/{number.denominator}"
    if isinstance(number, int):
        return str(number)
    if isinstance(number, complex):
        if number.imag == 0:
            return format_number(number.real, digits)
        real = format_number(number.real, digits)
        imag = format_number(abs(number.imag), digits)
        sign = '-' if number.imag < 0 else '+'
        return f"({real}{sign}{imag}j)"
    if isinstance(number, Number):
        value = float(number)
        if value == 0:
            return "0"
        return f"{value:.{digits}g}"
    raise TypeError(f"Cannot format {number!r} as a number")


def exact_to_json(number):
    """Render a scalar for JSON output: exact values as strings, floats as numbers."""
    if isinstance(number, Fraction):
        return format_number(number)
    if isinstance(number, complex):
        return [number.real, number.imag]
    return float(number)


