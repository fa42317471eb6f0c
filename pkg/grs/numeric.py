"""
Scalar helpers.

Values are `Fraction` in exact mode and `float` otherwise. Comparisons are
exact when both sides are rational; with a float on either side, strict
means exceeding by more than a relative tolerance.
"""

import math
from fractions import Fraction
from numbers import Rational
from typing import Any, Union

from grs.exceptions import InvalidParameterError

Number = Union[Fraction, float]

FLOAT_TOLERANCE = 1e-12


def parse_number(value: Any) -> Fraction:
    """Read a document number exactly: ints, decimals as spelled, or "p/q" strings."""
    if isinstance(value, bool):
        raise InvalidParameterError(f"Expected a number, got {value!r}", element=value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidParameterError(f"Non-finite number {value!r}", element=value)
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidParameterError(f"Cannot read number {value!r}", element=value)
    raise InvalidParameterError(f"Expected a number, got {type(value).__name__}", element=value)


def format_number(value: Any) -> Any:
    """JSON-friendly form: integral rationals as int, other rationals as "p/q"."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Rational):
        value = Fraction(value)
        if value.denominator == 1:
            return int(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return value
    return value


def is_exact(*values: Any) -> bool:
    return all(isinstance(v, Rational) for v in values)


def lt(a: Number, b: Number, tol: float = FLOAT_TOLERANCE) -> bool:
    """Strict a < b."""
    if is_exact(a, b):
        return a < b
    a, b = float(a), float(b)
    return (b - a) > tol * max(abs(a), abs(b))


def le(a: Number, b: Number, tol: float = FLOAT_TOLERANCE) -> bool:
    """a <= b, i.e. not (b > a) at tolerance."""
    return not lt(b, a, tol)


def sqrt(value: Number) -> float:
    if value < 0:
        raise InvalidParameterError(f"Square root of negative value {value}", element=value)
    return math.sqrt(float(value))
