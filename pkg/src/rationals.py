"""
Exact rational helpers.

Thresholds and achieved fractions are `fractions.Fraction` in memory and
"p/q" strings on the wire (always with an explicit denominator).
"""

from fractions import Fraction
from typing import Annotated, Any, Union

from pydantic import BeforeValidator, PlainSerializer

from .errors import ParameterError

Rational = Union[int, Fraction]


def format_fraction(value: Rational) -> str:
    """Render as 'p/q', e.g. Fraction(1, 2) -> '1/2', 3 -> '3/1'"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: Union[str, Rational]) -> Fraction:
    """Parse 'p/q' (or an integer) into a Fraction; floats are rejected"""
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParameterError(f"Expected a rational 'p/q', got {text!r}")
    raw = text.strip()
    if "." in raw or "e" in raw.lower():
        raise ParameterError(f"Use an exact rational 'p/q', not a decimal: {text!r}")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as e:
        raise ParameterError(f"Malformed rational {text!r}: {e}") from e


def ceil_fraction(value: Rational) -> int:
    """Smallest integer >= value"""
    value = Fraction(value)
    return -((-value.numerator) // value.denominator)


def _coerce_fraction(value: Any) -> Fraction:
    return parse_fraction(value)


# Fraction-valued pydantic field: accepts "p/q" or ints, dumps "p/q".
# Models using it need arbitrary_types_allowed.
FractionField = Annotated[
    Fraction,
    BeforeValidator(_coerce_fraction),
    PlainSerializer(format_fraction, return_type=str),
]
