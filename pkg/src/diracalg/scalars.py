"""Exact rational scalars and the order operations used by the Heaviside calculus.

Scalars are ``fractions.Fraction`` values. The Heaviside convention is
left-continuous: ``heaviside(0) == 0``. There is deliberately no switch for
other conventions, since a symmetric value at zero breaks
``co_heaviside(a) * co_heaviside(b) == co_heaviside(max(a, b))``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

Rational = Fraction
# A Heaviside value is a Fraction that is either 0 or 1.
HeavisideValue = Fraction

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q``; decimals and floats are refused."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(a: Fraction) -> str:
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


def meet(a: Fraction, b: Fraction) -> Fraction:
    return a if a <= b else b


def join(a: Fraction, b: Fraction) -> Fraction:
    return a if a >= b else b


def pos_part(a: Fraction) -> Fraction:
    return join(a, ZERO)


def neg_part(a: Fraction) -> Fraction:
    return meet(a, ZERO)


def heaviside(a: Fraction) -> HeavisideValue:
    return ONE if a > 0 else ZERO


def co_heaviside(a: Fraction) -> HeavisideValue:
    return ONE - heaviside(a)
