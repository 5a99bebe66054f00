"""Exact likelihood-ratio values: nonnegative rationals extended with +infinity.

Finite values are ``fractions.Fraction``; the single :data:`INF` sentinel
stands for the ratio of a cell whose null-hypothesis probability is zero.
INF absorbs multiplication (including by zero, the convention used when
enumerating symbolic ratio products) and compares above every rational.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union


class RatioInfinity:
    """Singleton +infinity for extended likelihood ratios."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __hash__(self):
        return hash("seqctl.ratio.INF")

    def __eq__(self, other):
        return isinstance(other, RatioInfinity)

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, RatioInfinity)

    def __gt__(self, other):
        return not isinstance(other, RatioInfinity)

    def __ge__(self, other):
        return True

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __float__(self):
        return float("inf")


INF = RatioInfinity()

Ratio = Union[Fraction, RatioInfinity]

ONE = Fraction(1)
ZERO = Fraction(0)


def is_inf(z: Ratio) -> bool:
    return isinstance(z, RatioInfinity)


def parse_rational(text) -> Fraction:
    """Parse an exact rational from a decimal string, ``"num/den"`` string,
    int, or ``{"num": int, "den": int}`` mapping.

    Decimal strings expand literally (``"0.1"`` -> 1/10). Floats are
    accepted through their shortest round-trip decimal representation.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(repr(text))
    if isinstance(text, dict):
        try:
            return Fraction(int(text["num"]), int(text["den"]))
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational object: {text!r}") from exc
    if isinstance(text, str):
        return Fraction(text.strip())
    raise ValueError(f"not a rational: {text!r}")


def parse_ratio(text) -> Ratio:
    """Like :func:`parse_rational` but also accepts ``"inf"``."""
    if isinstance(text, RatioInfinity):
        return text
    if isinstance(text, str) and text.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    value = parse_rational(text)
    if value < 0:
        raise ValueError(f"ratio must be nonnegative: {text!r}")
    return value


def format_ratio(z: Ratio) -> str:
    """Canonical string form: ``"3/2"``, ``"5"`` for integers, ``"inf"``."""
    if is_inf(z):
        return "inf"
    if z.denominator == 1:
        return str(z.numerator)
    return f"{z.numerator}/{z.denominator}"
