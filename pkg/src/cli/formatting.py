"""Exact rational parsing and output rendering for the command line."""

import json
import re
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Dict, List, Optional

import click
import pandas as pd

_RATIO = re.compile(r"^([+-]?\d+)/(\d+)$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)$")

FORMATS = ("json", "csv", "human")


def parse_rational(text: str) -> Fraction:
    """
    Parse `p/q` (q > 0) or a finite decimal such as `0.05` into an exact Fraction.

    Raises:
        ValueError: If the text is neither form
    """
    value = text.strip()
    match = _RATIO.match(value)
    if match:
        denominator = int(match.group(2))
        if denominator == 0:
            raise ValueError(f"denominator must be positive in {text!r}")
        return Fraction(int(match.group(1)), denominator)
    if _DECIMAL.match(value):
        return Fraction(value)
    raise ValueError(f"{text!r} is not a rational of the form p/q or a finite decimal")


def pq(value: Fraction) -> str:
    """Exact `p/q` text; integers keep the denominator, e.g. `1/1`."""
    return f"{value.numerator}/{value.denominator}"


def decimal12(value: Fraction) -> str:
    """Display-only decimal with 12 significant digits."""
    with localcontext() as ctx:
        ctx.prec = 12
        return str(Decimal(value.numerator) / Decimal(value.denominator))


class RationalParam(click.ParamType):
    """Click parameter for exact rationals, optionally restricted to the open interval (0, 1)."""

    name = "rational"

    def __init__(self, open_unit: bool = True):
        self.open_unit = open_unit

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]):
        if isinstance(value, Fraction):
            return value
        try:
            parsed = parse_rational(str(value))
        except ValueError as e:
            self.fail(str(e), param, ctx)
        if self.open_unit and not 0 < parsed < 1:
            self.fail(f"{value} must lie strictly between 0 and 1", param, ctx)
        return parsed


RATIONAL = RationalParam()


def render_document(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False)


def render_table(rows: List[Dict[str, Any]], fmt: str) -> str:
    """CSV with a header row, or aligned text for humans."""
    frame = pd.DataFrame(rows)
    if fmt == "csv":
        return frame.to_csv(index=False, lineterminator="\n").rstrip("\n")
    if frame.empty:
        return "(no rows)"
    return frame.to_string(index=False)


def render_fields(fields: Dict[str, Any]) -> str:
    """Aligned `key: value` lines for the scalar part of a document."""
    width = max((len(key) for key in fields), default=0)
    return "\n".join(f"{key.ljust(width)} : {value}" for key, value in fields.items())
