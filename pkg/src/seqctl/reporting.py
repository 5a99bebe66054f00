"""Canonical JSON emission for CLI and service reports.

Reports keep their declared field order, serialize rationals as
``"num/den"`` strings, and never emit non-finite floats, so parsing and
re-emitting a report is byte-identical.
"""

from __future__ import annotations

import json


def canonical_dumps(obj) -> str:
    """Canonical report text: 2-space indent, declared key order, trailing
    newline; rejects NaN/Infinity outright."""
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def canonical_loads(text: str):
    return json.loads(text)


__all__ = ["canonical_dumps", "canonical_loads"]
