"""Machine-readable validation issues shared by triplets and test functions."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Issue:
    code: str
    field: str
    message: str


def require_finite(value, field: str, code: str) -> list[Issue]:
    try:
        v = float(value)
    except (TypeError, ValueError):
        return [Issue(code, field, f"{field} is not a number: {value!r}")]
    if not math.isfinite(v):
        return [Issue(code, field, f"{field} must be finite, got {value!r}")]
    return []
