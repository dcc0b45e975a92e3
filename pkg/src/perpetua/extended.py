"""Extended-real values.

Means of heavy-tailed processes can be +inf, -inf, or genuinely undefined
(both tails infinite).  These outcomes are carried as an explicit tagged
value rather than sentinel floats, so callers must make a deliberate choice
before using one as a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FINITE = "finite"
POS_INF = "+inf"
NEG_INF = "-inf"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class ExtendedReal:
    kind: str
    value: float | None = None

    @classmethod
    def finite(cls, v: float) -> "ExtendedReal":
        return cls(FINITE, float(v))

    @classmethod
    def pos_inf(cls) -> "ExtendedReal":
        return cls(POS_INF)

    @classmethod
    def neg_inf(cls) -> "ExtendedReal":
        return cls(NEG_INF)

    @classmethod
    def undefined(cls) -> "ExtendedReal":
        return cls(UNDEFINED)

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def is_finite_positive(self) -> bool:
        return self.kind == FINITE and self.value > 0

    def as_float(self) -> float:
        """Finite value, or raise; never silently returns inf or nan."""
        if not self.is_finite:
            raise ValueError(f"extended-real value is {self.kind}, not finite")
        return self.value

    def shifted(self, c: float) -> "ExtendedReal":
        """Add a finite constant; infinities and undefined absorb it."""
        if not math.isfinite(c):
            raise ValueError("shift must be finite")
        if self.kind == FINITE:
            return ExtendedReal.finite(self.value + c)
        return self

    def describe(self) -> str:
        return f"{self.value!r}" if self.kind == FINITE else self.kind
