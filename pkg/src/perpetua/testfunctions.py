"""Nonnegative test functions f whose running integral along a path is studied.

Every family is measurable, locally integrable and >= 0 on the whole line,
which is all the theory asks of f.  On top of evaluation each family knows
its own tail analytically: ``integral_above(x)`` returns the exact value of
``int_x^inf f``, so quadrature routines and tests never have to extrapolate
beyond what the family can certify.  Compactly supported families report a
``support_bound`` so block integration can stop early.

Families compose through :class:`Scaled` and :class:`SumOf`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NonFiniteParameter
from .validation import Issue, require_finite

__all__ = [
    "ExpDecay",
    "PowerTail",
    "LogPower",
    "Indicator",
    "Tabulated",
    "Scaled",
    "SumOf",
    "TestFunction",
    "test_function_from_dict",
    "test_function_to_dict",
]


@dataclass(frozen=True)
class ExpDecay:
    """f(x) = exp(-rate * max(x, 0)) for x >= 0, constant left_level for x < 0.

    With the default left_level=1 this is the continuous bounded extension of
    the right-tail exponential.  left_level=0 restricts support to [0, inf).
    """

    rate: float
    left_level: float = 1.0

    kind = "exp_decay"

    def validate(self) -> list[Issue]:
        issues = require_finite(self.rate, "rate", "RATE_NONFINITE")
        issues += require_finite(self.left_level, "left_level", "LEVEL_NONFINITE")
        if issues:
            return issues
        if self.rate <= 0.0:
            issues.append(Issue("RATE_POSITIVE", "rate", "decay rate must be > 0"))
        if self.left_level < 0.0:
            issues.append(Issue("LEVEL_NEGATIVE", "left_level", "f must be >= 0"))
        return issues

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0.0, self.left_level, np.exp(-self.rate * np.maximum(x, 0.0)))
        return out if out.ndim else float(out)

    def support_bound(self) -> float | None:
        return None  # positive tail never vanishes

    def integral_above(self, x: float) -> float:
        if x >= 0.0:
            return math.exp(-self.rate * x) / self.rate
        return self.left_level * (-x) + 1.0 / self.rate

    def integral_full(self) -> float:
        return math.inf if self.left_level > 0.0 else 1.0 / self.rate

    def params(self) -> dict:
        return {"rate": self.rate, "left_level": self.left_level}


@dataclass(frozen=True)
class PowerTail:
    """f(x) = 1 / (shift + |x|)**p.  Integrable tail iff p > 1."""

    p: float
    shift: float = 1.0

    kind = "power_tail"

    def validate(self) -> list[Issue]:
        issues = require_finite(self.p, "p", "P_NONFINITE")
        issues += require_finite(self.shift, "shift", "SHIFT_NONFINITE")
        if issues:
            return issues
        if self.p <= 0.0:
            issues.append(Issue("P_POSITIVE", "p", "exponent must be > 0"))
        if self.shift < 1.0:
            issues.append(Issue("SHIFT_RANGE", "shift", "shift must be >= 1"))
        return issues

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = (self.shift + np.abs(x)) ** (-self.p)
        return out if out.ndim else float(out)

    def support_bound(self) -> float | None:
        return None

    def integral_above(self, x: float) -> float:
        # int_a^inf (shift+t)^-p dt for a >= 0, plus the reflected piece if x < 0.
        if self.p <= 1.0:
            return math.inf

        def upper(a: float) -> float:
            return (self.shift + a) ** (1.0 - self.p) / (self.p - 1.0)

        if x >= 0.0:
            return upper(x)
        return 2.0 * upper(0.0) - upper(-x)

    def integral_full(self) -> float:
        if self.p <= 1.0:
            return math.inf
        return 2.0 * self.shift ** (1.0 - self.p) / (self.p - 1.0)

    def params(self) -> dict:
        return {"p": self.p, "shift": self.shift}


@dataclass(frozen=True)
class LogPower:
    """f(x) = 1 / ((2 + |x|) * log(2 + |x|)**p).

    The borderline family: tails thinner than any 1/(shift+|x|) yet the
    integral converges only for p > 1 (antiderivative log(2+x)**(1-p)/(1-p)).
    """

    p: float

    kind = "log_power"

    def validate(self) -> list[Issue]:
        issues = require_finite(self.p, "p", "P_NONFINITE")
        if not issues and self.p <= 0.0:
            issues.append(Issue("P_POSITIVE", "p", "exponent must be > 0"))
        return issues

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        base = 2.0 + np.abs(x)
        out = 1.0 / (base * np.log(base) ** self.p)
        return out if out.ndim else float(out)

    def support_bound(self) -> float | None:
        return None

    def integral_above(self, x: float) -> float:
        if self.p <= 1.0:
            return math.inf

        def upper(a: float) -> float:
            return math.log(2.0 + a) ** (1.0 - self.p) / (self.p - 1.0)

        if x >= 0.0:
            return upper(x)
        return 2.0 * upper(0.0) - upper(-x)

    def integral_full(self) -> float:
        return self.integral_above(0.0) * 2.0 if self.p > 1.0 else math.inf

    def params(self) -> dict:
        return {"p": self.p}


@dataclass(frozen=True)
class Indicator:
    """Indicator of the closed interval [a, b]."""

    a: float
    b: float

    kind = "indicator"

    def validate(self) -> list[Issue]:
        issues = require_finite(self.a, "a", "A_NONFINITE")
        issues += require_finite(self.b, "b", "B_NONFINITE")
        if not issues and self.b < self.a:
            issues.append(Issue("INTERVAL_ORDER", "b", "need a <= b"))
        return issues

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= self.a) & (x <= self.b), 1.0, 0.0)
        return out if out.ndim else float(out)

    def support_bound(self) -> float | None:
        return self.b

    def integral_above(self, x: float) -> float:
        lo = max(self.a, x)
        return max(self.b - lo, 0.0)

    def integral_full(self) -> float:
        return self.b - self.a

    def params(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear interpolant of (knots, values) with an explicit tail.

    Zero below the first knot.  Beyond the last knot the tail model takes
    over: "zero" cuts the function off, "exp" continues with
    values[-1] * exp(-tail_rate * (x - knots[-1])).  The tail is part of the
    definition, not an extrapolation; integrals use its closed form.
    """

    knots: tuple[float, ...]
    values: tuple[float, ...]
    tail_model: str = "zero"
    tail_rate: float = 1.0

    kind = "tabulated"

    def validate(self) -> list[Issue]:
        issues: list[Issue] = []
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.size < 2:
            issues.append(Issue("KNOTS_COUNT", "knots", "need at least 2 knots"))
        if k.size != v.size:
            issues.append(Issue("SHAPE_MISMATCH", "values", "one value per knot"))
        if issues:
            return issues
        if not np.all(np.isfinite(k)) or not np.all(np.isfinite(v)):
            issues.append(Issue("TABLE_NONFINITE", "knots", "knots and values must be finite"))
            return issues
        if np.any(np.diff(k) <= 0.0):
            issues.append(Issue("KNOTS_ORDER", "knots", "knots must be strictly increasing"))
        if np.any(v < 0.0):
            issues.append(Issue("VALUES_NEGATIVE", "values", "f must be >= 0"))
        if self.tail_model not in ("zero", "exp"):
            issues.append(Issue("TAIL_MODEL", "tail_model", "tail_model must be 'zero' or 'exp'"))
        elif self.tail_model == "exp" and not (self.tail_rate > 0.0 and math.isfinite(self.tail_rate)):
            issues.append(Issue("TAIL_RATE", "tail_rate", "exp tail needs rate > 0"))
        return issues

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        out = np.interp(x, k, v, left=0.0, right=0.0)
        if self.tail_model == "exp":
            tail = v[-1] * np.exp(-self.tail_rate * (x - k[-1]))
            out = np.where(x > k[-1], tail, out)
        return out if out.ndim else float(out)

    def support_bound(self) -> float | None:
        return float(self.knots[-1]) if self.tail_model == "zero" else None

    def _tail_integral(self, x: float) -> float:
        # int_x^inf of the tail branch, valid for x >= last knot.
        if self.tail_model == "zero":
            return 0.0
        return self.values[-1] * math.exp(-self.tail_rate * (x - self.knots[-1])) / self.tail_rate

    def integral_above(self, x: float) -> float:
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x >= k[-1]:
            return self._tail_integral(x)
        a = max(x, float(k[0]))
        keep = k > a
        xs = np.concatenate(([a], k[keep]))
        ys = np.concatenate(([self(a)], v[keep]))
        return float(np.trapezoid(ys, xs)) + self._tail_integral(float(k[-1]))

    def integral_full(self) -> float:
        return self.integral_above(float(self.knots[0]))

    def params(self) -> dict:
        return {
            "knots": list(self.knots),
            "values": list(self.values),
            "tail_model": self.tail_model,
            "tail_rate": self.tail_rate,
        }


@dataclass(frozen=True)
class Scaled:
    """c * f for a constant c > 0."""

    factor: float
    inner: "TestFunction"

    kind = "scaled"

    def validate(self) -> list[Issue]:
        issues = require_finite(self.factor, "factor", "FACTOR_NONFINITE")
        if not issues and self.factor <= 0.0:
            issues.append(Issue("FACTOR_POSITIVE", "factor", "scale factor must be > 0"))
        return issues + self.inner.validate()

    def __call__(self, x):
        return self.factor * self.inner(x)

    def support_bound(self) -> float | None:
        return self.inner.support_bound()

    def integral_above(self, x: float) -> float:
        return self.factor * self.inner.integral_above(x)

    def integral_full(self) -> float:
        return self.factor * self.inner.integral_full()

    def params(self) -> dict:
        return {"factor": self.factor, "inner": test_function_to_dict(self.inner)}


@dataclass(frozen=True)
class SumOf:
    """Pointwise sum of finitely many test functions."""

    parts: tuple["TestFunction", ...]

    kind = "sum"

    def validate(self) -> list[Issue]:
        issues: list[Issue] = []
        if len(self.parts) == 0:
            issues.append(Issue("EMPTY_SUM", "parts", "need at least one summand"))
        for part in self.parts:
            issues += part.validate()
        return issues

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x, dtype=float)
        for part in self.parts:
            out = out + part(x)
        return out if out.ndim else float(out)

    def support_bound(self) -> float | None:
        bounds = [part.support_bound() for part in self.parts]
        if any(b is None for b in bounds):
            return None
        return max(bounds)

    def integral_above(self, x: float) -> float:
        return sum(part.integral_above(x) for part in self.parts)

    def integral_full(self) -> float:
        return sum(part.integral_full() for part in self.parts)

    def params(self) -> dict:
        return {"parts": [test_function_to_dict(p) for p in self.parts]}


TestFunction = Union[ExpDecay, PowerTail, LogPower, Indicator, Tabulated, Scaled, SumOf]

_FAMILIES = {
    "exp_decay": ExpDecay,
    "power_tail": PowerTail,
    "log_power": LogPower,
    "indicator": Indicator,
    "tabulated": Tabulated,
    "scaled": Scaled,
    "sum": SumOf,
}


def test_function_to_dict(f: TestFunction) -> dict:
    return {"family": f.kind, "params": f.params()}


def test_function_from_dict(payload: dict) -> TestFunction:
    family = payload.get("family")
    if family not in _FAMILIES:
        raise NonFiniteParameter([Issue("FAMILY_UNKNOWN", "family",
                                        f"unknown test function family {family!r}")])
    params = dict(payload.get("params", {}))
    if family == "scaled":
        params["inner"] = test_function_from_dict(params["inner"])
    elif family == "sum":
        params["parts"] = tuple(test_function_from_dict(p) for p in params["parts"])
    elif family == "tabulated":
        params["knots"] = tuple(float(k) for k in params["knots"])
        params["values"] = tuple(float(v) for v in params["values"])
    f = _FAMILIES[family](**params)
    issues = f.validate()
    if issues:
        raise NonFiniteParameter(issues)
    return f
