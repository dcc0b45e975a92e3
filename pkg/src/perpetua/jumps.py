"""Jump size laws for the compound Poisson family.

Each law exposes the closed forms the rest of the package needs: the
characteristic function, the mean, partial moments split at a threshold
(used for the |x| <= 1 truncation bookkeeping and small-jump variance),
and an exact sampler.  No law here has a heavy tail; means and second
moments are always finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteParameter
from .validation import Issue, require_finite

__all__ = [
    "JumpLaw",
    "ConstantJump",
    "ExponentialJump",
    "TwoSidedExponentialJump",
    "UniformJump",
    "jump_law_from_dict",
]


@dataclass(frozen=True)
class ConstantJump:
    """Every jump has the fixed size c (c may be negative)."""

    size: float

    kind = "constant"

    def validate(self):
        return require_finite(self.size, "size", "JUMP_SIZE_FINITE")

    def mean(self) -> float:
        return self.size

    def second_moment(self) -> float:
        return self.size ** 2

    def char(self, lam):
        return np.exp(1j * np.asarray(lam, dtype=float) * self.size)

    def prob_abs_above(self, a: float) -> float:
        return 1.0 if abs(self.size) > a else 0.0

    def mean_abs_above(self, a: float) -> float:
        # E[J ; |J| > a]
        return self.size if abs(self.size) > a else 0.0

    def second_moment_abs_below(self, a: float) -> float:
        return self.size ** 2 if abs(self.size) <= a else 0.0

    def positive_mass(self) -> bool:
        return self.size > 0

    def negative_mass(self) -> bool:
        return self.size < 0

    def sample(self, rng, n: int):
        return np.full(n, self.size)

    def params(self):
        return {"size": self.size}


@dataclass(frozen=True)
class ExponentialJump:
    """One-sided exponential jumps: |J| ~ Exp(theta), sign fixed by `sign`."""

    theta: float
    sign: int = 1

    kind = "exponential"

    def validate(self):
        issues = require_finite(self.theta, "theta", "THETA_POSITIVE")
        if not issues and self.theta <= 0:
            issues.append(Issue("THETA_POSITIVE", "theta", "theta must be > 0"))
        if self.sign not in (-1, 1):
            issues.append(Issue("SIGN_VALUE", "sign", "sign must be +1 or -1"))
        return issues

    def mean(self) -> float:
        return self.sign / self.theta

    def second_moment(self) -> float:
        return 2.0 / self.theta ** 2

    def char(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.theta / (self.theta - 1j * self.sign * lam)

    def prob_abs_above(self, a: float) -> float:
        return float(np.exp(-self.theta * max(a, 0.0)))

    def mean_abs_above(self, a: float) -> float:
        a = max(a, 0.0)
        # int_a^inf x theta e^{-theta x} dx = e^{-theta a} (a + 1/theta)
        return self.sign * float(np.exp(-self.theta * a) * (a + 1.0 / self.theta))

    def second_moment_abs_below(self, a: float) -> float:
        if a <= 0:
            return 0.0
        t = self.theta * a
        return (2.0 - np.exp(-t) * (t * t + 2 * t + 2.0)) / self.theta ** 2

    def positive_mass(self) -> bool:
        return self.sign > 0

    def negative_mass(self) -> bool:
        return self.sign < 0

    def sample(self, rng, n: int):
        return self.sign * rng.exponential(1.0 / self.theta, n)

    def params(self):
        return {"theta": self.theta, "sign": self.sign}


@dataclass(frozen=True)
class TwoSidedExponentialJump:
    """Mixture: +Exp(theta_plus) w.p. p_plus, -Exp(theta_minus) otherwise."""

    theta_plus: float
    theta_minus: float
    p_plus: float

    kind = "two_sided_exponential"

    def validate(self):
        issues = []
        for name in ("theta_plus", "theta_minus"):
            v = getattr(self, name)
            issues += require_finite(v, name, "THETA_POSITIVE")
            if np.isfinite(v) and v <= 0:
                issues.append(Issue("THETA_POSITIVE", name, f"{name} must be > 0"))
        if not 0.0 <= self.p_plus <= 1.0:
            issues.append(Issue("PROB_RANGE", "p_plus", "p_plus must lie in [0, 1]"))
        return issues

    def _sides(self):
        up = ExponentialJump(self.theta_plus, 1)
        dn = ExponentialJump(self.theta_minus, -1)
        return up, dn

    def mean(self) -> float:
        return self.p_plus / self.theta_plus - (1 - self.p_plus) / self.theta_minus

    def second_moment(self) -> float:
        return 2 * self.p_plus / self.theta_plus ** 2 + 2 * (1 - self.p_plus) / self.theta_minus ** 2

    def char(self, lam):
        up, dn = self._sides()
        return self.p_plus * up.char(lam) + (1 - self.p_plus) * dn.char(lam)

    def prob_abs_above(self, a: float) -> float:
        up, dn = self._sides()
        return self.p_plus * up.prob_abs_above(a) + (1 - self.p_plus) * dn.prob_abs_above(a)

    def mean_abs_above(self, a: float) -> float:
        up, dn = self._sides()
        return self.p_plus * up.mean_abs_above(a) + (1 - self.p_plus) * dn.mean_abs_above(a)

    def second_moment_abs_below(self, a: float) -> float:
        up, dn = self._sides()
        return (self.p_plus * up.second_moment_abs_below(a)
                + (1 - self.p_plus) * dn.second_moment_abs_below(a))

    def positive_mass(self) -> bool:
        return self.p_plus > 0

    def negative_mass(self) -> bool:
        return self.p_plus < 1

    def sample(self, rng, n: int):
        signs = np.where(rng.random(n) < self.p_plus, 1.0, -1.0)
        mags = np.where(signs > 0,
                        rng.exponential(1.0 / self.theta_plus, n),
                        rng.exponential(1.0 / self.theta_minus, n))
        return signs * mags

    def params(self):
        return {"theta_plus": self.theta_plus, "theta_minus": self.theta_minus,
                "p_plus": self.p_plus}


@dataclass(frozen=True)
class UniformJump:
    """Jump sizes uniform on [a, b]."""

    a: float
    b: float

    kind = "uniform"

    def validate(self):
        issues = require_finite(self.a, "a", "UNIFORM_BOUNDS")
        issues += require_finite(self.b, "b", "UNIFORM_BOUNDS")
        if not issues and not self.a < self.b:
            issues.append(Issue("UNIFORM_BOUNDS", "a", "need a < b"))
        return issues

    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def second_moment(self) -> float:
        return (self.a ** 2 + self.a * self.b + self.b ** 2) / 3.0

    def char(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.ones_like(lam, dtype=complex)
        nz = np.abs(lam) > 1e-9
        ln = lam[nz] if lam.ndim else (lam if nz else None)
        if lam.ndim == 0:
            if nz:
                out = (np.exp(1j * lam * self.b) - np.exp(1j * lam * self.a)) / (1j * lam * (self.b - self.a))
            else:
                out = complex(1.0)
            return out
        out[nz] = (np.exp(1j * ln * self.b) - np.exp(1j * ln * self.a)) / (1j * ln * (self.b - self.a))
        return out

    def _clip_integral(self, lo, hi, power):
        # int_{lo}^{hi} x^power dx / (b - a) restricted to [a, b]
        lo = max(lo, self.a)
        hi = min(hi, self.b)
        if hi <= lo:
            return 0.0
        p = power + 1
        return (hi ** p - lo ** p) / (p * (self.b - self.a))

    def prob_abs_above(self, c: float) -> float:
        return self._clip_integral(c, np.inf, 0) + self._clip_integral(-np.inf, -c, 0)

    def mean_abs_above(self, c: float) -> float:
        return self._clip_integral(c, np.inf, 1) + self._clip_integral(-np.inf, -c, 1)

    def second_moment_abs_below(self, c: float) -> float:
        return self._clip_integral(-c, c, 2)

    def positive_mass(self) -> bool:
        return self.b > 0

    def negative_mass(self) -> bool:
        return self.a < 0

    def sample(self, rng, n: int):
        return rng.uniform(self.a, self.b, n)

    def params(self):
        return {"a": self.a, "b": self.b}


JumpLaw = ConstantJump | ExponentialJump | TwoSidedExponentialJump | UniformJump

_LAWS = {cls.kind: cls for cls in
         (ConstantJump, ExponentialJump, TwoSidedExponentialJump, UniformJump)}


def jump_law_from_dict(d: dict) -> JumpLaw:
    try:
        cls = _LAWS[d["kind"]]
    except KeyError as e:
        raise NonFiniteParameter([Issue("JUMP_KIND", "kind",
                                        f"unknown jump law {d.get('kind')!r}")]) from e
    law = cls(**{k: v for k, v in d.items() if k != "kind"})
    issues = law.validate()
    if issues:
        raise NonFiniteParameter(issues)
    return law
