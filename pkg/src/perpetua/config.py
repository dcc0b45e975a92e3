"""Experiment configuration: a validated view of one JSON file.

Validation collects every problem it can find before raising, so a bad file
reports all its mistakes at once instead of one per run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, NonFiniteParameter
from .testfunctions import TestFunction, test_function_from_dict, test_function_to_dict
from .triplet import LevyTriplet

__all__ = ["ExperimentConfig", "load_config"]

KNOWN_CHECKS = ("zero_one", "occupation", "overshoot", "invariance", "lln")

_DEFAULT_THRESHOLDS = {"delta_01": 0.05, "growth_ratio": 0.5, "ks_alpha": 0.01}


@dataclass(frozen=True)
class ExperimentConfig:
    triplet: LevyTriplet
    f: TestFunction
    n_paths: int
    dt: float
    t0: float
    doublings: int  # checkpoints are t0 * 2^k for k = 0..doublings
    master_seed: int
    thresholds: dict = field(default_factory=lambda: dict(_DEFAULT_THRESHOLDS))
    checks: tuple[str, ...] = KNOWN_CHECKS
    check_params: dict = field(default_factory=dict)
    expected_fail: tuple[str, ...] = ()

    @property
    def checkpoints(self) -> list[float]:
        return [self.t0 * 2.0**k for k in range(self.doublings + 1)]

    @property
    def horizon(self) -> float:
        return self.t0 * 2.0**self.doublings

    def to_dict(self) -> dict:
        return {
            "triplet": self.triplet.to_dict(),
            "f": test_function_to_dict(self.f),
            "n_paths": self.n_paths,
            "dt": self.dt,
            "horizon": {"t0": self.t0, "doublings": self.doublings},
            "master_seed": self.master_seed,
            "thresholds": dict(self.thresholds),
            "checks": list(self.checks),
            "check_params": dict(self.check_params),
            "expected_fail": list(self.expected_fail),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        problems: list[str] = []

        triplet = None
        try:
            triplet = LevyTriplet.from_dict(d["triplet"])
        except KeyError:
            problems.append("triplet: missing")
        except (NonFiniteParameter, TypeError, ValueError) as exc:
            problems.append(f"triplet: {exc}")

        f = None
        try:
            f = test_function_from_dict(d["f"])
        except KeyError as exc:
            problems.append("f: missing" if exc.args == ("f",) else f"f: {exc}")
        except (NonFiniteParameter, TypeError, ValueError) as exc:
            problems.append(f"f: {exc}")

        n_paths = _as_int(d, "n_paths", problems)
        if n_paths is not None and n_paths < 100:
            problems.append(f"n_paths: must be >= 100, got {n_paths}")

        dt = _as_float(d, "dt", problems)
        if dt is not None and not 0.0 < dt:
            problems.append(f"dt: must be positive, got {dt}")

        horizon = d.get("horizon")
        t0 = doublings = None
        if not isinstance(horizon, dict):
            problems.append("horizon: missing or not an object with t0/doublings")
        else:
            t0 = _as_float(horizon, "t0", problems, prefix="horizon.")
            doublings = _as_int(horizon, "doublings", problems, prefix="horizon.")
            if t0 is not None and t0 <= 0.0:
                problems.append(f"horizon.t0: must be positive, got {t0}")
            if doublings is not None and doublings < 3:
                problems.append(f"horizon.doublings: must be >= 3, got {doublings}")
        if t0 is not None and dt is not None and dt > t0 / 10.0:
            problems.append(f"dt: must be <= t0/10 = {t0 / 10.0:g}, got {dt}")

        master_seed = _as_int(d, "master_seed", problems)
        if master_seed is not None and not 0 <= master_seed < 2**64:
            problems.append(f"master_seed: must fit in uint64, got {master_seed}")

        thresholds = dict(_DEFAULT_THRESHOLDS)
        raw_thr = d.get("thresholds", {})
        if not isinstance(raw_thr, dict):
            problems.append("thresholds: must be an object")
        else:
            for key, val in raw_thr.items():
                if key not in _DEFAULT_THRESHOLDS:
                    problems.append(f"thresholds.{key}: unknown threshold")
                    continue
                try:
                    val = float(val)
                except (TypeError, ValueError):
                    problems.append(f"thresholds.{key}: not a number")
                    continue
                if not 0.0 < val < 1.0:
                    problems.append(f"thresholds.{key}: must lie in (0, 1), got {val}")
                else:
                    thresholds[key] = val

        checks = d.get("checks", list(KNOWN_CHECKS))
        if not isinstance(checks, list) or not all(isinstance(x, str) for x in checks):
            problems.append("checks: must be a list of check names")
            checks = list(KNOWN_CHECKS)
        else:
            for name in checks:
                if name not in KNOWN_CHECKS:
                    problems.append(f"checks: unknown check {name!r} "
                                    f"(known: {', '.join(KNOWN_CHECKS)})")

        check_params = d.get("check_params", {})
        if not isinstance(check_params, dict):
            problems.append("check_params: must be an object")
            check_params = {}
        else:
            for name in check_params:
                if name not in KNOWN_CHECKS:
                    problems.append(f"check_params.{name}: unknown check "
                                    f"(known: {', '.join(KNOWN_CHECKS)})")

        expected_fail = d.get("expected_fail", [])
        if not isinstance(expected_fail, list) or not all(
            isinstance(x, str) for x in expected_fail
        ):
            problems.append("expected_fail: must be a list of check names")
            expected_fail = []
        else:
            for name in expected_fail:
                if name not in KNOWN_CHECKS:
                    problems.append(f"expected_fail: unknown check {name!r} "
                                    f"(known: {', '.join(KNOWN_CHECKS)})")

        unknown = set(d) - {
            "triplet", "f", "n_paths", "dt", "horizon", "master_seed",
            "thresholds", "checks", "check_params", "expected_fail",
        }
        for key in sorted(unknown):
            problems.append(f"{key}: unknown field")

        if problems:
            raise ConfigError(problems)
        return cls(
            triplet=triplet,
            f=f,
            n_paths=n_paths,
            dt=dt,
            t0=t0,
            doublings=doublings,
            master_seed=master_seed,
            thresholds=thresholds,
            checks=tuple(checks),
            check_params=check_params,
            expected_fail=tuple(expected_fail),
        )


def _as_int(d: dict, key: str, problems: list[str], prefix: str = "") -> int | None:
    if key not in d:
        problems.append(f"{prefix}{key}: missing")
        return None
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, int):
        problems.append(f"{prefix}{key}: must be an integer, got {val!r}")
        return None
    return val


def _as_float(d: dict, key: str, problems: list[str], prefix: str = "") -> float | None:
    if key not in d:
        problems.append(f"{prefix}{key}: missing")
        return None
    try:
        return float(d[key])
    except (TypeError, ValueError):
        problems.append(f"{prefix}{key}: must be a number, got {d[key]!r}")
        return None


def load_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"json: {exc}"]) from exc
    if not isinstance(payload, dict):
        raise ConfigError(["json: top level must be an object"])
    return ExperimentConfig.from_dict(payload)
