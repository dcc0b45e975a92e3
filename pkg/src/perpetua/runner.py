"""Experiment runner: configuration in, deterministic report bundle out.

report.json is byte-identical for a fixed config and master seed no matter
how many worker threads are used; anything time- or host-dependent lives in
metadata.json next to it.  Exit semantics: 0 when every check meets its
expectation (checks listed under expected_fail must fail), 1 otherwise, 2
for configuration errors (raised as ConfigError before any work starts).
"""

from __future__ import annotations

import json
import math
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .config import KNOWN_CHECKS, ExperimentConfig
from .errors import PerpetuaError, PreconditionViolation
from .harness import (
    CheckReport,
    FinitenessEstimate,
    finiteness_probability,
    lln_envelope_check,
    local_time_law_invariance_check,
    occupation_identity_check,
    overshoot_stationarity_check,
    zero_one_check,
)
from .rng import derive_seed

__all__ = ["run_experiment", "write_report", "simulate_paths"]


def _auto_level(config: ExperimentConfig) -> float:
    mu = config.triplet.mean().as_float()
    sigma_eff = math.sqrt(config.triplet.effective_volatility_sq())
    return max(20.0 * sigma_eff / mu, 1.0)


def _write_finiteness_csv(path: Path, est: FinitenessEstimate) -> None:
    lines = ["path_id,checkpoint,partial_integral"]
    for i in range(est.partials.shape[0]):
        for j, t in enumerate(est.checkpoints):
            lines.append(f"{i},{float(t)!r},{float(est.partials[i, j])!r}")
    path.write_text("\n".join(lines) + "\n")


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    checks: list[str] | None = None,
    threads: int = 1,
) -> tuple[dict, int]:
    """Run the selected checks and return (report, exit_code)."""
    selected = list(checks) if checks is not None else list(config.checks)
    unknown = [c for c in selected if c not in KNOWN_CHECKS]
    if unknown:
        raise PreconditionViolation("UNKNOWN_CHECK", ", ".join(unknown))
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    started = time.monotonic()
    created_at = datetime.now(timezone.utc).isoformat()

    report: dict = {"config": config.to_dict(), "checks": []}
    thresholds = config.thresholds
    params = config.check_params

    estimate = None
    if "zero_one" in selected:
        estimate = finiteness_probability(config, threads=threads)
        counts = {v: estimate.per_path_verdicts.count(v)
                  for v in ("FINITE_LIKE", "INFINITE_LIKE", "INCONCLUSIVE")}
        artifacts = []
        if out is not None:
            csv_path = out / "finiteness.csv"
            _write_finiteness_csv(csv_path, estimate)
            artifacts.append(csv_path.name)
        report["finiteness"] = {
            "p_hat": estimate.p_hat,
            "checkpoints": [float(t) for t in estimate.checkpoints],
            "growth_curve": [float(v) for v in estimate.growth_curve],
            "verdict_counts": counts,
            "inconclusive_fraction": estimate.inconclusive_fraction,
            "flagged": estimate.flagged,
        }
        _run_one(
            report,
            lambda: _with_artifacts(
                zero_one_check(estimate, thresholds["delta_01"]), artifacts
            ),
            "zero_one",
            "zero_one",
        )

    if "occupation" in selected:
        kw = dict(params.get("occupation", {}))
        _run_one(
            report,
            lambda: occupation_identity_check(config, threads=threads, **kw),
            "occupation_identity",
            "occupation",
        )

    if "overshoot" in selected:
        kw = dict(params.get("overshoot", {}))
        z1 = float(kw.pop("z1", _auto_level(config)))
        z2 = float(kw.pop("z2", 2.0 * z1))
        n = int(kw.pop("n", 400))
        dt = float(kw.pop("dt", config.dt))

        _run_one(
            report,
            lambda: overshoot_stationarity_check(
                config.triplet, z1, z2, n,
                seed=derive_seed(config.master_seed, "overshoot-check"),
                ks_alpha=thresholds["ks_alpha"], dt=dt, artifact_dir=out, **kw,
            ),
            "overshoot_stationarity",
            "overshoot",
        )

    if "invariance" in selected:
        kw = dict(params.get("invariance", {}))
        x_list = kw.pop("x_list", [1.0, 2.0, 5.0])
        n = int(kw.pop("n", 200))
        _run_one(
            report,
            lambda: local_time_law_invariance_check(
                config.triplet, x_list, n,
                seed=derive_seed(config.master_seed, "invariance-check"),
                dt=kw.pop("dt", config.dt), threads=threads, **kw,
            ),
            "local_time_invariance",
            "invariance",
        )

    if "lln" in selected:
        kw = dict(params.get("lln", {}))
        mu = config.triplet.mean()
        if mu.is_finite_positive:
            sigma_auto = 50.0 * config.triplet.effective_volatility_sq() / mu.as_float() ** 2
        else:
            sigma_auto = 0.0
        t0 = float(kw.pop("t0", max(sigma_auto, 10.0 * config.t0)))
        n = int(kw.pop("n", 200))
        _run_one(
            report,
            lambda: lln_envelope_check(
                config.triplet, t0, n,
                seed=derive_seed(config.master_seed, "lln-check"),
                dt=kw.pop("dt", config.dt), threads=threads, **kw,
            ),
            "lln_envelope",
            "lln",
        )

    # expected_fail speaks the config vocabulary (check keys), not report names
    expected_fail = set(config.expected_fail)
    all_pass = True
    meets = True
    for entry in report["checks"]:
        passed = bool(entry["passed"])
        all_pass &= passed
        meets &= (not passed) if entry["check"] in expected_fail else passed
    report["expected_fail"] = sorted(expected_fail)
    report["all_pass"] = all_pass
    report["meets_expectations"] = meets

    exit_code = 0 if meets else 1
    if out is not None:
        from . import __version__

        write_report(out, report)
        metadata = {
            "created_at": created_at,
            "duration_seconds": time.monotonic() - started,
            "threads": threads,
            "version": __version__,
            "checks_run": selected,
        }
        (out / "metadata.json").write_text(
            json.dumps(metadata, indent=2, sort_keys=True) + "\n"
        )
    return report, exit_code


def _with_artifacts(rep: CheckReport, artifacts: list[str]) -> CheckReport:
    if not artifacts:
        return rep
    return CheckReport(
        name=rep.name,
        passed=rep.passed,
        statistic=rep.statistic,
        threshold=rep.threshold,
        artifacts=tuple(artifacts),
        notes=rep.notes,
    )


def _run_one(report: dict, runner, name: str, key: str) -> None:
    """Run one check; a precondition violation becomes a failed entry, not a crash."""
    try:
        rep = runner()
    except PreconditionViolation as exc:
        report["checks"].append({
            "name": name,
            "check": key,
            "passed": False,
            "statistic": None,
            "threshold": None,
            "artifacts": [],
            "notes": f"precondition violated: {exc}",
            "precondition": exc.reason,
        })
        return
    except PerpetuaError as exc:
        report["checks"].append({
            "name": name,
            "check": key,
            "passed": False,
            "statistic": None,
            "threshold": None,
            "artifacts": [],
            "notes": f"{type(exc).__name__}: {exc}",
        })
        return
    entry = rep.to_dict()
    entry["check"] = key
    report["checks"].append(entry)


def write_report(out_dir: Path, report: dict) -> Path:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    path = Path(out_dir) / "report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def simulate_paths(
    config: ExperimentConfig,
    out_dir: str | Path,
    limit: int | None = None,
    threads: int = 1,
) -> list[Path]:
    """Write per-path time,value CSV dumps plus the partial-integral table."""
    from .simulate import perpetual_estimate, sample_path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = config.n_paths if limit is None else min(limit, config.n_paths)
    checkpoints = np.asarray(config.checkpoints, dtype=float)
    horizon = float(checkpoints[-1])
    written: list[Path] = []

    rows = ["path_id,checkpoint,partial_integral"]
    for i in range(n):
        path = sample_path(
            config.triplet, horizon, config.dt,
            seed=derive_seed(config.master_seed, "finiteness", i),
        )
        partials = perpetual_estimate(path, config.f, checkpoints)
        for t, v in zip(checkpoints, partials):
            rows.append(f"{i},{float(t)!r},{float(v)!r}")
        csv_path = out / f"path_{i:04d}.csv"
        lines = ["time,value"] + [
            f"{float(t)!r},{float(v)!r}" for t, v in zip(path.times, path.values)
        ]
        csv_path.write_text("\n".join(lines) + "\n")
        written.append(csv_path)

    table = out / "partial_integrals.csv"
    table.write_text("\n".join(rows) + "\n")
    written.append(table)
    return written
