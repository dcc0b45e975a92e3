"""Path simulation on a regular grid with exact jumps above a cutoff.

Increments follow the usual splitting: linear drift, Brownian part, all jumps
with magnitude above eps_cut placed at exact (uniform-in-step) times, and a
mean-zero Gaussian surrogate for the discarded small jumps whose variance
matches int_{|x|<=eps} x^2 nu(dx).  For infinite-activity families the drift
is compensator-adjusted (the characteristic exponent compensates jumps in
(eps, 1], so their raw simulation must subtract that mean); finite-activity
families simulate their jumps uncompensated and keep the drift as given.

The deterministic part of a path is drift_eff * times computed by
multiplication, not by accumulation, so a pure drift path reproduces the
time grid exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BandwidthTooSmall, NonFiniteParameter, PreconditionViolation, StepTooCoarse
from .rng import stream
from .testfunctions import TestFunction
from .triplet import LevyTriplet

__all__ = [
    "PathSample",
    "LocalTimeField",
    "StepEngine",
    "sample_path",
    "perpetual_estimate",
    "local_time_field",
]


@dataclass(frozen=True)
class PathSample:
    """One simulated trajectory on a regular time grid."""

    times: np.ndarray
    values: np.ndarray
    jumps: tuple[tuple[float, float], ...]  # (time, size), |size| > cutoff
    seed: int
    triplet_id: str

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])


class StepEngine:
    """Per-step increment generator shared by path and passage samplers.

    Owns the simulation constants of one (triplet, dt, cutoff) combination:
    effective drift, per-step Gaussian deviation, and the Poisson rate of
    resolved jumps.  Draw order per request is fixed (normals, counts, jump
    sizes, jump offsets) so results depend only on the generator state.
    """

    def __init__(self, triplet: LevyTriplet, dt: float, cutoff: float | None = None):
        issues = triplet.validate()
        if issues:
            raise NonFiniteParameter(issues)
        if not dt > 0.0:
            raise PreconditionViolation("DT_RANGE", "need dt > 0")
        nu = triplet.levy_measure
        if cutoff is None:
            cutoff = nu.default_cutoff(dt)

        self.triplet = triplet
        self.dt = dt
        self.cutoff = cutoff
        self.rate = nu.rate_above(cutoff)
        if self.rate * dt > 0.5 * (1.0 + 1e-9):
            raise StepTooCoarse(
                f"{self.rate * dt:.3g} expected jumps per step; need rate*dt <= 0.5"
            )
        self.drift_eff = triplet.drift
        if not nu.is_finite_activity:
            self.drift_eff -= nu.inner_mean(cutoff, 1.0)
        self.sd_step = math.sqrt((triplet.gaussian_coef + nu.small_jump_variance(cutoff)) * dt)
        self._sample_eps = 0.0 if nu.is_finite_activity else cutoff

    def draw(self, rng: np.random.Generator, n: int):
        """n steps of randomness: (continuous part, step jump sums, jump detail).

        jump detail is (times within the n-step window in units of dt, sizes),
        time-sorted; the continuous part excludes drift.
        """
        nu = self.triplet.levy_measure
        cont = self.sd_step * rng.standard_normal(n) if self.sd_step > 0.0 else np.zeros(n)
        if self.rate <= 0.0:
            return cont, np.zeros(n), (np.empty(0), np.empty(0))
        counts = rng.poisson(self.rate * self.dt, n)
        total = int(counts.sum())
        sizes = np.asarray(nu.sample_jumps_above(rng, self._sample_eps, total), dtype=float)
        offsets = rng.random(total)
        step_of = np.repeat(np.arange(n), counts)
        jump_pos = step_of + offsets  # in units of dt
        order = np.argsort(jump_pos, kind="stable")
        per_step = np.zeros(n)
        np.add.at(per_step, step_of, sizes)
        return cont, per_step, (jump_pos[order], sizes[order])


def sample_path(
    triplet: LevyTriplet,
    horizon: float,
    dt: float,
    x0: float = 0.0,
    seed: int = 0,
    cutoff: float | None = None,
) -> PathSample:
    """Simulate one path on [0, horizon] with step dt, started from x0.

    Deterministic in (seed, horizon, dt): the same arguments always produce
    the identical PathSample.
    """
    if not horizon > 0.0:
        raise PreconditionViolation("HORIZON_RANGE", "need horizon > 0")
    if not dt <= horizon / 10.0:
        raise PreconditionViolation("DT_RANGE", "need dt <= horizon/10")
    engine = StepEngine(triplet, dt, cutoff)
    n = int(round(horizon / dt))
    times = np.arange(n + 1) * dt

    rng = stream(seed)
    cont, per_step, (jump_pos, sizes) = engine.draw(rng, n)
    values = x0 + engine.drift_eff * times
    values = values + np.concatenate(([0.0], np.cumsum(cont + per_step)))
    jumps = tuple(zip((jump_pos * dt).tolist(), sizes.tolist()))
    return PathSample(
        times=times, values=values, jumps=jumps, seed=seed, triplet_id=triplet.digest()
    )


def perpetual_estimate(path: PathSample, f: TestFunction, checkpoints) -> np.ndarray:
    """Trapezoid partial integrals of f along the path at each checkpoint."""
    checkpoints = np.atleast_1d(np.asarray(checkpoints, dtype=float))
    if checkpoints.size and (checkpoints.min() < 0.0 or checkpoints.max() > path.horizon * (1 + 1e-12)):
        raise PreconditionViolation("CHECKPOINT_RANGE", "checkpoints must lie in [0, horizon]")
    fv = np.asarray(f(path.values), dtype=float)
    steps = np.diff(path.times)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (fv[1:] + fv[:-1]) * steps)))
    return np.interp(checkpoints, path.times, cum)


@dataclass(frozen=True)
class LocalTimeField:
    """Kernel estimate of local times L_t(x) on a level grid."""

    x_grid: np.ndarray
    bandwidth: float
    values: np.ndarray
    t: float
    t_covered: float  # time the path spent inside [x_grid[0], x_grid[-1]]


def local_time_field(path: PathSample, x_grid, bandwidth: float) -> LocalTimeField:
    """Occupation density estimate: time within bandwidth of each level / 2eps.

    The path skeleton is treated as linear between grid times, so each step
    spreads its dt over the levels the segment sweeps.  Bandwidth must stay
    above a quarter of the typical diffusive step (estimated robustly from
    the increments; jump steps do not inflate the floor) or window counts
    are noise.
    """
    x_grid = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if x_grid.size < 2 or np.any(np.diff(x_grid) <= 0.0):
        raise PreconditionViolation("GRID_ORDER", "x_grid must be strictly increasing")
    if not bandwidth > 0.0:
        raise PreconditionViolation("BANDWIDTH_RANGE", "need bandwidth > 0")

    diffs = np.diff(path.values)
    med = np.median(diffs)
    wiggle = 1.4826 * np.median(np.abs(diffs - med))
    if bandwidth < wiggle / 4.0:
        raise BandwidthTooSmall(
            f"bandwidth {bandwidth:g} below floor {wiggle / 4.0:g} for this step size"
        )

    dt = np.diff(path.times)
    lo = np.minimum(path.values[:-1], path.values[1:])
    hi = np.maximum(path.values[:-1], path.values[1:])
    span = hi - lo

    values = np.zeros(x_grid.size)
    chunk = max(1, int(4_000_000 // max(x_grid.size, 1)))
    for start in range(0, lo.size, chunk):
        sl = slice(start, min(start + chunk, lo.size))
        seg_lo = lo[sl][None, :]
        seg_hi = hi[sl][None, :]
        seg_span = span[sl][None, :]
        seg_dt = dt[sl][None, :]
        win_lo = x_grid[:, None] - bandwidth
        win_hi = x_grid[:, None] + bandwidth
        overlap = np.clip(np.minimum(seg_hi, win_hi) - np.maximum(seg_lo, win_lo), 0.0, None)
        flat = seg_span <= 0.0
        inside = (seg_lo >= win_lo) & (seg_lo <= win_hi)
        frac = np.where(flat, inside.astype(float), overlap / np.where(flat, 1.0, seg_span))
        values += (frac * seg_dt).sum(axis=1)
    values /= 2.0 * bandwidth

    inside_lo, inside_hi = x_grid[0], x_grid[-1]
    clipped = np.clip(np.minimum(hi, inside_hi) - np.maximum(lo, inside_lo), 0.0, None)
    flat = span <= 0.0
    frac = np.where(
        flat,
        ((path.values[:-1] >= inside_lo) & (path.values[:-1] <= inside_hi)).astype(float),
        clipped / np.where(flat, 1.0, span),
    )
    t_covered = float(np.sum(frac * dt))

    return LocalTimeField(
        x_grid=x_grid,
        bandwidth=bandwidth,
        values=values,
        t=path.horizon,
        t_covered=t_covered,
    )
