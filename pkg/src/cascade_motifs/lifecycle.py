"""Steep and inhibition points of a cascade from Hawkes intensities.

The intensity at each reshare uses an exponential kernel,

    lambda(t_j) = mu + alpha * sum_{t_i < t_j} w_i * beta * exp(-beta (t_j - t_i)),

computed with the usual O(n) recursion. Per-window sums of these intensities
give the interval curve whose largest interior local maximum marks the steep
window. Inhibition is the first event at least ``dtg`` minutes after the steep
point whose cumulative size has grown by a factor of at least ``g``.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, LifecycleError
from .model import Cascade, DiffusionNetwork, growth_curve
from .windows import Subsequence, window_of_time


@dataclass(frozen=True)
class HawkesConfig:
    mu: float = 0.0
    alpha: float = 1.0
    beta: float = 0.1
    weighting: str = "uniform"

    def validate(self) -> "HawkesConfig":
        if not (self.mu >= 0 and self.alpha >= 0 and self.beta > 0):
            raise ConfigError("Hawkes parameters need mu >= 0, alpha >= 0, beta > 0")
        if self.weighting not in ("uniform", "degree_weighted"):
            raise ConfigError(f"unknown weighting {self.weighting!r}")
        return self


@dataclass(frozen=True)
class InhibitionThresholds:
    dtg: float = 120.0
    g: float = 1.5

    def validate(self) -> "InhibitionThresholds":
        if not (self.dtg >= 0 and self.g >= 1):
            raise ConfigError("thresholds need dtg >= 0 and g >= 1")
        return self


def event_weights(cascade: Cascade, config: HawkesConfig, diffusion: DiffusionNetwork | None = None) -> np.ndarray:
    if config.weighting == "uniform" or diffusion is None:
        return np.ones(len(cascade.events))
    return np.array([1.0 + math.log1p(diffusion.degree(e.source)) for e in cascade.events])


def hawkes_intensity(cascade: Cascade, config: HawkesConfig = HawkesConfig(),
                     diffusion: DiffusionNetwork | None = None) -> list[tuple[float, float]]:
    """Intensity at every event time; events sharing a timestamp do not excite each other."""
    config.validate()
    times = [e.time for e in cascade.events]
    if any(b < a for a, b in zip(times, times[1:])):
        raise LifecycleError("cascade events must be time-sorted")
    w = event_weights(cascade, config, diffusion)
    out = []
    acc = 0.0       # sum of w_i exp(-beta (t - t_i)) over strictly earlier timestamps
    last_t = None
    pending = 0.0   # weight of events at the current timestamp
    for t, wi in zip(times, w):
        if last_t is None:
            last_t = t
        elif t > last_t:
            acc = (acc + pending) * math.exp(-config.beta * (t - last_t))
            pending = 0.0
            last_t = t
        out.append((t, config.mu + config.alpha * config.beta * acc))
        pending += wi
    return out


def interval_intensity_curve(intensities: Sequence[tuple[float, float]],
                             windows: Sequence[Subsequence]) -> np.ndarray:
    """Sum of intensities per window; events outside all spans go to the nearest window."""
    curve = np.zeros(len(windows))
    for t, lam in intensities:
        curve[window_of_time(windows, t, clamp=True) - 1] += lam
    return curve


def find_extrema(curve: Sequence[float]) -> tuple[list[int], list[int]]:
    """Interior strict local maxima and minima (0-based); a plateau reports its leftmost index."""
    values = list(curve)
    if len(values) < 3:
        raise LifecycleError("need at least 3 intervals to find extrema")
    maxima, minima = [], []
    # run-length compress, remembering where each run starts
    runs = [(k, next(g)[0]) for k, g in itertools.groupby(enumerate(values), key=lambda iv: iv[1])]
    for r in range(1, len(runs) - 1):
        value, start = runs[r]
        before, after = runs[r - 1][0], runs[r + 1][0]
        if before < value > after:
            maxima.append(start)
        elif before > value < after:
            minima.append(start)
    return maxima, minima


def detect_steep(curve: Sequence[float]) -> tuple[int, bool]:
    """0-based position of the steep interval and whether the fallback was used.

    The steep interval is the largest local maximum (earliest on ties). Curves
    without an interior maximum fall back to the argmax over interior positions.
    """
    values = np.asarray(curve, dtype=float)
    if len(values) < 3:
        return int(np.argmax(values)), True
    maxima, _ = find_extrema(values)
    if maxima:
        best = max(maxima, key=lambda i: (values[i], -i))
        return best, False
    interior = values[1:-1]
    return 1 + int(np.argmax(interior)), True


def _first_true(n: int, pred) -> int:
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class SizeProfile:
    """Event times with the cumulative size after all events sharing each timestamp."""

    times: np.ndarray
    sizes: np.ndarray

    @classmethod
    def of(cls, cascade: Cascade) -> "SizeProfile":
        curve = growth_curve(cascade)
        last_of_time = np.searchsorted(curve.times, curve.times, side="right") - 1
        return cls(curve.times, curve.sizes[last_of_time])

    def size_at(self, t: float) -> int:
        idx = int(np.searchsorted(self.times, t, side="right"))
        return int(self.sizes[idx - 1]) if idx else 0

    def inhibition(self, t_steep: float, thresholds: InhibitionThresholds) -> float | None:
        times, sizes = self.times, self.sizes
        s_steep = self.size_at(t_steep)
        if s_steep == 0:
            raise LifecycleError("t_steep precedes the cascade")
        dtg, g = thresholds.dtg, thresholds.g
        n = len(times)
        # both predicates are monotone in the event index
        i_time = _first_true(n, lambda i: times[i] >= t_steep and times[i] - t_steep >= dtg)
        i_size = _first_true(n, lambda i: sizes[i] / s_steep >= g)
        idx = max(i_time, i_size)
        return None if idx >= n else float(times[idx])


def detect_inhibition(cascade: Cascade, t_steep: float,
                      thresholds: InhibitionThresholds = InhibitionThresholds()) -> float | None:
    """Earliest event time t >= t_steep with t - t_steep >= dtg and S_t / S_steep >= g.

    ``S_t`` counts participants in events with time <= t. Returns None when no
    event qualifies.
    """
    thresholds.validate()
    return SizeProfile.of(cascade).inhibition(t_steep, thresholds)


@dataclass(frozen=True)
class SteepPoint:
    window: int          # 1-based
    time: float
    fallback: bool
    curve: np.ndarray


def steep_point(cascade: Cascade, windows: Sequence[Subsequence], config: HawkesConfig = HawkesConfig(),
                diffusion: DiffusionNetwork | None = None) -> SteepPoint:
    """Steep window plus a representative time: the highest-intensity event inside it."""
    intens = hawkes_intensity(cascade, config, diffusion)
    curve = interval_intensity_curve(intens, windows)
    pos, fallback = detect_steep(curve)
    window = pos + 1
    best_t, best_lam = None, -math.inf
    for t, lam in intens:
        if window_of_time(windows, t, clamp=True) == window and lam > best_lam:
            best_t, best_lam = t, lam
    if best_t is None:
        best_t = windows[pos].time_span[0]
    return SteepPoint(window=window, time=float(best_t), fallback=fallback, curve=curve)


# --------------------------------------------------------------------------
# calibration

DEFAULT_DTG_GRID = tuple(float(x) for x in range(60, 1441, 60))
DEFAULT_G_GRID = tuple(round(1.0 + 0.05 * i, 2) for i in range(1, 21))


@dataclass(frozen=True)
class CalibrationCase:
    cascade: Cascade
    windows: Sequence[Subsequence]
    t_steep: float
    t_inhib_label: float

    @cached_property
    def profile(self) -> SizeProfile:
        return SizeProfile.of(self.cascade)


def prepare_calibration(labeled: Iterable[tuple[Cascade, float]], W: int = 40,
                        config: HawkesConfig = HawkesConfig(),
                        diffusion: DiffusionNetwork | None = None) -> list[CalibrationCase]:
    from .windows import partition_subsequences

    cases = []
    for cascade, label in labeled:
        windows = partition_subsequences(cascade, W)
        sp = steep_point(cascade, windows, config, diffusion)
        cases.append(CalibrationCase(cascade, windows, sp.time, float(label)))
    return cases


def calibrate_thresholds(cases: Sequence[CalibrationCase],
                         dtg_grid: Sequence[float] = DEFAULT_DTG_GRID,
                         g_grid: Sequence[float] = DEFAULT_G_GRID) -> InhibitionThresholds:
    """Grid search minimising the mean absolute window-index error against labels.

    Ties on window error are broken by mean absolute time error, then by the
    smaller ``dtg`` and the smaller ``g``. A cascade with no detected inhibition
    scores one window past its last window.
    """
    if not cases:
        raise ConfigError("calibration needs at least one labelled cascade")
    if not dtg_grid or not g_grid:
        raise ConfigError("calibration grid is empty")
    label_windows = [window_of_time(c.windows, c.t_inhib_label, clamp=True) for c in cases]
    best_key, best = None, None
    for dtg in sorted(dtg_grid):
        for g in sorted(g_grid):
            th = InhibitionThresholds(float(dtg), float(g))
            w_err = t_err = 0.0
            for case, lw in zip(cases, label_windows):
                t = case.profile.inhibition(case.t_steep, th)
                if t is None:
                    w_err += abs(len(case.windows) + 1 - lw)
                    t_err += abs(case.cascade.events[-1].time - case.t_inhib_label)
                else:
                    w_err += abs(window_of_time(case.windows, t, clamp=True) - lw)
                    t_err += abs(t - case.t_inhib_label)
            key = (w_err / len(cases), t_err / len(cases))
            if best_key is None or key < best_key:
                best_key, best = key, th
    return best
