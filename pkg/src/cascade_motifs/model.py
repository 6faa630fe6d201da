"""Cascade data model, CSV ingestion, growth curves and cascade-type labelling.

Times are minutes since the start of the cascade. Co-rating inputs are given in
hours and converted on the way in.
"""
from __future__ import annotations

import csv
import enum
import io
import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import IO

import numpy as np
from scipy.optimize import least_squares

from .errors import ClassificationError, ConfigError, DataError, ParseError

log = logging.getLogger(__name__)

CASCADE_HEADER = ["cascade_id", "source", "target", "time"]
EDGE_HEADER = ["u", "v"]
RATING_HEADER = ["user", "item", "time_hours"]


@dataclass(frozen=True, order=True)
class ReshareEvent:
    # field order gives the sort order: time first
    time: float
    source: str
    target: str

    def __post_init__(self):
        if self.source == self.target:
            raise DataError(f"self reshare by {self.source!r}")
        if not self.time >= 0:
            raise DataError(f"negative or invalid time {self.time!r}")


@dataclass(frozen=True)
class Cascade:
    id: str
    events: tuple[ReshareEvent, ...]
    participants: tuple[str, ...]

    @classmethod
    def from_events(cls, cascade_id: str, events: Iterable[ReshareEvent], rebase: bool = True) -> "Cascade":
        """Sort, deduplicate and (optionally) rebase events so the first is at time 0."""
        evs = sorted(set(events))
        if rebase and evs:
            t0 = evs[0].time
            if t0 != 0:
                evs = [ReshareEvent(e.time - t0, e.source, e.target) for e in evs]
        seen: dict[str, None] = {}
        for e in evs:
            seen.setdefault(e.source)
            seen.setdefault(e.target)
        return cls(cascade_id, tuple(evs), tuple(seen))

    @property
    def size(self) -> int:
        return len(self.participants)

    @property
    def lifetime(self) -> float:
        return self.events[-1].time - self.events[0].time if self.events else 0.0

    @property
    def times(self) -> np.ndarray:
        return np.array([e.time for e in self.events], dtype=float)

    def first_appearance(self) -> dict[str, float]:
        """Time at which each participant is first seen (as source or target)."""
        first: dict[str, float] = {}
        for e in self.events:
            first.setdefault(e.source, e.time)
            first.setdefault(e.target, e.time)
        return first


class DiffusionNetwork:
    """Undirected historical-interaction graph over user ids."""

    def __init__(self, edges: Iterable[tuple[str, str]] = ()):
        self.adjacency: dict[str, set[str]] = defaultdict(set)
        self.skipped_self_loops = 0
        for u, v in edges:
            self.add_edge(u, v)

    def add_edge(self, u: str, v: str) -> bool:
        if u == v:
            self.skipped_self_loops += 1
            return False
        if v in self.adjacency.get(u, ()):
            return False
        self.adjacency[u].add(v)
        self.adjacency[v].add(u)
        return True

    def remove_edge(self, u: str, v: str) -> None:
        self.adjacency[u].discard(v)
        self.adjacency[v].discard(u)

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.adjacency.get(u, ())

    def neighbors(self, u: str) -> set[str]:
        return self.adjacency.get(u, set())

    def degree(self, u: str) -> int:
        return len(self.adjacency.get(u, ()))

    @property
    def edges(self) -> set[tuple[str, str]]:
        return {(u, v) if u < v else (v, u) for u, nb in self.adjacency.items() for v in nb}

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.adjacency.values()) // 2

    @property
    def n_nodes(self) -> int:
        return sum(1 for nb in self.adjacency.values() if nb)

    def average_degree(self) -> float:
        n = self.n_nodes
        return 2.0 * self.n_edges / n if n else 0.0

    def merge(self, other: "DiffusionNetwork") -> None:
        for u, v in other.edges:
            self.add_edge(u, v)


# --------------------------------------------------------------------------
# ingestion


def _reader(stream: IO[str] | str, header: list[str]) -> Iterator[tuple[int, list[str]]]:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    rows = csv.reader(stream)
    first = next(rows, None)
    if first is None:
        return
    if [c.strip() for c in first] != header:
        raise ParseError(f"expected header {','.join(header)!r}, got {','.join(first)!r}", line=1)
    for lineno, row in enumerate(rows, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
        yield lineno, [c.strip() for c in row]


def _parse_float(text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"time {text!r} is not a number", line=lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"time {text!r} is not finite", line=lineno)
    return value


def parse_cascade_log(stream: IO[str] | str) -> list[Cascade]:
    """Read ``cascade_id,source,target,time`` records into rebased cascades.

    Cascades are returned in order of first appearance in the stream.
    """
    raw: dict[str, list[ReshareEvent]] = {}
    for lineno, (cid, src, dst, t) in _reader(stream, CASCADE_HEADER):
        if not cid or not src or not dst:
            raise ParseError("empty field", line=lineno)
        if src == dst:
            raise DataError(f"source equals target ({src!r})", line=lineno)
        time = _parse_float(t, lineno)
        # validated after rebase; construct without the non-negativity check
        raw.setdefault(cid, []).append((time, src, dst, lineno))
    cascades = []
    for cid, recs in raw.items():
        t0 = min(r[0] for r in recs)
        events = []
        for time, src, dst, lineno in recs:
            rel = time - t0
            if rel < 0:  # pragma: no cover - min rebase cannot go negative
                raise DataError("negative time after rebase", line=lineno)
            events.append(ReshareEvent(rel, src, dst))
        cascades.append(Cascade.from_events(cid, events, rebase=False))
    return cascades


def parse_diffusion_edges(stream: IO[str] | str) -> DiffusionNetwork:
    """Read ``u,v`` records; duplicates collapse and self-loops are counted and dropped."""
    net = DiffusionNetwork()
    for lineno, (u, v) in _reader(stream, EDGE_HEADER):
        if not u or not v:
            raise ParseError("empty user id", line=lineno)
        net.add_edge(u, v)
    if net.skipped_self_loops:
        log.warning("dropped %d self-loop(s) from diffusion edges", net.skipped_self_loops)
    return net


def parse_ratings(stream: IO[str] | str) -> list[tuple[str, str, float]]:
    out = []
    for lineno, (user, item, t) in _reader(stream, RATING_HEADER):
        out.append((user, item, _parse_float(t, lineno)))
    return out


def format_time(t: float) -> str:
    return repr(float(t))


def write_cascade_log(cascades: Iterable[Cascade], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CASCADE_HEADER)
    for c in cascades:
        for e in c.events:
            w.writerow([c.id, e.source, e.target, format_time(e.time)])


def write_diffusion_edges(network: DiffusionNetwork, stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(EDGE_HEADER)
    for u, v in sorted(network.edges):
        w.writerow([u, v])


# --------------------------------------------------------------------------
# growth curves and types


def filter_by_size(cascades: Iterable[Cascade], min_participants: int = 300) -> list[Cascade]:
    """Keep cascades with strictly more than ``min_participants`` participants."""
    if min_participants < 1:
        raise ConfigError("min_participants must be >= 1")
    return [c for c in cascades if c.size > min_participants]


@dataclass(frozen=True)
class GrowthCurve:
    times: np.ndarray
    sizes: np.ndarray

    @property
    def points(self) -> list[tuple[float, int]]:
        return list(zip(self.times.tolist(), self.sizes.tolist()))

    def __len__(self) -> int:
        return len(self.times)

    def size_at(self, t: float) -> int:
        """Participants seen in events with time <= t."""
        idx = int(np.searchsorted(self.times, t, side="right"))
        return int(self.sizes[idx - 1]) if idx else 0


def growth_curve(cascade: Cascade) -> GrowthCurve:
    """One point per event: cumulative count of distinct participants so far."""
    if not cascade.events:
        raise DataError(f"cascade {cascade.id!r} has no events")
    seen: set[str] = set()
    sizes = []
    for e in cascade.events:
        seen.add(e.source)
        seen.add(e.target)
        sizes.append(len(seen))
    return GrowthCurve(cascade.times, np.array(sizes, dtype=np.int64))


class CascadeType(enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    TYPE_III = "TypeIII"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ClassifierConfig:
    steep_time_fraction_threshold: float = 0.15
    n_bins: int = 50
    two_step_ratio: float = 0.25  # two-step rms below this share of the logistic rms means Type II
    min_step_share: float = 0.15  # each step must carry at least this share of the growth


@dataclass(frozen=True)
class CurveFits:
    """RMS residuals of the candidate shapes on the unit-rescaled curve."""

    logistic: float
    line: float
    concave: float
    two_step: float
    steep_fraction: float
    logistic_params: tuple[float, float] = field(default=(0.0, 0.0))


def _rescale(curve: GrowthCurve) -> tuple[np.ndarray, np.ndarray]:
    t = curve.times - curve.times[0]
    span = t[-1]
    x = t / span if span > 0 else np.linspace(0.0, 1.0, len(t))
    s = curve.sizes.astype(float)
    y = (s - s[0]) / (s[-1] - s[0]) if s[-1] > s[0] else np.zeros_like(s)
    return x, y


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_logistic(x: np.ndarray, y: np.ndarray) -> tuple[float, tuple[float, float]]:
    """Least-squares fit of ``1 / (1 + exp(-k (x - x0)))``; returns (rms, (k, x0))."""
    best = (math.inf, (0.0, 0.0))
    x_mid = float(np.interp(0.5, y, x)) if y[-1] > y[0] else 0.5
    for k0 in (5.0, 20.0, 100.0):
        res = least_squares(lambda p: _sigmoid(p[0] * (x - p[1])) - y, x0=[k0, x_mid],
                            bounds=([1e-6, -1.0], [1e4, 2.0]))
        rms = float(np.sqrt(np.mean(res.fun ** 2)))
        if rms < best[0]:
            best = (rms, (float(res.x[0]), float(res.x[1])))
    return best


def fit_line(x: np.ndarray, y: np.ndarray) -> float:
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(np.sqrt(np.mean((A @ coef - y) ** 2)))


def fit_concave(x: np.ndarray, y: np.ndarray) -> float:
    """Fit ``(1 - exp(-c x)) / (1 - exp(-c))`` with c > 0 (saturating growth)."""
    def model(c):
        return -np.expm1(-c * x) / -np.expm1(-c)

    best = math.inf
    for c0 in (0.5, 5.0, 50.0):
        res = least_squares(lambda p: model(p[0]) - y, x0=[c0], bounds=([1e-6], [1e4]))
        best = min(best, float(np.sqrt(np.mean(res.fun ** 2))))
    return best


def fit_two_step(x: np.ndarray, y: np.ndarray, min_share: float = 0.15) -> float:
    """RMS of ``a s(k1 (x - x1)) + (1 - a) s(k2 (x - x2))`` with x1 <= x2 and a in [min_share, 1 - min_share]."""
    def resid(p):
        a, k1, x1, k2, dx = p
        return a * _sigmoid(k1 * (x - x1)) + (1 - a) * _sigmoid(k2 * (x - x1 - dx)) - y

    best = math.inf
    q1 = float(np.interp(0.25, y, x)) if y[-1] > y[0] else 0.25
    q3 = float(np.interp(0.75, y, x)) if y[-1] > y[0] else 0.75
    lo = [min_share, 1e-3, -1.0, 1e-3, 0.0]
    hi = [1 - min_share, 1e4, 2.0, 1e4, 3.0]
    for a0, k0 in itertools.product((0.3, 0.5, 0.7), (20.0, 200.0)):
        res = least_squares(resid, x0=[a0, k0, q1, k0, max(q3 - q1, 1e-3)], bounds=(lo, hi))
        best = min(best, float(np.sqrt(np.mean(res.fun ** 2))))
    return best


def steepest_time_fraction(curve: GrowthCurve, n_bins: int = 50) -> float:
    """Centre of the bin with the most new participants, as a fraction of the lifetime."""
    t = curve.times - curve.times[0]
    span = t[-1]
    if span <= 0:
        return 0.0
    edges = np.linspace(0.0, span, n_bins + 1)
    # size at each bin edge; growth per bin is the discrete slope
    idx = np.searchsorted(t, edges, side="right")
    at_edge = np.where(idx > 0, curve.sizes[np.maximum(idx - 1, 0)], 0)
    growth = np.diff(at_edge)
    b = int(np.argmax(growth))
    return float((edges[b] + edges[b + 1]) / 2.0 / span)


def curve_fits(curve: GrowthCurve, config: ClassifierConfig = ClassifierConfig()) -> CurveFits:
    if len(curve) < 3:
        raise ClassificationError("need at least 3 curve points to classify")
    x, y = _rescale(curve)
    rms_log, params = fit_logistic(x, y)
    return CurveFits(logistic=rms_log, line=fit_line(x, y), concave=fit_concave(x, y),
                     two_step=fit_two_step(x, y, config.min_step_share),
                     steep_fraction=steepest_time_fraction(curve, config.n_bins),
                     logistic_params=params)


def classify_cascade_type(curve: GrowthCurve, config: ClassifierConfig = ClassifierConfig()) -> CascadeType:
    """Label a growth curve as Type I (logistic, early steep point), II (stepwise) or III.

    Type II when two stacked logistic steps fit much better than any single
    shape. Type III when a straight line or a saturating concave curve fits at
    least as well as the logistic. Type II again when the steepest growth comes
    after ``steep_time_fraction_threshold`` of the lifetime. Otherwise Type I.
    """
    fits = curve_fits(curve, config)
    if fits.two_step < config.two_step_ratio * min(fits.logistic, fits.line, fits.concave):
        return CascadeType.TYPE_II
    if min(fits.line, fits.concave) <= fits.logistic:
        return CascadeType.TYPE_III
    if fits.steep_fraction >= config.steep_time_fraction_threshold:
        return CascadeType.TYPE_II
    return CascadeType.TYPE_I


# --------------------------------------------------------------------------
# co-rating cascades


def build_corating_cascades(ratings: Iterable[tuple[str, str, float]], window_hours: float = 24.0) -> list[Cascade]:
    """Link every pair of users who rated the same item within ``window_hours``.

    Each link becomes an event at the later of the two rating times, oriented
    from the earlier rater to the later one (ties by user id). A user's first
    rating of an item is used. Cascades come back sorted by item id.
    """
    if not window_hours > 0:
        raise ConfigError("window_hours must be positive")
    window = window_hours * 60.0
    by_item: dict[str, dict[str, float]] = defaultdict(dict)
    for user, item, t in ratings:
        minutes = float(t) * 60.0
        prev = by_item[item].get(user)
        if prev is None or minutes < prev:
            by_item[item][user] = minutes
    cascades = []
    for item in sorted(by_item):
        raters = sorted(by_item[item].items(), key=lambda kv: (kv[1], kv[0]))
        events = []
        start = 0
        for j, (v, tv) in enumerate(raters):
            while raters[start][1] < tv - window:
                start += 1
            for u, tu in raters[start:j]:
                events.append(ReshareEvent(tv, u, v))
        if events:
            cascades.append(Cascade.from_events(item, events))
    return cascades
