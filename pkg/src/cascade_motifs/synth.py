"""Synthetic cascades with known growth shape, plus corpora with a planted regression signal.

A cascade is a preferential-attachment reshare tree whose arrival times are
inverse-sampled from a logistic growth curve (Type I), two stacked logistic
steps (Type II) or a uniform ramp (Type III). Historical diffusion edges link
participants that were active close together in arrival order.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, ContractViolation, LifecycleError, WindowingError
from .lifecycle import HawkesConfig, InhibitionThresholds, detect_inhibition, steep_point
from .model import Cascade, CascadeType, DiffusionNetwork, ReshareEvent
from .motifs import PatternId, motif_census
from .windows import (CASCADE, build_temporal_network, edge_key, locate_lifecycle_networks,
                      partition_subsequences, window_of_time)


@dataclass(frozen=True)
class SynthParams:
    n_participants: int = 400
    logistic_midpoint: float = 300.0
    logistic_rate: float = 0.02
    historical_edge_prob: float = 0.05
    shape: CascadeType = CascadeType.TYPE_I
    coactive_span: int = 8           # pairs at most this far apart in arrival order may get a historical edge
    straggler_fraction: float = 0.05  # participants arriving uniformly over the whole lifetime
    lifetime: float = 10000.0

    def validate(self) -> "SynthParams":
        if self.n_participants < 2:
            raise ConfigError("n_participants must be at least 2")
        if not (self.logistic_midpoint > 0 and self.logistic_rate > 0):
            raise ConfigError("logistic midpoint and rate must be positive")
        if not 0 <= self.historical_edge_prob <= 1:
            raise ConfigError("historical_edge_prob must lie in [0, 1]")
        if not 0 <= self.straggler_fraction < 1:
            raise ConfigError("straggler_fraction must lie in [0, 1)")
        if self.coactive_span < 1:
            raise ConfigError("coactive_span must be at least 1")
        if not self.lifetime > 0:
            raise ConfigError("lifetime must be positive")
        if not isinstance(self.shape, CascadeType):
            raise ConfigError(f"unknown shape {self.shape!r}")
        return self


def _stratified(rng: np.random.Generator, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    # one uniform draw per quantile stratum keeps the empirical curve close to its target
    return lo + (hi - lo) * (np.arange(n) + rng.uniform(size=n)) / max(n, 1)


def _logistic_times(rng: np.random.Generator, n: int, mid: float, rate: float) -> np.ndarray:
    # truncated to t >= 0 by sampling u from [F(0), 1)
    lo = 1.0 / (1.0 + math.exp(rate * mid))
    u = _stratified(rng, n, lo, 1.0)
    return np.maximum(mid + np.log(u / (1.0 - u)) / rate, 0.0)


def arrival_times(params: SynthParams, rng: np.random.Generator) -> np.ndarray:
    """Sorted arrival times of the ``n - 1`` non-root participants.

    Body times are stratified inverse-CDF draws from the chosen shape;
    stragglers are uniform over the whole lifetime.
    """
    n = params.n_participants - 1
    n_strag = int(round(params.straggler_fraction * n))
    n_body = n - n_strag
    m, r = params.logistic_midpoint, params.logistic_rate
    if params.shape is CascadeType.TYPE_I:
        body = _logistic_times(rng, n_body, m, r)
    elif params.shape is CascadeType.TYPE_II:
        n_first = int(round(0.4 * n_body))
        body = np.concatenate([_logistic_times(rng, n_first, m, r),
                               _logistic_times(rng, n_body - n_first, 4 * m, r)])
    else:
        body = _stratified(rng, n_body, 0.0, params.lifetime)
    strag = rng.uniform(0.0, params.lifetime, size=n_strag)
    return np.sort(np.concatenate([body, strag]))


@dataclass(frozen=True)
class SyntheticCascade:
    cascade: Cascade
    diffusion: DiffusionNetwork
    midpoint: float  # logistic midpoint on the rebased cascade clock


def generate(params: SynthParams, seed: int | np.random.Generator, cascade_id: str = "c0") -> SyntheticCascade:
    """Cascade, historical-edge overlay and ground-truth midpoint; deterministic for a fixed seed."""
    params.validate()
    rng = np.random.default_rng(seed)
    times = arrival_times(params, rng)
    offset = float(times[0])
    users = [f"{cascade_id}_u{j}" for j in range(params.n_participants)]
    # each node holds one ticket plus one per child, so a uniform ticket draw is
    # attachment proportional to children + 1
    tickets = [0]
    events = []
    for j, t in enumerate(times, start=1):
        parent = tickets[int(rng.integers(len(tickets)))]
        events.append(ReshareEvent(float(t) - offset, users[parent], users[j]))
        tickets.append(parent)
        tickets.append(j)
    cascade = Cascade.from_events(cascade_id, events, rebase=True)
    order = cascade.participants
    diffusion = DiffusionNetwork()
    p = params.historical_edge_prob
    if p > 0:
        n = len(order)
        for d in range(1, params.coactive_span + 1):
            hits = np.flatnonzero(rng.uniform(size=max(n - d, 0)) < p)
            for a in hits:
                diffusion.add_edge(order[a], order[a + d])
    return SyntheticCascade(cascade, diffusion, params.logistic_midpoint - offset)


def synthesize_cascade(params: SynthParams, seed: int | np.random.Generator,
                       cascade_id: str = "c0") -> tuple[Cascade, DiffusionNetwork]:
    """One cascade and its historical-edge overlay; deterministic for a fixed seed."""
    out = generate(params, seed, cascade_id)
    return out.cascade, out.diffusion


def midpoint_window(synthetic: SyntheticCascade, W: int = 40) -> int:
    """1-based window whose time span covers the generator's logistic midpoint."""
    windows = partition_subsequences(synthetic.cascade, W)
    return window_of_time(windows, synthetic.midpoint, clamp=True)


# --------------------------------------------------------------------------
# corpora


@dataclass(frozen=True)
class CorpusConfig:
    n_cascades: int = 30
    n_range: tuple[int, int] = (320, 520)
    midpoint_range: tuple[float, float] = (200.0, 400.0)
    rate: float = 0.02
    hist_prob_range: tuple[float, float] = (0.05, 0.2)
    shape: CascadeType = CascadeType.TYPE_I
    W: int = 40
    hawkes: HawkesConfig = field(default_factory=HawkesConfig)
    thresholds: InhibitionThresholds = field(default_factory=InhibitionThresholds)
    planted_pattern: str | None = None  # "k:code"; None leaves edge counts as generated
    plant_scale: float = 20.0           # std of the planted term a*MC across the corpus, in edges
    plant_noise: float = 2.0            # std of the Gaussian noise on the target edge count
    max_attempts: int = 20

    def validate(self) -> "CorpusConfig":
        if self.n_cascades < 1:
            raise ConfigError("n_cascades must be positive")
        if not 2 <= self.n_range[0] <= self.n_range[1]:
            raise ConfigError("bad n_range")
        if not 0 < self.midpoint_range[0] <= self.midpoint_range[1]:
            raise ConfigError("bad midpoint_range")
        if not 0 <= self.hist_prob_range[0] <= self.hist_prob_range[1] <= 1:
            raise ConfigError("bad hist_prob_range")
        if self.planted_pattern is not None:
            PatternId.parse(self.planted_pattern)
            if self.hawkes.weighting != "uniform":
                raise ConfigError("planting needs uniform Hawkes weighting so edits leave lifecycle points intact")
        if self.plant_noise < 0 or self.plant_scale < 0:
            raise ConfigError("plant_noise and plant_scale must be non-negative")
        self.hawkes.validate()
        self.thresholds.validate()
        return self


@dataclass
class CascadeTruth:
    cascade_id: str
    midpoint: float
    midpoint_window: int
    t_steep: float
    t_inhib: float
    steep_network: int
    inhib_network: int
    planted_mc: float = float("nan")
    target_edges: int = -1


@dataclass
class SyntheticCorpus:
    cascades: list[Cascade]
    diffusion: DiffusionNetwork
    truth: list[CascadeTruth]
    slope: float = 0.0
    intercept: float = 0.0
    planted_pattern: str | None = None


def _draw_params(cfg: CorpusConfig, rng: np.random.Generator) -> SynthParams:
    return SynthParams(
        n_participants=int(rng.integers(cfg.n_range[0], cfg.n_range[1] + 1)),
        logistic_midpoint=float(rng.uniform(*cfg.midpoint_range)),
        logistic_rate=cfg.rate,
        historical_edge_prob=float(rng.uniform(*cfg.hist_prob_range)),
        shape=cfg.shape,
    )


@dataclass
class _Draft:
    cascade: Cascade
    diffusion: DiffusionNetwork
    truth: CascadeTruth
    windows: list


def _draft(cfg: CorpusConfig, cid: str, rng: np.random.Generator) -> _Draft | None:
    params = _draw_params(cfg, rng)
    syn = generate(params, rng, cid)
    cascade, diffusion = syn.cascade, syn.diffusion
    try:
        windows = partition_subsequences(cascade, cfg.W)
        sp = steep_point(cascade, windows, cfg.hawkes, diffusion)
        t_inhib = detect_inhibition(cascade, sp.time, cfg.thresholds)
        if t_inhib is None:
            return None
        idx = locate_lifecycle_networks(windows, sp.time, t_inhib)
    except (WindowingError, LifecycleError):
        return None
    # the planted predictor sits on N_{inhib-1}, and features need N_{inhib-2}
    if idx.inhib_window < 4:
        return None
    truth = CascadeTruth(cid, syn.midpoint, window_of_time(windows, syn.midpoint, clamp=True),
                         sp.time, t_inhib, idx.steep_window, idx.inhib_window)
    return _Draft(cascade, diffusion, truth, windows)


def _adjustable_pairs(draft: _Draft) -> tuple[list[tuple[str, str]], int]:
    """Non-cascade pairs of N_inhib touching window inhib, and the count of fixed edges."""
    i = draft.truth.inhib_network
    net = build_temporal_network(draft.windows, i, draft.diffusion)
    prev, curr = draft.windows[i - 2], draft.windows[i - 1]
    pool = []
    for a, x in enumerate(curr.node_set):
        for y in curr.node_set[a + 1:]:
            pool.append(edge_key(x, y))
        for y in prev.node_set:
            pool.append(edge_key(x, y))
    pool = [p for p in pool if net.edge_tags.get(p) != CASCADE]
    movable = sum(1 for p in pool if p in net.edge_tags)
    return pool, net.n_edges - movable


def synthesize_corpus(cfg: CorpusConfig, seed: int) -> SyntheticCorpus:
    """A corpus of cascades that all have detectable steep and inhibition points.

    With ``planted_pattern`` set, historical edges touching the inhibition window
    are rewired so that ``|E(N_inhib)| = a * MC(pattern, N_{inhib-1}) + b + noise``.
    Those edits never touch ``N_{inhib-1}`` or earlier networks, and under
    uniform weighting they cannot move the lifecycle points.
    """
    cfg.validate()
    root = np.random.SeedSequence(seed)
    drafts: list[_Draft] = []
    for c, child in enumerate(root.spawn(cfg.n_cascades)):
        rng = np.random.default_rng(child)
        cid = f"c{c:04d}"
        for _ in range(cfg.max_attempts):
            d = _draft(cfg, cid, rng)
            if d is not None:
                drafts.append(d)
                break
        else:
            raise ConfigError(f"could not draw a usable cascade for {cid} in {cfg.max_attempts} attempts")

    slope = intercept = 0.0
    if cfg.planted_pattern is not None:
        pattern = PatternId.parse(cfg.planted_pattern)
        mcs = []
        for d in drafts:
            prev_net = build_temporal_network(d.windows, d.truth.inhib_network - 1, d.diffusion)
            mcs.append(motif_census(prev_net, pattern.k, count_only=True).count(pattern))
        mcs_arr = np.asarray(mcs, dtype=float)
        spread = float(mcs_arr.std())
        slope = cfg.plant_scale / spread if spread > 0 else 0.0
        plans = [_adjustable_pairs(d) for d in drafts]
        noise_rng = np.random.default_rng(root.spawn(1)[0])
        noise = noise_rng.normal(0.0, cfg.plant_noise, size=len(drafts))
        # smallest intercept keeping every target above its fixed edge count
        margin = 4.0 * cfg.plant_noise + 2.0
        intercept = float(max(fixed - slope * mc for (_, fixed), mc in zip(plans, mcs_arr)) + margin)
        for d, (pool, fixed), mc, eps in zip(drafts, plans, mcs_arr, noise):
            target = int(round(slope * mc + intercept + eps))
            target = min(max(target, fixed), fixed + len(pool))
            _rewire(d, pool, target - fixed, noise_rng)
            d.truth.planted_mc = float(mc)
            d.truth.target_edges = target
            got = build_temporal_network(d.windows, d.truth.inhib_network, d.diffusion).n_edges
            if got != target:
                raise ContractViolation(f"{d.truth.cascade_id}: rewired to {got} edges, wanted {target}")

    diffusion = DiffusionNetwork()
    for d in drafts:
        diffusion.merge(d.diffusion)
    return SyntheticCorpus([d.cascade for d in drafts], diffusion, [d.truth for d in drafts],
                           slope, intercept, cfg.planted_pattern)


def _rewire(draft: _Draft, pool: Sequence[tuple[str, str]], want: int, rng: np.random.Generator) -> None:
    present = [p for p in pool if draft.diffusion.has_edge(*p)]
    absent = [p for p in pool if not draft.diffusion.has_edge(*p)]
    if want > len(present):
        picks = rng.choice(len(absent), size=want - len(present), replace=False)
        for j in sorted(picks):
            draft.diffusion.add_edge(*absent[j])
    elif want < len(present):
        picks = rng.choice(len(present), size=len(present) - want, replace=False)
        for j in sorted(picks):
            draft.diffusion.remove_edge(*present[j])


def with_shape(cfg: CorpusConfig, shape: CascadeType) -> CorpusConfig:
    return replace(cfg, shape=shape)
