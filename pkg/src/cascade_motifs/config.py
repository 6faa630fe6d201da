"""Run configuration: sectioned key-value files with command-line overrides.

Example file::

    [windows]
    W = 40
    history = 20

    [lifecycle]
    dtg = 120
    g = 1.5

Every key can also be overridden with ``--set section.key=value``.
"""
from __future__ import annotations

import configparser
import dataclasses
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .lifecycle import HawkesConfig, InhibitionThresholds
from .model import CascadeType
from .motifs import PatternId, pattern_catalog


@dataclass
class DataSection:
    cascades: str = ""
    diffusion: str = ""
    ratings: str = ""
    window_hours: float = 24.0
    min_participants: int = 300
    types: tuple[str, ...] = ("TypeI", "TypeII", "TypeIII")


@dataclass
class WindowSection:
    W: int = 40
    history: int = 20


@dataclass
class LifecycleSection:
    mu: float = 0.0
    alpha: float = 1.0
    beta: float = 0.1
    weighting: str = "uniform"
    dtg: float = 120.0
    g: float = 1.5
    labels: str = ""   # cascade_id,t_inhib; when set, thresholds are calibrated first

    def hawkes(self) -> HawkesConfig:
        return HawkesConfig(self.mu, self.alpha, self.beta, self.weighting)

    def thresholds(self) -> InhibitionThresholds:
        return InhibitionThresholds(self.dtg, self.g)


@dataclass
class MotifSection:
    sizes: tuple[int, ...] = (3, 4, 5)


@dataclass
class SignificanceSection:
    ensemble_size: int = 100    # 0 turns z-scores off
    switches_per_edge: float = 10.0
    offsets: tuple[int, ...] = (1,)   # networks N_{inhib-j} that get z-scores
    ddof: int = 0


@dataclass
class TransitionSection:
    induced: bool = False
    min4: str = ""   # "k:code=n;k:code=n"
    min5: str = ""
    default4: int = 0
    default5: int = 0


@dataclass
class PredictionSection:
    eta_grid: tuple[float, ...] = (0.01, 0.02, 0.03, 0.04)
    penalty: str = "l1"
    st: tuple[int, ...] = (1, 3, 5, 7, 9)
    folds: int = 10
    polynomial: bool = False
    patterns: tuple[str, ...] = ()        # empty: every catalogued pattern of the motif sizes
    acyclic_combo: tuple[str, ...] = ()   # empty: the 5-node trees
    loop_combo: tuple[str, ...] = ()      # empty: the 5-edge 5-node patterns with a triangle
    centrality: bool = True


@dataclass
class SynthSection:
    n_cascades: int = 30
    n_min: int = 320
    n_max: int = 520
    midpoint_min: float = 200.0
    midpoint_max: float = 400.0
    rate: float = 0.02
    hist_prob_min: float = 0.05
    hist_prob_max: float = 0.2
    shape: str = "TypeI"
    planted_pattern: str = ""
    plant_scale: float = 20.0
    plant_noise: float = 2.0


@dataclass
class RunSection:
    seed: int = 0
    threads: int = 1
    out: str = "out"
    max_failure_fraction: float = 0.1


@dataclass
class RunConfig:
    data: DataSection = field(default_factory=DataSection)
    windows: WindowSection = field(default_factory=WindowSection)
    lifecycle: LifecycleSection = field(default_factory=LifecycleSection)
    motifs: MotifSection = field(default_factory=MotifSection)
    significance: SignificanceSection = field(default_factory=SignificanceSection)
    transitions: TransitionSection = field(default_factory=TransitionSection)
    prediction: PredictionSection = field(default_factory=PredictionSection)
    synth: SynthSection = field(default_factory=SynthSection)
    run: RunSection = field(default_factory=RunSection)

    # ------------------------------------------------------------------
    def set(self, section: str, key: str, text: str) -> None:
        sec = getattr(self, section, None)
        if sec is None or not dataclasses.is_dataclass(sec):
            raise ConfigError(f"unknown config section [{section}]")
        names = {f.name for f in dataclasses.fields(sec)}
        if key not in names:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        setattr(sec, key, _coerce(getattr(sec, key), text, f"{section}.{key}"))

    def apply_overrides(self, pairs: Iterable[str]) -> None:
        for item in pairs:
            lhs, sep, value = item.partition("=")
            section, dot, key = lhs.strip().partition(".")
            if not sep or not dot:
                raise ConfigError(f"override {item!r} is not section.key=value")
            self.set(section, key, value.strip())

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_ini(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            lines.append(f"[{f.name}]")
            for k, v in dataclasses.asdict(getattr(self, f.name)).items():
                if isinstance(v, (tuple, list)):
                    v = ",".join(str(x) for x in v)
                lines.append(f"{k} = {v}")
            lines.append("")
        return "\n".join(lines)

    # ------------------------------------------------------------------
    def validate(self) -> "RunConfig":
        if self.windows.W < 2:
            raise ConfigError("W must be at least 2")
        if self.windows.history < 1:
            raise ConfigError("history must be at least 1")
        if self.data.min_participants < 1:
            raise ConfigError("min_participants must be at least 1")
        if self.data.window_hours <= 0:
            raise ConfigError("window_hours must be positive")
        valid_types = {str(t) for t in CascadeType}
        if set(self.data.types) - valid_types:
            raise ConfigError(f"types must be drawn from {sorted(valid_types)}")
        self.lifecycle.hawkes().validate()
        self.lifecycle.thresholds().validate()
        if set(self.motifs.sizes) - {3, 4, 5}:
            raise ConfigError("motif sizes must be drawn from 3, 4, 5")
        sig = self.significance
        if sig.ensemble_size == 1 or sig.ensemble_size < 0:
            raise ConfigError("ensemble_size must be 0 (off) or at least 2")
        if sig.switches_per_edge < 0 or any(o < 0 for o in sig.offsets) or sig.ddof not in (0, 1):
            raise ConfigError("bad significance settings")
        self.transition_thresholds()
        pred = self.prediction
        if not pred.eta_grid or any(e < 0 for e in pred.eta_grid):
            raise ConfigError("eta_grid must be non-empty and non-negative")
        if pred.penalty not in ("l1", "l2"):
            raise ConfigError("penalty must be l1 or l2")
        if not pred.st or any(s < 1 for s in pred.st):
            raise ConfigError("st values must be positive")
        if pred.folds < 2:
            raise ConfigError("folds must be at least 2")
        self.individual_patterns()
        self.combo("acyclic")
        self.combo("loop")
        syn = self.synth
        if syn.shape not in valid_types:
            raise ConfigError(f"unknown shape {syn.shape!r}")
        if syn.planted_pattern:
            _pattern(syn.planted_pattern)
        if self.run.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not 0 <= self.run.max_failure_fraction <= 1:
            raise ConfigError("max_failure_fraction must lie in [0, 1]")
        return self

    def transition_thresholds(self):
        from .transitions import TransitionThresholds

        t = self.transitions
        try:
            return TransitionThresholds(_pattern_table(t.min4), _pattern_table(t.min5), t.default4, t.default5)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def individual_patterns(self) -> list[PatternId]:
        if self.prediction.patterns:
            return [_pattern(p) for p in self.prediction.patterns]
        return [p for k in sorted(self.motifs.sizes) for p in pattern_catalog(k)]

    def combo(self, which: str) -> list[PatternId]:
        chosen = self.prediction.acyclic_combo if which == "acyclic" else self.prediction.loop_combo
        if chosen:
            return [_pattern(p) for p in chosen]
        cat5 = pattern_catalog(5)
        if which == "acyclic":
            return [p for p in cat5 if p.is_tree]
        return [p for p in cat5 if p.n_edges == 5 and p.has_triangle]


def _pattern(text: str) -> PatternId:
    try:
        pid = PatternId.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if pid not in pattern_catalog(pid.k):
        raise ConfigError(f"{text!r} is not a canonical pattern id")
    return pid


def _pattern_table(text: str) -> dict[PatternId, int]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(";"))):
        key, _, value = item.partition("=")
        out[_pattern(key.strip())] = int(value)
    return out


def _coerce(default: Any, text: str, where: str) -> Any:
    try:
        if isinstance(default, bool):
            low = text.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [s.strip() for s in text.split(",") if s.strip()]
            kind = type(default[0]) if default else str
            return tuple(kind(s) for s in items)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value {text!r} for {where}") from exc


def load_config(path: str | Path | None = None, overrides: Iterable[str] = ()) -> RunConfig:
    cfg = RunConfig()
    if path:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        parser = configparser.ConfigParser()
        parser.optionxform = str
        try:
            parser.read(p, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"{p}: {exc}") from exc
        for section in parser.sections():
            for key, value in parser.items(section):
                cfg.set(section, key, value)
    cfg.apply_overrides(overrides)
    return cfg
