"""End-to-end commands: synth, ingest, calibrate, analyze, predict and report.

Each command reads a :class:`RunConfig`, writes UTF-8 CSV/JSON into the output
directory and leaves a ``manifest.json`` next to its outputs. Report files are
byte-identical across reruns with the same config and seed; manifests carry
timings and are the only files that differ.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
import warnings
import zlib
from collections import defaultdict
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import CascadeMotifsError, ConfigError, EvaluationError, LifecycleError, WindowingError
from .features import (CENTRALITY_MEASURES, CascadeFeatures, FeatureMatrix, centrality_feature_matrix,
                       centrality_values, corpus_targets, motif_feature_matrix)
from .lifecycle import calibrate_thresholds, detect_inhibition, prepare_calibration, steep_point
from .model import (Cascade, CascadeType, DiffusionNetwork, ReshareEvent, build_corating_cascades,
                    classify_cascade_type, filter_by_size, growth_curve, parse_cascade_log,
                    parse_diffusion_edges, parse_ratings, write_cascade_log, write_diffusion_edges)
from .motifs import PatternId, motif_census
from .regression import cross_validate
from .significance import build_ensemble, zscore_report
from .synth import CorpusConfig, synthesize_corpus
from .transitions import count_transitions
from .windows import (build_temporal_network, count_long_reshares, locate_lifecycle_networks,
                      partition_subsequences)

log = logging.getLogger(__name__)

CORPUS_FILE = "corpus.json"
MANIFEST_FILE = "manifest.json"


class InputError(CascadeMotifsError):
    """Missing or unreadable input; maps to exit code 2."""


# --------------------------------------------------------------------------
# manifest and small IO helpers


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    timings: dict[str, float] = field(default_factory=dict)
    warnings: dict[str, int] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    def stage(self, name: str):
        manifest = self

        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                manifest.timings[name] = round(time.perf_counter() - self.t0, 6)

        return _Timer()

    def write(self, out_dir: Path) -> None:
        data = {k: getattr(self, k) for k in
                ("command", "version", "config", "timings", "warnings", "counts", "outputs", "extra")}
        _write_json(out_dir / MANIFEST_FILE, data)


def _write_json(path: Path, data: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path: Path) -> Any:
    if not path.is_file():
        raise InputError(f"missing input: {path}")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _open_input(path: str | Path):
    p = Path(path)
    if not str(path) or not p.is_file():
        raise InputError(f"missing input: {p}")
    return open(p, encoding="utf-8", newline="")


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _read_rows(path: Path) -> list[dict[str, str]]:
    if not path.is_file():
        raise InputError(f"missing input: {path}")
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    if x is None:
        return ""
    return str(x)


def _out(cfg: RunConfig, sub: str = "") -> Path:
    p = Path(cfg.run.out) / sub if sub else Path(cfg.run.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _cascade_seed(seed: int, cascade_id: str) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, zlib.crc32(cascade_id.encode("utf-8"))])


# --------------------------------------------------------------------------
# synth


def corpus_config(cfg: RunConfig) -> CorpusConfig:
    s = cfg.synth
    return CorpusConfig(
        n_cascades=s.n_cascades, n_range=(s.n_min, s.n_max), midpoint_range=(s.midpoint_min, s.midpoint_max),
        rate=s.rate, hist_prob_range=(s.hist_prob_min, s.hist_prob_max), shape=CascadeType(s.shape),
        W=cfg.windows.W, hawkes=cfg.lifecycle.hawkes(), thresholds=cfg.lifecycle.thresholds(),
        planted_pattern=s.planted_pattern or None, plant_scale=s.plant_scale, plant_noise=s.plant_noise)


def cmd_synth(cfg: RunConfig) -> RunManifest:
    """Synthetic cascade log, diffusion edges and ground truth."""
    cfg.validate()
    out = _out(cfg, "synth")
    man = RunManifest("synth", cfg.to_dict())
    with man.stage("generate"):
        corpus = synthesize_corpus(corpus_config(cfg), cfg.run.seed)
    with man.stage("write"):
        with open(out / "cascades.csv", "w", encoding="utf-8", newline="") as fh:
            write_cascade_log(corpus.cascades, fh)
        with open(out / "diffusion.csv", "w", encoding="utf-8", newline="") as fh:
            write_diffusion_edges(corpus.diffusion, fh)
        _write_rows(out / "truth.csv",
                    ["cascade_id", "midpoint", "midpoint_window", "t_steep", "t_inhib", "steep_network",
                     "inhib_network", "planted_mc", "target_edges"],
                    ([t.cascade_id, t.midpoint, t.midpoint_window, t.t_steep, t.t_inhib, t.steep_network,
                      t.inhib_network, t.planted_mc, t.target_edges] for t in corpus.truth))
        _write_rows(out / "labels.csv", ["cascade_id", "t_inhib"],
                    ([t.cascade_id, t.t_inhib] for t in corpus.truth))
        _write_json(out / "planted.json", {"pattern": corpus.planted_pattern, "slope": corpus.slope,
                                           "intercept": corpus.intercept, "noise_std": cfg.synth.plant_noise})
    man.counts["cascades"] = len(corpus.cascades)
    man.outputs = ["cascades.csv", "diffusion.csv", "truth.csv", "labels.csv", "planted.json"]
    man.write(out)
    return man


# --------------------------------------------------------------------------
# ingest


@dataclass
class Corpus:
    cascades: list[Cascade]
    types: dict[str, str]
    diffusion: DiffusionNetwork


def _corpus_to_json(corpus: Corpus) -> dict:
    return {
        "cascades": [{"id": c.id, "type": corpus.types.get(c.id, ""),
                      "events": [[e.time, e.source, e.target] for e in c.events]} for c in corpus.cascades],
        "diffusion": [list(e) for e in sorted(corpus.diffusion.edges)],
    }


def load_corpus(path: Path) -> Corpus:
    data = _read_json(path)
    cascades, types = [], {}
    for rec in data["cascades"]:
        events = [ReshareEvent(float(t), s, d) for t, s, d in rec["events"]]
        cascades.append(Cascade.from_events(rec["id"], events, rebase=False))
        types[rec["id"]] = rec["type"]
    return Corpus(cascades, types, DiffusionNetwork(tuple(e) for e in data["diffusion"]))


def cmd_ingest(cfg: RunConfig) -> RunManifest:
    """Parse, filter by size, label cascade types and cache the corpus as JSON."""
    cfg.validate()
    man = RunManifest("ingest", cfg.to_dict())
    with man.stage("parse"):
        if cfg.data.ratings:
            with _open_input(cfg.data.ratings) as fh:
                cascades = build_corating_cascades(parse_ratings(fh), cfg.data.window_hours)
        else:
            with _open_input(cfg.data.cascades) as fh:
                cascades = parse_cascade_log(fh)
        if cfg.data.diffusion:
            with _open_input(cfg.data.diffusion) as fh:
                diffusion = parse_diffusion_edges(fh)
        else:
            diffusion = DiffusionNetwork()
    with man.stage("filter_classify"):
        kept = filter_by_size(cascades, cfg.data.min_participants)
        kept.sort(key=lambda c: c.id)
        types = {c.id: str(classify_cascade_type(growth_curve(c))) for c in kept}
    out = _out(cfg, "ingest")
    _write_json(out / CORPUS_FILE, _corpus_to_json(Corpus(kept, types, diffusion)))
    man.counts = {"parsed": len(cascades), "kept": len(kept), "diffusion_edges": diffusion.n_edges,
                  "self_loops_dropped": diffusion.skipped_self_loops}
    for t in CascadeType:
        man.counts[str(t)] = sum(1 for v in types.values() if v == str(t))
    man.extra["corpus_sha256"] = _digest(out / CORPUS_FILE)
    man.outputs = [CORPUS_FILE]
    man.write(out)
    return man


# --------------------------------------------------------------------------
# calibrate


def _labels(path: str) -> dict[str, float]:
    with _open_input(path) as fh:
        rows = list(csv.DictReader(fh))
    try:
        return {r["cascade_id"]: float(r["t_inhib"]) for r in rows}
    except (KeyError, ValueError) as exc:
        raise InputError(f"{path}: labels need cascade_id,t_inhib columns") from exc


def calibrated_thresholds(cfg: RunConfig, corpus: Corpus):
    labels = _labels(cfg.lifecycle.labels)
    labelled = [(c, labels[c.id]) for c in corpus.cascades if c.id in labels]
    if not labelled:
        raise ConfigError("no labelled cascade is present in the corpus")
    cases = []
    for c, t in labelled:
        try:
            cases.extend(prepare_calibration([(c, t)], cfg.windows.W, cfg.lifecycle.hawkes(), corpus.diffusion))
        except (WindowingError, LifecycleError) as exc:
            log.warning("skipping %s for calibration: %s", c.id, exc)
    if not cases:
        raise ConfigError("no labelled cascade could be windowed")
    return calibrate_thresholds(cases), len(cases)


def cmd_calibrate(cfg: RunConfig) -> RunManifest:
    cfg.validate()
    if not cfg.lifecycle.labels:
        raise ConfigError("calibrate needs lifecycle.labels")
    out = _out(cfg, "calibration")
    man = RunManifest("calibrate", cfg.to_dict())
    corpus = load_corpus(Path(cfg.run.out) / "ingest" / CORPUS_FILE)
    with man.stage("grid_search"):
        th, n = calibrated_thresholds(cfg, corpus)
    _write_json(out / "calibration.json", {"dtg": th.dtg, "g": th.g, "n_cases": n})
    man.outputs = ["calibration.json"]
    man.write(out)
    return man


# --------------------------------------------------------------------------
# analyze


@dataclass
class CascadeResult:
    cascade_id: str
    status: str
    lifecycle: list[Any] = field(default_factory=list)
    census: list[list[Any]] = field(default_factory=list)
    transitions: list[list[Any]] = field(default_factory=list)
    significance: list[list[Any]] = field(default_factory=list)
    centrality: list[list[Any]] = field(default_factory=list)
    warnings: int = 0


LIFECYCLE_HEADER = ["cascade_id", "type", "n_participants", "n_windows", "steep_window", "t_steep",
                    "steep_fallback", "t_inhib", "steep_network", "inhib_network", "target_edges",
                    "dropped_long_reshares", "status"]
CENSUS_HEADER = ["cascade_id", "network_index", "pattern_id", "edge_count", "count"]
TRANSITIONS_HEADER = ["cascade_id", "pair_index", "pattern4", "pattern5", "count"]
SIGNIFICANCE_HEADER = ["cascade_id", "network_index", "pattern_id", "input_count", "mean", "std", "z", "p",
                       "significant"]
CENTRALITY_HEADER = ["cascade_id", "network_index", "measure", "value"]


def _needed_offsets(cfg: RunConfig) -> set[int]:
    return {o for st in cfg.prediction.st for o in (st, st + 1)}


def analyze_cascade(cascade: Cascade, ctype: str, diffusion: DiffusionNetwork, cfg: RunConfig,
                    thresholds) -> CascadeResult:
    cid = cascade.id
    res = CascadeResult(cid, "ok")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            windows = partition_subsequences(cascade, cfg.windows.W)
        except WindowingError:
            res.status = "too_small"
            res.lifecycle = [cid, ctype, cascade.size, 0, "", "", "", "", "", "", "", "", res.status]
            return res
        sp = steep_point(cascade, windows, cfg.lifecycle.hawkes(), diffusion)
        t_inhib = detect_inhibition(cascade, sp.time, thresholds)
        dropped = count_long_reshares(cascade, windows)
        if t_inhib is None:
            res.status = "no_inhibition"
            res.lifecycle = [cid, ctype, cascade.size, len(windows), sp.window, sp.time, sp.fallback, "", "",
                             "", "", dropped, res.status]
            return res
        idx = locate_lifecycle_networks(windows, sp.time, t_inhib)
        steep, inhib = idx.steep_window, idx.inhib_window
        hist = cfg.windows.history
        nets = sorted(set(range(max(2, inhib - hist), inhib + 1)) | set(range(max(2, steep - hist), steep + 1)))
        networks = {i: build_temporal_network(windows, i, diffusion, cid) for i in nets}
        target = networks[inhib].n_edges
        res.lifecycle = [cid, ctype, cascade.size, len(windows), sp.window, sp.time, sp.fallback, t_inhib,
                         steep, inhib, target, dropped, res.status]
        sizes = sorted(cfg.motifs.sizes)
        with_transitions = 4 in sizes and 5 in sizes
        census: dict[tuple[int, int], Any] = {}
        for i in nets:
            for k in sizes:
                keep = with_transitions and k in (4, 5)
                c = motif_census(networks[i], k, count_only=not keep, network_index=i)
                census[(i, k)] = c
                for p, n in c.dense_counts().items():
                    res.census.append([cid, i, p, p.n_edges, n])
            # instances are only needed one step ahead
            census.pop((i - 1, 5), None)
            if (i - 1, 4) in census and (i, 5) in census and with_transitions:
                tm = count_transitions(census[(i - 1, 4)], census[(i, 5)], cfg.transition_thresholds(),
                                       cfg.transitions.induced)
                for (p4, p5), n in sorted(tm.counts.items(), key=lambda kv: (kv[0][0].sort_key(),
                                                                             kv[0][1].sort_key())):
                    res.transitions.append([cid, i, p4, p5, n])
            census.pop((i - 1, 4), None)
        sig = cfg.significance
        if sig.ensemble_size:
            for off in sorted(set(sig.offsets)):
                i = inhib - off
                if i not in networks:
                    continue
                seed = _cascade_seed(cfg.run.seed, f"{cid}#{i}")
                ens = build_ensemble(networks[i], sig.ensemble_size, sig.switches_per_edge, sizes,
                                     int(seed.generate_state(1)[0]))
                for k in sizes:
                    inp = motif_census(networks[i], k, count_only=True, network_index=i)
                    for s in zscore_report(inp, ens, sig.ddof).scores:
                        res.significance.append([cid, i, s.pattern, s.input_count, s.mean, s.std, s.z, s.p,
                                                 s.significant])
        if cfg.prediction.centrality:
            for off in sorted(_needed_offsets(cfg)):
                i = inhib - off
                if i in networks:
                    vals = centrality_values(networks[i].to_graph())
                    for m in CENTRALITY_MEASURES:
                        res.centrality.append([cid, i, m, vals[m]])
    res.warnings = len(caught)
    return res


def _analyze_one(args) -> CascadeResult:
    cascade, ctype, diffusion, cfg, thresholds = args
    try:
        return analyze_cascade(cascade, ctype, diffusion, cfg, thresholds)
    except CascadeMotifsError as exc:
        log.error("cascade %s failed: %s", cascade.id, exc)
        res = CascadeResult(cascade.id, "error")
        res.lifecycle = [cascade.id, ctype, cascade.size, "", "", "", "", "", "", "", "", "", f"error: {exc}"]
        return res


def _sub_diffusion(cascade: Cascade, diffusion: DiffusionNetwork) -> DiffusionNetwork:
    """Historical edges touching the cascade's participants (what a worker needs)."""
    members = set(cascade.participants)
    sub = DiffusionNetwork()
    for u in members:
        for v in diffusion.neighbors(u):
            sub.add_edge(u, v)
    return sub


def _quartiles(values: Sequence[float]) -> tuple[float, float, float]:
    q1, med, q3 = np.percentile(np.asarray(values, dtype=float), [25, 50, 75])
    return float(med), float(q1), float(q3)


def aggregate(results: Sequence[CascadeResult]) -> dict[str, list[list[Any]]]:
    """Per-offset medians and quartiles across cascades, for box plots."""
    refs = {}
    for r in results:
        if r.status == "ok":
            refs[r.cascade_id] = {"inhib": int(r.lifecycle[9]), "steep": int(r.lifecycle[8])}
    census_groups: dict[tuple, list[float]] = defaultdict(list)
    trans_groups: dict[tuple, list[float]] = defaultdict(list)
    z_groups: dict[tuple, list[float]] = defaultdict(list)
    for r in results:
        if r.cascade_id not in refs:
            continue
        ref = refs[r.cascade_id]
        for _, i, p, _, n in r.census:
            for name in ("inhib", "steep"):
                off = ref[name] - i
                if off >= 0:
                    census_groups[(name, off, p.sort_key(), str(p))].append(n)
        for _, i, p4, p5, n in r.transitions:
            off = ref["inhib"] - i
            if off >= 0:
                trans_groups[(off, p4.sort_key(), p5.sort_key(), str(p4), str(p5))].append(n)
        for _, i, p, _, _, _, z, *_ in r.significance:
            z_groups[(ref["inhib"] - i, p.sort_key(), str(p))].append(z)
    out = {"census": [], "transitions": [], "zscores": []}
    for key in sorted(census_groups):
        name, off, _, pid = key
        vals = census_groups[key]
        out["census"].append([name, off, pid, len(vals), *_quartiles(vals)])
    for key in sorted(trans_groups):
        off, _, _, p4, p5 = key
        vals = trans_groups[key]
        out["transitions"].append([off, p4, p5, len(vals), *_quartiles(vals)])
    for key in sorted(z_groups):
        off, _, pid = key
        vals = z_groups[key]
        out["zscores"].append([off, pid, len(vals), *_quartiles(vals)])
    return out


def cmd_analyze(cfg: RunConfig) -> tuple[RunManifest, int]:
    """Lifecycle points, censuses, transitions, z-scores and centralities per cascade.

    Returns the manifest and the exit status (1 when failures exceed the tolerance).
    """
    cfg.validate()
    corpus = load_corpus(Path(cfg.run.out) / "ingest" / CORPUS_FILE)
    out = _out(cfg, "analysis")
    man = RunManifest("analyze", cfg.to_dict())
    thresholds = cfg.lifecycle.thresholds()
    if cfg.lifecycle.labels:
        with man.stage("calibrate"):
            thresholds, n = calibrated_thresholds(cfg, corpus)
        man.extra["calibrated"] = {"dtg": thresholds.dtg, "g": thresholds.g, "n_cases": n}
    wanted = set(cfg.data.types)
    chosen = [c for c in sorted(corpus.cascades, key=lambda c: c.id) if corpus.types.get(c.id, "") in wanted]
    jobs = [(c, corpus.types.get(c.id, ""), _sub_diffusion(c, corpus.diffusion), cfg, thresholds) for c in chosen]
    with man.stage("per_cascade"):
        if cfg.run.threads > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=cfg.run.threads) as pool:
                results = list(pool.map(_analyze_one, jobs, chunksize=max(1, len(jobs) // (4 * cfg.run.threads))))
        else:
            results = [_analyze_one(j) for j in jobs]
    results.sort(key=lambda r: r.cascade_id)
    with man.stage("write"):
        _write_rows(out / "lifecycle.csv", LIFECYCLE_HEADER, (r.lifecycle for r in results))
        _write_rows(out / "census.csv", CENSUS_HEADER, (row for r in results for row in r.census))
        _write_rows(out / "transitions.csv", TRANSITIONS_HEADER, (row for r in results for row in r.transitions))
        _write_rows(out / "centrality.csv", CENTRALITY_HEADER, (row for r in results for row in r.centrality))
        outputs = ["lifecycle.csv", "census.csv", "transitions.csv", "centrality.csv"]
        if cfg.significance.ensemble_size:
            _write_rows(out / "significance.csv", SIGNIFICANCE_HEADER,
                        (row for r in results for row in r.significance))
            outputs.append("significance.csv")
        agg = aggregate(results)
        _write_rows(out / "aggregate_census.csv", ["reference", "offset", "pattern_id", "n", "median", "q1", "q3"],
                    agg["census"])
        _write_rows(out / "aggregate_transitions.csv",
                    ["offset", "pattern4", "pattern5", "n", "median", "q1", "q3"], agg["transitions"])
        outputs += ["aggregate_census.csv", "aggregate_transitions.csv"]
        if cfg.significance.ensemble_size:
            _write_rows(out / "aggregate_zscores.csv", ["offset", "pattern_id", "n", "median", "q1", "q3"],
                        agg["zscores"])
            outputs.append("aggregate_zscores.csv")
    statuses = defaultdict(int)
    for r in results:
        statuses[r.status] += 1
    man.counts = {"cascades": len(results), "skipped_type": len(corpus.cascades) - len(chosen), **statuses}
    man.warnings = {"total": sum(r.warnings for r in results)}
    man.extra["lifecycle_file"] = "lifecycle.csv"
    man.outputs = outputs
    man.write(out)
    failed = statuses.get("error", 0)
    code = 1 if results and failed / len(results) > cfg.run.max_failure_fraction else 0
    return man, code


# --------------------------------------------------------------------------
# predict


def load_analysis(analysis_dir: Path) -> list[CascadeFeatures]:
    life = _read_rows(analysis_dir / "lifecycle.csv")
    corpus: dict[str, CascadeFeatures] = {}
    for r in life:
        if r["status"] == "ok":
            corpus[r["cascade_id"]] = CascadeFeatures(r["cascade_id"], int(r["inhib_network"]),
                                                      target=float(r["target_edges"]))
    for r in _read_rows(analysis_dir / "census.csv"):
        cf = corpus.get(r["cascade_id"])
        if cf is not None:
            cf.mc.setdefault(int(r["network_index"]), {})[PatternId.parse(r["pattern_id"])] = int(r["count"])
    for r in _read_rows(analysis_dir / "transitions.csv"):
        cf = corpus.get(r["cascade_id"])
        if cf is not None:
            col = cf.mt.setdefault(int(r["pair_index"]), {})
            p5 = PatternId.parse(r["pattern5"])
            col[p5] = col.get(p5, 0) + int(r["count"])
    cpath = analysis_dir / "centrality.csv"
    if cpath.is_file():
        for r in _read_rows(cpath):
            cf = corpus.get(r["cascade_id"])
            if cf is not None:
                cf.centrality.setdefault(int(r["network_index"]), {})[r["measure"]] = float(r["value"])
    # transitions are only defined where both networks of a pair were censused
    for cf in corpus.values():
        for i in cf.mc:
            if i - 1 in cf.mc:
                cf.mt.setdefault(i, {})
    return [corpus[k] for k in sorted(corpus)]


@dataclass(frozen=True)
class ModelSpec:
    name: str
    group: str     # individual | combination | centrality | baseline
    kind: str      # MC | MT | All | centrality | none
    patterns: tuple[PatternId, ...] = ()


def model_specs(cfg: RunConfig) -> list[ModelSpec]:
    specs = [ModelSpec("intercept", "baseline", "none")]
    for p in cfg.individual_patterns():
        kinds = ("MC", "MT", "All") if p.k == 5 else ("MC",)
        for kind in kinds:
            specs.append(ModelSpec(str(p), "individual", kind, (p,)))
    specs.append(ModelSpec("acyclic", "combination", "All", tuple(cfg.combo("acyclic"))))
    specs.append(ModelSpec("loop", "combination", "All", tuple(cfg.combo("loop"))))
    if cfg.prediction.centrality:
        specs.append(ModelSpec("centrality", "centrality", "centrality"))
    return specs


def feature_matrix(spec: ModelSpec, corpus: Sequence[CascadeFeatures], st: int) -> FeatureMatrix:
    ids = [cf.cascade_id for cf in corpus]
    if spec.kind == "none":
        return FeatureMatrix([], np.zeros((len(corpus), 0)), ids)
    if spec.kind == "centrality":
        return centrality_feature_matrix(corpus, st)
    kinds = ("MC", "MT") if spec.kind == "All" else (spec.kind,)
    return motif_feature_matrix(corpus, list(spec.patterns), st, kinds)


def cmd_predict(cfg: RunConfig) -> RunManifest:
    """Cross-validated MAE for every model family and interval start."""
    cfg.validate()
    analysis = Path(cfg.run.out) / "analysis"
    out = _out(cfg, "predict")
    man = RunManifest("predict", cfg.to_dict())
    with man.stage("load"):
        corpus = load_analysis(analysis)
    if len(corpus) < cfg.prediction.folds:
        raise EvaluationError(f"{len(corpus)} analysed cascades cannot fill {cfg.prediction.folds} folds")
    y = corpus_targets(corpus)
    pred = cfg.prediction
    rows = []
    with man.stage("cross_validate"), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for st in sorted(pred.st):
            for spec in model_specs(cfg):
                fm = feature_matrix(spec, corpus, st)
                rep = cross_validate(fm, y, pred.folds, cfg.run.seed, pred.eta_grid, pred.penalty, pred.polynomial)
                rows.append({"model": spec.name, "group": spec.group, "kind": spec.kind, "st": st,
                             "patterns": [str(p) for p in spec.patterns],
                             "observed_rows": int((~np.isnan(fm.values).all(axis=1)).sum()) if fm.shape[1] else 0,
                             **rep.to_dict()})
    report = {"n_cascades": len(corpus), "penalty": pred.penalty, "folds": pred.folds,
              "eta_grid": list(pred.eta_grid), "polynomial": pred.polynomial,
              "target_mean": float(y.mean()), "models": rows}
    _write_json(out / "report.json", report)
    man.counts = {"cascades": len(corpus), "models": len(rows)}
    man.outputs = ["report.json"]
    man.write(out)
    return man


# --------------------------------------------------------------------------
# report


def best_individual(report: dict, st: int, kind: str = "MC") -> list[dict]:
    rows = [r for r in report["models"] if r["group"] == "individual" and r["st"] == st and r["kind"] == kind]
    return sorted(rows, key=lambda r: (r["mae"], r["model"]))


def render_report(cfg: RunConfig, emit: Callable[[str], None] = print) -> None:
    base = Path(cfg.run.out)
    life_path = base / "analysis" / "lifecycle.csv"
    if life_path.is_file():
        life = _read_rows(life_path)
        statuses = defaultdict(int)
        for r in life:
            statuses[r["status"].split(":")[0]] += 1
        emit("cascades analysed: " + ", ".join(f"{k}={v}" for k, v in sorted(statuses.items())))
    rep_path = base / "predict" / "report.json"
    if not rep_path.is_file():
        if not life_path.is_file():
            raise InputError(f"nothing to report under {base}")
        return
    report = _read_json(rep_path)
    emit(f"{'model':<16}{'group':<13}{'kind':<11}{'st':>3}{'mae':>10}{'r2':>8}{'eta':>7}")
    for r in sorted(report["models"], key=lambda r: (r["st"], r["mae"], r["model"], r["kind"])):
        emit(f"{r['model']:<16}{r['group']:<13}{r['kind']:<11}{r['st']:>3}{r['mae']:>10.3f}{r['r2']:>8.3f}"
             f"{r['eta']:>7.2f}")
