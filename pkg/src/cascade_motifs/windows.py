"""Fixed-participant windows and the overlapping temporal networks built on them.

Windows are 1-based: window ``i`` holds the ``i``-th block of ``W`` participants
in first-appearance order. Temporal network ``N_i`` (``2 <= i <= Q``) joins
windows ``i-1`` and ``i``, so the first network containing window ``w`` is
``N_max(w, 2)``.
"""
from __future__ import annotations

import bisect
import csv
import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import networkx as nx

from .errors import LifecycleError, WindowingError
from .model import Cascade, DiffusionNetwork, ReshareEvent

CASCADE = "cascade"
HISTORICAL = "historical"


def edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Subsequence:
    index: int
    node_set: tuple[str, ...]
    event_slice: tuple[ReshareEvent, ...]
    time_span: tuple[float, float]

    @cached_property
    def members(self) -> frozenset[str]:
        return frozenset(self.node_set)


def partition_subsequences(cascade: Cascade, W: int = 40) -> list[Subsequence]:
    """Split participants into consecutive blocks of exactly ``W``; a short tail is dropped."""
    if W < 2:
        raise WindowingError("window size must be at least 2")
    if cascade.size < 2 * W:
        raise WindowingError(f"cascade {cascade.id!r} has {cascade.size} participants, need {2 * W}")
    first = cascade.first_appearance()
    Q = cascade.size // W
    windows = []
    owner: dict[str, int] = {}
    for q in range(Q):
        nodes = cascade.participants[q * W:(q + 1) * W]
        for v in nodes:
            owner[v] = q
        windows.append(nodes)
    slices: list[list[ReshareEvent]] = [[] for _ in range(Q)]
    for e in cascade.events:
        q = owner.get(e.target)
        if q is not None:
            slices[q].append(e)
    return [
        Subsequence(index=q + 1, node_set=nodes, event_slice=tuple(slices[q]),
                    time_span=(first[nodes[0]], first[nodes[-1]]))
        for q, nodes in enumerate(windows)
    ]


def _historical_between(a: Iterable[str], b: frozenset[str], diffusion: DiffusionNetwork) -> set[tuple[str, str]]:
    out = set()
    for u in a:
        for v in diffusion.neighbors(u):
            if v in b and v != u:
                out.add(edge_key(u, v))
    return out


def build_window_network(cascade: Cascade | None, subseq: Subsequence,
                         diffusion: DiffusionNetwork) -> dict[tuple[str, str], str]:
    """Edges of one window: in-window reshares plus historical edges among its nodes.

    Both endpoints must lie in the window. Window node sets are disjoint, so the
    edge sets of different windows are disjoint too.
    """
    members = subseq.members
    tags: dict[tuple[str, str], str] = {}
    for e in subseq.event_slice:
        if e.source in members:
            tags[edge_key(e.source, e.target)] = CASCADE
    for key in sorted(_historical_between(subseq.node_set, members, diffusion)):
        tags.setdefault(key, HISTORICAL)
    return tags


@dataclass
class TemporalNetwork:
    index: int
    cascade_id: str
    nodes: tuple[str, ...]
    edge_tags: dict[tuple[str, str], str]
    window_ids: tuple[int, int] = (0, 0)

    @property
    def edges(self) -> list[tuple[str, str]]:
        return list(self.edge_tags)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edge_tags)

    def tagged(self, tag: str) -> list[tuple[str, str]]:
        return [e for e, t in self.edge_tags.items() if t == tag]

    def to_graph(self, tag: str | None = None) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges if tag is None else self.tagged(tag))
        return g


def build_temporal_network(windows: Sequence[Subsequence], i: int,
                           diffusion: DiffusionNetwork, cascade_id: str = "") -> TemporalNetwork:
    """``N_i``: windows ``i-1`` and ``i`` with their edges plus edges crossing between them."""
    Q = len(windows)
    if not 2 <= i <= Q:
        raise WindowingError(f"network index {i} outside [2, {Q}]")
    prev, curr = windows[i - 2], windows[i - 1]
    tags: dict[tuple[str, str], str] = {}
    for w in (prev, curr):
        tags.update(build_window_network(None, w, diffusion))
    # cross-window reshares can sit in either slice (repeat reshares by earlier users)
    for a, b in ((prev, curr), (curr, prev)):
        for e in b.event_slice:
            if e.source in a.members:
                tags[edge_key(e.source, e.target)] = CASCADE
    small, large = (prev, curr) if len(prev.node_set) <= len(curr.node_set) else (curr, prev)
    for key in sorted(_historical_between(small.node_set, large.members, diffusion)):
        tags.setdefault(key, HISTORICAL)
    return TemporalNetwork(index=i, cascade_id=cascade_id, nodes=prev.node_set + curr.node_set,
                           edge_tags=tags, window_ids=(prev.index, curr.index))


def build_all_networks(windows: Sequence[Subsequence], diffusion: DiffusionNetwork,
                       cascade_id: str = "", indices: Iterable[int] | None = None) -> dict[int, TemporalNetwork]:
    idx = range(2, len(windows) + 1) if indices is None else indices
    return {i: build_temporal_network(windows, i, diffusion, cascade_id) for i in idx}


def count_long_reshares(cascade: Cascade, windows: Sequence[Subsequence]) -> int:
    """Reshare edges whose endpoints are two or more windows apart (or outside all windows).

    These never appear in any temporal network.
    """
    owner = {v: w.index for w in windows for v in w.node_set}
    dropped = 0
    for e in cascade.events:
        a, b = owner.get(e.source), owner.get(e.target)
        if a is None or b is None or abs(a - b) >= 2:
            dropped += 1
    return dropped


# --------------------------------------------------------------------------
# locating lifecycle points


def window_of_time(windows: Sequence[Subsequence], t: float, clamp: bool = False) -> int:
    """1-based window whose span covers ``t``.

    Window 1 covers ``[start_1, end_1]`` and window ``i`` covers
    ``(end_{i-1}, end_i]``, so gaps between windows belong to the later window
    and a tie on a boundary goes to the earlier one.
    """
    ends = [w.time_span[1] for w in windows]
    if t < windows[0].time_span[0]:
        if clamp:
            return 1
        raise LifecycleError(f"time {t} precedes the first window")
    pos = bisect.bisect_left(ends, t)
    if pos == len(ends):
        if clamp:
            return len(ends)
        raise LifecycleError(f"time {t} is after the last retained window")
    return pos + 1


def network_for_window(window: int) -> int:
    return max(window, 2)


@dataclass(frozen=True)
class LifecycleIndices:
    steep_window: int
    inhib_window: int
    steep_subsequence: int = field(default=0)
    inhib_subsequence: int = field(default=0)

    def __post_init__(self):
        if self.steep_window > self.inhib_window:
            raise LifecycleError("steep network after inhibition network")


def locate_lifecycle_networks(windows: Sequence[Subsequence], t_steep: float, t_inhib: float) -> LifecycleIndices:
    """First temporal networks containing the windows of ``t_steep`` and ``t_inhib``."""
    if t_steep > t_inhib:
        raise LifecycleError("t_steep must not exceed t_inhib")
    ws = window_of_time(windows, t_steep)
    wi = window_of_time(windows, t_inhib)
    return LifecycleIndices(network_for_window(ws), network_for_window(wi), ws, wi)


# --------------------------------------------------------------------------
# dump


def dump_networks(networks: dict[int, TemporalNetwork], windows: Sequence[Subsequence], out_dir: str | Path,
                  lifecycle: LifecycleIndices | None = None, dropped_long_reshares: int = 0) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, net in sorted(networks.items()):
        with open(out / f"N{i}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "v", "tag"])
            for (u, v), tag in net.edge_tags.items():
                w.writerow([u, v, tag])
    manifest = {
        "windows": [{"index": w.index, "start": w.time_span[0], "end": w.time_span[1],
                     "n_nodes": len(w.node_set)} for w in windows],
        "lifecycle": None if lifecycle is None else {
            "steep_network": lifecycle.steep_window, "inhib_network": lifecycle.inhib_window,
            "steep_subsequence": lifecycle.steep_subsequence, "inhib_subsequence": lifecycle.inhib_subsequence},
        "dropped_long_reshares": dropped_long_reshares,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
