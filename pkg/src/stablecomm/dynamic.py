"""Multi-scale detection of stable communities over a link stream.

Coarse-to-fine window ladder; per window: aggregate, symmetrize, Louvain,
then filter by inverse conductance.  Surviving communities are chained across
consecutive windows by Jaccard distance, kept when the chain persists long
enough, and finer-scale duplicates of coarser results are dropped.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ValidationError
from .louvain import QualityConfig, inverse_conductance, louvain
from .stream import LinkStream, aggregate_window, symmetrize

COMMUNITIES_HEADER = ["community_id", "tract", "t_start", "t_end", "scale", "quality"]

_MASK = 0xFFFFFFFFFFFFFFFF


def fanout_seed(seed: int, name: str) -> int:
    """Derive an independent sub-seed from a global seed and a label."""
    import hashlib

    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big") & _MASK


def jaccard_distance(a: Iterable, b: Iterable) -> float:
    """1 - |a & b| / |a | b| over node sets."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        raise ValidationError("jaccard distance of two empty sets is undefined")
    return 1.0 - len(sa & sb) / len(sa | sb)


@dataclass(frozen=True)
class WindowSupport:
    """One window's evidence for a temporal community."""

    t_start: int
    t_end: int
    members: frozenset[str]
    quality: float


@dataclass(frozen=True)
class TemporalCommunity:
    """A stable node set with its time span, detection scale, and quality.

    ``members`` is the intersection of the per-window node sets; ``quality``
    is the minimum inverse conductance across the supporting windows.
    """

    members: frozenset[str]
    t_start: int
    t_end: int
    scale: int
    quality: float
    support: tuple[WindowSupport, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.members:
            raise ValidationError("temporal community must have members")
        if self.t_start > self.t_end:
            raise ValidationError("t_start must be <= t_end")
        if not 0.0 <= self.quality <= 1.0:
            raise ValidationError("quality must be in [0, 1]")

    @property
    def size(self) -> int:
        return len(self.members)

    def overlaps(self, other: "TemporalCommunity") -> bool:
        return not (self.t_end < other.t_start or other.t_end < self.t_start)


@dataclass(frozen=True)
class DetectionConfig:
    """Thresholds and scale ladder for stable-community detection."""

    quality_threshold: float = 0.8
    similarity_threshold: float = 0.2
    persistence_steps: int = 3
    scales: tuple[int, ...] | None = None
    rng_seed: int = 0
    resolution: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.quality_threshold <= 1.0:
            raise ValidationError("quality_threshold must be in [0, 1]")
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValidationError("similarity_threshold must be in [0, 1]")
        if self.persistence_steps < 1:
            raise ValidationError("persistence_steps must be >= 1")
        if self.scales is not None:
            scales = tuple(self.scales)
            if not scales or any(s < 1 for s in scales):
                raise ValidationError("scales must be positive window lengths")
            if any(a <= b for a, b in zip(scales, scales[1:])):
                raise ValidationError("scales must be strictly descending")
            object.__setattr__(self, "scales", scales)


def default_scales(n_days: int) -> tuple[int, ...]:
    """Largest power of two <= n_days, halving down to 1 day."""
    if n_days < 1:
        raise ValidationError("stream must span at least one day")
    top = 1
    while top * 2 <= n_days:
        top *= 2
    scales = []
    g = top
    while g >= 1:
        scales.append(g)
        g //= 2
    return tuple(scales)


def _windows(t_min: int, t_max: int, scale: int) -> list[tuple[int, int]]:
    """Non-overlapping tiling of [t_min, t_max]; last window may be truncated."""
    out = []
    a = t_min
    while a <= t_max:
        out.append((a, min(a + scale - 1, t_max)))
        a += scale
    return out


def _window_communities(
    stream: LinkStream, window: tuple[int, int], cfg: DetectionConfig, scale: int
) -> list[tuple[int, frozenset[str], float]]:
    """(label, members, inverse conductance) per quality-passing community."""
    a, b = window
    snapshot = aggregate_window(stream, a, b)
    if not snapshot.adjacency:
        return []
    und = symmetrize(snapshot)
    seed = fanout_seed(cfg.rng_seed, f"scale={scale}:window={a}")
    partition = louvain(und, QualityConfig(resolution=cfg.resolution, rng_seed=seed))
    out = []
    for label, members in enumerate(partition.communities()):
        q = inverse_conductance(und, members)
        if q >= cfg.quality_threshold:
            out.append((label, frozenset(members), q))
    return out


def _chain_scale(
    windows: Sequence[tuple[int, int]],
    per_window: Sequence[list[tuple[int, frozenset[str], float]]],
    cfg: DetectionConfig,
    scale: int,
) -> list[TemporalCommunity]:
    """Chain matched communities across consecutive windows of one scale."""
    finished: list[list[WindowSupport]] = []
    active: list[list[WindowSupport]] = []
    for win, comms in zip(windows, per_window):
        supports = [WindowSupport(win[0], win[1], m, q) for _, m, q in comms]
        labels = [label for label, _, _ in comms]
        # Best-match chains to this window's communities; each side matched
        # at most once, ties by (distance, chain index, community label).
        candidates = []
        for ci, chain in enumerate(active):
            prev = chain[-1].members
            for ki, sup in enumerate(supports):
                d = jaccard_distance(prev, sup.members)
                if d <= cfg.similarity_threshold:
                    candidates.append((d, ci, labels[ki], ki))
        candidates.sort()
        used_chains: set[int] = set()
        used_comms: set[int] = set()
        extended: list[list[WindowSupport]] = []
        for d, ci, _, ki in candidates:
            if ci in used_chains or ki in used_comms:
                continue
            used_chains.add(ci)
            used_comms.add(ki)
            active[ci].append(supports[ki])
            extended.append(active[ci])
        finished.extend(chain for ci, chain in enumerate(active) if ci not in used_chains)
        new_chains = [[supports[ki]] for ki in range(len(supports)) if ki not in used_comms]
        active = extended + new_chains
    finished.extend(active)

    out = []
    for chain in finished:
        if len(chain) < cfg.persistence_steps:
            continue
        members = frozenset.intersection(*(s.members for s in chain))
        if not members:
            continue
        out.append(
            TemporalCommunity(
                members=members,
                t_start=chain[0].t_start,
                t_end=chain[-1].t_end,
                scale=scale,
                quality=min(s.quality for s in chain),
                support=tuple(chain),
            )
        )
    return out


def _sort_key(c: TemporalCommunity):
    return (c.t_start, -c.size, tuple(sorted(c.members)), -c.scale)


def detect(
    stream: LinkStream, cfg: DetectionConfig = DetectionConfig(), threads: int = 1
) -> list[TemporalCommunity]:
    """Detect stable communities at multiple temporal scales.

    Scales are searched coarse to fine; a finer-scale community is dropped as
    redundant when it has Jaccard distance <= the similarity threshold to an
    already-retained coarser community with an overlapping time span.
    Output is sorted by (t_start, descending size).
    """
    if stream.n_days < cfg.persistence_steps:
        raise ValidationError(
            f"stream spans {stream.n_days} days, fewer than "
            f"persistence_steps={cfg.persistence_steps}"
        )
    scales = cfg.scales or default_scales(stream.n_days)

    retained: list[TemporalCommunity] = []
    for scale in scales:
        windows = _windows(stream.t_min, stream.t_max, scale)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                per_window = list(
                    pool.map(lambda w: _window_communities(stream, w, cfg, scale), windows)
                )
        else:
            per_window = [_window_communities(stream, w, cfg, scale) for w in windows]
        candidates = sorted(_chain_scale(windows, per_window, cfg, scale), key=_sort_key)
        for cand in candidates:
            redundant = any(
                cand.overlaps(kept)
                and jaccard_distance(cand.members, kept.members) <= cfg.similarity_threshold
                for kept in retained
                if kept.scale > cand.scale
            )
            if not redundant:
                retained.append(cand)
    return sorted(retained, key=_sort_key)


def major_communities(
    communities: Iterable[TemporalCommunity],
    min_size: int = 10,
    required_span: tuple[int, int] | None = None,
) -> list[TemporalCommunity]:
    """Keep communities with more than ``min_size`` members (strict) whose
    span fully covers ``required_span``."""
    out = []
    for c in communities:
        if c.size <= min_size:
            continue
        if required_span is not None:
            a, b = required_span
            if not (c.t_start <= a and c.t_end >= b):
                continue
        out.append(c)
    return out


def write_communities_csv(communities: Sequence[TemporalCommunity], path: str | Path) -> None:
    """Write the ``communities.csv`` interface: one row per (community, member)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMMUNITIES_HEADER)
        for cid, c in enumerate(communities):
            for tract in sorted(c.members):
                writer.writerow([cid, tract, c.t_start, c.t_end, c.scale, repr(c.quality)])
