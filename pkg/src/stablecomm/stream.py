"""Temporal weighted directed mobility networks and window aggregation.

Day is the base temporal granularity: dates must be plain ISO-8601 dates and
are mapped to 0-based day indices from the earliest date in the dataset.
Windows are closed intervals of day indices.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ValidationError
from .graph import UndirectedGraph

EDGES_HEADER = ["date", "origin", "dest", "visits"]


@dataclass(frozen=True)
class TemporalEdge:
    """One day's aggregated visit count from origin to dest."""

    t: int
    origin: str
    dest: str
    weight: float


@dataclass(frozen=True)
class LinkStream:
    """Time-stamped weighted directed edges among spatial units.

    Immutable after construction; safe to share across workers.
    """

    edges: tuple[TemporalEdge, ...]
    node_universe: frozenset[str]
    t_min: int
    t_max: int
    start_date: dt.date

    def __post_init__(self):
        for e in self.edges:
            if e.origin not in self.node_universe or e.dest not in self.node_universe:
                raise ValidationError(f"edge endpoint outside node universe: {e}")
            if not self.t_min <= e.t <= self.t_max:
                raise ValidationError(f"edge day {e.t} outside [{self.t_min}, {self.t_max}]")

    @property
    def n_days(self) -> int:
        return self.t_max - self.t_min + 1

    def date_of(self, t: int) -> dt.date:
        return self.start_date + dt.timedelta(days=t)


@dataclass(frozen=True)
class SnapshotGraph:
    """Directed weighted graph aggregated over a closed day-index window."""

    nodes: frozenset[str]
    adjacency: Mapping[tuple[str, str], float]
    window: tuple[int, int]

    def weight(self, origin: str, dest: str) -> float:
        return self.adjacency.get((origin, dest), 0.0)

    @property
    def total_weight(self) -> float:
        return sum(self.adjacency.values())


def _parse_date(text: str, row_num: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise ValidationError(
            f"row {row_num}: date {text!r} is not a plain ISO-8601 date "
            "(day is the base granularity)"
        ) from None


def ingest_edges(rows: Iterable[tuple[str, str, str, object]]) -> LinkStream:
    """Build a LinkStream from (date, origin, dest, visits) records.

    Day indices are assigned relative to the earliest date seen; duplicate
    (day, origin, dest) rows have their weights summed.  Row numbers in error
    messages are 1-based over the record sequence.
    """
    dated: list[tuple[dt.date, str, str, float]] = []
    for row_num, row in enumerate(rows, start=1):
        try:
            date_s, origin, dest, visits = row
        except (TypeError, ValueError):
            raise ValidationError(f"row {row_num}: expected 4 fields, got {row!r}") from None
        date = _parse_date(str(date_s), row_num)
        origin = str(origin).strip()
        dest = str(dest).strip()
        if not origin or not dest:
            raise ValidationError(f"row {row_num}: empty tract id")
        try:
            w = float(visits)
        except (TypeError, ValueError):
            raise ValidationError(f"row {row_num}: visits {visits!r} is not a number") from None
        if not w > 0:
            raise ValidationError(f"row {row_num}: visits must be positive, got {w}")
        dated.append((date, origin, dest, w))
    if not dated:
        raise ValidationError("no edge records in input")

    start = min(d for d, *_ in dated)
    merged: dict[tuple[int, str, str], float] = {}
    for date, origin, dest, w in dated:
        key = ((date - start).days, origin, dest)
        merged[key] = merged.get(key, 0.0) + w
    edges = tuple(
        TemporalEdge(t, origin, dest, w)
        for (t, origin, dest), w in sorted(merged.items())
    )
    universe = frozenset(e.origin for e in edges) | frozenset(e.dest for e in edges)
    return LinkStream(
        edges=edges,
        node_universe=universe,
        t_min=0,
        t_max=max(e.t for e in edges),
        start_date=start,
    )


def read_edges_csv(path: str | Path) -> LinkStream:
    """Read the ``edges.csv`` interface format (header required)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != EDGES_HEADER:
            raise ValidationError(
                f"{path}: expected header {','.join(EDGES_HEADER)!r}, got {header!r}"
            )
        return ingest_edges(tuple(row) for row in reader)


def write_edges_csv(stream: LinkStream, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EDGES_HEADER)
        for e in stream.edges:
            w = int(e.weight) if float(e.weight).is_integer() else repr(e.weight)
            writer.writerow([stream.date_of(e.t).isoformat(), e.origin, e.dest, w])


def aggregate_window(stream: LinkStream, a: int, b: int) -> SnapshotGraph:
    """Sum edge weights over the closed day-index window [a, b].

    Nodes with no incident edge in the window are excluded from the snapshot.
    """
    if a > b:
        raise ValidationError(f"inverted window [{a}, {b}]")
    if a < stream.t_min or b > stream.t_max:
        raise ValidationError(
            f"window [{a}, {b}] outside stream range [{stream.t_min}, {stream.t_max}]"
        )
    adjacency: dict[tuple[str, str], float] = {}
    for e in stream.edges:
        if a <= e.t <= b:
            key = (e.origin, e.dest)
            adjacency[key] = adjacency.get(key, 0.0) + e.weight
    nodes = frozenset(u for pair in adjacency for u in pair)
    return SnapshotGraph(nodes=nodes, adjacency=adjacency, window=(a, b))


def symmetrize(g: SnapshotGraph) -> UndirectedGraph:
    """Undirected weight(i, j) = w(i, j) + w(j, i); self-loops kept as-is."""
    merged: dict[tuple[str, str], float] = {}
    for (o, d), w in g.adjacency.items():
        key = (o, d) if o <= d else (d, o)
        merged[key] = merged.get(key, 0.0) + w
    return UndirectedGraph((u, v, w) for (u, v), w in merged.items())
