"""Activity density, percent change against a baseline, and impact classes.

Per-tract density is the root-mean-square of the tract's grid-unit activity
indices; the unit count N is the number of units ever registered for the
tract, and a unit with no reading on a day contributes zero (a dark device is
the outage signal).
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError

ACTIVITY_HEADER = ["tract", "unit", "date", "activity_index"]
IMPACT_HEADER = ["tract", "baseline_density", "min_pct_change", "class"]


class ImpactClass(enum.Enum):
    HIGH = "high"
    MODERATE = "moderate"
    LOW = "low"


@dataclass(frozen=True)
class ImpactThresholds:
    """Percent-change cutoffs for the high/moderate/low classes."""

    high_cutoff: float = -100.0
    low_cutoff: float = -75.0
    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.high_cutoff < self.low_cutoff <= 0:
            raise ValidationError("need high_cutoff < low_cutoff <= 0")
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be positive")


class ActivityData:
    """Per-(tract, unit, day) activity indices with day-0 at the earliest date."""

    def __init__(
        self,
        readings: Mapping[tuple[str, str, int], float],
        start_date: dt.date,
    ):
        self.start_date = start_date
        self._by_tract: dict[str, dict[str, dict[int, float]]] = {}
        t_max = 0
        for (tract, unit, t), a in readings.items():
            if a < 0:
                raise ValidationError(f"negative activity index for {tract}/{unit} day {t}")
            self._by_tract.setdefault(tract, {}).setdefault(unit, {})[t] = a
            t_max = max(t_max, t)
        self.t_min = 0
        self.t_max = t_max

    @property
    def tracts(self) -> list[str]:
        return sorted(self._by_tract)

    def units(self, tract: str) -> list[str]:
        if tract not in self._by_tract:
            raise ValidationError(f"tract {tract!r} has no registered units")
        return sorted(self._by_tract[tract])

    def activity(self, tract: str, unit: str, t: int) -> float:
        return self._by_tract[tract][unit].get(t, 0.0)


def read_activity_csv(path: str | Path) -> ActivityData:
    """Read the ``activity.csv`` interface format (header required)."""
    path = Path(path)
    rows: list[tuple[str, str, dt.date, float]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ACTIVITY_HEADER:
            raise ValidationError(
                f"{path}: expected header {','.join(ACTIVITY_HEADER)!r}, got {header!r}"
            )
        for row_num, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ValidationError(f"{path} line {row_num}: expected 4 fields")
            tract, unit, date_s, a_s = (f.strip() for f in row)
            try:
                date = dt.date.fromisoformat(date_s)
            except ValueError:
                raise ValidationError(
                    f"{path} line {row_num}: bad date {date_s!r}"
                ) from None
            try:
                a = float(a_s)
            except ValueError:
                raise ValidationError(
                    f"{path} line {row_num}: bad activity index {a_s!r}"
                ) from None
            if a < 0:
                raise ValidationError(f"{path} line {row_num}: negative activity index")
            rows.append((tract, unit, date, a))
    if not rows:
        raise ValidationError(f"{path}: no activity records")
    start = min(d for _, _, d, _ in rows)
    readings: dict[tuple[str, str, int], float] = {}
    for tract, unit, date, a in rows:
        key = (tract, unit, (date - start).days)
        if key in readings:
            raise ValidationError(f"{path}: duplicate reading for {key}")
        readings[key] = a
    return ActivityData(readings, start)


def activity_density(data: ActivityData, tract: str, t: int) -> float:
    """Root-mean-square of the tract's unit activity indices on day t."""
    units = data.units(tract)
    total = 0.0
    for unit in units:
        a = data.activity(tract, unit, t)
        total += a * a
    return math.sqrt(total / len(units))


def percent_change(da_eval: float, da_base: float) -> float:
    """100 * (eval - baseline) / baseline; baseline must be positive."""
    if da_base <= 0:
        raise ValidationError(f"baseline density must be positive, got {da_base}")
    return 100.0 * (da_eval - da_base) / da_base


def classify(
    pct_changes: Iterable[float], thresholds: ImpactThresholds = ImpactThresholds()
) -> ImpactClass:
    """Class from the minimum percent change over the evaluation period."""
    changes = list(pct_changes)
    if not changes:
        raise ValidationError("evaluation period is empty")
    lowest = min(changes)
    if lowest <= thresholds.high_cutoff + thresholds.tolerance:
        return ImpactClass.HIGH
    if lowest > thresholds.low_cutoff:
        return ImpactClass.LOW
    return ImpactClass.MODERATE


@dataclass(frozen=True)
class ImpactProfile:
    """A classified tract's densities and percent changes."""

    tract: str
    density: dict[int, float]
    baseline_density: float
    pct_change: dict[int, float]
    min_pct_change: float
    impact_class: ImpactClass


def build_profiles(
    data: ActivityData,
    baseline_days: Sequence[int],
    eval_days: Sequence[int],
    thresholds: ImpactThresholds = ImpactThresholds(),
) -> tuple[dict[str, ImpactProfile], list[str]]:
    """Classify every tract; tracts with zero baseline density are excluded.

    Returns (profiles by tract, excluded tract ids).  Baseline density is the
    mean of daily densities over the baseline days.
    """
    if not baseline_days:
        raise ValidationError("baseline period is empty")
    if not eval_days:
        raise ValidationError("evaluation period is empty")
    out_of_range = [
        t for t in (*baseline_days, *eval_days) if not data.t_min <= t <= data.t_max
    ]
    if out_of_range:
        raise ValidationError(f"days outside activity data range: {sorted(set(out_of_range))}")
    profiles: dict[str, ImpactProfile] = {}
    excluded: list[str] = []
    for tract in data.tracts:
        density = {t: activity_density(data, tract, t) for t in (*baseline_days, *eval_days)}
        baseline = sum(density[t] for t in baseline_days) / len(baseline_days)
        if baseline <= 0:
            excluded.append(tract)
            continue
        pct = {t: percent_change(density[t], baseline) for t in eval_days}
        lowest = min(pct.values())
        profiles[tract] = ImpactProfile(
            tract=tract,
            density=density,
            baseline_density=baseline,
            pct_change=pct,
            min_pct_change=lowest,
            impact_class=classify(pct.values(), thresholds),
        )
    return profiles, excluded


def impact_composition(
    members: Iterable[str], classes: Mapping[str, ImpactClass]
) -> tuple[float, float, float]:
    """(pct_high, pct_moderate, pct_low) over the member tracts."""
    members = list(members)
    if not members:
        raise ValidationError("community has no members")
    unclassified = [m for m in members if m not in classes]
    if unclassified:
        raise ValidationError(f"unclassified members: {sorted(unclassified)}")
    counts = {cls: 0 for cls in ImpactClass}
    for m in members:
        counts[classes[m]] += 1
    n = len(members)
    return (
        100.0 * counts[ImpactClass.HIGH] / n,
        100.0 * counts[ImpactClass.MODERATE] / n,
        100.0 * counts[ImpactClass.LOW] / n,
    )


def write_impact_csv(profiles: Mapping[str, ImpactProfile], path: str | Path) -> None:
    """Write the ``impact.csv`` interface, one row per classified tract."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(IMPACT_HEADER)
        for tract in sorted(profiles):
            p = profiles[tract]
            writer.writerow(
                [tract, repr(p.baseline_density), repr(p.min_pct_change), p.impact_class.value]
            )


def write_activity_csv(data: ActivityData, path: str | Path) -> None:
    """Write the ``activity.csv`` interface format."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ACTIVITY_HEADER)
        for tract in data.tracts:
            for unit in data.units(tract):
                readings = data._by_tract[tract][unit]
                for t in sorted(readings):
                    date = (data.start_date + dt.timedelta(days=t)).isoformat()
                    writer.writerow([tract, unit, date, repr(readings[t])])


def read_impact_csv(path: str | Path) -> dict[str, ImpactClass]:
    """Read classes back from ``impact.csv``."""
    path = Path(path)
    classes: dict[str, ImpactClass] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != IMPACT_HEADER:
            raise ValidationError(
                f"{path}: expected header {','.join(IMPACT_HEADER)!r}, got {header!r}"
            )
        for row_num, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ValidationError(f"{path} line {row_num}: expected 4 fields")
            tract = row[0].strip()
            try:
                classes[tract] = ImpactClass(row[3].strip())
            except ValueError:
                raise ValidationError(
                    f"{path} line {row_num}: unknown class {row[3]!r}"
                ) from None
    if not classes:
        raise ValidationError(f"{path}: no impact records")
    return classes
