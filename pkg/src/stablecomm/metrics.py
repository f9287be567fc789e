"""Community characteristics: IQR homophily, SCI fraction, H/M-to-L fraction.

The SCI fraction of a community is its internal pairwise SCI weight over the
pairwise SCI weight of all pairs touching the community (self-pairs excluded,
each unordered pair counted once on both sides).  The H/M-to-L fraction is
the visit weight from the community's high/moderate-impact tracts to its own
low-impact tracts over the weight to all low-impact tracts, both directions
of the directed mobility edge summed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dynamic import TemporalCommunity
from .errors import ValidationError
from .impact import ImpactClass, impact_composition
from .stream import SnapshotGraph

SCI_HEADER = ["tract_a", "tract_b", "sci"]
DEMOGRAPHICS_HEADER = ["tract", "median_income", "pct_black", "pct_hispanic"]


def iqr(values: Iterable[float]) -> float:
    """Q3 - Q1 with quantiles by linear interpolation between order
    statistics (positions 1 + p*(n-1))."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size < 2:
        raise ValidationError(f"iqr needs at least 2 values, got {arr.size}")
    q1, q3 = np.percentile(arr, [25.0, 75.0])
    return float(q3 - q1)


@dataclass(frozen=True)
class DemographicRecord:
    tract: str
    median_income: float
    pct_black: float
    pct_hispanic: float

    def __post_init__(self):
        if self.median_income < 0:
            raise ValidationError(f"{self.tract}: median income must be >= 0")
        for name in ("pct_black", "pct_hispanic"):
            v = getattr(self, name)
            if not 0.0 <= v <= 100.0:
                raise ValidationError(f"{self.tract}: {name} must be in [0, 100], got {v}")


def read_demographics_csv(path: str | Path) -> dict[str, DemographicRecord]:
    path = Path(path)
    records: dict[str, DemographicRecord] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != DEMOGRAPHICS_HEADER:
            raise ValidationError(
                f"{path}: expected header {','.join(DEMOGRAPHICS_HEADER)!r}, got {header!r}"
            )
        for row_num, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ValidationError(f"{path} line {row_num}: expected 4 fields")
            tract = row[0].strip()
            if tract in records:
                raise ValidationError(f"{path} line {row_num}: duplicate tract {tract!r}")
            try:
                records[tract] = DemographicRecord(
                    tract, float(row[1]), float(row[2]), float(row[3])
                )
            except ValueError as exc:
                raise ValidationError(f"{path} line {row_num}: {exc}") from None
    if not records:
        raise ValidationError(f"{path}: no demographic records")
    return records


class SciMatrix:
    """Symmetric positive social-connectedness weights between tract pairs."""

    def __init__(self, pairs: Mapping[tuple[str, str], float]):
        self._rows: dict[str, dict[str, float]] = {}
        for (a, b), w in pairs.items():
            if a == b:
                continue  # self-pairs are excluded from both fraction sums
            if w <= 0:
                raise ValidationError(f"SCI weight must be positive for ({a}, {b})")
            existing = self._rows.get(a, {}).get(b)
            if existing is not None and not math.isclose(existing, w, rel_tol=1e-9):
                raise ValidationError(f"asymmetric SCI input for pair ({a}, {b})")
            self._rows.setdefault(a, {})[b] = w
            self._rows.setdefault(b, {})[a] = w
        self.tracts = frozenset(self._rows)

    def weight(self, a: str, b: str) -> float:
        return self._rows.get(a, {}).get(b, 0.0)

    def row_sum(self, a: str) -> float:
        return sum(self._rows.get(a, {}).values())

    def row(self, a: str) -> Mapping[str, float]:
        return self._rows.get(a, {})


def read_sci_csv(path: str | Path) -> SciMatrix:
    """Read ``sci.csv``: unordered pairs, symmetric duplicates tolerated if equal."""
    path = Path(path)
    pairs: dict[tuple[str, str], float] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != SCI_HEADER:
            raise ValidationError(
                f"{path}: expected header {','.join(SCI_HEADER)!r}, got {header!r}"
            )
        for row_num, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ValidationError(f"{path} line {row_num}: expected 3 fields")
            a, b = row[0].strip(), row[1].strip()
            try:
                w = float(row[2])
            except ValueError:
                raise ValidationError(f"{path} line {row_num}: bad SCI value {row[2]!r}") from None
            key = (a, b) if a <= b else (b, a)
            if key in pairs and not math.isclose(pairs[key], w, rel_tol=1e-9):
                raise ValidationError(
                    f"{path} line {row_num}: conflicting duplicate for pair {key}"
                )
            pairs[key] = w
    if not pairs:
        raise ValidationError(f"{path}: no SCI records")
    return SciMatrix(pairs)


def write_sci_csv(sci: SciMatrix, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCI_HEADER)
        for a in sorted(sci.tracts):
            for b, w in sorted(sci.row(a).items()):
                if a < b:
                    writer.writerow([a, b, repr(w)])


def write_demographics_csv(records: Mapping[str, DemographicRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(DEMOGRAPHICS_HEADER)
        for tract in sorted(records):
            r = records[tract]
            writer.writerow([tract, repr(r.median_income), repr(r.pct_black), repr(r.pct_hispanic)])


def sci_fraction(members: Iterable[str], sci: SciMatrix) -> float:
    """Internal pairwise SCI weight over all pairwise SCI weight touching the
    community; unordered pairs, self-pairs excluded."""
    mem = set(members)
    if not mem:
        raise ValidationError("community has no members")
    internal = 0.0
    touching = 0.0
    for a in sorted(mem):  # canonical summation order keeps output reproducible
        for b, w in sorted(sci.row(a).items()):
            if b in mem:
                internal += w / 2.0  # each internal pair visited from both ends
                touching += w / 2.0
            else:
                touching += w
    if touching <= 0:
        raise ValidationError("community has no SCI presence (zero denominator)")
    return internal / touching


def hml_fraction(
    members: Iterable[str],
    event_graph: SnapshotGraph,
    classes: Mapping[str, ImpactClass],
) -> float | None:
    """Fraction of H/M-to-L visit weight staying inside the community.

    Returns None (undefined) when the community has no high/moderate members
    or its H/M tracts have no links to any low-impact tract.
    """
    mem = set(members)
    hm = {m for m in mem if classes.get(m) in (ImpactClass.HIGH, ImpactClass.MODERATE)}
    if not hm:
        return None
    low_all = {t for t, c in classes.items() if c is ImpactClass.LOW}
    low_in = low_all & mem
    internal = 0.0
    total = 0.0
    for (o, d), w in event_graph.adjacency.items():
        if o == d:
            continue
        for i, k in ((o, d), (d, o)):
            if i in hm and k in low_all:
                total += w
                if k in low_in:
                    internal += w
    if total <= 0:
        return None
    return internal / total


@dataclass(frozen=True)
class HomophilyReport:
    """Per-community socio-demographic IQRs against the county baselines."""

    iqr_income: float
    iqr_pct_black: float
    iqr_pct_hispanic: float
    below_county_income: bool
    below_county_pct_black: bool
    below_county_pct_hispanic: bool


def county_baselines(demo: Mapping[str, DemographicRecord]) -> tuple[float, float, float]:
    """County-wide (income, pct_black, pct_hispanic) IQRs."""
    records = list(demo.values())
    return (
        iqr(r.median_income for r in records),
        iqr(r.pct_black for r in records),
        iqr(r.pct_hispanic for r in records),
    )


def homophily_report(
    members: Iterable[str],
    demo: Mapping[str, DemographicRecord],
    baselines: tuple[float, float, float],
) -> HomophilyReport:
    mem = sorted(members)
    missing = [m for m in mem if m not in demo]
    if missing:
        raise ValidationError(f"missing demographic records for tracts: {missing}")
    incomes = [demo[m].median_income for m in mem]
    blacks = [demo[m].pct_black for m in mem]
    hispanics = [demo[m].pct_hispanic for m in mem]
    iqrs = (iqr(incomes), iqr(blacks), iqr(hispanics))
    return HomophilyReport(
        iqr_income=iqrs[0],
        iqr_pct_black=iqrs[1],
        iqr_pct_hispanic=iqrs[2],
        below_county_income=iqrs[0] < baselines[0],
        below_county_pct_black=iqrs[1] < baselines[1],
        below_county_pct_hispanic=iqrs[2] < baselines[2],
    )


@dataclass(frozen=True)
class CommunityReport:
    """Metric bundle for one major community."""

    community_id: int
    size: int
    pct_high: float
    pct_moderate: float
    pct_low: float
    iqr_income: float
    iqr_pct_black: float
    iqr_pct_hispanic: float
    county_iqr_income: float
    county_iqr_pct_black: float
    county_iqr_pct_hispanic: float
    below_county_income: bool
    below_county_pct_black: bool
    below_county_pct_hispanic: bool
    sci_fraction: float
    hml_fraction: float | None

    def to_dict(self) -> dict:
        return {
            "community_id": self.community_id,
            "size": self.size,
            "pct_high": self.pct_high,
            "pct_moderate": self.pct_moderate,
            "pct_low": self.pct_low,
            "iqr_income": self.iqr_income,
            "iqr_pct_black": self.iqr_pct_black,
            "iqr_pct_hispanic": self.iqr_pct_hispanic,
            "county_iqr_income": self.county_iqr_income,
            "county_iqr_pct_black": self.county_iqr_pct_black,
            "county_iqr_pct_hispanic": self.county_iqr_pct_hispanic,
            "below_county_income": self.below_county_income,
            "below_county_pct_black": self.below_county_pct_black,
            "below_county_pct_hispanic": self.below_county_pct_hispanic,
            "sci_fraction": self.sci_fraction,
            "hml_fraction": self.hml_fraction,
        }


def build_report(
    communities: Sequence[TemporalCommunity],
    classes: Mapping[str, ImpactClass],
    demo: Mapping[str, DemographicRecord],
    sci: SciMatrix,
    event_graph: SnapshotGraph,
    excluded_tracts: Sequence[str] = (),
) -> tuple[list[CommunityReport], dict]:
    """One CommunityReport per community, ordered by community id.

    Key mismatches (members missing from the impact classes or the
    demographics) abort the run with the offending tracts enumerated.
    """
    mismatches: dict[str, list[str]] = {}
    for cid, c in enumerate(communities):
        bad_demo = sorted(m for m in c.members if m not in demo)
        bad_class = sorted(m for m in c.members if m not in classes)
        if bad_demo:
            mismatches[f"community {cid}: no demographics"] = bad_demo
        if bad_class:
            mismatches[f"community {cid}: no impact class"] = bad_class
    if mismatches:
        details = "; ".join(f"{k}: {v}" for k, v in sorted(mismatches.items()))
        raise ValidationError(f"input key mismatches: {details}")

    baselines = county_baselines(demo)
    reports: list[CommunityReport] = []
    undefined_hml: list[int] = []
    for cid, c in enumerate(communities):
        pct_high, pct_moderate, pct_low = impact_composition(c.members, classes)
        homo = homophily_report(c.members, demo, baselines)
        scif = sci_fraction(c.members, sci)
        hml = hml_fraction(c.members, event_graph, classes)
        if hml is None:
            undefined_hml.append(cid)
        reports.append(
            CommunityReport(
                community_id=cid,
                size=c.size,
                pct_high=pct_high,
                pct_moderate=pct_moderate,
                pct_low=pct_low,
                iqr_income=homo.iqr_income,
                iqr_pct_black=homo.iqr_pct_black,
                iqr_pct_hispanic=homo.iqr_pct_hispanic,
                county_iqr_income=baselines[0],
                county_iqr_pct_black=baselines[1],
                county_iqr_pct_hispanic=baselines[2],
                below_county_income=homo.below_county_income,
                below_county_pct_black=homo.below_county_pct_black,
                below_county_pct_hispanic=homo.below_county_pct_hispanic,
                sci_fraction=scif,
                hml_fraction=hml,
            )
        )
    diagnostics = {
        "excluded_tracts": sorted(excluded_tracts),
        "undefined_hml": undefined_hml,
    }
    return reports, diagnostics


def write_report_json(
    reports: Sequence[CommunityReport], diagnostics: dict, path: str | Path
) -> None:
    """Serialize the report deterministically (sorted keys, fixed layout)."""
    payload = {
        "communities": [r.to_dict() for r in reports],
        "diagnostics": diagnostics,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_report_json(path: str | Path) -> tuple[list[CommunityReport], dict]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    reports = [CommunityReport(**entry) for entry in payload["communities"]]
    return reports, payload["diagnostics"]
