"""Seeded generators for ground-truth-bearing synthetic scenarios.

A scenario plants a block structure in the mobility stream, an outage plan in
the activity field, block-concentrated SCI weights, and block-level
demographics, so every downstream result can be checked against the plan.
One global seed fans out into independent per-generator sub-seeds.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamic import fanout_seed
from .errors import ValidationError
from .impact import ActivityData, ImpactClass, write_activity_csv
from .metrics import DemographicRecord, SciMatrix, write_demographics_csv, write_sci_csv
from .stream import LinkStream, TemporalEdge, write_edges_csv


@dataclass(frozen=True)
class ScenarioSpec:
    """Full description of a synthetic scenario."""

    block_sizes: tuple[int, ...]
    n_days: int
    p_in: float
    p_out: float
    weight_range: tuple[int, int] = (1, 5)
    baseline_days: tuple[int, int] = (0, 12)
    eval_days: tuple[int, int] = (13, 19)
    # (n_high, n_moderate) planted per block; the rest of the block is low.
    class_mix: tuple[tuple[int, int], ...] = ()
    sci_in: tuple[float, float] = (5000.0, 10000.0)
    sci_out: tuple[float, float] = (1.0, 20.0)
    income_means: tuple[float, ...] = ()
    income_spread: float = 5000.0
    black_means: tuple[float, ...] = ()
    black_spread: float = 5.0
    hispanic_means: tuple[float, ...] = ()
    hispanic_spread: float = 5.0
    units_per_tract: int = 4
    base_activity: tuple[float, float] = (50.0, 150.0)
    start_date: str = "2021-02-01"
    rng_seed: int = 0

    def __post_init__(self):
        nb = len(self.block_sizes)
        if nb == 0 or any(s < 1 for s in self.block_sizes):
            raise ValidationError("block_sizes must be positive")
        if not self.p_in > self.p_out >= 0:
            raise ValidationError("need p_in > p_out >= 0")
        if self.p_in > 1:
            raise ValidationError("p_in must be <= 1")
        if self.weight_range[0] < 1 or self.weight_range[0] > self.weight_range[1]:
            raise ValidationError("bad weight_range")
        if self.n_days < 1:
            raise ValidationError("n_days must be >= 1")
        for name in ("baseline_days", "eval_days"):
            a, b = getattr(self, name)
            if not 0 <= a <= b < self.n_days:
                raise ValidationError(f"{name} [{a}, {b}] outside [0, {self.n_days - 1}]")
        if not self.class_mix:
            object.__setattr__(self, "class_mix", tuple((0, 0) for _ in range(nb)))
        if len(self.class_mix) != nb:
            raise ValidationError("class_mix must have one entry per block")
        for size, (n_high, n_mod) in zip(self.block_sizes, self.class_mix):
            if n_high < 0 or n_mod < 0 or n_high + n_mod > size:
                raise ValidationError("class_mix counts exceed block size")
        for name in ("sci_in", "sci_out"):
            lo, hi = getattr(self, name)
            if hi > 0 and not 0 < lo <= hi:
                raise ValidationError(f"{name} range must be positive when used")
            if hi < 0:
                raise ValidationError(f"{name} upper bound must be >= 0")
        for name in ("income_means", "black_means", "hispanic_means"):
            means = getattr(self, name)
            if not means:
                object.__setattr__(self, name, tuple(self._default_means(name, nb)))
            elif len(getattr(self, name)) != nb:
                raise ValidationError(f"{name} must have one entry per block")
        if self.units_per_tract < 1:
            raise ValidationError("units_per_tract must be >= 1")
        if not 0 < self.base_activity[0] <= self.base_activity[1]:
            raise ValidationError("base_activity range must be positive")
        dt.date.fromisoformat(self.start_date)

    @staticmethod
    def _default_means(name: str, nb: int) -> list[float]:
        if name == "income_means":
            return [30000.0 + 3000.0 * b for b in range(nb)]
        return [float(10 + (7 * b) % 80) for b in range(nb)]

    @property
    def n_tracts(self) -> int:
        return sum(self.block_sizes)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    def tract_ids(self) -> list[str]:
        width = max(4, len(str(self.n_tracts - 1)))
        return [f"T{i:0{width}d}" for i in range(self.n_tracts)]

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.__dict__, indent=2, sort_keys=True, default=list) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "ScenarioSpec":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        for key in (
            "block_sizes",
            "weight_range",
            "baseline_days",
            "eval_days",
            "sci_in",
            "sci_out",
            "income_means",
            "black_means",
            "hispanic_means",
            "base_activity",
        ):
            if key in raw and raw[key] is not None:
                raw[key] = tuple(raw[key])
        if "class_mix" in raw:
            raw["class_mix"] = tuple(tuple(entry) for entry in raw["class_mix"])
        return cls(**raw)


@dataclass(frozen=True)
class GroundTruth:
    """The planted structure a scenario's outputs must recover."""

    blocks: dict[str, int]
    planned_class: dict[str, ImpactClass]
    expected_scif: tuple[float, ...]
    block_members: tuple[frozenset[str], ...] = field(default=(), compare=False)

    def to_json(self, path: str | Path) -> None:
        payload = {
            "blocks": dict(sorted(self.blocks.items())),
            "planned_class": {t: c.value for t, c in sorted(self.planned_class.items())},
            "expected_scif": list(self.expected_scif),
        }
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "GroundTruth":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        blocks = {t: int(b) for t, b in raw["blocks"].items()}
        members: dict[int, set[str]] = {}
        for t, b in blocks.items():
            members.setdefault(b, set()).add(t)
        return cls(
            blocks=blocks,
            planned_class={t: ImpactClass(c) for t, c in raw["planned_class"].items()},
            expected_scif=tuple(raw["expected_scif"]),
            block_members=tuple(frozenset(members[b]) for b in sorted(members)),
        )


def ground_truth(spec: ScenarioSpec) -> GroundTruth:
    """Derive the planted assignments and expected SCIF regime from the spec."""
    tracts = spec.tract_ids()
    blocks: dict[str, int] = {}
    planned: dict[str, ImpactClass] = {}
    members: list[frozenset[str]] = []
    pos = 0
    for b, size in enumerate(spec.block_sizes):
        block_tracts = tracts[pos : pos + size]
        pos += size
        members.append(frozenset(block_tracts))
        n_high, n_mod = spec.class_mix[b]
        for i, t in enumerate(block_tracts):
            blocks[t] = b
            if i < n_high:
                planned[t] = ImpactClass.HIGH
            elif i < n_high + n_mod:
                planned[t] = ImpactClass.MODERATE
            else:
                planned[t] = ImpactClass.LOW
    m_in = (spec.sci_in[0] + spec.sci_in[1]) / 2.0
    m_out = (spec.sci_out[0] + spec.sci_out[1]) / 2.0 if spec.sci_out[1] > 0 else 0.0
    n = spec.n_tracts
    expected = []
    for size in spec.block_sizes:
        internal = size * (size - 1) / 2.0 * m_in
        external = size * (n - size) * m_out
        expected.append(internal / (internal + external))
    return GroundTruth(blocks, planned, tuple(expected), tuple(members))


def gen_mobility(spec: ScenarioSpec, truth: GroundTruth) -> LinkStream:
    """Planted-partition daily mobility stream.

    Each day, every within-block ordered pair gets an edge with probability
    p_in and every cross-block pair with p_out; weights are uniform integers.
    """
    rng = np.random.default_rng(fanout_seed(spec.rng_seed, "mobility"))
    tracts = spec.tract_ids()
    n = spec.n_tracts
    block_of = np.empty(n, dtype=np.int64)
    for i, t in enumerate(tracts):
        block_of[i] = truth.blocks[t]
    flat = np.arange(n * n)
    oi, di = np.divmod(flat, n)
    keep = oi != di
    oi, di = oi[keep], di[keep]
    prob = np.where(block_of[oi] == block_of[di], spec.p_in, spec.p_out)
    lo, hi = spec.weight_range
    edges: list[TemporalEdge] = []
    for day in range(spec.n_days):
        sel = rng.random(prob.shape[0]) < prob
        weights = rng.integers(lo, hi + 1, size=int(sel.sum()))
        for o, d, w in zip(oi[sel], di[sel], weights):
            edges.append(TemporalEdge(day, tracts[o], tracts[d], float(w)))
    if not edges:
        raise ValidationError("degenerate spec: no mobility edges generated")
    return LinkStream(
        edges=tuple(edges),
        node_universe=frozenset(tracts),
        t_min=0,
        t_max=spec.n_days - 1,
        start_date=dt.date.fromisoformat(spec.start_date),
    )


def gen_activity(spec: ScenarioSpec, truth: GroundTruth) -> ActivityData:
    """Activity field with class-consistent planted outage profiles.

    High tracts get one all-zero evaluation day (-100% exactly); moderate
    tracts one dip day with percent change planted in (-100, -75]; low tracts
    stay within +-10% noise of their base level.
    """
    rng = np.random.default_rng(fanout_seed(spec.rng_seed, "activity"))
    readings: dict[tuple[str, str, int], float] = {}
    b0, b1 = spec.baseline_days
    e0, e1 = spec.eval_days
    baseline_days = range(b0, b1 + 1)
    eval_days = range(e0, e1 + 1)
    n_eval = e1 - e0 + 1
    n_units = spec.units_per_tract
    units = [f"U{u:02d}" for u in range(n_units)]
    for tract in spec.tract_ids():
        base = rng.uniform(*spec.base_activity)
        cls = truth.planned_class[tract]
        dip_day = e0 + truth.blocks[tract] % n_eval
        # Baseline days first: the planted dips are expressed relative to the
        # realized baseline density, not the noise-free base level.
        daily_rms = []
        for t in baseline_days:
            vals = base * rng.uniform(0.9, 1.1, size=n_units)
            for unit, v in zip(units, vals):
                readings[(tract, unit, t)] = float(v)
            daily_rms.append(float(np.sqrt(np.mean(vals**2))))
        baseline_density = sum(daily_rms) / len(daily_rms)
        mod_target = float(rng.uniform(-95.0, -80.0))
        for t in range(spec.n_days):
            if t in baseline_days:
                continue
            if t in eval_days and t == dip_day and cls is ImpactClass.HIGH:
                for unit in units:
                    readings[(tract, unit, t)] = 0.0
                continue
            if t in eval_days and t == dip_day and cls is ImpactClass.MODERATE:
                dip = baseline_density * (1.0 + mod_target / 100.0)
                for unit in units:
                    readings[(tract, unit, t)] = dip
                continue
            vals = base * rng.uniform(0.9, 1.1, size=n_units)
            for unit, v in zip(units, vals):
                readings[(tract, unit, t)] = float(v)
    return ActivityData(readings, dt.date.fromisoformat(spec.start_date))


def gen_sci(spec: ScenarioSpec, truth: GroundTruth) -> SciMatrix:
    """Within-block SCI weights from sci_in, cross-block from sci_out.

    An upper bound of 0 on sci_out (or sci_in) means those links are absent.
    """
    rng = np.random.default_rng(fanout_seed(spec.rng_seed, "sci"))
    tracts = spec.tract_ids()
    pairs: dict[tuple[str, str], float] = {}
    n = len(tracts)
    for i in range(n):
        for j in range(i + 1, n):
            within = truth.blocks[tracts[i]] == truth.blocks[tracts[j]]
            lo, hi = spec.sci_in if within else spec.sci_out
            if hi <= 0:
                continue
            pairs[(tracts[i], tracts[j])] = float(rng.uniform(lo, hi))
    if not pairs:
        raise ValidationError("degenerate spec: no SCI pairs generated")
    return SciMatrix(pairs)


def gen_demographics(spec: ScenarioSpec, truth: GroundTruth) -> dict[str, DemographicRecord]:
    """Block-homophilous demographics around the per-block means."""
    rng = np.random.default_rng(fanout_seed(spec.rng_seed, "demographics"))
    records: dict[str, DemographicRecord] = {}
    for tract in spec.tract_ids():
        b = truth.blocks[tract]
        income = max(0.0, float(rng.normal(spec.income_means[b], spec.income_spread)))
        black = float(np.clip(rng.normal(spec.black_means[b], spec.black_spread), 0.0, 100.0))
        hisp = float(
            np.clip(rng.normal(spec.hispanic_means[b], spec.hispanic_spread), 0.0, 100.0)
        )
        records[tract] = DemographicRecord(tract, income, black, hisp)
    return records


def write_scenario(spec: ScenarioSpec, out_dir: str | Path) -> GroundTruth:
    """Generate a full scenario and write the interface CSVs plus truth.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    truth = ground_truth(spec)
    write_edges_csv(gen_mobility(spec, truth), out / "edges.csv")
    write_activity_csv(gen_activity(spec, truth), out / "activity.csv")
    write_sci_csv(gen_sci(spec, truth), out / "sci.csv")
    write_demographics_csv(gen_demographics(spec, truth), out / "demographics.csv")
    truth.to_json(out / "truth.json")
    spec.to_json(out / "scenario.json")
    return truth


def four_block_spec(rng_seed: int = 7) -> ScenarioSpec:
    """60 tracts in 4 stable blocks over 28 days (small planted benchmark)."""
    return ScenarioSpec(
        block_sizes=(15, 15, 15, 15),
        n_days=28,
        p_in=0.3,
        p_out=0.01,
        weight_range=(1, 5),
        class_mix=((2, 3), (1, 2), (3, 4), (0, 2)),
        sci_in=(5000.0, 10000.0),
        sci_out=(1.0, 20.0),
        rng_seed=rng_seed,
    )


def harris_like_spec(rng_seed: int = 21) -> ScenarioSpec:
    """786 tracts in 30 blocks over 28 days with a graded outage plan."""
    block_sizes = tuple([27] * 6 + [26] * 24)
    n_hm = np.linspace(2, 16, 30)
    class_mix = []
    for b, total in enumerate(np.rint(n_hm).astype(int)):
        n_high = int(total) // 2
        class_mix.append((n_high, int(total) - n_high))
    return ScenarioSpec(
        block_sizes=block_sizes,
        n_days=28,
        p_in=0.3,
        p_out=0.001,
        weight_range=(1, 5),
        class_mix=tuple(class_mix),
        sci_in=(5000.0, 10000.0),
        sci_out=(1.0, 20.0),
        rng_seed=rng_seed,
    )
