"""Command-line entry point tying the pipeline together.

Subcommands: ``synth``, ``detect``, ``impact``, ``metrics``, ``pipeline``.
Configuration is a single JSON document; every flag overrides its config key
(flag ``--quality-threshold`` overrides key ``quality_threshold``).  Exit
codes: 0 success, 1 runtime failure, 2 input/config validation failure.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from .dynamic import (
    DetectionConfig,
    detect,
    major_communities,
    write_communities_csv,
)
from .errors import ValidationError
from .impact import (
    ImpactThresholds,
    build_profiles,
    read_activity_csv,
    read_impact_csv,
    write_impact_csv,
)
from .metrics import (
    build_report,
    read_demographics_csv,
    read_sci_csv,
    write_report_json,
)
from .stream import aggregate_window, read_edges_csv
from .synth import ScenarioSpec, four_block_spec, harris_like_spec, write_scenario

CONFIG_DEFAULTS = {
    "edges": None,
    "activity": None,
    "sci": None,
    "demographics": None,
    "out": ".",
    "seed": 0,
    "threads": 0,  # 0 means available parallelism
    "quality_threshold": 0.8,
    "similarity_threshold": 0.2,
    "persistence_steps": 3,
    "scales": None,
    "resolution": 1.0,
    "min_size": 10,
    "required_span": None,
    "baseline_days": [0, 12],
    "eval_days": [13, 19],
    "high_cutoff": -100.0,
    "low_cutoff": -75.0,
    "tolerance": 1e-9,
}


def _fail(stage: str, message: str, code: int) -> None:
    click.echo(json.dumps({"error": {"stage": stage, "message": message}}), err=True)
    sys.exit(code)


def _stage(name: str):
    """Map exceptions to the exit-code contract for one CLI stage."""

    def decorator(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except ValidationError as exc:
                _fail(name, str(exc), 2)
            except Exception as exc:  # noqa: BLE001 - CLI boundary
                _fail(name, f"{type(exc).__name__}: {exc}", 1)

        return wrapper

    return decorator


def _load_config(config_path: str | None, overrides: dict) -> dict:
    cfg = dict(CONFIG_DEFAULTS)
    if config_path:
        path = Path(config_path)
        if not path.is_file():
            raise ValidationError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from None
        unknown = sorted(set(loaded) - set(CONFIG_DEFAULTS))
        if unknown:
            raise ValidationError(f"unknown config keys: {unknown}")
        cfg.update(loaded)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    return cfg


def _require_inputs(cfg: dict, keys: list[str]) -> None:
    missing = [k for k in keys if not cfg.get(k)]
    if missing:
        raise ValidationError(f"missing required input paths: {missing}")
    absent = [k for k in keys if not Path(cfg[k]).is_file()]
    if absent:
        raise ValidationError(
            f"input files do not exist: {[str(cfg[k]) for k in absent]}"
        )


def _threads(cfg: dict) -> int:
    if cfg["threads"] and cfg["threads"] > 0:
        return int(cfg["threads"])
    return os.cpu_count() or 1


def _parse_span(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        a, b = (int(p) for p in text.split("-"))
    except ValueError:
        raise ValidationError(f"expected a day span like '14-16', got {text!r}") from None
    return [a, b]


def _parse_scales(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise ValidationError(f"expected comma-separated scales, got {text!r}") from None


def _common_options(fn):
    fn = click.option("--config", type=str, default=None, help="JSON config file.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Global RNG seed.")(fn)
    fn = click.option("--threads", type=int, default=None, help="Worker threads (0 = auto).")(fn)
    fn = click.option("--out", type=str, default=None, help="Output directory.")(fn)
    return fn


@click.group()
def main():
    """Stable community detection and characterization for temporal mobility networks."""


@main.command()
@click.option("--preset", type=click.Choice(["four-block", "harris-like"]), default=None)
@click.option("--spec", "spec_path", type=str, default=None, help="ScenarioSpec JSON file.")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default=".", help="Scenario output directory.")
@_stage("synth")
def synth(preset, spec_path, seed, out):
    """Generate a synthetic scenario (edges, activity, sci, demographics, truth)."""
    if (preset is None) == (spec_path is None):
        raise ValidationError("pass exactly one of --preset or --spec")
    if preset is not None:
        factory = four_block_spec if preset == "four-block" else harris_like_spec
        spec = factory() if seed is None else factory(seed)
    else:
        spec = ScenarioSpec.from_json(spec_path)
        if seed is not None:
            spec = ScenarioSpec(**{**spec.__dict__, "rng_seed": seed})
    truth = write_scenario(spec, out)
    click.echo(
        f"scenario written to {out}: {spec.n_tracts} tracts, "
        f"{spec.n_blocks} blocks, {spec.n_days} days"
    )
    click.echo(f"expected SCIF range: {min(truth.expected_scif):.3f}"
               f"..{max(truth.expected_scif):.3f}")


def _run_detect(cfg: dict):
    _require_inputs(cfg, ["edges"])
    stream = read_edges_csv(cfg["edges"])
    detection = DetectionConfig(
        quality_threshold=cfg["quality_threshold"],
        similarity_threshold=cfg["similarity_threshold"],
        persistence_steps=cfg["persistence_steps"],
        scales=tuple(cfg["scales"]) if cfg["scales"] else None,
        rng_seed=cfg["seed"],
        resolution=cfg["resolution"],
    )
    communities = detect(stream, detection, threads=_threads(cfg))
    span = cfg["required_span"]
    majors = major_communities(
        communities, cfg["min_size"], tuple(span) if span else None
    )
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    write_communities_csv(majors, out_dir / "communities.csv")
    click.echo(f"detected {len(communities)} stable communities, {len(majors)} major")
    return stream, majors


@main.command("detect")
@_common_options
@click.option("--edges", type=str, default=None, help="edges.csv path.")
@click.option("--quality-threshold", type=float, default=None)
@click.option("--similarity-threshold", type=float, default=None)
@click.option("--persistence-steps", type=int, default=None)
@click.option("--scales", type=str, default=None, help="Comma-separated window lengths.")
@click.option("--resolution", type=float, default=None)
@click.option("--min-size", type=int, default=None)
@click.option("--required-span", type=str, default=None, help="Day span like '14-16'.")
@_stage("detect")
def cmd_detect(config, **flags):
    """Detect stable communities and write communities.csv."""
    flags["scales"] = _parse_scales(flags.get("scales"))
    flags["required_span"] = _parse_span(flags.get("required_span"))
    cfg = _load_config(config, flags)
    _run_detect(cfg)


def _run_impact(cfg: dict):
    _require_inputs(cfg, ["activity"])
    data = read_activity_csv(cfg["activity"])
    b0, b1 = cfg["baseline_days"]
    e0, e1 = cfg["eval_days"]
    thresholds = ImpactThresholds(cfg["high_cutoff"], cfg["low_cutoff"], cfg["tolerance"])
    profiles, excluded = build_profiles(
        data, range(b0, b1 + 1), range(e0, e1 + 1), thresholds
    )
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    write_impact_csv(profiles, out_dir / "impact.csv")
    (out_dir / "impact_diagnostics.json").write_text(
        json.dumps({"excluded_tracts": sorted(excluded)}, indent=2) + "\n",
        encoding="utf-8",
    )
    counts = {"high": 0, "moderate": 0, "low": 0}
    for p in profiles.values():
        counts[p.impact_class.value] += 1
    click.echo(
        f"classified {len(profiles)} tracts "
        f"(high {counts['high']}, moderate {counts['moderate']}, low {counts['low']}); "
        f"{len(excluded)} excluded (zero baseline)"
    )
    return profiles, excluded


@main.command("impact")
@_common_options
@click.option("--activity", type=str, default=None, help="activity.csv path.")
@click.option("--baseline-days", type=str, default=None, help="Day span like '0-12'.")
@click.option("--eval-days", type=str, default=None, help="Day span like '13-19'.")
@click.option("--high-cutoff", type=float, default=None)
@click.option("--low-cutoff", type=float, default=None)
@_stage("impact")
def cmd_impact(config, **flags):
    """Classify outage impact per tract and write impact.csv."""
    flags["baseline_days"] = _parse_span(flags.get("baseline_days"))
    flags["eval_days"] = _parse_span(flags.get("eval_days"))
    cfg = _load_config(config, flags)
    _run_impact(cfg)


def _read_communities_csv(path: Path):
    """Reload major communities from the communities.csv interface."""
    import csv as _csv

    from .dynamic import COMMUNITIES_HEADER, TemporalCommunity

    groups: dict[int, dict] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != COMMUNITIES_HEADER:
            raise ValidationError(
                f"{path}: expected header {','.join(COMMUNITIES_HEADER)!r}, got {header!r}"
            )
        for row in reader:
            cid = int(row[0])
            entry = groups.setdefault(
                cid,
                {
                    "members": set(),
                    "t_start": int(row[2]),
                    "t_end": int(row[3]),
                    "scale": int(row[4]),
                    "quality": float(row[5]),
                },
            )
            entry["members"].add(row[1])
    return [
        TemporalCommunity(
            members=frozenset(groups[cid]["members"]),
            t_start=groups[cid]["t_start"],
            t_end=groups[cid]["t_end"],
            scale=groups[cid]["scale"],
            quality=groups[cid]["quality"],
        )
        for cid in sorted(groups)
    ]


def _run_metrics(cfg: dict, majors=None, profiles=None, excluded=None, stream=None):
    _require_inputs(cfg, ["edges", "sci", "demographics"])
    out_dir = Path(cfg["out"])
    if majors is None:
        communities_path = out_dir / "communities.csv"
        if not communities_path.is_file():
            raise ValidationError(f"communities file not found: {communities_path}")
        majors = _read_communities_csv(communities_path)
    if profiles is None:
        impact_path = out_dir / "impact.csv"
        if not impact_path.is_file():
            raise ValidationError(f"impact file not found: {impact_path}")
        classes = read_impact_csv(impact_path)
        diag_path = out_dir / "impact_diagnostics.json"
        excluded = []
        if diag_path.is_file():
            excluded = json.loads(diag_path.read_text(encoding="utf-8"))["excluded_tracts"]
    else:
        classes = {t: p.impact_class for t, p in profiles.items()}
    if stream is None:
        stream = read_edges_csv(cfg["edges"])
    sci = read_sci_csv(cfg["sci"])
    demo = read_demographics_csv(cfg["demographics"])
    e0, e1 = cfg["eval_days"]
    event_graph = aggregate_window(stream, e0, e1)
    reports, diagnostics = build_report(
        majors, classes, demo, sci, event_graph, excluded or []
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    write_report_json(reports, diagnostics, out_dir / "report.json")
    click.echo(f"report.json written with {len(reports)} communities")


@main.command("metrics")
@_common_options
@click.option("--edges", type=str, default=None)
@click.option("--sci", type=str, default=None)
@click.option("--demographics", type=str, default=None)
@click.option("--eval-days", type=str, default=None, help="Event window, e.g. '13-19'.")
@_stage("metrics")
def cmd_metrics(config, **flags):
    """Compute per-community metrics from prior stage outputs; write report.json."""
    flags["eval_days"] = _parse_span(flags.get("eval_days"))
    cfg = _load_config(config, flags)
    _run_metrics(cfg)


@main.command("pipeline")
@_common_options
@click.option("--edges", type=str, default=None)
@click.option("--activity", type=str, default=None)
@click.option("--sci", type=str, default=None)
@click.option("--demographics", type=str, default=None)
@click.option("--quality-threshold", type=float, default=None)
@click.option("--similarity-threshold", type=float, default=None)
@click.option("--persistence-steps", type=int, default=None)
@click.option("--scales", type=str, default=None)
@click.option("--resolution", type=float, default=None)
@click.option("--min-size", type=int, default=None)
@click.option("--required-span", type=str, default=None)
@click.option("--baseline-days", type=str, default=None)
@click.option("--eval-days", type=str, default=None)
@click.option("--high-cutoff", type=float, default=None)
@click.option("--low-cutoff", type=float, default=None)
@_stage("pipeline")
def cmd_pipeline(config, **flags):
    """Run detect, impact, and metrics in sequence on the same inputs."""
    for key in ("scales",):
        flags[key] = _parse_scales(flags.get(key))
    for key in ("required_span", "baseline_days", "eval_days"):
        flags[key] = _parse_span(flags.get(key))
    cfg = _load_config(config, flags)
    stream, majors = _run_detect(cfg)
    profiles, excluded = _run_impact(cfg)
    _run_metrics(cfg, majors=majors, profiles=profiles, excluded=excluded, stream=stream)


if __name__ == "__main__":
    main()
