import datetime as dt

import pytest

from stablecomm.dynamic import (
    DetectionConfig,
    TemporalCommunity,
    default_scales,
    detect,
    jaccard_distance,
    major_communities,
)
from stablecomm.errors import ValidationError
from stablecomm.louvain import QualityConfig, louvain
from stablecomm.stream import LinkStream, TemporalEdge, aggregate_window, symmetrize
from stablecomm.synth import four_block_spec, gen_mobility, ground_truth


def test_jaccard_identity_and_disjoint():
    assert jaccard_distance({1, 2}, {1, 2}) == 0.0
    assert jaccard_distance({1, 2}, {3, 4}) == 1.0


def test_jaccard_counted_example():
    assert jaccard_distance({1, 2, 3}, {2, 3, 4}) == pytest.approx(0.5)


def test_jaccard_both_empty_errors():
    with pytest.raises(ValidationError):
        jaccard_distance(set(), set())


def test_default_scales_halving_ladder():
    assert default_scales(28) == (16, 8, 4, 2, 1)
    assert default_scales(1) == (1,)
    assert default_scales(8) == (8, 4, 2, 1)


def _repeat_daily(daily_edges, n_days):
    """Stream whose snapshot is identical every day."""
    edges = []
    for t in range(n_days):
        for o, d, w in daily_edges:
            edges.append(TemporalEdge(t, o, d, float(w)))
    nodes = frozenset(u for o, d, _ in daily_edges for u in (o, d))
    return LinkStream(tuple(edges), nodes, 0, n_days - 1, dt.date(2021, 2, 1))


def _two_cliques_bridge_daily():
    import itertools

    left = [f"a{i}" for i in range(4)]
    right = [f"b{i}" for i in range(4)]
    daily = [(u, v, 1.0) for u, v in itertools.combinations(left, 2)]
    daily += [(u, v, 1.0) for u, v in itertools.combinations(right, 2)]
    daily.append((left[-1], right[0], 1.0))
    return daily, left, right


def test_detect_planted_four_blocks():
    spec = four_block_spec(7)
    truth = ground_truth(spec)
    stream = gen_mobility(spec, truth)
    found = detect(stream, DetectionConfig(rng_seed=11))
    majors = major_communities(found, 10, (14, 16))
    assert len(majors) == 4
    for c in majors:
        assert min(jaccard_distance(c.members, b) for b in truth.block_members) <= 0.1
        assert c.t_end - c.t_start + 1 >= 26


def test_detect_time_invariant_two_cliques():
    daily, left, right = _two_cliques_bridge_daily()
    stream = _repeat_daily(daily, 12)
    found = detect(stream, DetectionConfig(rng_seed=1))
    assert len(found) == 2
    assert {c.members for c in found} == {frozenset(left), frozenset(right)}
    top_scale = max(c.scale for c in found)
    for c in found:
        assert c.scale == top_scale  # finer duplicates removed
        assert (c.t_start, c.t_end) == (0, 11)


def test_detect_short_lived_block_fails_persistence():
    daily, left, right = _two_cliques_bridge_daily()
    edges = []
    for t in range(14):
        for o, d, w in daily:
            edges.append(TemporalEdge(t, o, d, float(w)))
    # extra clique only on days 10-11
    extra = [("c0", "c1", 5.0), ("c1", "c2", 5.0), ("c0", "c2", 5.0)]
    for t in (10, 11):
        for o, d, w in extra:
            edges.append(TemporalEdge(t, o, d, w))
    nodes = frozenset(u for e in edges for u in (e.origin, e.dest))
    stream = LinkStream(tuple(edges), nodes, 0, 13, dt.date(2021, 2, 1))
    found = detect(stream, DetectionConfig(rng_seed=1, scales=(1,)))
    assert all("c0" not in c.members for c in found)


def test_detect_stream_too_short_errors():
    stream = _repeat_daily([("a", "b", 1.0)], 2)
    with pytest.raises(ValidationError, match="persistence"):
        detect(stream, DetectionConfig(persistence_steps=3))


def test_detect_quality_is_min_over_supports():
    daily, _, _ = _two_cliques_bridge_daily()
    stream = _repeat_daily(daily, 8)
    for c in detect(stream, DetectionConfig(rng_seed=2)):
        assert c.quality == pytest.approx(min(s.quality for s in c.support))
        assert len(c.support) >= 3


def test_detect_config_validation():
    with pytest.raises(ValidationError):
        DetectionConfig(quality_threshold=1.5)
    with pytest.raises(ValidationError):
        DetectionConfig(scales=(4, 8))
    with pytest.raises(ValidationError):
        DetectionConfig(persistence_steps=0)


def test_major_communities_strict_size_and_span():
    def comm(n, a, b):
        return TemporalCommunity(frozenset(f"t{i}" for i in range(n)), a, b, 4, 0.9)

    assert major_communities([comm(10, 0, 27)], 10, (14, 16)) == []
    assert len(major_communities([comm(11, 14, 20)], 10, (14, 16))) == 1
    assert major_communities([comm(11, 15, 20)], 10, (14, 16)) == []


def test_detect_matches_single_day_louvain_on_time_invariant_stream():
    daily, _, _ = _two_cliques_bridge_daily()
    stream = _repeat_daily(daily, 12)
    cfg = DetectionConfig(rng_seed=9)
    found = detect(stream, cfg)
    day0 = symmetrize(aggregate_window(stream, 0, 0))
    part = louvain(day0, QualityConfig(rng_seed=0))
    day_sets = {frozenset(c) for c in part.communities()}
    assert {c.members for c in found} <= day_sets
