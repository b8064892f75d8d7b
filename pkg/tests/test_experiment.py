import json

import numpy as np
import pytest

from hopcache.config import SimConfig
from hopcache.experiment import (ALGORITHMS, DEFAULT_ALGOS, cdf_at,
                                 compute_cdf, load_manifest, mean_gain_pct,
                                 policy_for, run_campaign, run_drop, sweep,
                                 write_outputs)
from hopcache.schedule import PowerPolicy

EXP = SimConfig(num_requesting=3, num_ues=12, num_uavs=2, max_relay_rues=3)


def test_policy_for_mapping():
    cfg = EXP
    assert policy_for("benchmark", cfg) is PowerPolicy.SEQUENTIAL
    assert policy_for("greedy", cfg) is PowerPolicy.STATIC_SPLIT
    assert policy_for("brute", cfg) is PowerPolicy.STATIC_SPLIT
    assert policy_for("greedy-pa", cfg) is PowerPolicy.DYNAMIC_RESPLIT
    assert policy_for("brute-pa", cfg) is PowerPolicy.DYNAMIC_RESPLIT

    seq = cfg.replace(wo_pa_policy="sequential")
    assert policy_for("greedy", seq) is PowerPolicy.SEQUENTIAL
    assert policy_for("greedy-pa", seq) is PowerPolicy.DYNAMIC_RESPLIT

    with pytest.raises(ValueError, match="unknown algorithm"):
        policy_for("simulated-annealing", cfg)


def test_run_drop_is_deterministic():
    a = run_drop(EXP, 2)
    b = run_drop(EXP, 2)
    assert a.durations == b.durations
    assert a.total_routes == b.total_routes
    assert a.meta == b.meta
    assert set(a.durations) == set(DEFAULT_ALGOS)
    for algo in DEFAULT_ALGOS:
        assert len(a.durations[algo]) == EXP.num_requesting


def test_campaign_prefix_stability():
    # adding drops must not disturb earlier ones: drop index seeds the drop
    short = run_campaign(EXP, drops=3)
    long = run_campaign(EXP, drops=5)
    for i in range(3):
        assert short.results[i].durations == long.results[i].durations


def test_campaign_worker_count_is_invisible():
    serial = run_campaign(EXP, drops=4, workers=1)
    parallel = run_campaign(EXP, drops=4, workers=2)
    for a, b in zip(serial.results, parallel.results):
        assert a.durations == b.durations
        assert a.drop == b.drop


def test_campaign_durations_ordering():
    camp = run_campaign(EXP, drops=3)
    vals = camp.durations("greedy")
    assert vals.shape == (3 * EXP.num_requesting,)
    flat = []
    for res in camp.results:
        d = res.durations["greedy"]
        flat.extend(d[ue] for ue in sorted(d))
    assert vals.tolist() == flat
    assert camp.mean("greedy") == pytest.approx(np.mean(flat))


def test_sweep_runs_each_n():
    camps = sweep(EXP, [2, 3], drops=2)
    assert sorted(camps) == [2, 3]
    for n, camp in camps.items():
        assert camp.cfg.num_requesting == n
        assert camp.drops == 2
        assert camp.durations("benchmark").shape == (2 * n,)


def test_cdf_at():
    vals = [1.0, 2.0, 3.0, 4.0]
    assert cdf_at(vals, 2.5) == 0.5
    assert cdf_at(vals, 4.0) == 1.0
    assert cdf_at(vals, 0.9) == 0.0
    with pytest.raises(ValueError):
        cdf_at([], 1.0)


def test_compute_cdf():
    xs, ps = compute_cdf([3.0, 1.0, 2.0, 2.0])
    assert xs.tolist() == [1.0, 2.0, 3.0]
    assert ps.tolist() == [0.25, 0.75, 1.0]
    xs, ps = compute_cdf([3.0, 1.0, 2.0, 2.0], grid=[0.0, 1.5, 2.0, 5.0])
    assert ps.tolist() == [0.0, 0.25, 0.75, 1.0]


def test_mean_gain_pct():
    camp = run_campaign(EXP, drops=2)
    expected = (camp.mean("benchmark") - camp.mean("greedy-pa")) \
        / camp.mean("benchmark") * 100.0
    assert mean_gain_pct(camp, "benchmark", "greedy-pa") == pytest.approx(expected)


def test_write_outputs_deterministic_and_loadable(tmp_path):
    camps = sweep(EXP, [2, 3], drops=2)
    first = tmp_path / "a"
    second = tmp_path / "b"
    paths = write_outputs(first, camps, EXP)
    write_outputs(second, camps, EXP)

    names = sorted(p.name for p in paths)
    assert names == ["manifest.json", "means.csv", "results.csv", "summary.json"]
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()

    rows = (first / "results.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + sum(2 * n * len(DEFAULT_ALGOS) for n in (2, 3))
    means = (first / "means.csv").read_text().strip().splitlines()
    assert len(means) == 1 + 2 * len(DEFAULT_ALGOS)

    cfg, ns, algos, drops = load_manifest(first / "manifest.json")
    assert cfg.to_mapping() == EXP.to_mapping()
    assert ns == [2, 3]
    assert algos == DEFAULT_ALGOS
    assert drops == 2

    summary = json.loads((first / "summary.json").read_text())
    assert summary["config_hash"] == EXP.config_hash()
    assert summary["means"]["3"]["greedy-pa"] == pytest.approx(
        camps[3].mean("greedy-pa"))


def test_run_drop_rejects_unknown_algo_before_work():
    with pytest.raises(ValueError, match="unknown algorithm"):
        run_drop(EXP, 0, algos=("benchmark", "nope"))


def test_algorithm_registry():
    assert set(DEFAULT_ALGOS) <= set(ALGORITHMS)
    assert "brute" in ALGORITHMS and "brute-pa" in ALGORITHMS
