"""Campaign driver: seeded drops, algorithm registry, aggregation, file output.

A campaign runs `drops` independent scenario drops for one configuration and
a list of selector names. Drop d of a campaign with n requesting UEs is
seeded with SeedSequence([master_seed, n, d]), so any drop can be replayed
in isolation and results do not depend on worker count or execution order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .algorithms import benchmark_select, brute_force_select, greedy_select
from .config import SimConfig
from .routing import build_route_set
from .scenario import build_scenario
from .schedule import Evaluator, PowerPolicy

ALGORITHMS = ("benchmark", "greedy", "greedy-pa", "brute", "brute-pa")
DEFAULT_ALGOS = ("benchmark", "greedy", "greedy-pa")


def policy_for(algo: str, cfg: SimConfig) -> PowerPolicy:
    """Power policy a selector runs under.

    The benchmark serves its queue one content at a time. The plain selectors
    model transmitters without power adaptation (configurable between a fixed
    equal split and sequential service); the -pa variants re-split power at
    every start and finish.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r} (choose from {ALGORITHMS})")
    if algo == "benchmark":
        return PowerPolicy.SEQUENTIAL
    if algo.endswith("-pa"):
        return PowerPolicy.DYNAMIC_RESPLIT
    if cfg.wo_pa_policy == "static":
        return PowerPolicy.STATIC_SPLIT
    return PowerPolicy.SEQUENTIAL


@dataclass
class DropResult:
    drop: int
    n: int
    durations: dict              # algo -> {ue: completion time, s}
    meta: dict                   # algo -> counters
    total_routes: int = 0


@dataclass
class CampaignResult:
    cfg: SimConfig
    algos: tuple
    drops: int
    results: list = field(default_factory=list)   # DropResult per drop, in order

    def durations(self, algo: str) -> np.ndarray:
        """Per-UE completion times across all drops, in (drop, ue) order."""
        out = []
        for res in self.results:
            d = res.durations[algo]
            out.extend(d[ue] for ue in sorted(d))
        return np.array(out)

    def mean(self, algo: str) -> float:
        return float(self.durations(algo).mean())

    def rows(self):
        """Flat (drop, n, algo, policy, ue, duration_s) tuples."""
        for res in self.results:
            for algo in self.algos:
                policy = policy_for(algo, self.cfg).name.lower()
                d = res.durations[algo]
                for ue in sorted(d):
                    yield (res.drop, res.n, algo, policy, ue, d[ue])


def drop_seed(cfg: SimConfig, drop_index: int) -> np.random.SeedSequence:
    """Seed of one drop; ties a drop to (master seed, N, index) and nothing else."""
    return np.random.SeedSequence([cfg.master_seed, cfg.num_requesting, drop_index])


def run_drop(cfg: SimConfig, drop_index: int,
             algos=DEFAULT_ALGOS) -> DropResult:
    """Build drop `drop_index` and run every selector on it."""
    for algo in algos:
        policy_for(algo, cfg)
    scenario = build_scenario(cfg, drop_seed(cfg, drop_index))
    needs_routes = any(a != "benchmark" for a in algos)
    route_set = build_route_set(scenario) if needs_routes else None

    durations: dict = {}
    meta: dict = {}
    for algo in algos:
        evaluator = Evaluator(scenario, policy_for(algo, cfg))
        if algo == "benchmark":
            assignment = benchmark_select(scenario)
            info = {}
        elif algo.startswith("greedy"):
            assignment, trace = greedy_select(scenario, route_set, evaluator)
            info = {"evaluator_calls": trace.evaluator_calls,
                    "candidate_evaluations": trace.candidate_evaluations,
                    "commits": len(trace.commits)}
        else:
            assignment = brute_force_select(scenario, route_set, evaluator)
            info = {"evaluator_calls": evaluator.calls}
        timeline = evaluator.evaluate(assignment)
        durations[algo] = {ue: timeline.completions[ue] for ue in scenario.requesting}
        meta[algo] = info
    return DropResult(drop=drop_index, n=cfg.num_requesting,
                      durations=durations, meta=meta,
                      total_routes=route_set.total_routes if route_set else 0)


def _drop_task(cfg: SimConfig, algos: tuple, drop_index: int) -> DropResult:
    return run_drop(cfg, drop_index, algos)


def run_campaign(cfg: SimConfig, algos=DEFAULT_ALGOS, drops: int | None = None,
                 workers: int = 1) -> CampaignResult:
    """Run `drops` seeded drops; identical output for any worker count."""
    cfg.validate()
    algos = tuple(algos)
    if drops is None:
        drops = cfg.drops
    if workers > 1:
        import multiprocessing

        with multiprocessing.Pool(workers) as pool:
            results = pool.map(partial(_drop_task, cfg, algos), range(drops))
    else:
        results = [run_drop(cfg, d, algos) for d in range(drops)]
    return CampaignResult(cfg=cfg, algos=algos, drops=drops, results=results)


def sweep(cfg: SimConfig, ns, algos=DEFAULT_ALGOS, drops: int | None = None,
          workers: int = 1) -> dict:
    """Campaigns over a list of requesting-UE counts; returns {n: CampaignResult}."""
    out = {}
    for n in ns:
        out[int(n)] = run_campaign(cfg.replace(num_requesting=int(n)),
                                   algos=algos, drops=drops, workers=workers)
    return out


# ---------------------------------------------------------------------------
# summary statistics

def cdf_at(values, t: float) -> float:
    """Empirical P[value <= t]."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cdf of an empty sample")
    return float(np.mean(values <= t))

def compute_cdf(values, grid=None):
    """Empirical CDF of a sample; returns (points, probabilities).

    Without a grid the CDF is evaluated at the sorted unique sample values.
    """
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("cdf of an empty sample")
    xs = np.unique(values) if grid is None else np.asarray(grid, dtype=float)
    ps = np.searchsorted(values, xs, side="right") / values.size
    return xs, ps


def mean_gain_pct(campaign: CampaignResult, baseline: str, improved: str) -> float:
    """Mean-duration reduction of `improved` relative to `baseline`, percent."""
    mb = campaign.mean(baseline)
    return (mb - campaign.mean(improved)) / mb * 100.0


# ---------------------------------------------------------------------------
# file output; deterministic bytes so replays can be compared directly

def _fmt(x: float) -> str:
    return repr(float(x))


def write_outputs(out_dir, campaigns: dict, cfg: SimConfig) -> list:
    """Write results.csv, means.csv, summary.json and manifest.json.

    `campaigns` maps requesting-UE count to CampaignResult. The manifest
    carries everything needed to reproduce the files byte for byte.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ns = sorted(campaigns)
    algos = campaigns[ns[0]].algos
    drops = campaigns[ns[0]].drops

    results_path = out / "results.csv"
    with results_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["drop", "n", "algo", "policy", "ue", "duration_s"])
        for n in ns:
            for row in campaigns[n].rows():
                w.writerow([row[0], row[1], row[2], row[3], row[4], _fmt(row[5])])

    means_path = out / "means.csv"
    summary: dict = {}
    with means_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "algo", "mean_duration_s", "samples"])
        for n in ns:
            camp = campaigns[n]
            summary[str(n)] = {}
            for algo in camp.algos:
                vals = camp.durations(algo)
                mean = float(vals.mean())
                summary[str(n)][algo] = mean
                w.writerow([n, algo, _fmt(mean), vals.size])

    summary_path = out / "summary.json"
    summary_doc = {"config_hash": cfg.config_hash(), "means": summary}
    summary_path.write_text(json.dumps(summary_doc, indent=2, sort_keys=True) + "\n")

    manifest_path = out / "manifest.json"
    manifest = {
        "config": cfg.to_mapping(),
        "config_hash": cfg.config_hash(),
        "ns": ns,
        "algos": list(algos),
        "drops": drops,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return [results_path, means_path, summary_path, manifest_path]


def load_manifest(path) -> tuple:
    """Read a manifest back into (cfg, ns, algos, drops)."""
    doc = json.loads(Path(path).read_text())
    cfg = SimConfig.from_mapping(doc["config"])
    return cfg, [int(n) for n in doc["ns"]], tuple(doc["algos"]), int(doc["drops"])
