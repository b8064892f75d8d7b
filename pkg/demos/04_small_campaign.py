"""
A small Monte Carlo campaign
============================

Runs seeded drops at a few request counts, prints the mean delivery
durations and the fraction of deliveries finishing within a deadline, and
writes the same CSV/JSON files the command line front end produces. Rerun
it: the files come out byte-identical.
"""
import tempfile
from pathlib import Path

from hopcache import (SimConfig, cdf_at, mean_gain_pct, sweep, write_outputs)

cfg = SimConfig(num_ues=30, num_uavs=2, max_relay_rues=5)
NS = (4, 8, 12)
DROPS = 20

print("A small Monte Carlo campaign")
print("=" * 60)
print(f"{DROPS} drops per point, {len(NS)} request counts, "
      f"algorithms: benchmark / greedy / greedy-pa")

campaigns = sweep(cfg, NS, drops=DROPS)

###############################################################################
# Mean delivery duration
# ----------------------

print(f"\n{'n':>4s} {'benchmark':>12s} {'greedy':>12s} {'greedy-pa':>12s} "
      f"{'gain':>8s}")
for n in NS:
    camp = campaigns[n]
    print(f"{n:4d} {camp.mean('benchmark'):11.2f}s {camp.mean('greedy'):11.2f}s "
          f"{camp.mean('greedy-pa'):11.2f}s "
          f"{mean_gain_pct(camp, 'benchmark', 'greedy-pa'):7.1f}%")

###############################################################################
# Deliveries inside a deadline
# ----------------------------

deadline = 10.0
print(f"\nfraction of deliveries within {deadline:.0f} s:")
for n in NS:
    camp = campaigns[n]
    row = "  ".join(f"{algo} {cdf_at(camp.durations(algo), deadline)*100:5.1f}%"
                    for algo in camp.algos)
    print(f"  n={n:2d}: {row}")

###############################################################################
# Files for downstream plotting
# -----------------------------

out = Path(tempfile.mkdtemp(prefix="hopcache-demo-"))
paths = write_outputs(out, campaigns, cfg)
print(f"\nwrote {len(paths)} files to {out}:")
for p in paths:
    print(f"  {p.name:14s} {p.stat().st_size:7d} bytes")
print("replay with: hopcache replay --manifest", out / "manifest.json",
      "--out", out / "check")
