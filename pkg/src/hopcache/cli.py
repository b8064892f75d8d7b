"""Command line front end.

Subcommands: run (one campaign), sweep (campaigns over a range of requesting
UE counts), replay (reproduce a finished run from its manifest and verify the
bytes), cdf (empirical delivery-time CDF from a results file), validate
(resolve and echo a configuration without running anything).

Files are only ever written under the directory given by --out (or the
HOPCACHE_OUT environment variable). Configuration problems exit with code 2.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .config import ConfigError, SimConfig
from .experiment import (ALGORITHMS, DEFAULT_ALGOS, cdf_at, compute_cdf,
                         load_manifest, run_campaign, write_outputs)
from .experiment import sweep as run_sweep

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def parse_n_list(text: str) -> list:
    """Parse '30', '5,10,20' or '1..30' (commas may mix with ranges)."""
    out = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ".." in token:
            lo_s, hi_s = token.split("..", 1)
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError as exc:
                raise ConfigError(f"bad range {token!r} in --n") from exc
            if hi < lo:
                raise ConfigError(f"empty range {token!r} in --n")
            out.update(range(lo, hi + 1))
        else:
            try:
                out.add(int(token))
            except ValueError as exc:
                raise ConfigError(f"bad value {token!r} in --n") from exc
    if not out:
        raise ConfigError("--n selected no UE counts")
    return sorted(out)


def _parse_overrides(pairs) -> dict:
    mapping: dict = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        key = key.strip()
        if key in mapping:
            raise ConfigError(f"duplicate --set key {key!r}")
        mapping[key] = value.strip()
    return mapping


def _parse_algos(text: str) -> tuple:
    algos = tuple(a.strip() for a in text.split(",") if a.strip())
    if not algos:
        raise ConfigError("--algos selected no algorithms")
    for a in algos:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r} (choose from {ALGORITHMS})")
    return algos


def _build_cfg(args, n: int | None = None) -> SimConfig:
    base = SimConfig()
    if getattr(args, "config", None):
        base = SimConfig.from_file(args.config)
    overrides = _parse_overrides(getattr(args, "set", None))
    if getattr(args, "drops", None) is not None:
        overrides["drops"] = args.drops
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "policy", None):
        overrides["wo_pa_policy"] = args.policy
    if n is not None:
        overrides["num_requesting"] = n
    return SimConfig.from_mapping(overrides, base=base)


def _out_dir(args) -> Path:
    out = getattr(args, "out", None) or os.environ.get("HOPCACHE_OUT")
    if not out:
        raise ConfigError("no output directory: pass --out or set HOPCACHE_OUT")
    return Path(out)


def _cmd_run(args) -> int:
    out = _out_dir(args)
    n = args.n
    cfg = _build_cfg(args, n=n)
    if n is None:
        n = cfg.num_requesting
    algos = _parse_algos(args.algos)
    campaign = run_campaign(cfg, algos=algos, workers=args.workers)
    paths = write_outputs(out, {n: campaign}, cfg)
    for algo in algos:
        print(f"n={n} {algo}: mean {campaign.mean(algo):.6f} s "
              f"over {campaign.drops} drops")
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    out = _out_dir(args)
    ns = parse_n_list(args.n)
    cfg = _build_cfg(args)
    algos = _parse_algos(args.algos)
    campaigns = run_sweep(cfg, ns, algos=algos, workers=args.workers)
    paths = write_outputs(out, campaigns, cfg)
    for n in ns:
        means = "  ".join(f"{a}={campaigns[n].mean(a):.4f}" for a in algos)
        print(f"n={n}: {means}")
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_OK


def _cmd_replay(args) -> int:
    out = _out_dir(args)
    manifest = Path(args.manifest)
    if manifest.is_dir():
        manifest = manifest / "manifest.json"
    if not manifest.is_file():
        raise ConfigError(f"manifest not found: {manifest}")
    cfg, ns, algos, drops = load_manifest(manifest)
    campaigns = {n: run_campaign(cfg.replace(num_requesting=n), algos=algos,
                                 drops=drops, workers=args.workers)
                 for n in ns}
    paths = write_outputs(out, campaigns, cfg)
    original = manifest.parent
    mismatched = []
    compared = 0
    for path in paths:
        ref = original / path.name
        if ref.resolve() == path.resolve() or not ref.is_file():
            continue
        compared += 1
        if ref.read_bytes() != path.read_bytes():
            mismatched.append(path.name)
    if mismatched:
        print(f"replay MISMATCH: {', '.join(mismatched)}", file=sys.stderr)
        return EXIT_FAIL
    if compared:
        print(f"replay verified: {compared} files byte-identical")
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_OK


def _read_durations(path: Path, algo: str, n: int) -> list:
    values = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row["algo"] == algo and int(row["n"]) == n:
                values.append(float(row["duration_s"]))
    return values


def _cmd_cdf(args) -> int:
    path = Path(args.results)
    if path.is_dir():
        path = path / "results.csv"
    if not path.is_file():
        raise ConfigError(f"results file not found: {path}")
    if args.algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {args.algo!r}")
    values = _read_durations(path, args.algo, args.n)
    if not values:
        raise ConfigError(f"no rows for algo={args.algo!r} n={args.n} in {path}")
    if args.at is not None:
        print(repr(cdf_at(values, args.at)))
        return EXIT_OK
    xs, ps = compute_cdf(values)
    print("duration_s,cdf")
    for x, p in zip(xs, ps):
        print(f"{float(x)!r},{float(p)!r}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _build_cfg(args, n=args.n)
    for key, value in cfg.to_mapping().items():
        print(f"{key} = {value!r}")
    print(f"# config_hash = {cfg.config_hash()}")
    return EXIT_OK


def _add_config_flags(p, with_n: bool, n_kind: str = "int"):
    p.add_argument("--config", help="config file of key = value lines")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--drops", type=int, help="drops per campaign")
    p.add_argument("--seed", type=int, help="master seed")
    if with_n:
        if n_kind == "int":
            p.add_argument("--n", type=int, help="requesting UE count")
        else:
            p.add_argument("--n", required=True,
                           help="requesting UE counts: 30, 5,10,20 or 1..30")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopcache",
        description="Monte Carlo simulator for cached-content delivery "
                    "over direct and relayed routes")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one campaign and write results")
    _add_config_flags(p_run, with_n=True)
    p_run.add_argument("--algos", default=",".join(DEFAULT_ALGOS))
    p_run.add_argument("--policy", choices=("static", "sequential"),
                       help="service model behind the non-PA algorithms")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--out", help="output directory (default $HOPCACHE_OUT)")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="campaigns over several UE counts")
    _add_config_flags(p_sweep, with_n=True, n_kind="list")
    p_sweep.add_argument("--algos", default=",".join(DEFAULT_ALGOS))
    p_sweep.add_argument("--policy", choices=("static", "sequential"),
                         help="service model behind the non-PA algorithms")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", help="output directory (default $HOPCACHE_OUT)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_replay = sub.add_parser("replay", help="reproduce a run from its manifest")
    p_replay.add_argument("--manifest", required=True,
                          help="manifest.json (or the directory holding it)")
    p_replay.add_argument("--workers", type=int, default=1)
    p_replay.add_argument("--out", help="output directory (default $HOPCACHE_OUT)")
    p_replay.set_defaults(func=_cmd_replay)

    p_cdf = sub.add_parser("cdf", help="empirical CDF from a results.csv")
    p_cdf.add_argument("--results", required=True,
                       help="results.csv (or the directory holding it)")
    p_cdf.add_argument("--algo", required=True)
    p_cdf.add_argument("--n", type=int, required=True)
    p_cdf.add_argument("--at", type=float,
                       help="print P[duration <= AT] instead of the full curve")
    p_cdf.set_defaults(func=_cmd_cdf)

    p_val = sub.add_parser("validate", help="resolve and echo the configuration")
    _add_config_flags(p_val, with_n=True)
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
