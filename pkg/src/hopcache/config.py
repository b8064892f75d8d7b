"""Simulation parameter set, file ingestion, validation, and unit helpers."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    """Invalid configuration value, file, or combination of values."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SimConfig:
    """One cell drop's parameter set.

    Power and noise figures are stored in dB/dBm exactly as configured;
    linear-unit views are exposed through the helper properties.
    """

    # geometry
    area_side_m: float = 500.0
    gbs_x_m: float = 235.0
    gbs_y_m: float = 265.0
    gbs_height_m: float = 35.0
    uav_height_m: float = 100.0
    ue_height_m: float = 1.5

    # population
    num_uavs: int = 4                 # K
    num_ues: int = 100                # U, requesting + relay-capable
    num_requesting: int = 10          # N

    # radio
    bandwidth_hz: float = 20e6        # B, split equally across requesting UEs
    carrier_hz: float = 2e9
    p_max_gbs_dbm: float = 30.0
    p_max_uav_dbm: float = 27.0
    p_max_rue_dbm: float = 23.0
    antenna_gain_gbs_uav_db: float = 3.0   # UE ends contribute 0 dB
    noise_psd_dbm_hz: float = -174.0
    interference_psd_dbm_hz: float = -130.0

    # content
    catalog_size: int = 50            # F
    cache_capacity: int = 10          # C per UAV
    zipf_gamma: float = 0.5
    content_size_bits: float = 1e7
    content_size_max_bits: float = 0.0   # >base enables per-content uniform sizes

    # buildings
    building_count: int = 25
    building_size_m: float = 60.0
    street_width_m: float = 40.0
    building_height_min_m: float = 20.0
    building_height_max_m: float = 29.0

    # routing and algorithms
    max_hops: int = 3                 # H_max
    max_relay_rues: int = 0           # 0 = every RUE may relay, else k nearest per UE
    brute_force_budget: int = 10_000_000
    benchmark_bias_gbs_db: float = 0.0
    benchmark_bias_uav_db: float = 0.0
    wo_pa_policy: str = "static"      # policy behind the *-without-PA algorithm names

    # clustering
    kmeans_max_iter: int = 100
    kmeans_tol_m: float = 1e-6

    # campaign
    drops: int = 1000
    master_seed: int = 1

    # ---- linear-unit helpers -------------------------------------------------

    @property
    def p_max_gbs_w(self) -> float:
        return dbm_to_watts(self.p_max_gbs_dbm)

    @property
    def p_max_uav_w(self) -> float:
        return dbm_to_watts(self.p_max_uav_dbm)

    @property
    def p_max_rue_w(self) -> float:
        return dbm_to_watts(self.p_max_rue_dbm)

    @property
    def noise_psd_w_hz(self) -> float:
        return dbm_to_watts(self.noise_psd_dbm_hz)

    @property
    def interference_psd_w_hz(self) -> float:
        return dbm_to_watts(self.interference_psd_dbm_hz)

    @property
    def bandwidth_per_ue_hz(self) -> float:
        return self.bandwidth_hz / self.num_requesting

    @property
    def num_relay_ues(self) -> int:
        return self.num_ues - self.num_requesting

    # ---- validation ----------------------------------------------------------

    def validate(self) -> None:
        """Raise ConfigError listing every violated constraint."""
        problems: list[str] = []

        def need(cond: bool, msg: str) -> None:
            if not cond:
                problems.append(msg)

        need(self.area_side_m > 0, "area_side_m must be positive")
        need(self.num_uavs >= 0, "num_uavs must be >= 0")
        need(self.num_ues >= 1, "num_ues must be >= 1")
        need(self.num_requesting >= 1, "num_requesting must be >= 1")
        need(self.num_requesting <= self.num_ues,
             f"num_requesting ({self.num_requesting}) exceeds num_ues ({self.num_ues})")
        need(self.num_uavs <= self.num_ues,
             f"num_uavs ({self.num_uavs}) exceeds num_ues ({self.num_ues}); "
             "clustering needs at least one UE per UAV")
        need(self.bandwidth_hz > 0, "bandwidth_hz must be positive")
        need(self.carrier_hz > 0, "carrier_hz must be positive")
        need(self.catalog_size >= 1, "catalog_size must be >= 1")
        need(0 <= self.cache_capacity <= self.catalog_size,
             f"cache_capacity ({self.cache_capacity}) must lie in [0, catalog_size]")
        need(self.zipf_gamma >= 0, "zipf_gamma must be >= 0")
        need(self.content_size_bits > 0, "content_size_bits must be positive")
        need(self.content_size_max_bits == 0
             or self.content_size_max_bits >= self.content_size_bits,
             "content_size_max_bits must be 0 (uniform sizes) or >= content_size_bits")
        need(1 <= self.max_hops <= 3, "max_hops must be 1, 2, or 3")
        need(self.max_relay_rues >= 0, "max_relay_rues must be >= 0 (0 = unlimited)")
        need(self.brute_force_budget >= 1, "brute_force_budget must be >= 1")
        need(self.wo_pa_policy in ("static", "sequential"),
             "wo_pa_policy must be 'static' or 'sequential'")
        need(self.building_count >= 0, "building_count must be >= 0")
        need(self.building_size_m > 0, "building_size_m must be positive")
        need(self.street_width_m >= 0, "street_width_m must be >= 0")
        need(0 < self.building_height_min_m <= self.building_height_max_m,
             "building heights must satisfy 0 < min <= max")
        need(self.uav_height_m > self.building_height_max_m,
             "uav_height_m must exceed the tallest building")
        need(self.ue_height_m >= 0, "ue_height_m must be >= 0")
        need(0 <= self.gbs_x_m <= self.area_side_m and 0 <= self.gbs_y_m <= self.area_side_m,
             "GBS position must lie inside the area")
        need(self.kmeans_max_iter >= 1, "kmeans_max_iter must be >= 1")
        need(self.kmeans_tol_m > 0, "kmeans_tol_m must be positive")
        need(self.drops >= 1, "drops must be >= 1")

        if self.building_count > 0:
            cells = building_grid_cells(self)
            need(self.building_count <= cells * cells,
                 f"building_count ({self.building_count}) exceeds the "
                 f"{cells}x{cells} grid cells that fit the area")

        if problems:
            raise ConfigError("; ".join(problems))

    def replace(self, **changes) -> "SimConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    # ---- serialization ---------------------------------------------------------

    def to_mapping(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_mapping(cls, mapping: dict, *, base: "SimConfig | None" = None) -> "SimConfig":
        """Build a config from a flat key/value mapping; unknown keys are errors."""
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(mapping) - set(known))
        if unknown:
            raise ConfigError("unknown config keys: " + ", ".join(unknown))
        values = (base or cls()).to_mapping()
        for key, raw in mapping.items():
            values[key] = _coerce(key, raw, known[key].type)
        cfg = cls(**values)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path, *, base: "SimConfig | None" = None) -> "SimConfig":
        return cls.from_mapping(parse_config_text(Path(path).read_text()), base=base)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_mapping(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def building_grid_cells(cfg: SimConfig) -> int:
    """How many building cells fit per side of the jittered street grid."""
    pitch = cfg.building_size_m + cfg.street_width_m
    return int((cfg.area_side_m + cfg.street_width_m) // pitch)


def _coerce(key: str, raw, type_name) -> object:
    # dataclass field types arrive as strings under `from __future__ import annotations`
    tname = type_name if isinstance(type_name, str) else getattr(type_name, "__name__", str(type_name))
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        if tname == "int":
            if isinstance(raw, bool):
                raise ValueError("booleans are not valid integers")
            if isinstance(raw, float):
                if raw != int(raw):
                    raise ValueError("fractional value for integer key")
                return int(raw)
            if isinstance(raw, int):
                return raw
            as_float = float(raw)
            if as_float != int(as_float):
                raise ValueError("fractional value for integer key")
            return int(as_float)
        if tname == "float":
            return float(raw)
        if tname == "str":
            return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from exc
    raise ConfigError(f"unsupported config field type for {key!r}: {tname}")


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment, blank lines are skipped."""
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in mapping:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value.strip()
    return mapping
