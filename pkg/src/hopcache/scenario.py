"""Drop generation: building grid, node placement, K-means UAV positioning."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel, content as content_mod
from .config import ConfigError, SimConfig, building_grid_cells

NODE_GBS = 0
NODE_UAV = 1
NODE_UE = 2

GBS_ID = 0


@dataclass(frozen=True)
class Building:
    """Axis-aligned solid box footprint from ground level up to `height`."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    height: float

    def contains_xy(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass(frozen=True)
class NodeSet:
    """3-D coordinates of every radio node in one drop."""

    gbs: np.ndarray              # (3,)
    uavs: np.ndarray             # (K, 3)
    requesting_ues: np.ndarray   # (N, 3)
    relay_ues: np.ndarray        # (U - N, 3)


@dataclass
class Scenario:
    """Immutable snapshot of one drop: geometry, caches, requests, link gains.

    Node ids: 0 = GBS, 1..K = UAVs, then requesting UEs, then relay UEs.
    """

    cfg: SimConfig
    buildings: list[Building]
    nodes: NodeSet
    positions: np.ndarray        # (M, 3) indexed by node id
    kinds: np.ndarray            # (M,) NODE_* codes
    antenna_gain_db: np.ndarray  # (M,)
    p_max_w: np.ndarray          # (M,)
    requesting: tuple            # node ids of requesting UEs
    rues: tuple                  # node ids of relay-capable UEs
    catalog: content_mod.Catalog
    caches: tuple                # frozenset of content ids per UAV
    requests: dict               # requesting node id -> content id
    noise: channel.NoiseModel
    blockages: np.ndarray        # (M, M) building counts
    gains: np.ndarray            # (M, M) linear
    _coef: np.ndarray | None = field(default=None, repr=False)
    _full_rate: np.ndarray | None = field(default=None, repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.positions)

    @property
    def uav_ids(self) -> tuple:
        return tuple(range(1, 1 + self.cfg.num_uavs))

    @property
    def bandwidth_per_ue_hz(self) -> float:
        return self.cfg.bandwidth_hz / len(self.requesting)

    def gain(self, a: int, b: int) -> float:
        return float(self.gains[a, b])

    def coef_matrix(self) -> np.ndarray:
        """coef[a, b] such that rate(a->b at power p) = B_n * log2(1 + coef * p)."""
        if self._coef is None:
            denom = self.bandwidth_per_ue_hz * self.noise.total_psd_w_hz
            self._coef = self.gains / denom
        return self._coef

    def full_power_rate_matrix(self) -> np.ndarray:
        """rate[a, b] in bit/s when a transmits to b alone at its full power."""
        if self._full_rate is None:
            bn = self.bandwidth_per_ue_hz
            snr = self.coef_matrix() * self.p_max_w[:, None]
            self._full_rate = bn * np.log2(1.0 + snr)
        return self._full_rate

    def full_power_rate(self, a: int, b: int) -> float:
        return float(self.full_power_rate_matrix()[a, b])

    def solo_duration(self, a: int, b: int, content_id: int) -> float:
        """Single-hop duration at full power with no contention."""
        rate = self.full_power_rate(a, b)
        if rate <= 0:
            return float("inf")
        return float(self.catalog.sizes_bits[content_id]) / rate

    def snapshot_text(self) -> str:
        """Deterministic textual serialization of the whole drop."""
        lines = ["[config]"]
        for key, value in sorted(self.cfg.to_mapping().items()):
            lines.append(f"{key} = {value!r}")
        lines.append("[buildings]")
        for i, b in enumerate(self.buildings):
            lines.append(f"{i} {b.x_min!r} {b.y_min!r} {b.x_max!r} {b.y_max!r} {b.height!r}")
        lines.append("[nodes]")
        for nid in range(self.num_nodes):
            x, y, z = self.positions[nid]
            lines.append(f"{nid} kind={int(self.kinds[nid])} {x!r} {y!r} {z!r}")
        lines.append(f"requesting = {list(self.requesting)!r}")
        lines.append("[caches]")
        for k, cache in enumerate(self.caches):
            lines.append(f"uav{k + 1} = {sorted(cache)!r}")
        lines.append("[requests]")
        for nid in sorted(self.requests):
            lines.append(f"{nid} -> {self.requests[nid]}")
        return "\n".join(lines) + "\n"

    def gains_csv_rows(self):
        """(tx, rx, distance_m, blockages, gain_db) per ordered node pair."""
        for a in range(self.num_nodes):
            for b in range(self.num_nodes):
                if a == b:
                    continue
                dist = float(np.linalg.norm(self.positions[b] - self.positions[a]))
                gain = self.gains[a, b]
                gain_db = 10.0 * np.log10(gain) if gain > 0 else float("-inf")
                yield a, b, dist, int(self.blockages[a, b]), gain_db


def generate_buildings(rng: np.random.Generator, cfg: SimConfig) -> list[Building]:
    """Jittered Manhattan grid: square blocks separated by streets, random heights."""
    if cfg.building_count == 0:
        return []
    cells = building_grid_cells(cfg)
    if cells < 1 or cfg.building_count > cells * cells:
        raise ConfigError(
            f"building_count ({cfg.building_count}) exceeds the {cells}x{cells} "
            "grid that fits the area")
    pitch = cfg.building_size_m + cfg.street_width_m
    used = cells * cfg.building_size_m + (cells - 1) * cfg.street_width_m
    margin = (cfg.area_side_m - used) / 2.0
    chosen = np.sort(rng.permutation(cells * cells)[:cfg.building_count])
    jitter_amp = min(cfg.street_width_m / 4.0, margin) if cfg.street_width_m > 0 else 0.0
    jitter = rng.uniform(-jitter_amp, jitter_amp, size=(cfg.building_count, 2))
    heights = rng.uniform(cfg.building_height_min_m, cfg.building_height_max_m,
                          size=cfg.building_count)
    buildings = []
    for idx, cell in enumerate(chosen):
        i, j = divmod(int(cell), cells)
        x0 = margin + i * pitch + jitter[idx, 0]
        y0 = margin + j * pitch + jitter[idx, 1]
        buildings.append(Building(
            x_min=float(x0), y_min=float(y0),
            x_max=float(x0 + cfg.building_size_m),
            y_max=float(y0 + cfg.building_size_m),
            height=float(heights[idx])))
    return buildings


def _sample_free_ground(rng: np.random.Generator, cfg: SimConfig,
                        buildings: list[Building], count: int) -> np.ndarray:
    """Uniform (x, y) points over the area outside every building footprint."""
    points = np.empty((count, 2))
    have = 0
    attempts = 0
    while have < count:
        attempts += 1
        if attempts > 1000:
            raise ConfigError("could not find free ground space for UE placement")
        batch = rng.uniform(0.0, cfg.area_side_m, size=(max(4 * count, 64), 2))
        free = np.ones(len(batch), dtype=bool)
        for b in buildings:
            free &= ~((batch[:, 0] >= b.x_min) & (batch[:, 0] <= b.x_max)
                      & (batch[:, 1] >= b.y_min) & (batch[:, 1] <= b.y_max))
        good = batch[free]
        take = min(len(good), count - have)
        points[have:have + take] = good[:take]
        have += take
    return points


def kmeans_xy(points: np.ndarray, k: int, rng: np.random.Generator,
              max_iter: int = 100, tol: float = 1e-6):
    """Plain Lloyd's algorithm with k-means++ seeding.

    Returns (centroids (k, 2), sse_history). Empty clusters are re-seeded with
    the point currently farthest from its assigned centroid.
    """
    pts = np.asarray(points, dtype=float)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(np.unique(pts, axis=0)) < k:
        raise ConfigError(f"k-means needs at least {k} distinct points")

    # k-means++ seeding
    centers = np.empty((k, 2))
    centers[0] = pts[rng.integers(len(pts))]
    d2 = ((pts - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = pts[rng.integers(len(pts))]
        else:
            centers[c] = pts[rng.choice(len(pts), p=d2 / total)]
        d2 = np.minimum(d2, ((pts - centers[c]) ** 2).sum(axis=1))

    sse_history = []
    for _ in range(max_iter):
        dist2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = dist2.argmin(axis=1)
        # re-seed empty clusters with the worst-fitted point
        for c in range(k):
            if not (assign == c).any():
                worst = dist2[np.arange(len(pts)), assign].argmax()
                assign[worst] = c
                dist2[worst, c] = 0.0
        sse_history.append(float(dist2[np.arange(len(pts)), assign].sum()))
        new_centers = np.array([pts[assign == c].mean(axis=0) for c in range(k)])
        move = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        if move < tol:
            break
    return centers, sse_history


def kmeans_uav_placement(ue_positions: np.ndarray, k: int, rng: np.random.Generator,
                         altitude: float = 100.0, max_iter: int = 100,
                         tol: float = 1e-6) -> np.ndarray:
    """UAV hover points: K-means centroids of the UE ground positions, lifted."""
    centers, _ = kmeans_xy(np.asarray(ue_positions)[:, :2], k, rng, max_iter, tol)
    return np.column_stack([centers, np.full(k, float(altitude))])


def place_nodes(rng: np.random.Generator, cfg: SimConfig,
                buildings: list[Building]) -> NodeSet:
    """Fixed GBS, uniformly placed UEs on free ground, K-means-placed UAVs."""
    gbs = np.array([cfg.gbs_x_m, cfg.gbs_y_m, cfg.gbs_height_m])
    ue_xy = _sample_free_ground(rng, cfg, buildings, cfg.num_ues)
    ues = np.column_stack([ue_xy, np.full(cfg.num_ues, cfg.ue_height_m)])
    if cfg.num_uavs > 0:
        uavs = kmeans_uav_placement(ues, cfg.num_uavs, rng,
                                    altitude=cfg.uav_height_m,
                                    max_iter=cfg.kmeans_max_iter,
                                    tol=cfg.kmeans_tol_m)
    else:
        uavs = np.empty((0, 3))
    order = rng.permutation(cfg.num_ues)
    requesting_idx = order[:cfg.num_requesting]
    chosen = np.zeros(cfg.num_ues, dtype=bool)
    chosen[requesting_idx] = True
    relay_idx = np.nonzero(~chosen)[0]
    return NodeSet(gbs=gbs, uavs=uavs,
                   requesting_ues=ues[requesting_idx],
                   relay_ues=ues[relay_idx] if len(relay_idx) else np.empty((0, 3)))


def build_scenario(cfg: SimConfig, seed) -> Scenario:
    """Generate one full drop from a seed (int or numpy SeedSequence)."""
    cfg.validate()
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    s_build, s_nodes, s_catalog, s_caches, s_requests = ss.spawn(5)

    buildings = generate_buildings(np.random.default_rng(s_build), cfg)
    nodes = place_nodes(np.random.default_rng(s_nodes), cfg, buildings)
    catalog = content_mod.build_catalog(cfg, np.random.default_rng(s_catalog))
    caches = content_mod.place_caches(np.random.default_rng(s_caches), catalog,
                                      cfg.cache_capacity, cfg.num_uavs)

    k, n = cfg.num_uavs, cfg.num_requesting
    positions = np.vstack([nodes.gbs[None, :], nodes.uavs,
                           nodes.requesting_ues, nodes.relay_ues])
    kinds = np.array([NODE_GBS] + [NODE_UAV] * k + [NODE_UE] * cfg.num_ues,
                     dtype=np.int8)
    antenna = np.where(kinds == NODE_UE, 0.0, cfg.antenna_gain_gbs_uav_db)
    p_max = np.choose(kinds, [cfg.p_max_gbs_w, cfg.p_max_uav_w, cfg.p_max_rue_w])
    requesting = tuple(range(1 + k, 1 + k + n))
    rues = tuple(range(1 + k + n, 1 + k + cfg.num_ues))

    contents = content_mod.sample_requests(np.random.default_rng(s_requests), catalog, n)
    requests = {nid: int(f) for nid, f in zip(requesting, contents)}

    blockages = channel.blockage_matrix(positions, buildings)
    gains = channel.gain_matrix(positions, antenna, buildings, cfg.carrier_hz,
                                blockages=blockages)
    return Scenario(cfg=cfg, buildings=buildings, nodes=nodes, positions=positions,
                    kinds=kinds, antenna_gain_db=antenna, p_max_w=p_max,
                    requesting=requesting, rues=rues, catalog=catalog, caches=caches,
                    requests=requests, noise=channel.NoiseModel.from_config(cfg),
                    blockages=blockages, gains=gains)
