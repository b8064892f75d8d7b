"""Link-level radio model: building blockage, free-space path gain, Shannon rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT_M_S = 299_792_458.0
BLOCKAGE_LOSS_DB = 20.0     # attenuation added per obstructing building
MIN_DISTANCE_M = 1.0        # far-field clamp so the gain model stays <= 0 dB
_PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class NoiseModel:
    """Thermal noise plus distance-independent co-channel interference, in W/Hz."""

    noise_psd_w_hz: float
    interference_psd_w_hz: float

    @property
    def total_psd_w_hz(self) -> float:
        return self.noise_psd_w_hz + self.interference_psd_w_hz

    @classmethod
    def from_config(cls, cfg) -> "NoiseModel":
        return cls(cfg.noise_psd_w_hz, cfg.interference_psd_w_hz)


def fspl_db(distance_m: float, carrier_hz: float) -> float:
    """Free-space path loss in dB; distances below 1 m are clamped to 1 m."""
    d = max(float(distance_m), MIN_DISTANCE_M)
    return 20.0 * math.log10(4.0 * math.pi * d * carrier_hz / SPEED_OF_LIGHT_M_S)


def segment_blocked(a, b, box) -> bool:
    """True when segment a-b touches the closed box (x0, y0, x1, y1, height).

    Grazing contact with a face counts as blocked: the test is conservative.
    """
    lo = (box[0], box[1], 0.0)
    hi = (box[2], box[3], box[4])
    tmin, tmax = 0.0, 1.0
    for axis in range(3):
        d = b[axis] - a[axis]
        if abs(d) < _PARALLEL_EPS:
            if not (lo[axis] <= a[axis] <= hi[axis]):
                return False
            continue
        t1 = (lo[axis] - a[axis]) / d
        t2 = (hi[axis] - a[axis]) / d
        if t1 > t2:
            t1, t2 = t2, t1
        tmin = max(tmin, t1)
        tmax = min(tmax, t2)
        if tmin > tmax:
            return False
    return True


def count_blockages(a, b, buildings) -> int:
    """Number of distinct buildings whose solid box the segment a-b crosses."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return sum(1 for bld in buildings if segment_blocked(a, b, _box_of(bld)))


def _box_of(building):
    if hasattr(building, "x_min"):
        return (building.x_min, building.y_min, building.x_max, building.y_max,
                building.height)
    return tuple(building)


def blockage_matrix(positions: np.ndarray, buildings) -> np.ndarray:
    """Pairwise blockage counts between every pair of node positions.

    Vectorized slab test per building over the full (M, M) segment grid.
    """
    pos = np.asarray(positions, dtype=float)
    m = pos.shape[0]
    counts = np.zeros((m, m), dtype=np.int16)
    if not len(buildings):
        return counts
    a = pos[:, None, :]                      # (M, 1, 3) segment starts
    d = pos[None, :, :] - a                  # (M, M, 3) segment directions
    for building in buildings:
        x0, y0, x1, y1, h = _box_of(building)
        lo = np.array([x0, y0, 0.0])
        hi = np.array([x1, y1, h])
        tmin = np.zeros((m, m))
        tmax = np.ones((m, m))
        hit = np.ones((m, m), dtype=bool)
        for axis in range(3):
            da = d[:, :, axis]
            pa = a[:, :, axis]               # start coordinate, broadcast over columns
            parallel = np.abs(da) < _PARALLEL_EPS
            safe = np.where(parallel, 1.0, da)
            t1 = (lo[axis] - pa) / safe
            t2 = (hi[axis] - pa) / safe
            tlo = np.minimum(t1, t2)
            thi = np.maximum(t1, t2)
            inside = (pa >= lo[axis]) & (pa <= hi[axis])
            tlo = np.where(parallel, np.where(inside, 0.0, np.inf), tlo)
            thi = np.where(parallel, np.where(inside, 1.0, -np.inf), thi)
            tmin = np.maximum(tmin, tlo)
            tmax = np.minimum(tmax, thi)
            hit &= tmin <= tmax
        counts += hit.astype(np.int16)
    np.fill_diagonal(counts, 0)
    return counts


def path_gain(a, b, buildings, carrier_hz: float,
              tx_gain_db: float = 0.0, rx_gain_db: float = 0.0) -> float:
    """Linear power gain of the a->b link including antenna and blockage terms."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dist = float(np.linalg.norm(b - a))
    blocked = count_blockages(a, b, buildings)
    gain_db = (-fspl_db(dist, carrier_hz) + tx_gain_db + rx_gain_db
               - BLOCKAGE_LOSS_DB * blocked)
    return 10.0 ** (gain_db / 10.0)


def gain_matrix(positions: np.ndarray, antenna_gain_db: np.ndarray, buildings,
                carrier_hz: float, blockages: np.ndarray | None = None) -> np.ndarray:
    """Pairwise linear gains; antenna gains add per endpoint, blockage subtracts 20 dB each."""
    pos = np.asarray(positions, dtype=float)
    ant = np.asarray(antenna_gain_db, dtype=float)
    if blockages is None:
        blockages = blockage_matrix(pos, buildings)
    dist = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=2)
    dist = np.maximum(dist, MIN_DISTANCE_M)
    fspl = 20.0 * np.log10(4.0 * math.pi * dist * carrier_hz / SPEED_OF_LIGHT_M_S)
    gain_db = -fspl + ant[:, None] + ant[None, :] - BLOCKAGE_LOSS_DB * blockages
    gains = 10.0 ** (gain_db / 10.0)
    np.fill_diagonal(gains, 0.0)
    return gains


def link_rate(power_w: float, gain: float, bandwidth_hz: float,
              noise: NoiseModel) -> float:
    """Shannon rate in bit/s over one equal-bandwidth channel."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    if power_w < 0 or gain < 0:
        raise ValueError("power and gain must be non-negative")
    snr = power_w * gain / (bandwidth_hz * noise.total_psd_w_hz)
    rate = bandwidth_hz * math.log2(1.0 + snr)
    if not math.isfinite(rate):
        raise ArithmeticError(f"non-finite link rate (snr={snr!r})")
    return rate
