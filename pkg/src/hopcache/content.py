"""Content catalog: Zipf popularity, request sampling, probabilistic cache placement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Catalog:
    """Catalog of contents, most popular first (ids 0..F-1)."""

    popularity: np.ndarray   # (F,) sums to 1, non-increasing
    sizes_bits: np.ndarray   # (F,) per-content size

    @property
    def size(self) -> int:
        return len(self.popularity)


def zipf_popularity(catalog_size: int, gamma: float) -> np.ndarray:
    """Request probability of content f (1-indexed rank): f^-gamma normalized."""
    if catalog_size < 1:
        raise ValueError("catalog_size must be >= 1")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    ranks = np.arange(1, catalog_size + 1, dtype=float)
    weights = ranks ** -gamma
    return weights / weights.sum()


def build_catalog(cfg, rng: np.random.Generator | None = None) -> Catalog:
    """Catalog per the config; sizes are uniform unless a size spread is enabled."""
    popularity = zipf_popularity(cfg.catalog_size, cfg.zipf_gamma)
    if cfg.content_size_max_bits > cfg.content_size_bits:
        if rng is None:
            raise ValueError("heterogeneous content sizes need an rng")
        sizes = rng.uniform(cfg.content_size_bits, cfg.content_size_max_bits,
                            size=cfg.catalog_size)
    else:
        sizes = np.full(cfg.catalog_size, float(cfg.content_size_bits))
    return Catalog(popularity=popularity, sizes_bits=sizes)


def caching_probabilities(popularity: np.ndarray, capacity: int) -> np.ndarray:
    """Per-content cache probabilities q_f = min(1, lam * p_f) with sum(q) = capacity.

    The most popular contents saturate at 1; the scale lam is solved exactly by
    walking the saturation boundary instead of bisecting.
    """
    p = np.asarray(popularity, dtype=float)
    f = len(p)
    if not 0 <= capacity <= f:
        raise ValueError("capacity must lie in [0, catalog size]")
    if capacity == 0:
        return np.zeros(f)
    if capacity == f:
        return np.ones(f)
    order = np.argsort(-p, kind="stable")
    ps = p[order]
    tail = np.concatenate([np.cumsum(ps[::-1])[::-1], [0.0]])  # tail[k] = sum ps[k:]
    q_sorted = None
    for k in range(f):
        if tail[k] <= 0.0:
            break
        lam = (capacity - k) / tail[k]
        if lam * ps[k] <= 1.0:
            q_sorted = np.concatenate([np.ones(k), lam * ps[k:]])
            break
    if q_sorted is None:
        # all mass in the first `capacity` contents
        q_sorted = np.concatenate([np.ones(capacity), np.zeros(f - capacity)])
    q = np.empty(f)
    q[order] = q_sorted
    return q


def place_caches(rng: np.random.Generator, catalog: Catalog, capacity: int,
                 num_caches: int) -> tuple[frozenset, ...]:
    """Sample one cache per UAV: exactly `capacity` distinct contents each.

    Contents are laid out on [0, capacity] as consecutive segments of length
    q_f; one uniform offset u in [0, 1) selects the segments containing
    u, u+1, ..., u+capacity-1. Segment lengths never exceed 1, so the picks
    are always distinct.
    """
    q = caching_probabilities(catalog.popularity, capacity)
    edges = np.concatenate([[0.0], np.cumsum(q)])
    edges[-1] = float(capacity)        # guard cumulative rounding
    caches = []
    for _ in range(num_caches):
        if capacity == 0:
            caches.append(frozenset())
            continue
        u = rng.random()
        points = u + np.arange(capacity)
        picks = np.searchsorted(edges, points, side="right") - 1
        picks = np.minimum(picks, catalog.size - 1)
        chosen = frozenset(int(f) for f in picks)
        if len(chosen) != capacity:
            raise AssertionError("cache placement produced duplicate contents")
        caches.append(chosen)
    return tuple(caches)


def sample_requests(rng: np.random.Generator, catalog: Catalog, n: int) -> np.ndarray:
    """Draw n independent content requests from the popularity distribution."""
    return rng.choice(catalog.size, size=n, p=catalog.popularity)
