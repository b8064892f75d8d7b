"""Route enumeration and pruning between caching sources and requesting UEs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import GBS_ID, Scenario


@dataclass(frozen=True)
class Route:
    """Delivery chain: (source, relay..., ue). Transmitters are chain[:-1]."""

    ue: int
    content: int
    chain: tuple

    def __post_init__(self):
        if len(self.chain) < 2:
            raise ValueError("route chain needs a source and the UE")
        if self.chain[-1] != self.ue:
            raise ValueError("route chain must end at the requesting UE")
        if len(set(self.chain)) != len(self.chain):
            raise ValueError("route chain nodes must be distinct")

    @property
    def hop_count(self) -> int:
        return len(self.chain) - 1

    @property
    def transmitters(self) -> tuple:
        return self.chain[:-1]

    @property
    def sort_key(self) -> tuple:
        return (self.hop_count, self.chain)


def source_options(content_id: int, scenario: Scenario) -> list:
    """Nodes that can originate the content: the GBS plus every caching UAV."""
    sources = [GBS_ID]
    for k, cache in enumerate(scenario.caches):
        if content_id in cache:
            sources.append(1 + k)
    return sources


def relay_pool(ue: int, content_id: int, scenario: Scenario) -> list:
    """Relay candidates: UAVs and RUEs that are not sources of this content.

    A caching UAV never relays its own content (the direct route from it always
    finishes sooner), so sources are excluded from the pool. When
    cfg.max_relay_rues > 0 only that many RUEs nearest to the UE qualify.
    """
    sources = set(source_options(content_id, scenario))
    pool = [u for u in scenario.uav_ids if u not in sources]
    rues = [r for r in scenario.rues if r not in sources]
    cap = scenario.cfg.max_relay_rues
    if cap and len(rues) > cap:
        ue_pos = scenario.positions[ue]
        dists = [(float(np.linalg.norm(scenario.positions[r] - ue_pos)), r)
                 for r in rues]
        dists.sort()
        rues = sorted(r for _, r in dists[:cap])
    return pool + rues


def enumerate_routes(ue: int, content_id: int, scenario: Scenario,
                     h_max: int | None = None) -> list:
    """Every route with up to h_max hops, in canonical (hop count, chain) order."""
    h_max = scenario.cfg.max_hops if h_max is None else h_max
    if not 1 <= h_max <= 3:
        raise ValueError("h_max must be 1, 2, or 3")
    sources = source_options(content_id, scenario)
    pool = relay_pool(ue, content_id, scenario)
    routes = [Route(ue, content_id, (s, ue)) for s in sources]
    if h_max >= 2:
        for s in sources:
            for r in pool:
                routes.append(Route(ue, content_id, (s, r, ue)))
    if h_max >= 3:
        for s in sources:
            for r1 in pool:
                for r2 in pool:
                    if r1 != r2:
                        routes.append(Route(ue, content_id, (s, r1, r2, ue)))
    routes.sort(key=lambda r: r.sort_key)
    return routes


def prune_routes(routes: list, scenario: Scenario) -> list:
    """Drop multi-hop routes with any hop slower (solo, full power) than the
    best direct route; direct routes always survive."""
    directs = [r for r in routes if r.hop_count == 1]
    if not directs:
        raise ValueError("route list must contain at least one direct route")
    best_direct = min(_solo_hop_durations(r, scenario)[0] for r in directs)
    kept = []
    for route in routes:
        if route.hop_count == 1:
            kept.append(route)
        elif max(_solo_hop_durations(route, scenario)) <= best_direct:
            kept.append(route)
    kept.sort(key=lambda r: r.sort_key)
    return kept


def _solo_hop_durations(route: Route, scenario: Scenario) -> list:
    size = float(scenario.catalog.sizes_bits[route.content])
    rates = scenario.full_power_rate_matrix()
    out = []
    for tx, rx in zip(route.chain[:-1], route.chain[1:]):
        rate = rates[tx, rx]
        # size * (1/rate) keeps the arithmetic bit-identical with build_route_set
        out.append(size * (1.0 / rate) if rate > 0 else float("inf"))
    return out


@dataclass
class UERoutes:
    """Pruned route options of one requesting UE, direct routes first.

    Multi-hop chains are kept as a compact array (source, relay1, relay2) with
    -1 marking the absent second relay; they materialize into Route objects on
    demand.
    """

    ue: int
    content: int
    direct: list
    mh_chains: np.ndarray      # (n, 3) int32
    mh_solo_sums: np.ndarray   # (n,) full-power store-and-forward duration
    best_direct_solo: float

    @property
    def mh_count(self) -> int:
        return len(self.mh_chains)

    @property
    def route_count(self) -> int:
        return len(self.direct) + self.mh_count

    def mh_route(self, i: int) -> Route:
        s, r1, r2 = (int(v) for v in self.mh_chains[i])
        chain = (s, r1, self.ue) if r2 < 0 else (s, r1, r2, self.ue)
        return Route(self.ue, self.content, chain)

    def all_routes(self) -> list:
        return list(self.direct) + [self.mh_route(i) for i in range(self.mh_count)]


@dataclass
class RouteSet:
    """Pruned route options for every requesting UE of a drop."""

    per_ue: dict               # ue node id -> UERoutes

    @property
    def total_routes(self) -> int:
        return sum(r.route_count for r in self.per_ue.values())

    def routes_for(self, ue: int) -> list:
        return self.per_ue[ue].all_routes()


def build_route_set(scenario: Scenario, prune: bool = True) -> RouteSet:
    """Enumerate-and-prune in one vectorized pass per requesting UE."""
    rates = scenario.full_power_rate_matrix()
    per_ue = {}
    h_max = scenario.cfg.max_hops
    with np.errstate(divide="ignore"):
        inv_rate = np.where(rates > 0, 1.0 / np.maximum(rates, 1e-300), np.inf)
    for ue in scenario.requesting:
        f = scenario.requests[ue]
        size = float(scenario.catalog.sizes_bits[f])
        sources = source_options(f, scenario)
        pool = np.array(relay_pool(ue, f, scenario), dtype=np.int32)
        direct = sorted((Route(ue, f, (s, ue)) for s in sources),
                        key=lambda r: r.sort_key)
        t_direct = size * inv_rate[sources, ue]
        best = float(t_direct.min())
        limit = best if prune else np.inf

        chains = []
        solos = []
        if h_max >= 2 and len(pool):
            d_r_ue = size * inv_rate[pool, ue]          # relay -> ue
            ok_to_ue = d_r_ue <= limit
            for s in sources:
                d_s_r = size * inv_rate[s, pool]
                mask = (d_s_r <= limit) & ok_to_ue
                for idx in np.nonzero(mask)[0]:
                    chains.append((s, pool[idx], -1))
                    solos.append(d_s_r[idx] + d_r_ue[idx])
            if h_max >= 3 and len(pool) >= 2:
                d_rr = size * inv_rate[np.ix_(pool, pool)]
                adj = d_rr <= limit
                np.fill_diagonal(adj, False)
                hop3 = adj & ok_to_ue[None, :]
                for s in sources:
                    d_s_r = size * inv_rate[s, pool]
                    first_ok = d_s_r <= limit
                    full = first_ok[:, None] & hop3
                    for i, j in np.argwhere(full):
                        chains.append((s, pool[i], pool[j]))
                        solos.append(d_s_r[i] + d_rr[i, j] + d_r_ue[j])
        if chains:
            mh_chains = np.array(chains, dtype=np.int32)
            mh_solos = np.array(solos, dtype=float)
            # canonical order: 2-hop before 3-hop, then lexicographic chain
            hops = np.where(mh_chains[:, 2] < 0, 2, 3)
            order = np.lexsort((mh_chains[:, 2], mh_chains[:, 1],
                                mh_chains[:, 0], hops))
            mh_chains = mh_chains[order]
            mh_solos = mh_solos[order]
        else:
            mh_chains = np.empty((0, 3), dtype=np.int32)
            mh_solos = np.empty(0)
        per_ue[ue] = UERoutes(ue=ue, content=f, direct=direct,
                              mh_chains=mh_chains, mh_solo_sums=mh_solos,
                              best_direct_solo=best)
    return RouteSet(per_ue=per_ue)
