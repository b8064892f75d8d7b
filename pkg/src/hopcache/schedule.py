"""Power-split scheduling: turn a route assignment into per-UE completion times.

All requests start at t = 0. Every hop forwards the full content
(store-and-forward), so hop h+1 of a route starts exactly when hop h
finishes. Transmissions are fluid: a content's instantaneous rate follows the
Shannon formula at its transmitter's current power share, and the simulation
advances between hop-completion events.

Power policies at a transmitter serving several contents at once:

* SEQUENTIAL     - one content at a time at full power; among the contents
                   ready at the node, ascending solo full-power duration goes
                   first (ties by UE id).
* STATIC_SPLIT   - each transmitter partitions its budget equally among all
                   the contents routed through it, once, up front; a content
                   transmits at its reserved share for the whole hop and
                   idle shares are never reallocated.
* DYNAMIC_RESPLIT - equal split over the active set, recomputed at every
                   hop-start and hop-finish event.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import inf, log2

from .routing import Route
from .scenario import GBS_ID, Scenario


class PowerPolicy(enum.Enum):
    SEQUENTIAL = "sequential"
    STATIC_SPLIT = "static"
    DYNAMIC_RESPLIT = "dynamic"


class AssignmentError(ValueError):
    """Assignment breaks a hard constraint (one route per UE, hop budget...)."""


@dataclass(frozen=True)
class JobSpec:
    """One content delivery: the route's hops plus its radio constants.

    hops: tuple of (transmitter node id, rate coefficient); the instantaneous
    rate at power p is bandwidth_hz * log2(1 + coef * p).
    """

    ue: int
    content: int
    size_bits: float
    bandwidth_hz: float
    hops: tuple


@dataclass
class Timeline:
    """Result of one schedule evaluation."""

    policy: PowerPolicy
    completions: dict          # ue -> completion time (s)
    scope: tuple               # ue ids that were simulated
    sizes: dict                # ue -> content size (bits)
    hop_nodes: dict            # ue -> tuple of transmitter node ids
    events: list | None = None      # (t, node, ue, content, kind, power_w)
    intervals: list | None = None   # (t0, t1, node, ue, content, power_w, rate_bps)


def hop_duration(size_bits: float, bandwidth_hz: float, power_w: float,
                 gain: float, noise) -> float:
    """Solo single-hop duration: size / Shannon rate."""
    snr = power_w * gain / (bandwidth_hz * noise.total_psd_w_hz)
    rate = bandwidth_hz * log2(1.0 + snr)
    if rate <= 0:
        return inf
    return size_bits / rate


def sum_duration(timeline: Timeline) -> float:
    """Objective value: total delivery duration over the simulated UEs."""
    return float(sum(timeline.completions.values()))


def simulate_jobs(jobs: list, node_power_w, policy: PowerPolicy,
                  record: bool = False) -> Timeline:
    """Run the event-driven fluid simulation for a list of JobSpecs.

    node_power_w maps node id -> per-node transmit power cap (dict or array).
    Simultaneous events are processed in (node id, content id, ue id) order.
    """
    n = len(jobs)
    sizes = [float(j.size_bits) for j in jobs]
    bandwidths = [float(j.bandwidth_hz) for j in jobs]
    hops = [j.hops for j in jobs]
    ues = [j.ue for j in jobs]
    contents = [j.content for j in jobs]

    hop_idx = [0] * n
    rem = sizes[:]                  # bits left on the current hop
    share = [0.0] * n
    rate = [0.0] * n
    fin = [inf] * n                 # absolute finish estimate; inf = not transmitting
    completions: dict = {}

    active: dict = {}               # node -> [job indices transmitting]
    ready: dict = {}                # node -> [(key, ue, job)] queued (sequential)
    busy: dict = {}                 # node -> job index or None (sequential)

    events = [] if record else None
    intervals = [] if record else None
    open_t = [0.0] * n

    sequential = policy is PowerPolicy.SEQUENTIAL
    dynamic = policy is PowerPolicy.DYNAMIC_RESPLIT

    def power_of(node: int) -> float:
        return float(node_power_w[node])

    static_share: dict = {}
    if policy is PowerPolicy.STATIC_SPLIT:
        count: dict = {}
        for j in range(n):
            for node, _ in hops[j]:
                count[node] = count.get(node, 0) + 1
        static_share = {node: power_of(node) / c for node, c in count.items()}

    def set_power(j: int, p: float, t: float) -> None:
        if p == share[j] and fin[j] < inf:
            return
        if record and share[j] > 0.0 and fin[j] < inf and t > open_t[j]:
            node = hops[j][hop_idx[j]][0]
            intervals.append((open_t[j], t, node, ues[j], contents[j],
                              share[j], rate[j]))
        open_t[j] = t
        share[j] = p
        if p <= 0.0:
            rate[j] = 0.0
            fin[j] = inf
            return
        node, coef = hops[j][hop_idx[j]]
        r = bandwidths[j] * log2(1.0 + coef * p)
        if not r > 0.0 or r == inf:
            raise ArithmeticError(f"non-positive or non-finite rate on node {node}")
        rate[j] = r
        fin[j] = t + rem[j] / r

    def start_event(j: int, t: float) -> None:
        if record:
            node = hops[j][hop_idx[j]][0]
            events.append((t, node, ues[j], contents[j], "hop-start", share[j]))

    def solo_key(j: int) -> float:
        node, coef = hops[j][hop_idx[j]]
        r = bandwidths[j] * log2(1.0 + coef * power_of(node))
        return sizes[j] / r if r > 0 else inf

    t = 0.0
    remaining = n
    pending = sorted(range(n), key=lambda j: (contents[j], ues[j]))
    seq_dispatch: set = set()
    dyn_dirty: set = set()
    guard = 0

    while True:
        guard += 1
        if guard > 8 * n + 64:
            raise ArithmeticError("schedule evaluation did not terminate")

        if pending:
            by_node: dict = {}
            for j in pending:
                by_node.setdefault(hops[j][hop_idx[j]][0], []).append(j)
            pending = []
            for node in sorted(by_node):
                batch = sorted(by_node[node], key=lambda j: (contents[j], ues[j]))
                if sequential:
                    rd = ready.setdefault(node, [])
                    for j in batch:
                        rd.append((solo_key(j), ues[j], j))
                    seq_dispatch.add(node)
                elif dynamic:
                    active.setdefault(node, []).extend(batch)
                    dyn_dirty.add(node)
                    for j in batch:
                        rem[j] = sizes[j]
                else:  # STATIC_SPLIT
                    act = active.setdefault(node, [])
                    p = static_share[node]
                    for j in batch:
                        act.append(j)
                        rem[j] = sizes[j]
                        set_power(j, p, t)
                        start_event(j, t)

        if dyn_dirty:
            for node in sorted(dyn_dirty):
                act = active.get(node)
                if act:
                    p = power_of(node) / len(act)
                    for j in act:
                        started = fin[j] == inf
                        set_power(j, p, t)
                        if started:
                            start_event(j, t)
            dyn_dirty.clear()

        if seq_dispatch:
            for node in sorted(seq_dispatch):
                if busy.get(node) is None and ready.get(node):
                    rd = ready[node]
                    pick = min(range(len(rd)), key=lambda i: rd[i][:2])
                    _, _, j = rd.pop(pick)
                    busy[node] = j
                    rem[j] = sizes[j]
                    set_power(j, power_of(node), t)
                    start_event(j, t)
            seq_dispatch.clear()

        if remaining == 0:
            break

        tn = min(fin)
        if tn == inf:
            raise ArithmeticError("schedule evaluation stalled")
        dt = tn - t
        finishers = []
        for j in range(n):
            if fin[j] == tn:
                finishers.append(j)
            elif fin[j] < inf and dt > 0.0:
                rem[j] -= rate[j] * dt
                if rem[j] < 0.0:
                    rem[j] = 0.0
        t = tn

        finishers.sort(key=lambda j: (hops[j][hop_idx[j]][0], contents[j], ues[j]))
        for j in finishers:
            node = hops[j][hop_idx[j]][0]
            rem[j] = 0.0
            if record:
                if t > open_t[j]:
                    intervals.append((open_t[j], t, node, ues[j], contents[j],
                                      share[j], rate[j]))
                events.append((t, node, ues[j], contents[j], "hop-finish", share[j]))
            if sequential:
                busy[node] = None
                seq_dispatch.add(node)
            else:
                active[node].remove(j)
                if dynamic:
                    dyn_dirty.add(node)
            share[j] = 0.0
            rate[j] = 0.0
            fin[j] = inf
            if hop_idx[j] + 1 < len(hops[j]):
                hop_idx[j] += 1
                pending.append(j)
            else:
                completions[ues[j]] = t
                remaining -= 1

    return Timeline(policy=policy,
                    completions=completions,
                    scope=tuple(sorted(ues)),
                    sizes={ues[j]: sizes[j] for j in range(n)},
                    hop_nodes={ues[j]: tuple(h[0] for h in hops[j]) for j in range(n)},
                    events=events, intervals=intervals)


class Evaluator:
    """Builds JobSpecs from (scenario, assignment) and counts evaluations.

    evaluate() with jobs=None simulates the full assignment and enforces the
    hard constraints; passing an explicit job subset simulates just those UEs
    (the caller must pick a subset closed under transmitter sharing).
    """

    def __init__(self, scenario: Scenario, policy: PowerPolicy):
        self.scenario = scenario
        self.policy = policy
        self.calls = 0
        self._coef = scenario.coef_matrix()
        self._bn = scenario.bandwidth_per_ue_hz
        self._power = [float(p) for p in scenario.p_max_w]
        self._spec_cache: dict = {}

    def job_spec(self, route: Route) -> JobSpec:
        key = (route.ue, route.chain)
        spec = self._spec_cache.get(key)
        if spec is None:
            chain = route.chain
            coef = self._coef
            hops = tuple((int(chain[i]), float(coef[chain[i], chain[i + 1]]))
                         for i in range(len(chain) - 1))
            spec = JobSpec(ue=route.ue, content=route.content,
                           size_bits=float(self.scenario.catalog.sizes_bits[route.content]),
                           bandwidth_hz=self._bn, hops=hops)
            self._spec_cache[key] = spec
        return spec

    def validate(self, assignment: dict) -> None:
        scn = self.scenario
        expected = set(scn.requesting)
        if set(assignment) != expected:
            raise AssignmentError(
                "assignment must give exactly one route to every requesting UE")
        for ue, route in assignment.items():
            if route.ue != ue:
                raise AssignmentError(f"route for UE {ue} ends at {route.ue}")
            if route.content != scn.requests[ue]:
                raise AssignmentError(f"route for UE {ue} carries the wrong content")
            if route.hop_count > scn.cfg.max_hops:
                raise AssignmentError(
                    f"route for UE {ue} uses {route.hop_count} hops "
                    f"(limit {scn.cfg.max_hops})")
            src = route.chain[0]
            if src != GBS_ID and route.content not in scn.caches[src - 1]:
                raise AssignmentError(
                    f"route for UE {ue} starts at node {src} which does not "
                    "cache the content")

    def evaluate(self, assignment: dict, jobs=None, record: bool = False) -> Timeline:
        if jobs is None:
            self.validate(assignment)
            selected = sorted(assignment)
        else:
            selected = sorted(jobs)
        specs = [self.job_spec(assignment[u]) for u in selected]
        self.calls += 1
        return simulate_jobs(specs, self._power, self.policy, record=record)


def evaluate(assignment: dict, scenario: Scenario, policy: PowerPolicy,
             record: bool = False) -> Timeline:
    """One-shot full evaluation without keeping an Evaluator around."""
    return Evaluator(scenario, policy).evaluate(assignment, record=record)


def check_conservation(timeline: Timeline, node_power_w,
                       rel_power_tol: float = 1e-12,
                       rel_bits_tol: float = 1e-6) -> None:
    """Assert per-node power caps and per-hop bit totals on a recorded timeline."""
    if timeline.intervals is None:
        raise ValueError("conservation checks need a timeline recorded with record=True")

    by_node: dict = {}
    delivered: dict = {}
    for t0, t1, node, ue, content, power, rate in timeline.intervals:
        by_node.setdefault(node, []).append((t0, 1, power))
        by_node.setdefault(node, []).append((t1, 0, power))
        delivered[(ue, node)] = delivered.get((ue, node), 0.0) + rate * (t1 - t0)

    for node, marks in by_node.items():
        cap = float(node_power_w[node]) * (1.0 + rel_power_tol) + 1e-15
        load = 0.0
        # removals (flag 0) before additions at equal times: intervals are half-open
        for _, flag, power in sorted(marks, key=lambda m: (m[0], m[1])):
            load += power if flag else -power
            if load > cap:
                raise AssertionError(
                    f"node {node} power {load!r} W exceeds cap {cap!r} W")

    for ue, nodes in timeline.hop_nodes.items():
        size = timeline.sizes[ue]
        for node in nodes:
            got = delivered.get((ue, node), 0.0)
            if abs(got - size) > size * rel_bits_tol:
                raise AssertionError(
                    f"UE {ue} hop at node {node} moved {got!r} bits, "
                    f"expected {size!r}")


def timeline_csv_rows(timeline: Timeline):
    """Event rows (time_s, node, ue, content, event, power_w) for export."""
    if timeline.events is None:
        raise ValueError("timeline was not recorded with record=True")
    for t, node, ue, content, kind, power in timeline.events:
        yield (t, node, ue, content, kind, power)
