"""Route selectors: received-power benchmark, greedy joint selection, brute force.

The greedy selector follows a two-stage shape: first it assigns every
requesting UE the direct route that currently finishes soonest (re-evaluating
durations under the policy's power sharing as sources fill up), then it
repeatedly commits the reroute with the largest positive gain until no
single-UE route change improves the objective. A reroute's gain is the exact
decrease in summed delivery duration it causes: the owner's saving plus the
net speed-up or slow-down of everyone else. Crediting incidental speed-ups
matters because vacating a crowded source is often worth more to the others
than the mover saves itself; and once a commit reshapes the power landscape,
an earlier reroute can become stale, so a UE may be rerouted again.

Gains are computed exactly but lazily. Deliveries interact only through
shared transmitters, so a candidate reroute is evaluated on the connected
components of deliveries it touches, and a route's full-power
store-and-forward duration lower-bounds its evaluated duration, which
(together with the owner's release credit) upper-bounds its gain. Rows are
therefore scanned in ascending solo-duration order until no unevaluated
candidate can beat the best evaluated gain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import inf, prod

import numpy as np

from .config import db_to_linear
from .routing import Route, RouteSet, source_options
from .scenario import GBS_ID, Scenario
from .schedule import Evaluator, PowerPolicy

# keeps solo-duration bounds strictly below evaluated durations despite
# last-ulp differences between the vectorized and scalar rate computations
_BOUND_SLACK = 1.0 - 1e-12


class BruteForceBudgetError(RuntimeError):
    """Exhaustive search would exceed the configured evaluation budget."""

    def __init__(self, combinations: int, budget: int):
        super().__init__(
            f"brute force needs {combinations} evaluations, budget is {budget}")
        self.combinations = combinations
        self.budget = budget


def benchmark_select(scenario: Scenario) -> dict:
    """Direct route from the caching node with the highest biased received power."""
    cfg = scenario.cfg
    bias_gbs = db_to_linear(cfg.benchmark_bias_gbs_db)
    bias_uav = db_to_linear(cfg.benchmark_bias_uav_db)
    assignment = {}
    for ue in scenario.requesting:
        f = scenario.requests[ue]
        best_score = -inf
        best_src = GBS_ID
        for src in source_options(f, scenario):
            bias = bias_gbs if src == GBS_ID else bias_uav
            score = float(scenario.p_max_w[src]) * scenario.gain(src, ue) * bias
            if score > best_score:
                best_score = score
                best_src = src
        assignment[ue] = Route(ue, f, (best_src, ue))
    return assignment


def _components(assignment: dict):
    """Group deliveries that share transmitters.

    Returns (comp_of_node, jobs_by_comp): node id -> component root for every
    transmitter in use, and component root -> list of UE ids.
    """
    parent: dict = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for route in assignment.values():
        txs = route.transmitters
        for v in txs:
            parent.setdefault(v, v)
        for v in txs[1:]:
            ra, rb = find(txs[0]), find(v)
            if ra != rb:
                parent[rb] = ra

    comp_of_node = {v: find(v) for v in parent}
    jobs_by_comp: dict = {}
    for ue, route in assignment.items():
        root = comp_of_node[route.transmitters[0]]
        jobs_by_comp.setdefault(root, []).append(ue)
    return comp_of_node, jobs_by_comp


def _candidate_cost(evaluator: Evaluator, assignment: dict, comp_of_node: dict,
                    jobs_by_comp: dict, base: dict, ue: int, route: Route) -> float:
    """Evaluated duration of `route` plus the net change it causes everyone else.

    Exact: only deliveries coupled to the candidate's or the current route's
    transmitters can change, so simulating those components reproduces the
    full re-evaluation.
    """
    scope = {ue}
    for v in route.transmitters + assignment[ue].transmitters:
        comp = comp_of_node.get(v)
        if comp is not None:
            scope.update(jobs_by_comp[comp])
    trial = dict(assignment)
    trial[ue] = route
    tl = evaluator.evaluate(trial, jobs=scope)
    cost = tl.completions[ue]
    for other in scope:
        if other != ue:
            cost += tl.completions[other] - base[other]
    return cost


def multihop_gain(ue: int, route: Route, assignment: dict, scenario: Scenario,
                  policy: PowerPolicy) -> float:
    """Gain of rerouting `ue` onto `route`: the decrease in summed delivery
    duration the change would cause, floored at zero.

    The owner's saving plus the net speed-up or slow-down of every other
    delivery. Reference implementation with two full evaluations; the greedy
    selector computes the same value component-scoped.
    """
    evaluator = Evaluator(scenario, policy)
    base = evaluator.evaluate(assignment).completions
    trial = dict(assignment)
    trial[ue] = route
    after = evaluator.evaluate(trial).completions
    gain = sum(base.values()) - sum(after.values())
    return max(gain, 0.0)


@dataclass
class GreedyTrace:
    """Bookkeeping of one greedy_select run."""

    direct_order: list = field(default_factory=list)   # (ue, route, duration)
    commits: list = field(default_factory=list)        # (ue, route, gain, sum_before, sum_after)
    candidate_evaluations: int = 0
    evaluator_calls: int = 0
    final_sum: float = 0.0


class _GainRow:
    """One UE's route candidates, scanned lazily in ascending solo order.

    Chains are (source, relay1, relay2) with -1 padding; direct routes carry
    two -1 entries. The owner's current route sits in the row too and is
    marked with an infinite cost when the scan reaches it.
    """

    __slots__ = ("ue", "chains", "solos", "bounds", "costs", "prefix")

    def __init__(self, ue: int, chains: np.ndarray, solos: np.ndarray):
        hops = np.where(chains[:, 1] < 0, 1, np.where(chains[:, 2] < 0, 2, 3))
        order = np.lexsort((chains[:, 2], chains[:, 1], chains[:, 0], hops, solos))
        self.ue = ue
        self.chains = chains[order]
        self.solos = solos[order]
        self.bounds = self.solos * _BOUND_SLACK
        self.costs = np.full(len(order), np.nan)
        self.prefix = 0

    def route(self, i: int, content: int) -> Route:
        s, r1, r2 = (int(v) for v in self.chains[i])
        if r1 < 0:
            chain = (s, self.ue)
        elif r2 < 0:
            chain = (s, r1, self.ue)
        else:
            chain = (s, r1, r2, self.ue)
        return Route(self.ue, content, chain)

    def best_computed(self, base_t: float):
        """(gain, index) of the best already-evaluated candidate."""
        if self.prefix == 0:
            return 0.0, None
        gains = base_t - self.costs[:self.prefix]
        i = int(np.argmax(gains))
        return float(gains[i]), i


def greedy_select(scenario: Scenario, route_set: RouteSet,
                  evaluator: Evaluator):
    """Two-stage greedy selection; returns (assignment, GreedyTrace)."""
    trace = GreedyTrace()
    calls_at_start = evaluator.calls
    requesting = sorted(scenario.requesting)

    # ---- stage 1: direct assignment, globally smallest duration first -------
    assignment: dict = {}
    assigned_at: dict = {}          # source node -> [ue]
    durations: dict = {}            # ue -> list of current durations per direct route
    solo_direct: dict = {}          # ue -> full-power duration per direct route
    directs = {ue: route_set.per_ue[ue].direct for ue in requesting}
    for ue in requesting:
        durs = []
        for route in directs[ue]:
            tl = evaluator.evaluate({ue: route}, jobs=(ue,))
            durs.append(tl.completions[ue])
        durations[ue] = durs
        solo_direct[ue] = list(durs)

    unassigned = set(requesting)
    while unassigned:
        best = (inf, None, None)
        for ue in sorted(unassigned):
            for i, dur in enumerate(durations[ue]):
                if dur < best[0]:
                    best = (dur, ue, i)
        dur, ue, i = best
        route = directs[ue][i]
        assignment[ue] = route
        unassigned.remove(ue)
        trace.direct_order.append((ue, route, dur))
        src = route.chain[0]
        assigned_at.setdefault(src, []).append(ue)
        # power sharing at this source changed: refresh its other candidates
        for other in sorted(unassigned):
            for j, cand in enumerate(directs[other]):
                if cand.chain[0] != src:
                    continue
                scope = assigned_at[src] + [other]
                trial = {u: assignment[u] for u in assigned_at[src]}
                trial[other] = cand
                tl = evaluator.evaluate(trial, jobs=scope)
                durations[other][j] = tl.completions[other]

    # ---- stage 2: steepest-descent reroutes until no move helps -------------
    base_tl = evaluator.evaluate(assignment)
    base = dict(base_tl.completions)

    rows: dict = {}
    for ue in requesting:
        ur = route_set.per_ue[ue]
        d_chains = np.array([(r.chain[0], -1, -1) for r in ur.direct],
                            dtype=np.int32)
        d_solos = np.asarray(solo_direct[ue])
        chains = np.concatenate([d_chains, ur.mh_chains])
        solos = np.concatenate([d_solos, ur.mh_solo_sums])
        if len(chains) >= 2:
            rows[ue] = _GainRow(ue, chains, solos)

    comp_of_node, jobs_by_comp = _components(assignment)
    release: dict = {ue: None for ue in rows}

    def release_of(ue: int) -> float:
        """Summed speed-up of the component mates if `ue` stopped transmitting;
        caps the credit any reroute of `ue` can hand to the others."""
        val = release[ue]
        if val is None:
            comp = comp_of_node[assignment[ue].transmitters[0]]
            others = sorted(o for o in jobs_by_comp[comp] if o != ue)
            val = 0.0
            if others:
                tl = evaluator.evaluate(assignment, jobs=others)
                val = sum(base[o] - tl.completions[o] for o in others)
            release[ue] = val
        return val

    def extend(row: _GainRow, threshold: float) -> float:
        """Evaluate candidates in bound order until none can beat `threshold`;
        returns the threshold raised by any gain found along the way."""
        ue = row.ue
        content = scenario.requests[ue]
        base_t = base[ue]
        cap = base_t + release_of(ue)
        cur_chain = assignment[ue].chain
        while row.prefix < len(row.costs) and cap - row.bounds[row.prefix] > threshold:
            i = row.prefix
            route = row.route(i, content)
            if route.chain == cur_chain:
                row.costs[i] = inf
            else:
                row.costs[i] = _candidate_cost(evaluator, assignment, comp_of_node,
                                               jobs_by_comp, base, ue, route)
                trace.candidate_evaluations += 1
                gain = base_t - row.costs[i]
                if gain > threshold:
                    threshold = gain
            row.prefix += 1
        return threshold

    while rows:
        # grow every row until nothing unevaluated can beat the best gain
        best_gain = 0.0
        for ue in sorted(rows):
            g, _ = rows[ue].best_computed(base[ue])
            if g > best_gain:
                best_gain = g
        while True:
            grown = False
            for ue in sorted(rows):
                row = rows[ue]
                before = row.prefix
                best_gain = extend(row, best_gain)
                if row.prefix > before:
                    grown = True
            if not grown:
                break
        if best_gain <= 0.0:
            break

        # winner: smallest (ue, route key) among ties
        winner = None
        for ue in sorted(rows):
            row = rows[ue]
            if row.prefix == 0:
                continue
            gains = base[ue] - row.costs[:row.prefix]
            for i in np.nonzero(gains == best_gain)[0]:
                content = scenario.requests[ue]
                key = row.route(int(i), content).sort_key
                if winner is None or (ue, key) < (winner[0], winner[2]):
                    winner = (ue, int(i), key)
        ue, i, _ = winner
        new_route = rows[ue].route(i, scenario.requests[ue])
        old_route = assignment[ue]

        sum_before = sum(base.values())
        comps_before = comp_of_node
        assignment[ue] = new_route
        base_tl = evaluator.evaluate(assignment)
        new_base = dict(base_tl.completions)
        sum_after = sum(new_base.values())
        if not sum_after < sum_before:
            # scoped and full evaluations can disagree by an ulp near gain 0
            assignment[ue] = old_route
            break
        base = new_base
        trace.commits.append((ue, new_route, best_gain, sum_before, sum_after))

        comp_of_node, jobs_by_comp = _components(assignment)

        # costs whose coupled components changed are stale; the mover's row
        # rescans lazily against its new base, other affected rows refresh
        changed = set(old_route.transmitters) | set(new_route.transmitters)
        stale = np.zeros(scenario.num_nodes + 1, dtype=bool)
        for comps in (comps_before, comp_of_node):
            changed_roots = {comps[v] for v in changed if v in comps}
            for v, root in comps.items():
                if root in changed_roots:
                    stale[v] = True
        for v in changed:
            stale[v] = True

        for other, row in rows.items():
            own_stale = any(stale[v] for v in assignment[other].transmitters)
            if other == ue:
                row.prefix = 0
                release[other] = None
                continue
            if own_stale:
                release[other] = None
            if row.prefix == 0:
                continue
            if own_stale:
                # every cached cost embeds the current route's component
                touched = np.ones(row.prefix, dtype=bool)
            else:
                touched = stale[row.chains[:row.prefix]].any(axis=1)
            content = scenario.requests[other]
            cur_chain = assignment[other].chain
            for i in np.nonzero(touched)[0]:
                route = row.route(int(i), content)
                if route.chain == cur_chain:
                    row.costs[i] = inf
                    continue
                row.costs[i] = _candidate_cost(evaluator, assignment, comp_of_node,
                                               jobs_by_comp, base, other, route)
                trace.candidate_evaluations += 1

    trace.final_sum = sum(base.values())
    trace.evaluator_calls = evaluator.calls - calls_at_start
    return assignment, trace


def brute_force_select(scenario: Scenario, route_set: RouteSet,
                       evaluator: Evaluator, budget: int | None = None) -> dict:
    """Exhaustive search over one-route-per-UE combinations of the pruned set.

    Ties keep the first minimum in lexicographic route order. Raises
    BruteForceBudgetError instead of starting a search that cannot finish.
    """
    if budget is None:
        budget = scenario.cfg.brute_force_budget
    ues = sorted(scenario.requesting)
    lists = [route_set.routes_for(ue) for ue in ues]
    combinations = prod(len(l) for l in lists)
    if combinations > budget:
        raise BruteForceBudgetError(combinations, budget)
    best_sum = inf
    best = None
    for combo in itertools.product(*lists):
        assignment = dict(zip(ues, combo))
        tl = evaluator.evaluate(assignment, jobs=ues)
        total = sum(tl.completions.values())
        if total < best_sum:
            best_sum = total
            best = assignment
    return best
