from math import log2

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopcache.channel import NoiseModel
from hopcache.config import SimConfig
from hopcache.routing import Route
from hopcache.scenario import build_scenario
from hopcache.schedule import (AssignmentError, Evaluator, JobSpec,
                               PowerPolicy, check_conservation, evaluate,
                               hop_duration, simulate_jobs, sum_duration)
from smallstep import random_instance, simulate_smallstep

ALL_POLICIES = (PowerPolicy.SEQUENTIAL, PowerPolicy.STATIC_SPLIT,
                PowerPolicy.DYNAMIC_RESPLIT)

# closed-form anchor: coef 3/W at 1 W -> log2(4) = 2 bit/s/Hz,
# at 0.5 W -> log2(2.5) bit/s/Hz
R_FULL = 2e6
R_HALF = 1e6 * log2(2.5)


def job(ue, size, hops, content=None):
    return JobSpec(ue=ue, content=ue if content is None else content,
                   size_bits=size, bandwidth_hz=1e6, hops=hops)


def test_hop_duration_closed_form():
    noise = NoiseModel(1e-15, 0.0)
    gain = 255.0 * 1e6 * 1e-15 / 2.0       # SNR 255 at p=2 -> 8 bit/s/Hz
    assert hop_duration(8e6, 1e6, 2.0, gain, noise) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("policy", ALL_POLICIES)
def test_single_job_single_hop(policy):
    tl = simulate_jobs([job(7, 4e6, ((0, 3.0),))], {0: 1.0}, policy)
    assert tl.completions == {7: pytest.approx(4e6 / R_FULL, rel=1e-12)}


@pytest.mark.parametrize("policy", ALL_POLICIES)
def test_single_job_multi_hop_store_and_forward(policy):
    # lone job: every hop runs at full power, durations add up
    jobs = [job(9, 4e6, ((0, 3.0), (1, 3.0), (2, 1.0)))]
    powers = {0: 1.0, 1: 1.0, 2: 3.0}
    tl = simulate_jobs(jobs, powers, policy, record=True)
    assert tl.completions[9] == pytest.approx(3 * (4e6 / R_FULL), rel=1e-12)
    starts = [e[0] for e in tl.events if e[4] == "hop-start"]
    finishes = [e[0] for e in tl.events if e[4] == "hop-finish"]
    # each hop starts exactly when the previous one ends
    assert starts == pytest.approx([0.0, 2.0, 4.0], rel=1e-12)
    assert finishes == pytest.approx([2.0, 4.0, 6.0], rel=1e-12)


def test_two_contents_dynamic_worked_example():
    # one node, P=1, coef 3: both halves run at log2(2.5) Mb/s; A (5 Mbit)
    # finishes at 5/log2(2.5); B then gets the full watt for its last 5 Mbit
    jobs = [job(1, 5e6, ((0, 3.0),)), job(2, 10e6, ((0, 3.0),))]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.DYNAMIC_RESPLIT)
    t_a = 5e6 / R_HALF
    assert tl.completions[1] == pytest.approx(t_a, rel=1e-12)
    assert tl.completions[2] == pytest.approx(t_a + 5e6 / R_FULL, rel=1e-12)


def test_two_contents_static_worked_example():
    # same instance, static split: B keeps its half watt after A finishes
    jobs = [job(1, 5e6, ((0, 3.0),)), job(2, 10e6, ((0, 3.0),))]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.STATIC_SPLIT)
    assert tl.completions[1] == pytest.approx(5e6 / R_HALF, rel=1e-12)
    assert tl.completions[2] == pytest.approx(10e6 / R_HALF, rel=1e-12)


def test_two_contents_sequential_worked_example():
    # shorter solo duration goes first
    jobs = [job(1, 5e6, ((0, 3.0),)), job(2, 10e6, ((0, 3.0),))]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.SEQUENTIAL)
    assert tl.completions[1] == pytest.approx(2.5, rel=1e-12)
    assert tl.completions[2] == pytest.approx(7.5, rel=1e-12)


def test_sequential_queue_order_and_ties():
    jobs = [job(1, 4e6, ((0, 3.0),)), job(2, 2e6, ((0, 3.0),)),
            job(3, 6e6, ((0, 3.0),))]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.SEQUENTIAL)
    assert tl.completions == {2: pytest.approx(1.0), 1: pytest.approx(3.0),
                              3: pytest.approx(6.0)}
    # equal solo durations: lower UE id first
    jobs = [job(5, 4e6, ((0, 3.0),)), job(4, 4e6, ((0, 3.0),))]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.SEQUENTIAL)
    assert tl.completions[4] == pytest.approx(2.0)
    assert tl.completions[5] == pytest.approx(4.0)


def test_static_reserved_share_on_shared_relay():
    # j1 relays 2 Mbit over X then Y; j2 sends 8 Mbit from Y the whole time.
    # Y serves two contents, so each reserves half a watt up front: j2 runs
    # at 0.5 W from t=0 even while j1 is still on its first hop, and the
    # other half idles again once j1 clears.
    jobs = [job(1, 2e6, ((0, 3.0), (1, 3.0))), job(2, 8e6, ((1, 3.0),))]
    powers = {0: 1.0, 1: 1.0}
    tl = simulate_jobs(jobs, powers, PowerPolicy.STATIC_SPLIT, record=True)
    t_j1 = 1.0 + 2e6 / R_HALF
    assert tl.completions[1] == pytest.approx(t_j1, rel=1e-12)
    assert tl.completions[2] == pytest.approx(8e6 / R_HALF, rel=1e-12)
    # j2 never sees more than its reservation, before or after j1's visit
    j2_shares = [p for _, _, node, ue, _, p, _ in tl.intervals
                 if ue == 2 and node == 1]
    assert j2_shares == pytest.approx([0.5] * len(j2_shares))
    assert j2_shares


def test_dynamic_resplit_after_relay_leaves():
    # same instance under dynamic: j2 is re-raised to the full watt once j1
    # clears, catching up on the remaining 4 Mbit at 2 Mb/s
    jobs = [job(1, 2e6, ((0, 3.0), (1, 3.0))), job(2, 8e6, ((1, 3.0),))]
    tl = simulate_jobs(jobs, {0: 1.0, 1: 1.0}, PowerPolicy.DYNAMIC_RESPLIT)
    t_j1 = 1.0 + 2e6 / R_HALF
    assert tl.completions[1] == pytest.approx(t_j1, rel=1e-12)
    assert tl.completions[2] == pytest.approx(t_j1 + 2.0, rel=1e-12)


def test_simultaneous_finish_tie():
    jobs = [job(1, 5e6, ((0, 3.0),), content=0), job(2, 5e6, ((0, 3.0),), content=1)]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.DYNAMIC_RESPLIT)
    assert tl.completions[1] == tl.completions[2]
    assert tl.completions[1] == pytest.approx(5e6 / R_HALF, rel=1e-12)


def test_recorded_intervals_account_for_every_bit():
    jobs = [job(1, 2e6, ((0, 3.0), (1, 3.0))), job(2, 8e6, ((1, 3.0),))]
    powers = {0: 1.0, 1: 1.0}
    for policy in ALL_POLICIES:
        tl = simulate_jobs(jobs, powers, policy, record=True)
        moved = {}
        for t0, t1, node, ue, content, p, r in tl.intervals:
            assert t1 > t0
            assert p > 0
            moved[(ue, node)] = moved.get((ue, node), 0.0) + r * (t1 - t0)
        for ue, nodes in tl.hop_nodes.items():
            for node in nodes:
                assert moved[(ue, node)] == pytest.approx(tl.sizes[ue], rel=1e-9)
        check_conservation(tl, powers)


def test_check_conservation_flags_power_violation():
    jobs = [job(1, 5e6, ((0, 3.0),)), job(2, 5e6, ((0, 3.0),), content=1)]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.DYNAMIC_RESPLIT, record=True)
    with pytest.raises(AssertionError, match="power"):
        check_conservation(tl, {0: 0.6})    # cap below the true usage


def test_sum_duration():
    jobs = [job(1, 5e6, ((0, 3.0),)), job(2, 10e6, ((0, 3.0),), content=1)]
    tl = simulate_jobs(jobs, {0: 1.0}, PowerPolicy.SEQUENTIAL)
    assert sum_duration(tl) == pytest.approx(10.0)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=40, deadline=None)
def test_dynamic_dominates_static_per_content(seed):
    rng = np.random.default_rng(seed)
    jobs, powers = random_instance(rng)
    stat = simulate_jobs(jobs, powers, PowerPolicy.STATIC_SPLIT)
    dyn = simulate_jobs(jobs, powers, PowerPolicy.DYNAMIC_RESPLIT)
    for spec in jobs:
        assert dyn.completions[spec.ue] <= stat.completions[spec.ue] + 1e-9


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_completions_never_beat_solo_time(seed):
    rng = np.random.default_rng(seed)
    jobs, powers = random_instance(rng)
    for policy in ALL_POLICIES:
        tl = simulate_jobs(jobs, powers, policy)
        for spec in jobs:
            solo = sum(spec.size_bits / (spec.bandwidth_hz *
                                         log2(1.0 + c * powers[v]))
                       for v, c in spec.hops)
            assert tl.completions[spec.ue] >= solo - 1e-9


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_conservation_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    jobs, powers = random_instance(rng)
    for policy in ALL_POLICIES:
        tl = simulate_jobs(jobs, powers, policy, record=True)
        check_conservation(tl, powers)


@pytest.mark.parametrize("policy", ALL_POLICIES)
def test_engine_matches_smallstep_oracle(policy):
    rng = np.random.default_rng(77)
    for _ in range(10):
        jobs, powers = random_instance(rng)
        tl = simulate_jobs(jobs, powers, policy)
        ref = simulate_smallstep(jobs, powers, policy)
        for spec in jobs:
            a, b = tl.completions[spec.ue], ref[spec.ue]
            assert abs(a - b) / b <= 1e-3


# ---- Evaluator on real scenarios -------------------------------------------

def scenario_fixture():
    cfg = SimConfig(num_ues=20, num_uavs=2, num_requesting=3, catalog_size=10,
                    cache_capacity=3)
    return build_scenario(cfg, 55)


def direct_assignment(scn):
    return {ue: Route(ue, scn.requests[ue], (0, ue)) for ue in scn.requesting}


def test_evaluator_counts_calls_and_scopes():
    scn = scenario_fixture()
    ev = Evaluator(scn, PowerPolicy.DYNAMIC_RESPLIT)
    assignment = direct_assignment(scn)
    full = ev.evaluate(assignment)
    assert ev.calls == 1
    assert set(full.completions) == set(scn.requesting)
    # all three share the GBS, so the closed scope is the full set
    scoped = ev.evaluate(assignment, jobs=list(scn.requesting))
    assert scoped.completions == full.completions
    assert ev.calls == 2


def test_evaluator_scoped_singleton_matches_solo():
    scn = scenario_fixture()
    ev = Evaluator(scn, PowerPolicy.STATIC_SPLIT)
    ue = scn.requesting[0]
    assignment = direct_assignment(scn)
    tl = ev.evaluate(assignment, jobs=[ue])
    assert tl.completions[ue] == pytest.approx(
        scn.solo_duration(0, ue, scn.requests[ue]), rel=1e-9)


def test_evaluator_validation_errors():
    scn = scenario_fixture()
    ev = Evaluator(scn, PowerPolicy.STATIC_SPLIT)
    good = direct_assignment(scn)
    missing = dict(list(good.items())[1:])
    with pytest.raises(AssignmentError, match="every requesting"):
        ev.evaluate(missing)
    wrong_content = dict(good)
    ue = scn.requesting[0]
    other = (scn.requests[ue] + 1) % 10
    wrong_content[ue] = Route(ue, other, (0, ue))
    with pytest.raises(AssignmentError, match="wrong content"):
        ev.evaluate(wrong_content)
    bad_source = dict(good)
    f = scn.requests[ue]
    non_caching = [k + 1 for k in range(2) if f not in scn.caches[k]]
    if non_caching:
        bad_source[ue] = Route(ue, f, (non_caching[0], ue))
        with pytest.raises(AssignmentError, match="cache"):
            ev.evaluate(bad_source)


def test_evaluate_free_function():
    scn = scenario_fixture()
    tl = evaluate(direct_assignment(scn), scn, PowerPolicy.SEQUENTIAL)
    assert set(tl.completions) == set(scn.requesting)
