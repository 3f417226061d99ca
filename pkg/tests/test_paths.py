import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sppkit import (EventDecl, ResourceLimitError, check_chi_valid, check_valid, is_solvable,
                    min_clearance)
from sppkit.paths import distinct_clearance, path_clearance
from sppkit.reductions import reduce_3sat

from support import (all_policies, build, two_step, sat_formula, instances,
                     random_instance, subset_reach_chi_valid, walk_valid, walks)


def test_min_clearance_full_policy():
    sp = min_clearance(two_step(), {"a", "b"})["q0"]
    assert sp.distance("f") == 2
    assert sp.witness("f").events == ("a", "a")


def test_min_clearance_single_event():
    sp = min_clearance(two_step(), {"a"})["q0"]
    assert sp.distance("f") == 0
    assert sp.witness("f").events == ("b", "b")


def test_min_clearance_empty_policy_is_zero():
    inst = two_step()
    sp = min_clearance(inst, set())["q0"]
    assert [sp.distance(q) for q in inst.states] == [0, 0, 0]


def test_unreachable_state_flagged():
    inst = build(["p", "q", "r"], [EventDecl.protected("a")], [("p", "a", "q")], ["p"], {"r": 1})
    sp = min_clearance(inst, {"a"})["p"]
    assert sp.distance("r") is None and sp.witness("r") is None
    assert check_valid(inst, set()) is None


def test_check_valid_two_step():
    inst = two_step()
    assert check_valid(inst, {"a", "b"}) is None
    v = check_valid(inst, {"b"})
    assert (v.initial, v.secret, v.path.events, v.achieved, v.required) == ("q0", "f", ("a", "a"), 0, 2)


def test_all_zero_levels_always_valid():
    inst = two_step().with_security({"f": 0})
    for p in all_policies(inst):
        assert check_valid(inst, p) is None
        assert check_chi_valid(inst, p) is None


def test_chi_check_two_step():
    v = check_chi_valid(two_step(), {"a", "b"})
    assert v.achieved == 1 and v.required == 2
    assert len(set(v.path.events)) == 1
    assert v.render().startswith("VIOLATION init=q0 secret=f need=2 got=1 path=")


def test_chi_check_reduced_sat_formula():
    inst = reduce_3sat(sat_formula()).instance
    assert check_chi_valid(inst, {"x", "y", "z"}) is None


def test_chi_check_empty_policy():
    inst = build(["p", "q"], [EventDecl.protected("a")], [("p", "a", "q")], ["p"], {"q": 1})
    v = check_chi_valid(inst, set())
    assert v.achieved == 0 and v.path.events == ("a",)


def test_is_solvable_two_step():
    inst = two_step()
    assert is_solvable(inst)
    assert not is_solvable(inst, chi=True)


def test_unreachable_secrets_solvable_in_both_modes():
    inst = build(["p", "q"], [EventDecl.protected("a")], [("q", "a", "q")], ["p"], {"q": 9})
    assert is_solvable(inst) and is_solvable(inst, chi=True)


def test_chi_cap_raises():
    events = [EventDecl.protected(f"e{i}") for i in range(5)]
    inst = build(["p", "q"], events, [("p", "e0", "q")], ["p"], {"q": 1})
    with pytest.raises(ResourceLimitError):
        check_chi_valid(inst, {e.name for e in events}, cap=4)
    assert check_chi_valid(inst, {e.name for e in events}, cap=5) is None


def test_smallest_pair_reported_first():
    inst = build(["a", "b", "s", "t"], [EventDecl.protected("e")],
                 [("a", "e", "t"), ("a", "e", "s"), ("b", "e", "s")], ["a", "b"], {"s": 2, "t": 2})
    v = check_valid(inst, {"e"})
    assert (v.initial, v.secret) == ("a", "s")


def test_self_loop_zero_weight_cycle():
    inst = build(["p", "q"], [EventDecl.unprotectable("u"), EventDecl.protected("a", 2, 1)],
                 [("p", "u", "p"), ("p", "a", "q")], ["p"], {"q": 2})
    sp = min_clearance(inst, {"a"})["p"]
    assert sp.distance("q") == 2
    assert sp.witness("q").events == ("a",)


def _policies(inst, data):
    names = list(inst.protectable)
    if not names:
        return frozenset()
    return frozenset(data.draw(st.lists(st.sampled_from(names), unique=True)))


@settings(max_examples=150, deadline=None)
@given(instances(), st.data())
def test_validity_matches_walk_enumeration(inst, data):
    p = _policies(inst, data)
    # zero-weight cycles never help, so walks of length < |Q| suffice
    assert (check_valid(inst, p) is None) == walk_valid(inst, p, len(inst.states))


@settings(max_examples=150, deadline=None)
@given(instances(), st.data())
def test_chi_validity_matches_subset_reachability(inst, data):
    p = _policies(inst, data)
    assert (check_chi_valid(inst, p) is None) == subset_reach_chi_valid(inst, p)


@settings(max_examples=100, deadline=None)
@given(instances(), st.data())
def test_monotone_in_policy(inst, data):
    p2 = _policies(inst, data)
    p1 = frozenset(e for e in p2 if data.draw(st.booleans()))
    small, big = min_clearance(inst, p1), min_clearance(inst, p2)
    for i in inst.initial:
        for q in inst.states:
            d1, d2 = small[i].distance(q), big[i].distance(q)
            assert (d1 is None) == (d2 is None)
            if d1 is not None:
                assert d2 >= d1


@settings(max_examples=150, deadline=None)
@given(instances(), st.data())
def test_chi_valid_implies_valid(inst, data):
    p = _policies(inst, data)
    if check_chi_valid(inst, p) is None:
        assert check_valid(inst, p) is None


@settings(max_examples=150, deadline=None)
@given(instances(), st.data(), st.booleans())
def test_witness_soundness(inst, data, chi):
    p = _policies(inst, data)
    v = check_chi_valid(inst, p) if chi else check_valid(inst, p)
    if v is None:
        return
    assert v.path.start == v.initial and v.initial in inst.initial
    assert v.path.end == v.secret and v.required == inst.security[v.secret]
    assert v.path.replays_on(inst)
    measure = distinct_clearance if chi else path_clearance
    assert measure(inst, p, v.path.events) == v.achieved < v.required


@settings(max_examples=100, deadline=None)
@given(instances(), st.data())
def test_witness_is_shortest(inst, data):
    p = _policies(inst, data)
    v = check_valid(inst, p)
    if v is None:
        return
    assert len(set(q for _, q in v.path.steps) | {v.path.start}) == len(v.path) + 1  # simple
    best = min(path_clearance(inst, p, ev) for start, ev, end in walks(inst, len(inst.states))
               if start == v.initial and end == v.secret)
    assert v.achieved == best


def test_oracles_agree_on_seeded_instances():
    rng = random.Random(11)
    for _ in range(200):
        inst = random_instance(rng, max_states=8)
        for p in all_policies(inst):
            assert (check_valid(inst, p) is None) == walk_valid(inst, p, 8)
            assert (check_chi_valid(inst, p) is None) == subset_reach_chi_valid(inst, p)
