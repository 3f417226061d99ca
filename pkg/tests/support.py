"""Shared builders and exhaustive reference checks for the test suite."""

from __future__ import annotations

import itertools
import random
from collections import deque
from pathlib import Path as FsPath

from hypothesis import strategies as st

from sppkit import EventDecl, SppInstance, Transition, load_instance
from sppkit.oracle import CnfFormula

DATA = FsPath(__file__).parent / "data"

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def two_step() -> SppInstance:
    return load_instance(DATA / "two_step.spp")


def sat_formula() -> CnfFormula:
    # (x | -y | z) & (-x | y | -z)
    return CnfFormula(3, (frozenset({1, -2, 3}), frozenset({-1, 2, -3})), ("x", "y", "z"))


def unsat_formula() -> CnfFormula:
    # (x | y | z) & -x & -y & -z
    return CnfFormula(3, (frozenset({1, 2, 3}), frozenset({-1}), frozenset({-2}), frozenset({-3})),
                      ("x", "y", "z"))


def build(states, events, trans, initial, security) -> SppInstance:
    return SppInstance(tuple(states), tuple(events), tuple(Transition(*t) for t in trans),
                       tuple(initial), dict(security))


def random_instance(rng: random.Random, max_states: int = 8, max_events: int = 4,
                    lo: int = 1, hi: int = 3, unprotectable: float = 0.2,
                    max_initial: int = 2) -> SppInstance:
    n = rng.randint(2, max_states)
    k = rng.randint(1, max_events)
    states = [f"s{i}" for i in range(n)]
    events = []
    for j in range(k):
        name = f"e{j}"
        if rng.random() < unprotectable:
            events.append(EventDecl.unprotectable(name))
        else:
            events.append(EventDecl.protected(name, rng.randint(lo, hi), rng.randint(lo, hi)))
    m = rng.randint(1, 3 * n)
    trans = {(rng.choice(states), rng.choice(events).name, rng.choice(states)) for _ in range(m)}
    initial = rng.sample(states, rng.randint(1, min(max_initial, n - 1)))
    security = {q: rng.randint(lo, hi) for q in states
                if q not in initial and rng.random() < 0.4}
    return build(states, events, sorted(trans), initial, security)


@st.composite
def instances(draw, max_states: int = 6, max_events: int = 4, hi: int = 3):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_instance(random.Random(seed), max_states, max_events, 1, hi)


def random_cnf(rng: random.Random, max_vars: int, max_clauses: int, min_vars: int = 1) -> CnfFormula:
    n = rng.randint(min_vars, max_vars)
    m = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(m):
        size = rng.randint(1, min(3, n))
        vs = rng.sample(range(1, n + 1), size)
        clauses.append(frozenset(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(n, tuple(clauses))


# -------------------------------------------------------- reference checks

def walks(inst: SppInstance, max_len: int):
    """Every (initial, event sequence, end state) walk with at most max_len steps."""
    out = {}
    for t in inst.transitions:
        out.setdefault(t.source, []).append((t.event, t.target))
    todo = deque((i, (), i) for i in inst.initial)
    while todo:
        start, events, here = todo.popleft()
        yield start, events, here
        if len(events) < max_len:
            for e, nxt in out.get(here, ()):
                todo.append((start, events + (e,), nxt))


def walk_valid(inst: SppInstance, policy, max_len: int) -> bool:
    policy = set(policy)
    for _, events, end in walks(inst, max_len):
        need = inst.security[end]
        if need and sum(inst.clearance(e) for e in events if e in policy) < need:
            return False
    return True


def subset_reach_chi_valid(inst: SppInstance, policy) -> bool:
    """Breadth-first search over (state, set of policy events seen)."""
    policy = frozenset(policy)
    out = {}
    for t in inst.transitions:
        out.setdefault(t.source, []).append((t.event, t.target))
    seen = {(i, frozenset()) for i in inst.initial}
    todo = deque(seen)
    while todo:
        q, got = todo.popleft()
        need = inst.security[q]
        if need and sum(inst.clearance(e) for e in got) < need:
            return False
        for e, nxt in out.get(q, ()):
            key = (nxt, got | {e} if e in policy else got)
            if key not in seen:
                seen.add(key)
                todo.append(key)
    return True


def all_policies(inst: SppInstance):
    names = inst.protectable
    for r in range(len(names) + 1):
        for combo in itertools.combinations(names, r):
            yield frozenset(combo)
