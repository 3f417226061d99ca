"""Validity and distinct-event validity checks with witness paths.

Validity is decided by one Dijkstra run per initial state, where an edge
labelled ``e`` weighs ``clearance(e)`` if ``e`` is in the policy and 0
otherwise: if every secret state's shortest distance meets its level, every
path does.

Distinct-event validity (each protected event counts once per path) is
decided by Dijkstra over the product of states and subsets of the policy
seen so far, with subset-dominance pruning.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .core import SppInstance

DEFAULT_CHI_CAP = 30


class ResourceLimitError(RuntimeError):
    """The distinct-event product search would exceed the configured cap."""


@dataclass(frozen=True)
class Path:
    start: str
    steps: tuple[tuple[str, str], ...]  # (event, state reached)

    @property
    def events(self) -> tuple[str, ...]:
        return tuple(e for e, _ in self.steps)

    @property
    def end(self) -> str:
        return self.steps[-1][1] if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def replays_on(self, inst: SppInstance) -> bool:
        edges = {(t.source, t.event, t.target) for t in inst.transitions}
        here = self.start
        for event, nxt in self.steps:
            if (here, event, nxt) not in edges:
                return False
            here = nxt
        return True


@dataclass(frozen=True)
class Violation:
    initial: str
    secret: str
    path: Path
    achieved: int
    required: int

    def render(self) -> str:
        return (f"VIOLATION init={self.initial} secret={self.secret} "
                f"need={self.required} got={self.achieved} path={'.'.join(self.path.events)}")

    def __str__(self) -> str:
        return self.render()


def path_clearance(inst: SppInstance, policy: Iterable[str], events: Iterable[str]) -> int:
    policy = frozenset(policy)
    return sum(inst.clearance(e) for e in events if e in policy)


def distinct_clearance(inst: SppInstance, policy: Iterable[str], events: Iterable[str]) -> int:
    policy = frozenset(policy)
    return sum(inst.clearance(e) for e in set(events) & policy)


class ShortestPaths:
    """Minimum clearance from one initial state to every state."""

    def __init__(self, inst: SppInstance, initial: str, dist, pred_state, pred_event):
        self._inst = inst
        self.initial = initial
        self._dist = dist
        self._pred_state = pred_state
        self._pred_event = pred_event

    def distance(self, state: str) -> int | None:
        """Minimum clearance to ``state``, or None when unreachable."""
        return self._dist[self._inst.index.state_id[state]]

    def witness(self, state: str) -> Path | None:
        idx = self._inst.index
        v = idx.state_id[state]
        if self._dist[v] is None:
            return None
        steps = []
        while self._pred_state[v] >= 0:
            steps.append((idx.event_names[self._pred_event[v]], idx.state_names[v]))
            v = self._pred_state[v]
        steps.reverse()
        return Path(self.initial, tuple(steps))


def _dijkstra(inst: SppInstance, source: int, weight: list[int]) -> ShortestPaths:
    idx = inst.index
    n = len(idx.state_names)
    dist: list[int | None] = [None] * n
    pred_state = [-1] * n
    pred_event = [-1] * n
    dist[source] = 0
    done = [False] * n
    heap = [(0, source)]
    adj = idx.adj
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, e in adj[u]:
            nd = d + weight[e]
            dv = dist[v]
            if dv is None or nd < dv:
                dist[v] = nd
                pred_state[v] = u
                pred_event[v] = e
                heapq.heappush(heap, (nd, v))
    return ShortestPaths(inst, idx.state_names[source], dist, pred_state, pred_event)


def _weights(inst: SppInstance, policy: frozenset[str]) -> list[int]:
    idx = inst.index
    return [idx.clearance[i] if name in policy else 0 for i, name in enumerate(idx.event_names)]


def min_clearance(inst: SppInstance, policy: Iterable[str]) -> dict[str, ShortestPaths]:
    """Shortest clearance-weighted paths from every initial state."""
    policy = inst.check_policy(policy)
    weight = _weights(inst, policy)
    idx = inst.index
    return {i: _dijkstra(inst, idx.state_id[i], weight) for i in inst.initial}


def _valid_violations(inst: SppInstance, policy: frozenset[str]) -> Iterator[list[Violation]]:
    weight = _weights(inst, policy)
    idx = inst.index
    for i in inst.initial:
        sp = _dijkstra(inst, idx.state_id[i], weight)
        batch = []
        for s in inst.secrets:
            d = sp.distance(s)
            if d is not None and d < inst.security[s]:
                batch.append(Violation(i, s, sp.witness(s), d, inst.security[s]))
        yield batch


def _reachable(inst: SppInstance, source: int) -> set[int]:
    adj = inst.index.adj
    seen = {source}
    todo = deque([source])
    while todo:
        u = todo.popleft()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def _chi_search(inst: SppInstance, policy: frozenset[str], source: int) -> list[Violation]:
    idx = inst.index
    bits = [0] * len(idx.event_names)
    for b, name in enumerate(sorted(policy)):
        bits[idx.event_id[name]] = 1 << b
    clearance = idx.clearance
    level = idx.level
    targets = {v for v in _reachable(inst, source) if level[v] > 0}
    found: dict[int, tuple[int, int]] = {}

    best = {(source, 0): 0}
    pred: dict[tuple[int, int], tuple[int, int, int]] = {}
    settled: list[list[int]] = [[] for _ in idx.state_names]
    heap = [(0, source, 0)]
    adj = idx.adj
    while heap and len(found) < len(targets):
        d, u, mask = heapq.heappop(heap)
        if best[(u, mask)] < d:
            continue
        # a settled subset at u dominates this mask: any suffix costs no more from there
        if any(m & ~mask == 0 for m in settled[u]):
            continue
        settled[u].append(mask)
        if u in targets and u not in found:
            found[u] = (d, mask)
        for v, e in adj[u]:
            b = bits[e]
            nmask = mask | b
            nd = d + clearance[e] if b and not mask & b else d
            key = (v, nmask)
            old = best.get(key)
            if old is None or nd < old:
                best[key] = nd
                pred[key] = (u, mask, e)
                heapq.heappush(heap, (nd, v, nmask))

    out = []
    for v in sorted(found, key=lambda s: idx.state_names[s]):
        d, mask = found[v]
        if d >= level[v]:
            continue
        steps = []
        key = (v, mask)
        while key in pred:
            u, m, e = pred[key]
            steps.append((idx.event_names[e], idx.state_names[key[0]]))
            key = (u, m)
        steps.reverse()
        path = Path(idx.state_names[source], tuple(steps))
        out.append(Violation(path.start, idx.state_names[v], path, d, level[v]))
    return out


def _chi_violations(inst: SppInstance, policy: frozenset[str], cap: int) -> Iterator[list[Violation]]:
    if len(policy) > cap:
        raise ResourceLimitError(
            f"distinct-event search over {len(policy)} policy events exceeds cap {cap}")
    idx = inst.index
    for i in inst.initial:
        yield _chi_search(inst, policy, idx.state_id[i])


def violations(inst: SppInstance, policy: Iterable[str], chi: bool = False,
               chi_cap: int = DEFAULT_CHI_CAP) -> Iterator[list[Violation]]:
    """Yield, per initial state in sorted order, the violated secrets' witnesses.

    Each batch is sorted by secret name and holds at most one violation per
    secret state.
    """
    policy = inst.check_policy(policy)
    if chi:
        return _chi_violations(inst, policy, chi_cap)
    return _valid_violations(inst, policy)


def check_valid(inst: SppInstance, policy: Iterable[str]) -> Violation | None:
    """Return None if ``policy`` is valid, else the violation with the
    smallest (initial, secret) pair."""
    for batch in violations(inst, policy):
        if batch:
            return batch[0]
    return None


def check_chi_valid(inst: SppInstance, policy: Iterable[str],
                    cap: int = DEFAULT_CHI_CAP) -> Violation | None:
    """Return None if ``policy`` is distinct-event valid, else a witness.

    Raises ResourceLimitError when the policy has more than ``cap`` events.
    """
    for batch in violations(inst, policy, chi=True, chi_cap=cap):
        if batch:
            return batch[0]
    return None


def is_solvable(inst: SppInstance, chi: bool = False, cap: int = DEFAULT_CHI_CAP) -> bool:
    full = inst.full_policy()
    if chi:
        return check_chi_valid(inst, full, cap) is None
    return check_valid(inst, full) is None
