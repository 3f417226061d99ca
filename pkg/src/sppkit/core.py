"""Instances of the secret protection problem and their text format.

An instance is an NFA whose events are split into protectable and
unprotectable ones.  Protectable events carry a clearance (units granted per
occurrence) and a cost.  Every state has a security level; states with a
positive level are the secret states.  A policy is a set of protectable event
names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

FORMAT_VERSION = 1

Policy = frozenset  # frozenset[str] of protectable event names

_TOKEN = re.compile(r"[^\s,#]+")


class SppFormatError(ValueError):
    """Base class for problems with instance text or instance structure."""


class SppSyntaxError(SppFormatError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SppSemanticError(SppFormatError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class PolicyError(ValueError):
    """A policy names an unknown or unprotectable event."""


def is_token(name: str) -> bool:
    return bool(name) and _TOKEN.fullmatch(name) is not None


@dataclass(frozen=True)
class EventDecl:
    name: str
    protectable: bool
    clearance: int | None = None
    cost: int | None = None

    def __post_init__(self):
        if not is_token(self.name):
            raise SppSemanticError(f"invalid event name {self.name!r}")
        if self.protectable:
            if self.clearance is None or self.cost is None:
                raise SppSemanticError(f"protectable event {self.name} needs clearance and cost")
            if self.clearance < 0 or self.cost < 0:
                raise SppSemanticError(f"event {self.name}: clearance and cost must be >= 0")
        elif self.clearance is not None or self.cost is not None:
            raise SppSemanticError(f"clearance/cost on unprotectable event {self.name}")

    @classmethod
    def protected(cls, name: str, clearance: int = 1, cost: int = 1) -> "EventDecl":
        return cls(name, True, clearance, cost)

    @classmethod
    def unprotectable(cls, name: str) -> "EventDecl":
        return cls(name, False)


@dataclass(frozen=True, order=True)
class Transition:
    source: str
    event: str
    target: str


@dataclass(frozen=True)
class SppInstance:
    """An immutable SPP instance.

    Construction normalizes every collection into sorted tuples, so two
    instances with the same content compare equal regardless of input order.
    ``security`` may be partial on input; missing states get level 0.
    """

    states: tuple[str, ...]
    events: tuple[EventDecl, ...]
    transitions: tuple[Transition, ...]
    initial: tuple[str, ...]
    security: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        states = tuple(sorted(set(self.states)))
        if len(states) != len(self.states):
            raise SppSemanticError("duplicate state declaration")
        for q in states:
            if not is_token(q):
                raise SppSemanticError(f"invalid state name {q!r}")
        names = [e.name for e in self.events]
        if len(set(names)) != len(names):
            raise SppSemanticError("duplicate event declaration")
        events = tuple(sorted(self.events, key=lambda e: e.name))
        declared = set(states)
        event_names = set(names)
        transitions = []
        for t in self.transitions:
            if not isinstance(t, Transition):
                t = Transition(*t)
            for q in (t.source, t.target):
                if q not in declared:
                    raise SppSemanticError(f"undeclared state {q} in transition")
            if t.event not in event_names:
                raise SppSemanticError(f"undeclared event {t.event} in transition")
            transitions.append(t)
        transitions = tuple(sorted(set(transitions)))
        initial = tuple(sorted(set(self.initial)))
        if not initial:
            raise SppSemanticError("at least one initial state is required")
        for q in initial:
            if q not in declared:
                raise SppSemanticError(f"undeclared initial state {q}")
        security = {q: 0 for q in states}
        for q, level in self.security.items():
            if q not in declared:
                raise SppSemanticError(f"security level for undeclared state {q}")
            if level < 0:
                raise SppSemanticError(f"negative security level for {q}")
            security[q] = int(level)
        for q in initial:
            if security[q] > 0:
                raise SppSemanticError(f"secret initial state {q}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "security", security)

    @cached_property
    def event_map(self) -> dict[str, EventDecl]:
        return {e.name: e for e in self.events}

    @cached_property
    def protectable(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.events if e.protectable)

    @cached_property
    def secrets(self) -> tuple[str, ...]:
        return tuple(q for q in self.states if self.security[q] > 0)

    @cached_property
    def index(self) -> "IndexedAutomaton":
        return IndexedAutomaton(self)

    def clearance(self, event: str) -> int:
        return self.event_map[event].clearance or 0

    def check_policy(self, policy: Iterable[str]) -> frozenset[str]:
        policy = frozenset(policy)
        for name in sorted(policy):
            decl = self.event_map.get(name)
            if decl is None:
                raise PolicyError(f"unknown event {name}")
            if not decl.protectable:
                raise PolicyError(f"event {name} is not protectable")
        return policy

    def full_policy(self) -> frozenset[str]:
        return frozenset(self.protectable)

    def with_security(self, security: Mapping[str, int]) -> "SppInstance":
        merged = dict(self.security)
        merged.update(security)
        return SppInstance(self.states, self.events, self.transitions, self.initial, merged)


class IndexedAutomaton:
    """Integer-indexed adjacency view used by the path searches."""

    def __init__(self, inst: SppInstance):
        self.state_names = inst.states
        self.event_names = tuple(e.name for e in inst.events)
        self.state_id = {q: i for i, q in enumerate(self.state_names)}
        self.event_id = {e: i for i, e in enumerate(self.event_names)}
        self.clearance = [e.clearance or 0 for e in inst.events]
        self.level = [inst.security[q] for q in self.state_names]
        # transitions are sorted, so adjacency lists are in (event, target) order
        self.adj: list[list[tuple[int, int]]] = [[] for _ in self.state_names]
        for t in inst.transitions:
            self.adj[self.state_id[t.source]].append(
                (self.state_id[t.target], self.event_id[t.event]))


def policy_cost(inst: SppInstance, policy: Iterable[str]) -> int:
    policy = inst.check_policy(policy)
    return sum(inst.event_map[e].cost for e in policy)


# ---------------------------------------------------------------- text format

_SECTIONS = {"state": 1, "initial": 2, "event": 3, "trans": 4}


def _tokens(line: str) -> list[tuple[str, int]]:
    body = line.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]


def _natural(tok: str, col: int, lineno: int) -> int:
    if not tok.isdigit():
        raise SppSyntaxError(f"expected a natural number, got {tok!r}", lineno, col)
    return int(tok)


def _name(tok: str, col: int, lineno: int) -> str:
    if not is_token(tok):
        raise SppSyntaxError(f"invalid name {tok!r}", lineno, col)
    return tok


def parse_instance(text: str) -> SppInstance:
    states: list[str] = []
    security: dict[str, int] = {}
    initial: list[str] = []
    events: list[EventDecl] = []
    transitions: list[Transition] = []
    state_line: dict[str, int] = {}
    event_names: set[str] = set()
    seen_header = False
    section = 0

    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        (kw, kcol), args = toks[0], toks[1:]
        if not seen_header:
            if kw != "spp" or len(args) != 1:
                raise SppSyntaxError("expected header 'spp 1'", lineno, kcol)
            if args[0][0] != str(FORMAT_VERSION):
                raise SppSyntaxError(f"unsupported format version {args[0][0]}", lineno, args[0][1])
            seen_header = True
            continue
        if kw not in _SECTIONS:
            raise SppSyntaxError(f"unknown keyword {kw!r}", lineno, kcol)
        if _SECTIONS[kw] < section:
            raise SppSyntaxError(f"'{kw}' out of order", lineno, kcol)
        section = _SECTIONS[kw]

        if kw == "state":
            if len(args) not in (1, 3):
                raise SppSyntaxError("expected 'state <name> [secret <L>]'", lineno, kcol)
            name = _name(*args[0], lineno)
            if name in state_line:
                raise SppSemanticError(f"duplicate state {name}", lineno)
            state_line[name] = lineno
            states.append(name)
            if len(args) == 3:
                if args[1][0] != "secret":
                    raise SppSyntaxError("expected 'secret'", lineno, args[1][1])
                level = _natural(*args[2], lineno)
                if level == 0:
                    raise SppSyntaxError("secret level must be positive", lineno, args[2][1])
                security[name] = level
        elif kw == "initial":
            if not args:
                raise SppSyntaxError("'initial' needs at least one state", lineno, kcol)
            for tok, col in args:
                name = _name(tok, col, lineno)
                if name not in state_line:
                    raise SppSemanticError(f"undeclared state {name}", lineno)
                if security.get(name, 0) > 0:
                    raise SppSemanticError(f"secret initial state {name}", lineno)
                initial.append(name)
        elif kw == "event":
            if len(args) < 2:
                raise SppSyntaxError("expected 'event <name> protectable|unprotectable ...'", lineno, kcol)
            name = _name(*args[0], lineno)
            if name in event_names:
                raise SppSemanticError(f"duplicate event {name}", lineno)
            event_names.add(name)
            kind, kind_col = args[1]
            rest = args[2:]
            if kind == "unprotectable":
                if rest:
                    if rest[0][0] in ("clearance", "cost"):
                        raise SppSemanticError(f"clearance/cost on unprotectable event {name}", lineno)
                    raise SppSyntaxError(f"unexpected {rest[0][0]!r}", lineno, rest[0][1])
                events.append(EventDecl.unprotectable(name))
            elif kind == "protectable":
                if len(rest) != 4 or rest[0][0] != "clearance" or rest[2][0] != "cost":
                    col = rest[0][1] if rest else kind_col
                    raise SppSyntaxError("expected 'clearance <g> cost <c>'", lineno, col)
                events.append(EventDecl.protected(
                    name, _natural(*rest[1], lineno), _natural(*rest[3], lineno)))
            else:
                raise SppSyntaxError(f"expected protectable or unprotectable, got {kind!r}", lineno, kind_col)
        else:  # trans
            if len(args) != 3:
                raise SppSyntaxError("expected 'trans <from> <event> <to>'", lineno, kcol)
            src, ev, dst = (_name(tok, col, lineno) for tok, col in args)
            for q in (src, dst):
                if q not in state_line:
                    raise SppSemanticError(f"undeclared state {q}", lineno)
            if ev not in event_names:
                raise SppSemanticError(f"undeclared event {ev}", lineno)
            transitions.append(Transition(src, ev, dst))

    if not seen_header:
        raise SppSyntaxError("missing header 'spp 1'", 1)
    if not initial:
        raise SppSemanticError("no initial state declared")
    return SppInstance(tuple(states), tuple(events), tuple(transitions), tuple(initial), security)


def serialize_instance(inst: SppInstance, comments: Iterable[str] = ()) -> str:
    """Render ``inst`` in the line format; ``comments`` go after the header."""
    out = [f"spp {FORMAT_VERSION}"]
    out.extend(f"# {c}" for c in comments)
    for q in inst.states:
        level = inst.security[q]
        out.append(f"state {q} secret {level}" if level > 0 else f"state {q}")
    out.append("initial " + " ".join(inst.initial))
    for e in inst.events:
        if e.protectable:
            out.append(f"event {e.name} protectable clearance {e.clearance} cost {e.cost}")
        else:
            out.append(f"event {e.name} unprotectable")
    for t in inst.transitions:
        out.append(f"trans {t.source} {t.event} {t.target}")
    return "\n".join(out) + "\n"


def read_comments(text: str) -> dict[str, str]:
    """Collect ``# key value`` comment lines (budget/policy sidecars)."""
    found = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("#"):
            parts = line[1:].split(None, 1)
            if len(parts) == 2:
                found.setdefault(parts[0], parts[1].strip())
    return found


def load_instance(path) -> SppInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())
