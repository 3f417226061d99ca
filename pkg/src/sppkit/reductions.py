"""Gadget constructions turning logic formulas into SPP instances.

* ``reduce_3sat``: 3-CNF formula -> uniform instance whose distinct-event
  optimum is at most the number of variables iff the formula is satisfiable.
* ``reduce_chi_validity``: 3-CNF formula -> chain instance plus the policy of
  all literals, which is distinct-event valid iff the formula is unsatisfiable.
* ``reduce_qsat2``: exists-forall formula with a 3-DNF matrix -> instance and
  budget for the budget-constrained distinct-event problem.

Naming: a variable ``v`` yields events ``v`` and ``vp`` (its negation), state
``q_v``; clause chains use ``c<i>_<j>``, conjunct states ``C<i>`` and the
variable chain ``Cz<i>``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .core import EventDecl, SppInstance, Transition, is_token
from .oracle import CnfFormula, Qbf2Formula


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class ReducedInstance:
    instance: SppInstance
    budget: int
    mode: str  # "chi" or "validity"
    provenance: tuple[str, str]  # (construction, formula digest)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        yield lineno, line


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise FormulaSyntaxError(f"expected integers: {line!r}", lineno) from None


def parse_dimacs(text: str, max_clause_size: int | None = None) -> CnfFormula:
    """Parse DIMACS CNF, one clause per line.  Duplicate literals collapse;
    tautological clauses are rejected."""
    header = None
    clauses = []
    for lineno, line in _content_lines(text):
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf" \
                    or not parts[2].isdigit() or not parts[3].isdigit():
                raise FormulaSyntaxError("malformed header, expected 'p cnf <vars> <clauses>'", lineno)
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise FormulaSyntaxError("clause before 'p cnf' header", lineno)
        lits = _ints(line, lineno)
        if not lits or lits[-1] != 0 or 0 in lits[:-1]:
            raise FormulaSyntaxError("clause must end with a single terminating 0", lineno)
        clause = frozenset(lits[:-1])
        for lit in clause:
            if abs(lit) > header[0]:
                raise FormulaSyntaxError(f"literal {lit} out of range", lineno)
            if -lit in clause:
                raise FormulaSyntaxError(f"tautological clause (contains {abs(lit)} and -{abs(lit)})", lineno)
        if max_clause_size is not None and len(clause) > max_clause_size:
            raise FormulaSyntaxError(f"clause has {len(clause)} literals, limit {max_clause_size}", lineno)
        clauses.append(clause)
    if header is None:
        raise FormulaSyntaxError("missing 'p cnf' header")
    if len(clauses) != header[1]:
        raise FormulaSyntaxError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def parse_qdnf(text: str) -> Qbf2Formula:
    """Parse the ``p qdnf <m>`` format: an ``e ... 0`` line, an ``a ... 0``
    line, then m conjunct lines of 1-3 literals each ending in 0."""
    m = None
    blocks: dict[str, list[int]] = {}
    conjuncts = []
    for lineno, line in _content_lines(text):
        if m is None:
            parts = line.split()
            if len(parts) != 3 or parts[:2] != ["p", "qdnf"] or not parts[2].isdigit():
                raise FormulaSyntaxError("malformed header, expected 'p qdnf <m>'", lineno)
            m = int(parts[2])
            continue
        if line[0] in "ea":
            kind = line[0]
            if kind in blocks or conjuncts or (kind == "a" and "e" not in blocks):
                raise FormulaSyntaxError(f"unexpected '{kind}' line", lineno)
            nums = _ints(line[1:], lineno)
            if not nums or nums[-1] != 0 or any(v <= 0 for v in nums[:-1]):
                raise FormulaSyntaxError("quantifier line must list positive variables and end with 0", lineno)
            blocks[kind] = nums[:-1]
            continue
        if "a" not in blocks:
            raise FormulaSyntaxError("conjunct before quantifier lines", lineno)
        lits = _ints(line, lineno)
        if not lits or lits[-1] != 0 or 0 in lits[:-1]:
            raise FormulaSyntaxError("conjunct must end with a single terminating 0", lineno)
        conj = frozenset(lits[:-1])
        if not 1 <= len(conj) <= 3:
            raise FormulaSyntaxError(f"conjunct needs 1-3 literals, got {len(conj)}", lineno)
        conjuncts.append((lineno, conj))
    if m is None:
        raise FormulaSyntaxError("missing 'p qdnf' header")
    if "a" not in blocks:
        raise FormulaSyntaxError("missing quantifier lines")
    if len(conjuncts) != m:
        raise FormulaSyntaxError(f"header announces {m} conjuncts, found {len(conjuncts)}")
    xs, ys = blocks["e"], blocks["a"]
    if set(xs) & set(ys):
        raise FormulaSyntaxError("quantifier blocks overlap")
    known = set(xs) | set(ys)
    for lineno, conj in conjuncts:
        for lit in conj:
            if abs(lit) not in known:
                raise FormulaSyntaxError(f"literal {lit} is not quantified", lineno)
    try:
        return Qbf2Formula(tuple(xs), tuple(ys), tuple(c for _, c in conjuncts))
    except ValueError as exc:
        raise FormulaSyntaxError(str(exc)) from None


def _digest(*parts) -> str:
    return hashlib.sha1(repr(parts).encode()).hexdigest()[:16]


def _literal_order(clause) -> list[int]:
    return sorted(clause, key=lambda lit: (abs(lit), lit < 0))


def _uniform_events(names) -> tuple[EventDecl, ...]:
    return tuple(EventDecl.protected(e, 1, 1) for e in names)


def _check_names(names) -> None:
    events = [n for v in names for n in (v, v + "p")]
    if len(set(events)) != len(events) or not all(is_token(e) for e in events):
        raise ValueError("variable names produce clashing or invalid event names")


def reduce_3sat(f: CnfFormula) -> ReducedInstance:
    name = f.name
    _check_names(f.names)

    def lit(l: int) -> str:
        return name(l) if l > 0 else name(-l) + "p"

    states = ["q0", "f"]
    trans = []
    for v in range(1, f.num_vars + 1):
        qv = f"q_{name(v)}"
        states.append(qv)
        trans += [("q0", name(v), qv), (qv, name(v) + "p", "f")]
    for i, clause in enumerate(f.clauses, start=1):
        if not clause:
            raise ValueError(f"clause {i} is empty; the formula is trivially unsatisfiable")
        lits = _literal_order(clause)
        chain = ["q0"] + [f"c{i}_{j}" for j in range(1, len(lits))] + ["f"]
        states += chain[1:-1]
        trans += [(chain[j], lit(l), chain[j + 1]) for j, l in enumerate(lits)]
    events = _uniform_events(e for v in f.names for e in (v, v + "p"))
    inst = SppInstance(tuple(states), events, tuple(Transition(*t) for t in trans),
                       ("q0",), {"f": 1})
    return ReducedInstance(inst, f.num_vars, "chi", ("sat3", _digest(f.num_vars, f.clauses, f.names)))


def reduce_chi_validity(f: CnfFormula) -> tuple[SppInstance, frozenset[str]]:
    if f.num_vars == 0:
        raise ValueError("formula has no variables")
    name = f.name
    _check_names(f.names)

    def lit(l: int) -> str:
        return name(l) if l > 0 else name(-l) + "p"

    # the chain visits every clause, then every {x, x'} pair
    sets = [[lit(l) for l in _literal_order(c)] for c in f.clauses]
    sets += [[name(v), name(v) + "p"] for v in range(1, f.num_vars + 1)]
    chain = ["q0"] + [f"C{i}" for i in range(1, len(f.clauses) + 1)] \
        + [f"Cz{i}" for i in range(1, f.num_vars + 1)]
    trans = []
    for i, labels in enumerate(sets):
        if not labels:
            raise ValueError(f"clause {i + 1} is empty")
        trans += [(chain[i], a, chain[i + 1]) for a in labels]
    events = [e for v in f.names for e in (v, v + "p")]
    inst = SppInstance(tuple(chain), _uniform_events(events), tuple(Transition(*t) for t in trans),
                       ("q0",), {chain[-1]: f.num_vars + 1})
    return inst, frozenset(events)


def reduce_qsat2(f: Qbf2Formula) -> ReducedInstance:
    xs, ys = f.exists_vars, f.forall_vars
    n, r = len(xs), len(ys)
    if n + r == 0:
        raise ValueError("formula has no variables")
    names = f.names
    _check_names([names[v] for v in xs + ys])

    def neg(l: int) -> str:
        # event for the negation of literal l (double negation cancels)
        return names[-l] if l < 0 else names[l] + "p"

    states = ["q0", "f1"]
    trans = []
    for x in xs:
        qx = f"q_{names[x]}"
        states.append(qx)
        trans += [("q0", names[x], qx), (qx, names[x] + "p", "f1")]
    for y in ys:
        trans += [("q0", names[y], "f1"), ("q0", names[y] + "p", "f1")]
    prev = "q0"
    for i, conj in enumerate(f.conjuncts, start=1):
        if not conj:
            raise ValueError(f"conjunct {i} is empty")
        here = f"C{i}"
        states.append(here)
        trans += [(prev, neg(l), here) for l in _literal_order(conj)]
        prev = here
    zs = xs + ys
    for i, z in enumerate(zs, start=1):
        here = "f2" if i == len(zs) else f"Cz{i}"
        states.append(here)
        trans += [(prev, names[z], here), (prev, names[z] + "p", here)]
        prev = here
    events = _uniform_events(e for z in zs for e in (names[z], names[z] + "p"))
    inst = SppInstance(tuple(states), events, tuple(Transition(*t) for t in trans),
                       ("q0",), {"f1": 1, "f2": n + r + 1})
    return ReducedInstance(inst, n + 2 * r, "chi",
                           ("qsat2", _digest(xs, ys, f.conjuncts, sorted(names.items()))))
