"""Exhaustive ground truth used to cross-check the solver and the reductions.

Nothing here is clever on purpose: policies are enumerated subset by subset,
formulas assignment by assignment.  Size caps raise instead of truncating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import SppInstance
from .paths import check_chi_valid, check_valid

POLICY_CAP = 20
SAT_CAP = 24
QBF_CAP = 20


class OracleCapError(ValueError):
    """Input too large for exhaustive enumeration."""


@dataclass(frozen=True)
class CnfFormula:
    """CNF over variables 1..num_vars; literals are signed ints (DIMACS style)."""

    num_vars: int
    clauses: tuple[frozenset[int], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        clauses = tuple(frozenset(c) for c in self.clauses)
        for c in clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")
        names = tuple(self.names) or tuple(f"x{i}" for i in range(1, self.num_vars + 1))
        if len(names) != self.num_vars or len(set(names)) != len(names):
            raise ValueError("need one distinct name per variable")
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "names", names)

    def name(self, var: int) -> str:
        return self.names[var - 1]

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)


@dataclass(frozen=True)
class Qbf2Formula:
    """exists X forall Y . OR_i AND(conjunct_i); literals are signed ints."""

    exists_vars: tuple[int, ...]
    forall_vars: tuple[int, ...]
    conjuncts: tuple[frozenset[int], ...]
    names: dict[int, str] | None = None

    def __post_init__(self):
        if set(self.exists_vars) & set(self.forall_vars):
            raise ValueError("quantifier blocks overlap")
        if len(set(self.exists_vars)) != len(self.exists_vars) or \
                len(set(self.forall_vars)) != len(self.forall_vars):
            raise ValueError("variable repeated within a quantifier block")
        known = set(self.exists_vars) | set(self.forall_vars)
        conjuncts = tuple(frozenset(c) for c in self.conjuncts)
        for c in conjuncts:
            if not 1 <= len(c) <= 3:
                raise ValueError("conjuncts need 1 to 3 distinct literals")
            for lit in c:
                if abs(lit) not in known:
                    raise ValueError(f"literal {lit} uses an unquantified variable")
        object.__setattr__(self, "exists_vars", tuple(self.exists_vars))
        object.__setattr__(self, "forall_vars", tuple(self.forall_vars))
        object.__setattr__(self, "conjuncts", conjuncts)
        names = dict(self.names or {})
        for i, v in enumerate(self.exists_vars, start=1):
            names.setdefault(v, f"x{i}")
        for i, v in enumerate(self.forall_vars, start=1):
            names.setdefault(v, f"y{i}")
        if len(set(names.values())) != len(names):
            raise ValueError("variable names collide")
        object.__setattr__(self, "names", names)

    def __hash__(self):
        return hash((self.exists_vars, self.forall_vars, self.conjuncts))

    def matrix(self, assignment: dict[int, bool]) -> bool:
        return any(all(assignment[abs(l)] == (l > 0) for l in c) for c in self.conjuncts)


def _sorted_subsets(inst: SppInstance):
    names = list(inst.protectable)
    if len(names) > POLICY_CAP:
        raise OracleCapError(f"{len(names)} protectable events exceed cap {POLICY_CAP}")
    cost = [inst.event_map[e].cost for e in names]
    candidates = []
    for bits in itertools.product((0, 1), repeat=len(names)):
        candidates.append((sum(c for c, b in zip(cost, bits) if b), bits))
    # by cost, then lexicographically smallest 0/1 vector over sorted names
    candidates.sort()
    for total, bits in candidates:
        yield frozenset(e for e, b in zip(names, bits) if b), total


def brute_force_optimal(inst: SppInstance) -> tuple[frozenset[str], int] | None:
    """Cheapest valid policy by exhaustive enumeration, or None if none exists."""
    for policy, total in _sorted_subsets(inst):
        if check_valid(inst, policy) is None:
            return policy, total
    return None


def brute_force_chi_optimal(inst: SppInstance) -> tuple[frozenset[str], int] | None:
    for policy, total in _sorted_subsets(inst):
        if check_chi_valid(inst, policy) is None:
            return policy, total
    return None


def valid_policies(inst: SppInstance, chi: bool = False) -> list[frozenset[str]]:
    """Every valid (or distinct-event valid) policy of ``inst``."""
    check = check_chi_valid if chi else check_valid
    return [p for p, _ in _sorted_subsets(inst) if check(inst, p) is None]


def sat_brute(f: CnfFormula) -> dict[int, bool] | None:
    """First satisfying assignment in lexicographic order (False < True)."""
    if f.num_vars > SAT_CAP:
        raise OracleCapError(f"{f.num_vars} variables exceed cap {SAT_CAP}")
    variables = range(1, f.num_vars + 1)
    for values in itertools.product((False, True), repeat=f.num_vars):
        assignment = dict(zip(variables, values))
        if f.satisfied_by(assignment):
            return assignment
    return None


def qsat2_brute(f: Qbf2Formula) -> bool:
    return qsat2_witness(f) is not None


def qsat2_witness(f: Qbf2Formula) -> dict[int, bool] | None:
    """The first existential assignment that works for every universal one."""
    xs, ys = f.exists_vars, f.forall_vars
    if len(xs) + len(ys) > QBF_CAP:
        raise OracleCapError(f"{len(xs) + len(ys)} variables exceed cap {QBF_CAP}")
    for xv in itertools.product((False, True), repeat=len(xs)):
        fixed = dict(zip(xs, xv))
        if all(f.matrix({**fixed, **dict(zip(ys, yv))})
               for yv in itertools.product((False, True), repeat=len(ys))):
            return fixed
    return None
