"""Cut-generation solver for SPP over a built-in 0/1 covering ILP backend.

The model has one binary variable per protectable event and minimizes total
cost.  Each round solves the current model, turns the solution into a
candidate policy, and asks the path checker for violated (initial, secret)
pairs.  Every violating path ``pi`` to secret ``s`` becomes the cut

    sum_e |pi|_e * clearance(e) * x_e >= level(s)

(or ``sum_{e in pi} clearance(e) * x_e >= level(s)`` in distinct-event mode),
which every valid policy satisfies and the candidate does not.
"""

from __future__ import annotations

import enum
import hashlib
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import SppInstance, policy_cost
from .paths import DEFAULT_CHI_CAP, ResourceLimitError, Violation, is_solvable, violations


@dataclass(frozen=True)
class Cut:
    coeffs: Mapping[str, int]
    rhs: int
    origin: tuple[str, str, str] = ("", "", "")  # (initial, secret, path digest)

    def key(self) -> tuple:
        return tuple(sorted((e, a) for e, a in self.coeffs.items() if a)), self.rhs

    def satisfied_by(self, policy: Iterable[str]) -> bool:
        policy = set(policy)
        return sum(a for e, a in self.coeffs.items() if e in policy) >= self.rhs


@dataclass
class IlpModel:
    variables: list[str]
    objective: dict[str, int]
    constraints: list[Cut] = field(default_factory=list)

    def __post_init__(self):
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ValueError("duplicate variable")
        for v in self.variables:
            if self.objective.get(v, 0) < 0:
                raise ValueError(f"negative objective coefficient for {v}")
        for cut in self.constraints:
            self._check_cut(cut, declared)

    @staticmethod
    def _check_cut(cut: Cut, declared) -> None:
        for v, a in cut.coeffs.items():
            if v not in declared:
                raise ValueError(f"constraint references undeclared variable {v}")
            if a < 0:
                raise ValueError("constraint coefficients must be nonnegative")
        if cut.rhs < 0:
            raise ValueError("constraint right-hand side must be nonnegative")

    @classmethod
    def for_instance(cls, inst: SppInstance) -> "IlpModel":
        names = list(inst.protectable)
        return cls(names, {e: inst.event_map[e].cost for e in names})

    def add(self, cut: Cut) -> None:
        self._check_cut(cut, set(self.variables))
        self.constraints.append(cut)

    def value(self, assignment: Mapping[str, int]) -> int:
        return sum(self.objective.get(v, 0) * assignment.get(v, 0) for v in self.variables)


# ------------------------------------------------------------------ backend

class _BranchAndBound:
    """Depth-first 0/1 branch and bound for nonnegative covering rows.

    Variables are fixed in model order, 0-branch first, and only strictly
    improving leaves replace the incumbent.  Hence the result is the
    lexicographically smallest 0/1 vector among the optimal ones.  The bound
    at each node is the max over rows of that row's fractional
    knapsack-cover value on the free variables, with coefficients capped at
    the row's residual demand.
    """

    def __init__(self, model: IlpModel):
        self.names = list(model.variables)
        pos = {v: j for j, v in enumerate(self.names)}
        self.cost = [model.objective.get(v, 0) for v in self.names]
        rows = {}
        for cut in model.constraints:
            if cut.rhs <= 0:
                continue
            terms = tuple(sorted((pos[v], a) for v, a in cut.coeffs.items() if a > 0))
            rows[(terms, cut.rhs)] = None
        self.rows = [list(t) for t, _ in rows]
        self.rhs = [r for _, r in rows]
        # row indices touched by each variable
        self.var_rows: list[list[tuple[int, int]]] = [[] for _ in self.names]
        for r, terms in enumerate(self.rows):
            for j, a in terms:
                self.var_rows[j].append((r, a))
        self.best_cost = math.inf
        self.best: list[int] | None = None

    def _row_bound(self, r: int, residual: int, k: int) -> int | None:
        items = []
        total = 0
        for j, a in self.rows[r]:
            if j >= k:
                a = min(a, residual)
                items.append((self.cost[j] / a, self.cost[j], a))
                total += a
        if total < residual:
            return None
        items.sort()
        need = residual
        bound = 0
        for _, c, a in items:
            if a >= need:
                return bound + -(-c * need // a)
            bound += c
            need -= a
        return bound

    def _bound(self, residual: list[int], k: int) -> int | None:
        best = 0
        for r, res in enumerate(residual):
            if res > 0:
                b = self._row_bound(r, res, k)
                if b is None:
                    return None
                if b > best:
                    best = b
        return best

    def solve(self) -> list[int] | None:
        n = len(self.names)
        residual = list(self.rhs)
        x = [0] * n
        unsatisfied = sum(1 for res in residual if res > 0)

        def visit(k: int, cost: int, unsatisfied: int) -> None:
            if unsatisfied == 0:
                if cost < self.best_cost:
                    self.best_cost = cost
                    self.best = x[:k] + [0] * (n - k)
                return
            if k == n:
                return
            lb = self._bound(residual, k)
            if lb is None or cost + lb >= self.best_cost:
                return
            visit(k + 1, cost, unsatisfied)
            x[k] = 1
            newly = 0
            for r, a in self.var_rows[k]:
                before = residual[r]
                residual[r] = before - a
                if before > 0 >= residual[r]:
                    newly += 1
            visit(k + 1, cost + self.cost[k], unsatisfied - newly)
            for r, a in self.var_rows[k]:
                residual[r] += a
            x[k] = 0

        visit(0, 0, unsatisfied)
        return self.best


def solve_ilp(model: IlpModel) -> dict[str, int] | None:
    """Exact minimum-cost 0/1 assignment, or None when infeasible.

    Ties between optimal assignments go to the lexicographically smallest
    0/1 vector in ``model.variables`` order.
    """
    bb = _BranchAndBound(model)
    best = bb.solve()
    if best is None:
        return None
    return dict(zip(bb.names, best))


def _lp_name(prefix: str, name: str) -> str:
    cleaned = "".join(ch if ch.isalnum() or ch in "_.!\"#$%&()/,;?@`'{}|~" else "_" for ch in name)
    out = prefix + cleaned
    if not out or out[0].isdigit() or out[0] == ".":
        out = "x" + out
    return out


def export_lp(model: IlpModel, prefix: str = "x_") -> str:
    """Write ``model`` in CPLEX LP text format."""
    name = {v: _lp_name(prefix, v) for v in model.variables}

    def expr(coeffs: Mapping[str, int], keep_zero: bool) -> str:
        terms = [f"{coeffs.get(v, 0)} {name[v]}" for v in model.variables
                 if keep_zero or coeffs.get(v, 0)]
        return " + ".join(terms) if terms else "0"

    lines = ["\\ secret protection model", "Minimize", f" obj: {expr(model.objective, True)}"]
    if model.constraints:
        lines.append("Subject To")
        for i, cut in enumerate(model.constraints, start=1):
            lines.append(f" c{i}: {expr(cut.coeffs, False)} >= {cut.rhs}")
    if model.variables:
        lines.append("Binaries")
        lines.append(" " + " ".join(name[v] for v in model.variables))
    lines.append("End")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ cut generation

class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"
    RESOURCE_LIMIT = "ResourceLimit"
    TIME_LIMIT = "TimeLimit"


@dataclass(frozen=True)
class SolverConfig:
    chi: bool = False
    max_iters: int = 5000
    cut_strategy: str = "all"  # "all" pairs per round, or "first" violating initial
    chi_cap: int = DEFAULT_CHI_CAP
    time_limit_ms: float | None = None

    def __post_init__(self):
        if self.cut_strategy not in ("all", "first"):
            raise ValueError(f"unknown cut strategy {self.cut_strategy!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class SolveReport:
    status: Status
    policy: frozenset[str] | None
    cost: int | None
    iterations: int
    cuts: int
    wall_time_ms: float
    objective_trace: list[int] = field(default_factory=list)
    model: IlpModel | None = field(default=None, repr=False)
    chi: bool = False

    @property
    def mode(self) -> str:
        return "chi" if self.chi else "validity"

    def to_record(self) -> str:
        policy = ",".join(sorted(self.policy)) if self.policy is not None else "-"
        cost = "-" if self.cost is None else str(self.cost)
        return (f"status={self.status.value} cost={cost} iterations={self.iterations} "
                f"cuts={self.cuts} wall_ms={self.wall_time_ms:.3f} policy={policy}")


def make_cut(inst: SppInstance, v: Violation, chi: bool) -> Cut:
    events = [e for e in v.path.events if inst.event_map[e].protectable]
    if chi:
        coeffs = {e: inst.clearance(e) for e in set(events)}
    else:
        coeffs = {e: n * inst.clearance(e) for e, n in Counter(events).items()}
    digest = hashlib.sha1(
        f"{v.initial}|{'.'.join(v.path.events)}|{v.secret}|{int(chi)}".encode()).hexdigest()[:16]
    return Cut(coeffs, v.required, (v.initial, v.secret, digest))


def _round_violations(inst, candidate, config) -> list[Violation]:
    found = []
    for batch in violations(inst, candidate, chi=config.chi, chi_cap=config.chi_cap):
        found.extend(batch)
        if batch and config.cut_strategy == "first":
            break
    return found


def solve_spp(inst: SppInstance, config: SolverConfig = SolverConfig()) -> SolveReport:
    start = time.perf_counter()

    def report(status, policy=None, iterations=0, trace=(), model=None):
        cost = None if policy is None else policy_cost(inst, policy)
        ncuts = len(model.constraints) if model is not None else 0
        return SolveReport(status, policy, cost, iterations, ncuts,
                           (time.perf_counter() - start) * 1000.0, list(trace), model, config.chi)

    try:
        if not is_solvable(inst, config.chi, config.chi_cap):
            return report(Status.INFEASIBLE)
    except ResourceLimitError:
        return report(Status.RESOURCE_LIMIT)

    model = IlpModel.for_instance(inst)
    seen_origins: set[str] = set()
    seen_rows: set[tuple] = set()
    trace: list[int] = []
    candidate = None
    deadline = None if config.time_limit_ms is None else start + config.time_limit_ms / 1000.0

    for iteration in range(1, config.max_iters + 1):
        assignment = solve_ilp(model)
        if assignment is None:  # cannot happen on a solvable instance
            return report(Status.INFEASIBLE, None, iteration, trace, model)
        candidate = frozenset(v for v, on in assignment.items() if on)
        trace.append(model.value(assignment))
        try:
            found = _round_violations(inst, candidate, config)
        except ResourceLimitError:
            return report(Status.RESOURCE_LIMIT, candidate, iteration, trace, model)
        if not found:
            return report(Status.OPTIMAL, candidate, iteration, trace, model)
        for v in found:
            cut = make_cut(inst, v, config.chi)
            if cut.origin[2] in seen_origins or cut.key() in seen_rows:
                continue
            seen_origins.add(cut.origin[2])
            seen_rows.add(cut.key())
            model.add(cut)
        if deadline is not None and time.perf_counter() > deadline:
            return report(Status.TIME_LIMIT, candidate, iteration, trace, model)
    return report(Status.ITERATION_LIMIT, candidate, config.max_iters, trace, model)


@dataclass(frozen=True)
class BudgetDecision:
    outcome: str  # "yes", "no" or "unknown"
    policy: frozenset[str] | None = None
    report: SolveReport | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.outcome == "yes"


def decide_budget(inst: SppInstance, budget: int, chi: bool = False,
                  config: SolverConfig | None = None) -> BudgetDecision:
    """Is there a valid (or distinct-event valid) policy costing at most ``budget``?"""
    if config is None:
        config = SolverConfig(chi=chi)
    elif config.chi != chi:
        config = SolverConfig(chi, config.max_iters, config.cut_strategy,
                              config.chi_cap, config.time_limit_ms)
    rep = solve_spp(inst, config)
    if rep.status is Status.OPTIMAL:
        if rep.cost <= budget:
            return BudgetDecision("yes", rep.policy, rep)
        return BudgetDecision("no", None, rep)
    if rep.status is Status.INFEASIBLE:
        return BudgetDecision("no", None, rep)
    # a relaxation already over budget is a sound "no"
    if rep.objective_trace and rep.objective_trace[-1] > budget:
        return BudgetDecision("no", None, rep)
    return BudgetDecision("unknown", None, rep)
