"""Exact solver toolkit for the secret protection problem on finite automata."""

from .core import (EventDecl, IndexedAutomaton, PolicyError, SppFormatError, SppInstance,
                   SppSemanticError, SppSyntaxError, Transition, load_instance, parse_instance,
                   policy_cost, serialize_instance)
from .ilp import (BudgetDecision, Cut, IlpModel, SolveReport, SolverConfig, Status,
                  decide_budget, export_lp, solve_ilp, solve_spp)
from .oracle import (CnfFormula, Qbf2Formula, brute_force_chi_optimal, brute_force_optimal,
                     qsat2_brute, sat_brute)
from .paths import (Path, ResourceLimitError, Violation, check_chi_valid, check_valid,
                    is_solvable, min_clearance)

__all__ = [
    "BudgetDecision", "CnfFormula", "Cut", "EventDecl", "IlpModel", "IndexedAutomaton", "Path",
    "PolicyError", "Qbf2Formula", "ResourceLimitError", "SolveReport", "SolverConfig",
    "SppFormatError", "SppInstance", "SppSemanticError", "SppSyntaxError", "Status",
    "Transition", "Violation", "brute_force_chi_optimal", "brute_force_optimal",
    "check_chi_valid", "check_valid", "decide_budget", "export_lp", "is_solvable",
    "load_instance", "min_clearance", "parse_instance", "policy_cost", "qsat2_brute",
    "sat_brute", "serialize_instance", "solve_ilp", "solve_spp",
]
