import random

import pytest

from sppkit import check_chi_valid, decide_budget, serialize_instance
from sppkit.oracle import (CnfFormula, Qbf2Formula, brute_force_chi_optimal, qsat2_brute,
                           sat_brute)
from sppkit.reductions import (FormulaSyntaxError, parse_dimacs, parse_qdnf, reduce_3sat,
                               reduce_chi_validity, reduce_qsat2)

from support import DATA, sat_formula, unsat_formula, random_cnf


def test_parse_sat_dimacs():
    f = parse_dimacs((DATA / "sat3.cnf").read_text(), max_clause_size=3)
    assert f.num_vars == 3
    assert f.clauses == (frozenset({1, -2, 3}), frozenset({-1, 2, -3}))


def test_parse_empty_formula():
    f = parse_dimacs("p cnf 1 0\n")
    assert f.num_vars == 1 and f.clauses == ()


def test_duplicate_literals_collapse():
    assert parse_dimacs("p cnf 2 1\n1 1 -2 0\n").clauses == (frozenset({1, -2}),)


@pytest.mark.parametrize("text, needle", [
    ("p cnf 3 1\n1 2 3\n", "terminating 0"),
    ("p cnf 2 1\n1 3 0\n", "out of range"),
    ("p cnf 2 1\n1 -1 0\n", "tautological"),
    ("p cnf x 1\n1 0\n", "malformed header"),
    ("p cnf 2 2\n1 0\n", "announces 2"),
    ("1 0\n", "before"),
    ("p cnf 4 1\n1 2 3 4 0\n", "limit 3"),
])
def test_dimacs_errors(text, needle):
    with pytest.raises(FormulaSyntaxError, match=needle):
        parse_dimacs(text, max_clause_size=3)


def test_reduce_sat_formula_counts():
    red = reduce_3sat(sat_formula())
    inst = red.instance
    assert len(inst.states) == 9 and len(inst.transitions) == 12 and red.budget == 3
    assert set(inst.states) == {"q0", "q_x", "q_y", "q_z", "c1_1", "c1_2", "c2_1", "c2_2", "f"}
    assert red.mode == "chi" and inst.security["f"] == 1 and inst.initial == ("q0",)


def test_reduce_unsat_formula_counts():
    red = reduce_3sat(unsat_formula())
    assert len(red.instance.states) == 7 and red.budget == 3


def test_reduce_single_clause():
    red = reduce_3sat(CnfFormula(1, (frozenset({1}),), ("x",)))
    assert set(red.instance.states) == {"q0", "q_x", "f"}
    assert {(t.source, t.event, t.target) for t in red.instance.transitions} == \
        {("q0", "x", "q_x"), ("q_x", "xp", "f"), ("q0", "x", "f")}
    assert red.budget == 1


def test_reduce_rejects_empty_clause():
    with pytest.raises(ValueError):
        reduce_3sat(CnfFormula(1, (frozenset(),)))


def test_reduce_3sat_closed_form_counts():
    rng = random.Random(3)
    for _ in range(60):
        f = random_cnf(rng, 8, 10)
        inst = reduce_3sat(f).instance
        n, ks = f.num_vars, [len(c) for c in f.clauses]
        assert len(inst.states) == 2 + n + sum(k - 1 for k in ks)
        assert len(inst.events) == 2 * n
        # singleton clauses {x} duplicate (q0, x, f) when repeated; count distinct edges
        edges = {("q0", f.name(v), f"q_{f.name(v)}") for v in range(1, n + 1)}
        edges |= {(f"q_{f.name(v)}", f.name(v) + "p", "f") for v in range(1, n + 1)}
        expected = len(edges) + sum(ks) - (len([k for k in ks if k == 1])
                                           - len({c for c in f.clauses if len(c) == 1}))
        assert len(inst.transitions) == expected


def test_reduce_3sat_deterministic():
    f = random_cnf(random.Random(9), 6, 8)
    assert serialize_instance(reduce_3sat(f).instance) == serialize_instance(reduce_3sat(f).instance)


def test_sat_reduction_equivalence_small():
    rng = random.Random(21)
    for _ in range(40):
        f = random_cnf(rng, 6, 8)
        red = reduce_3sat(f)
        sat = sat_brute(f) is not None
        best = brute_force_chi_optimal(red.instance)
        assert sat == (best is not None and best[1] <= red.budget)
        assert sat == (decide_budget(red.instance, red.budget, chi=True).outcome == "yes")


def test_chi_validity_counts():
    f = CnfFormula(2, (frozenset({1, -2}),))
    inst, policy = reduce_chi_validity(f)
    assert len(inst.states) == 4
    assert inst.security[inst.secrets[0]] == 3
    assert policy == {"x1", "x1p", "x2", "x2p"}


def test_chi_validity_satisfiable_single_clause():
    inst, policy = reduce_chi_validity(CnfFormula(1, (frozenset({1}),), ("x",)))
    v = check_chi_valid(inst, policy)
    assert v is not None and v.achieved == 1 and v.required == 2


def test_chi_validity_unsatisfiable():
    inst, policy = reduce_chi_validity(CnfFormula(1, (frozenset({1}), frozenset({-1})), ("x",)))
    assert check_chi_valid(inst, policy) is None


def test_chi_validity_paths_have_fixed_length():
    rng = random.Random(4)
    for _ in range(30):
        f = random_cnf(rng, 6, 6)
        inst, _ = reduce_chi_validity(f)
        n, m = f.num_vars, len(f.clauses)
        assert len(inst.states) == m + n + 1
        assert {t.source for t in inst.transitions} | set(inst.secrets) == set(inst.states)
        assert inst.security[inst.secrets[0]] == n + 1


def test_chi_validity_reduction_equivalence_small():
    rng = random.Random(33)
    for _ in range(40):
        f = random_cnf(rng, 6, 8)
        inst, policy = reduce_chi_validity(f)
        assert (sat_brute(f) is not None) == (check_chi_valid(inst, policy) is not None)


def test_parse_qdnf_true_formula():
    f = parse_qdnf((DATA / "qbf_true.qdnf").read_text())
    assert f.exists_vars == (1, 2) and f.forall_vars == (3, 4)
    assert f.conjuncts == (frozenset({2, -3}), frozenset({1, 4}), frozenset({-2, -4}))


def test_parse_qdnf_empty_universal_block():
    f = parse_qdnf("p qdnf 1\ne 1 0\na 0\n1 0\n")
    assert f.forall_vars == () and f.conjuncts == (frozenset({1}),)


def test_qdnf_duplicate_literals_collapse():
    assert parse_qdnf("p qdnf 1\ne 1 0\na 2 0\n1 2 1 2 0\n").conjuncts == (frozenset({1, 2}),)


@pytest.mark.parametrize("text, needle", [
    ("p qdnf 1\ne 1 2 3 4 0\na 0\n1 2 3 4 0\n", "1-3 literals"),
    ("p qdnf 1\ne 1 0\na 1 0\n1 0\n", "overlap"),
    ("p qdnf 1\na 1 0\ne 2 0\n1 0\n", "unexpected"),
    ("p qdnf 2\ne 1 0\na 0\n1 0\n", "announces 2"),
    ("p qdnf 1\ne 1 0\na 0\n2 0\n", "not quantified"),
])
def test_qdnf_errors(text, needle):
    with pytest.raises(FormulaSyntaxError, match=needle):
        parse_qdnf(text)


def test_reduce_true_qbf():
    red = reduce_qsat2(parse_qdnf((DATA / "qbf_true.qdnf").read_text()))
    inst = red.instance
    assert red.budget == 6 and inst.security["f2"] == 5 and inst.security["f1"] == 1
    assert set(inst.states) == {"q0", "f1", "q_x1", "q_x2", "C1", "C2", "C3",
                                "Cz1", "Cz2", "Cz3", "f2"}
    # conjunct (x2 & -y1) contributes the negated literals x2' and y1
    assert {(t.event, t.target) for t in inst.transitions if t.source == "q0" and t.target == "C1"} \
        == {("x2p", "C1"), ("y1", "C1")}


def test_hand_policy_is_not_chi_valid():
    # the construction as stated admits a cheap path through unprotected events
    red = reduce_qsat2(parse_qdnf((DATA / "qbf_true.qdnf").read_text()))
    policy = {"x1", "x2p", "y1", "y1p", "y2", "y2p"}
    v = check_chi_valid(red.instance, policy)
    assert v is not None and v.secret == "f2" and v.achieved < 5


def test_reduce_smallest_qsat2():
    red = reduce_qsat2(Qbf2Formula((1,), (), (frozenset({1}),), {1: "x"}))
    inst = red.instance
    assert red.budget == 1 and inst.security["f2"] == 2
    assert {(t.source, t.event, t.target) for t in inst.transitions} == {
        ("q0", "x", "q_x"), ("q_x", "xp", "f1"), ("q0", "xp", "C1"),
        ("C1", "x", "f2"), ("C1", "xp", "f2")}


def test_reduce_qsat2_counts():
    rng = random.Random(8)
    for _ in range(50):
        n, r, m = rng.randint(0, 4), rng.randint(0, 4), rng.randint(1, 6)
        if n + r == 0:
            n = 1
        xs, ys = tuple(range(1, n + 1)), tuple(range(n + 1, n + r + 1))
        conj = []
        for _ in range(m):
            vs = rng.sample(range(1, n + r + 1), rng.randint(1, min(3, n + r)))
            conj.append(frozenset(v if rng.random() < 0.5 else -v for v in vs))
        red = reduce_qsat2(Qbf2Formula(xs, ys, tuple(conj)))
        inst = red.instance
        assert len(inst.states) == 2 + n + (m + n + r)
        assert inst.security["f2"] == n + r + 1 and inst.security["f1"] == 1
        assert red.budget == n + 2 * r
        assert len(inst.events) == 2 * (n + r)


def test_qsat2_rejects_no_variables():
    with pytest.raises(ValueError):
        reduce_qsat2(Qbf2Formula((), (), ()))


def test_false_qbf_has_no_cheap_policy():
    f = parse_qdnf((DATA / "qbf_false.qdnf").read_text())
    red = reduce_qsat2(f)
    best = brute_force_chi_optimal(red.instance)
    assert not qsat2_brute(f)
    assert best is None or best[1] > red.budget
