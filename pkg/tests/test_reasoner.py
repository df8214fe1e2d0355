from __future__ import annotations

import random

import pytest
from hypothesis import given, settings

from _gen import ontologies, programs, random_dataset
from hornify.backtranslate import normalize_ontology, rewrite_ontology
from hornify.marking import classify_predicates, find_marking
from hornify.ontology import Dataset, parse_dataset, parse_ontology
from hornify.program import (
    NOT_BOT,
    TOP_P,
    Atom,
    Const,
    Fn,
    Program,
    parse_program,
    standard_translate,
)
from hornify.proofcheck import validate_trace
from hornify.reasoner import (
    AGREE,
    DEFAULT_CONSTANT,
    DISAGREE,
    INCONCLUSIVE,
    SAT,
    SAT_BOUNDED,
    UNSAT,
    BudgetExceeded,
    SatReport,
    check_equisat,
    check_sat_disjunctive,
    default_budget,
    ground_program,
    saturate_horn,
    term_universe,
    verdict_of,
)
from hornify.successor import successor_translate
from hornify.transpose import transpose

AE = parse_dataset("A(a)\nE(a)")


def test_grounding_depth_cut():
    p = parse_program("A(?x) -> B(f(?x)).")
    assert not [g for g in ground_program(p, parse_dataset("A(a)"), 0) if g.rule == 0]
    ground = [g for g in ground_program(p, parse_dataset("A(a)"), 1) if g.rule == 0]
    assert [(str(g.body[0]), str(g.head[0])) for g in ground] == [("A(a)", "B(f(a))")]


def test_grounding_oex(oex):
    ground = ground_program(successor_translate(oex), AE, 2)
    assert any(str(g.body[0]) == "B(a)" and str(g.head[0]) == "D(f_R_D(a))" for g in ground)


def test_grounding_budget():
    p = parse_program("A(?x), B(?y), C(?z) -> D(?x).")
    with pytest.raises(BudgetExceeded):
        ground_program(p, parse_dataset("A(a)\nA(b)\nA(c)"), 0, budget=5)


def test_term_universe():
    from hornify.program import NamedFunction
    u = term_universe(["a"], [NamedFunction("f")], 2)
    assert [str(t) for t in u] == ["a", "f(a)", "f(f(a))"]


def test_oex_unsat_everywhere(oex):
    xi = successor_translate(oex)
    for p in (standard_translate(oex), xi):
        r = check_sat_disjunctive(p, AE, 2)
        assert r.status == UNSAT
        assert validate_trace(r.trace, p, AE) == []
    rw = rewrite_ontology(oex)
    t = rw.transposed
    r = saturate_horn(t, AE, 2)
    assert r.status == UNSAT and validate_trace(r.trace, t, AE) == []
    h = standard_translate(normalize_ontology(rw.ontology))
    r = saturate_horn(h, AE, 2)
    assert r.status == UNSAT and validate_trace(r.trace, h, AE) == []


def test_pex_transposed_unsat(pex):
    from hornify.marking import parse_marking
    t = transpose(pex, parse_marking("C,Bot", pex))
    d = parse_dataset("A(a)")
    r = saturate_horn(t, d, 2)
    assert r.status == UNSAT and validate_trace(r.trace, t, d) == []


def test_sigma_only_is_sat():
    r = saturate_horn(Program(), parse_dataset("A(a)"), 3)
    assert r.status == SAT


def test_single_fact_model(oex):
    r = check_sat_disjunctive(standard_translate(oex), parse_dataset("E(a)"), 2)
    assert r.status in (SAT, SAT_BOUNDED)
    assert Atom(TOP_P, (Const("a"),)) in r.model


def test_saturate_needs_horn(oex):
    with pytest.raises(ValueError):
        saturate_horn(standard_translate(oex), AE)


def test_equisat_examples(oex):
    assert check_equisat(oex, AE, 2).verdict == AGREE
    empty = check_equisat(oex, Dataset(), 2)
    assert all(leg.status != UNSAT for leg in empty.legs)
    assert empty.verdict in (AGREE, INCONCLUSIVE)
    assert check_equisat(oex, parse_dataset("C(a)"), 3).verdict != DISAGREE


def test_verdicts():
    u, s, b = SatReport(UNSAT), SatReport(SAT), SatReport(SAT_BOUNDED)
    assert verdict_of([u, u, u]) == AGREE
    assert verdict_of([s, s]) == AGREE
    assert verdict_of([u, s, b]) == DISAGREE
    assert verdict_of([u, b]) == INCONCLUSIVE
    assert verdict_of([s, b]) == INCONCLUSIVE


def test_budget_env(monkeypatch):
    monkeypatch.setenv("HORNIFY_BUDGET", "17")
    assert default_budget() == 17
    monkeypatch.setenv("HORNIFY_BUDGET", "lots")
    with pytest.raises(ValueError):
        default_budget()


def test_budget_stops_saturation():
    p = parse_program("A(?x) -> A(f(?x)).")
    with pytest.raises(BudgetExceeded):
        saturate_horn(p, parse_dataset("A(a)"), 50, budget=10)


def test_default_constant():
    p = parse_program("True(?x) -> False(?x).")
    r = check_sat_disjunctive(p, Dataset(), 1)
    assert r.status == UNSAT
    assert validate_trace(r.trace, p, Dataset()) == []
    assert any(str(a) == f"True({DEFAULT_CONSTANT})" for s in r.trace.steps for a in s.clause)


def test_negative_depth():
    with pytest.raises(ValueError):
        check_sat_disjunctive(Program(), None, -1)


def test_deterministic(oex):
    a = check_sat_disjunctive(standard_translate(oex), AE, 2).trace.render()
    b = check_sat_disjunctive(standard_translate(oex), AE, 2).trace.render()
    assert a == b


# -- oracle: propositional satisfiability of the bounded grounding ---------------------------


def _dpll(clauses):
    clauses = [set(c) for c in clauses]
    assignment = {}
    while True:
        units = [next(iter(c)) for c in clauses if len(c) == 1]
        if not units:
            break
        lit = units[0]
        assignment[lit[0]] = lit[1]
        nxt = []
        for c in clauses:
            if lit in c:
                continue
            c = c - {(lit[0], not lit[1])}
            if not c:
                return False
            nxt.append(c)
        clauses = nxt
    if not clauses:
        return True
    var = next(iter(clauses[0]))[0]
    return any(_dpll(clauses + [{(var, v)}]) for v in (True, False))


def _bounded_unsat(p: Program, d, depth: int) -> bool:
    clauses = []
    for g in ground_program(p, d, depth):
        clauses.append([(str(a), False) for a in g.body] + [(str(a), True) for a in g.head])
    for f in d:
        clauses.append([(f"{f.predicate}({','.join(f.args)})", True)])
    if not d.constants and not p.signature.constants:
        clauses.append([(f"True({DEFAULT_CONSTANT})", True)])
    return not _dpll(clauses)


def _dataset_for(p: Program, rng: random.Random) -> Dataset:
    from hornify.ontology import Fact
    unary = [q for q in p.predicates if q.arity == 1 and q.kind == "concept" and not q.negated]
    binary = [q for q in p.predicates if q.kind == "role"]
    facts = []
    for _ in range(rng.randint(0, 3)):
        if binary and rng.random() < 0.3:
            facts.append(Fact(rng.choice(binary).name, (rng.choice("ab"), rng.choice("ab"))))
        elif unary:
            facts.append(Fact(rng.choice(unary).name, (rng.choice("ab"),)))
    return Dataset(tuple(facts))


@settings(max_examples=120, deadline=None)
@given(programs(n_preds=4, n_rules=6))
def test_engine_matches_grounding_oracle(p):
    rng = random.Random(len(p.core))
    d = _dataset_for(p, rng)
    r = check_sat_disjunctive(p, d, 1)
    assert (r.status == UNSAT) == _bounded_unsat(p, d, 1)
    if r.status == UNSAT:
        assert validate_trace(r.trace, p, d) == []


@settings(max_examples=120, deadline=None)
@given(ontologies(n_concepts=5, n_roles=2, n_axioms=7))
def test_depth_monotonicity(o):
    rng = random.Random(len(o) * 31)
    d = random_dataset(rng, o, n_constants=2, n_facts=4)
    p = standard_translate(o)
    seen_unsat = False
    for depth in (0, 1, 2):
        r = check_sat_disjunctive(p, d, depth)
        if seen_unsat:
            assert r.status == UNSAT
        seen_unsat = r.status == UNSAT
        if r.status == SAT:
            break


@settings(max_examples=120, deadline=None)
@given(ontologies(n_concepts=5, n_roles=2, n_axioms=7))
def test_traces_valid_and_shaped(o):
    rng = random.Random(len(o) * 17)
    d = random_dataset(rng, o, n_constants=2, n_facts=5)
    p = standard_translate(o)
    r = check_sat_disjunctive(p, d, 2)
    if r.status != UNSAT:
        return
    assert validate_trace(r.trace, p, d) == []
    disj = classify_predicates(p).disjunctive
    for s in r.trace.steps:
        if len(s.clause) > 1:
            assert all(a.pred in disj or a.pred == TOP_P for a in s.clause)


def _ground_terms(model):
    out = set()
    for a in model:
        for t in a.args:
            while True:
                out.add(t)
                if not isinstance(t, Fn):
                    break
                t = t.arg
    return out


@settings(max_examples=100, deadline=None)
@given(ontologies(n_concepts=5, n_roles=2, n_axioms=7))
def test_not_bot_holds_on_every_term(o):
    rw = rewrite_ontology(o)
    if rw is None:
        return
    rng = random.Random(len(o) * 7)
    d = random_dataset(rng, o, n_constants=2, n_facts=4)
    r = saturate_horn(rw.transposed, d, 2)
    if r.status == UNSAT:
        assert validate_trace(r.trace, rw.transposed, d) == []
        return
    # the injected constant only matters when some rule body tests for True
    uses_top = any(a.pred == TOP_P for rule in rw.transposed.core for a in rule.body)
    for t in _ground_terms(r.model):
        if t == Const(DEFAULT_CONSTANT) and not uses_top:
            continue
        assert Atom(NOT_BOT, (t,)) in r.model


@settings(max_examples=80, deadline=None)
@given(ontologies(n_concepts=5, n_roles=2, n_axioms=7))
def test_transposition_equisatisfiable(o):
    xi = successor_translate(o)
    m = find_marking(xi)
    if m is None:
        return
    t = transpose(xi, m)
    rng = random.Random(len(o) * 13)
    d = random_dataset(rng, o, n_constants=2, n_facts=4)
    a = check_sat_disjunctive(xi, d, 2).status
    b = saturate_horn(t, d, 2).status
    assert {a, b} != {SAT, UNSAT}


@settings(max_examples=80, deadline=None)
@given(ontologies(n_concepts=5, n_roles=2, n_axioms=7))
def test_function_congruence_modes_agree(o):
    rng = random.Random(len(o) * 5)
    d = random_dataset(rng, o, n_constants=2, n_facts=4)
    statuses = set()
    for fc in (True, False):
        statuses.add(check_sat_disjunctive(standard_translate(o, fc), d, 2).status)
        statuses.add(check_sat_disjunctive(successor_translate(o, fc), d, 2).status)
        rw = rewrite_ontology(o, function_congruence=fc)
        if rw is not None:
            statuses.add(saturate_horn(rw.transposed, d, 2).status)
    assert {SAT, UNSAT} - statuses
