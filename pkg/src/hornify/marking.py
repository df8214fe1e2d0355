"""Dependency graphs, Horn/disjunctive predicates and markings.

A marking is a set of disjunctive predicates such that every rule has at most
one marked body atom and at most one unmarked head atom, and that is closed
under reachability in the dependency graph.  Markability reduces to 2-SAT.

Generated components take part as follows: the truth axioms and the ``True``
vertex are left out of the graph (otherwise every predicate would reach
``Eq`` through reflexivity and become disjunctive), the falsehood rule has
no head and so no edges, and the equality axioms are included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .program import TOP_P, Predicate, Program, Rule, pred_key, render_rule
from .twosat import solve_2sat

Marking = frozenset  # of Predicate


def graph_rules(p: Program) -> tuple[Rule, ...]:
    """The rules that feed the dependency graph and the marking conditions."""
    s = p.sigma
    return p.core + s.eq + s.bot


@dataclass(frozen=True)
class DependencyGraph:
    vertices: tuple[Predicate, ...]
    labels: dict = field(hash=False)  # (P, Q) -> tuple of rule positions in graph_rules

    @property
    def edges(self) -> frozenset[tuple[Predicate, Predicate]]:
        return frozenset(self.labels)

    def successors(self, p: Predicate) -> set[Predicate]:
        return {q for (a, q) in self.labels if a == p}

    def reachable(self, start) -> set[Predicate]:
        """Everything reachable from ``start`` (a set), the start included."""
        succ: dict[Predicate, set] = {}
        for a, b in self.labels:
            succ.setdefault(a, set()).add(b)
        seen = set(start)
        stack = list(start)
        while stack:
            v = stack.pop()
            for w in succ.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def dependency_graph(p: Program) -> DependencyGraph:
    rules = graph_rules(p)
    vertices: dict[Predicate, None] = {}
    labels: dict[tuple[Predicate, Predicate], list[int]] = {}
    for i, r in enumerate(rules):
        for a in r.body + r.head:
            if a.pred != TOP_P:
                vertices.setdefault(a.pred, None)
        for b in r.body:
            if b.pred == TOP_P:
                continue
            for h in r.head:
                labels.setdefault((b.pred, h.pred), [])
                if i not in labels[(b.pred, h.pred)]:
                    labels[(b.pred, h.pred)].append(i)
    return DependencyGraph(tuple(sorted(vertices, key=pred_key)),
                           {k: tuple(v) for k, v in labels.items()})


@dataclass(frozen=True)
class PredicateClass:
    horn: frozenset[Predicate]
    disjunctive: frozenset[Predicate]


def classify_predicates(p: Program) -> PredicateClass:
    g = dependency_graph(p)
    seeds = {h.pred for r in graph_rules(p) if len(r.head) > 1 for h in r.head}
    disj = frozenset(g.reachable(seeds))
    return PredicateClass(frozenset(g.vertices) - disj, disj)


class MarkingProblem:
    """Bitmask view of a program's marking conditions, shared by all checks."""

    def __init__(self, p: Program):
        self.program = p
        self.rules = graph_rules(p)
        self.graph = dependency_graph(p)
        self.classes = classify_predicates(p)
        self.preds: tuple[Predicate, ...] = tuple(sorted(self.classes.disjunctive, key=pred_key))
        self.bit = {q: 1 << i for i, q in enumerate(self.preds)}
        self.body_bits = [[self.bit.get(a.pred, 0) for a in r.body] for r in self.rules]
        self.head_bits = [[self.bit.get(a.pred, 0) for a in r.head] for r in self.rules]
        self.succ = {}
        for q in self.preds:
            mask = 0
            for s in self.graph.successors(q):
                mask |= self.bit.get(s, 0)
            self.succ[self.bit[q]] = mask

    def mask(self, m) -> int:
        out = 0
        for q in m:
            out |= self.bit[q]
        return out

    def unmask(self, mask: int) -> Marking:
        return frozenset(q for q in self.preds if mask & self.bit[q])

    def holds(self, mask: int, closure: bool = True) -> bool:
        for body, head in zip(self.body_bits, self.head_bits):
            marked = 0
            for b in body:
                if b & mask:
                    marked += 1
            if marked > 1:
                return False
            unmarked = 0
            for h in head:
                if not h & mask:
                    unmarked += 1
            if unmarked > 1:
                return False
        if closure:
            for b, s in self.succ.items():
                if b & mask and s & ~mask:
                    return False
        return True

    def violations(self, m) -> list[str]:
        out = []
        foreign = [q for q in m if q not in self.bit]
        for q in sorted(foreign, key=pred_key):
            out.append(f"{q.display} is not a disjunctive predicate")
        m = set(m) - set(foreign)
        for r in self.rules:
            marked = [a for a in r.body if a.pred in m]
            if len(marked) > 1:
                out.append(f"(i) {render_rule(r)} has {len(marked)} marked body atoms")
            unmarked = [a for a in r.head if a.pred not in m]
            if len(unmarked) > 1:
                out.append(f"(ii) {render_rule(r)} has {len(unmarked)} unmarked head atoms")
        for (a, b) in sorted(self.graph.labels, key=lambda e: (pred_key(e[0]), pred_key(e[1]))):
            if a in m and b not in m:
                out.append(f"(iii) {b.display} is reachable from marked {a.display}")
        return out


@dataclass(frozen=True)
class MarkingReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def is_marking(p: Program, m, problem: MarkingProblem | None = None) -> MarkingReport:
    problem = problem or MarkingProblem(p)
    v = problem.violations(m)
    return MarkingReport(not v, tuple(v))


@dataclass(frozen=True)
class TwoSatInstance:
    variables: tuple[Predicate, ...]
    clauses: tuple[tuple[tuple[Predicate, bool], tuple[Predicate, bool]], ...]
    contradiction: bool = False  # a clause whose literals are both constant false


def encode_2sat(p: Program, problem: MarkingProblem | None = None) -> TwoSatInstance:
    """One variable per disjunctive predicate; Horn predicates are constant false."""
    problem = problem or MarkingProblem(p)
    disj = set(problem.preds)
    clauses = []
    contradiction = False

    def add(a, b):
        nonlocal contradiction
        lits = []
        for pred, pol in (a, b):
            if pred in disj:
                lits.append((pred, pol))
            elif not pol:
                return  # "not X" with X constant false: clause satisfied
        if not lits:
            contradiction = True
        elif len(lits) == 1:
            clauses.append((lits[0], lits[0]))
        else:
            clauses.append((lits[0], lits[1]))

    for r in problem.rules:
        body = [a.pred for a in r.body if a.pred in disj]
        for i, j in combinations(range(len(body)), 2):
            add((body[i], False), (body[j], False))
        heads = [a.pred for a in r.head]
        for i, j in combinations(range(len(heads)), 2):
            add((heads[i], True), (heads[j], True))
        for b in body:
            for h in heads:
                add((b, False), (h, True))
    return TwoSatInstance(problem.preds, tuple(clauses), contradiction)


def find_marking(p: Program, problem: MarkingProblem | None = None) -> Marking | None:
    """Some marking of ``p``, or None when ``p`` is not markable."""
    problem = problem or MarkingProblem(p)
    inst = encode_2sat(p, problem)
    if inst.contradiction:
        return None
    assignment = solve_2sat(inst.variables, inst.clauses)
    if assignment is None:
        return None
    return frozenset(q for q, v in assignment.items() if v)


def find_unary_marking(p: Program, problem: MarkingProblem | None = None) -> Marking | None:
    """Some marking without binary predicates, or None when there is none."""
    problem = problem or MarkingProblem(p)
    inst = encode_2sat(p, problem)
    if inst.contradiction:
        return None
    units = [((q, False), (q, False)) for q in inst.variables if q.arity > 1]
    assignment = solve_2sat(inst.variables, inst.clauses + tuple(units))
    if assignment is None:
        return None
    return frozenset(q for q, v in assignment.items() if v)


def minimize_marking(p: Program, m, problem: MarkingProblem | None = None) -> Marking:
    """Shrink a marking to a subset-minimal one.

    Removing a predicate together with everything that reaches it keeps the
    set closed; the removal is kept when the two per-rule conditions still
    hold.  Candidates are tried in canonical order until nothing changes.
    """
    problem = problem or MarkingProblem(p)
    report = is_marking(p, m, problem)
    if not report:
        raise ValueError("not a marking: " + "; ".join(report.violations))
    mask = problem.mask(m)
    back: dict[Predicate, set[Predicate]] = {}
    for a, b in problem.graph.labels:
        back.setdefault(b, set()).add(a)
    changed = True
    while changed:
        changed = False
        for q in problem.preds:
            if not mask & problem.bit[q]:
                continue
            cone = {q}
            stack = [q]
            while stack:
                v = stack.pop()
                for w in back.get(v, ()):
                    if w not in cone and w in problem.bit and mask & problem.bit[w]:
                        cone.add(w)
                        stack.append(w)
            candidate = mask & ~problem.mask(cone)
            if problem.holds(candidate, closure=False):
                mask = candidate
                changed = True
                break
    return problem.unmask(mask)


def marking_order(m) -> tuple:
    return (len(m), tuple(sorted(pred_key(q) for q in m)))


def enumerate_markings(p: Program, cap: int = 16,
                       problem: MarkingProblem | None = None) -> list[Marking]:
    """Every marking, by brute force over subsets of the disjunctive predicates."""
    problem = problem or MarkingProblem(p)
    n = len(problem.preds)
    if n > cap:
        raise ValueError(f"{n} disjunctive predicates exceed the enumeration cap of {cap}")
    found = [problem.unmask(mask) for mask in range(1 << n) if problem.holds(mask)]
    return sorted(found, key=marking_order)


def format_marking(m) -> str:
    return ",".join(q.display for q in sorted(m, key=pred_key))


def parse_marking(text: str, p: Program) -> Marking:
    """Read a comma-separated marking; names must be predicates of ``p``."""
    by_name = {}
    for r in graph_rules(p):
        for a in r.body + r.head:
            by_name.setdefault(a.pred.display, a.pred)
            by_name.setdefault(str(a.pred), a.pred)
    out = set()
    for raw in text.split(","):
        name = raw.strip()
        if not name:
            continue
        if name.startswith("not_"):
            raise ValueError(f"complement predicates cannot be marked: {name}")
        if name not in by_name:
            raise ValueError(f"unknown predicate {name!r}")
        out.add(by_name[name])
    return frozenset(out)


def is_unary_marking(m) -> bool:
    return all(q.arity == 1 for q in m)


__all__ = [
    "DependencyGraph",
    "Marking",
    "MarkingProblem",
    "MarkingReport",
    "PredicateClass",
    "TwoSatInstance",
    "classify_predicates",
    "dependency_graph",
    "encode_2sat",
    "enumerate_markings",
    "find_marking",
    "find_unary_marking",
    "format_marking",
    "graph_rules",
    "is_marking",
    "is_unary_marking",
    "minimize_marking",
    "parse_marking",
]
