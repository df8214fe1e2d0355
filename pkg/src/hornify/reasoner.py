"""Bounded satisfiability checking for programs over a dataset.

The engine materializes ground atoms by semi-naive forward chaining over
terms of bounded depth and splits on derived disjunctions, smallest first.
Rule instances with a head term deeper than the bound are not fired; the
branch then records an overflow, and an open branch with an overflow only
yields ``SAT_BOUNDED``.

Every derived atom carries a positive hyperresolution clause: the atom
together with the disjuncts it depends on.  A closed branch yields a clause
made of disjuncts not taken; it becomes the premise of the next disjunct of
the split, and a disjunct absent from it is skipped.  The root closes with
the empty clause, and the steps leading there form the refutation trace.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from itertools import product

from .ontology import Dataset, Ontology
from .program import (
    EQ_P,
    TOP_P,
    Atom,
    Const,
    Fn,
    Program,
    Rule,
    Var,
    atom_key,
    dataset_atoms,
    is_horn_program,
    standard_translate,
)

UNSAT = "UNSAT"
SAT = "SAT"
SAT_BOUNDED = "SAT_BOUNDED"

AGREE = "AGREE"
DISAGREE = "DISAGREE"
INCONCLUSIVE = "INCONCLUSIVE"

DEFAULT_DEPTH = 3
DEFAULT_BUDGET = 10**6
DEFAULT_CONSTANT = "c0"


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int, what: str = "atoms"):
        super().__init__(f"reasoner budget of {budget} {what} exceeded "
                         f"(raise it with HORNIFY_BUDGET or --budget)")
        self.budget = budget


def default_budget() -> int:
    raw = os.environ.get("HORNIFY_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"HORNIFY_BUDGET must be an integer, got {raw!r}") from None
    return DEFAULT_BUDGET


# -- traces --------------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    """One inference: a dataset fact (``rule`` is None) or a hyperresolution step."""

    id: int
    rule: int | None  # index into Program.rules
    premises: tuple[int, ...]
    substitution: tuple[tuple[str, object], ...]
    clause: frozenset  # of Atom


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]

    @property
    def final(self) -> TraceStep:
        return self.steps[-1]

    def render(self, program: Program | None = None) -> str:
        lines = []
        for s in self.steps:
            clause = " | ".join(sorted(str(a) for a in s.clause)) or "EMPTY"
            if s.rule is None:
                lines.append(f"{s.id}: fact {clause}")
                continue
            sub = ", ".join(f"{v}={t}" for v, t in s.substitution)
            prem = ",".join(str(p) for p in s.premises) or "-"
            where = f"rule {s.rule}"
            if program is not None:
                where += f" [{program.rules[s.rule].origin}]"
            lines.append(f"{s.id}: {where} from {prem} {{{sub}}} => {clause}")
        return "\n".join(lines)


@dataclass(frozen=True)
class SatReport:
    status: str
    trace: Trace | None = None  # refutation, for UNSAT
    model: frozenset | None = None  # of Atom, for SAT and SAT_BOUNDED
    depth_used: int = 0
    atom_count: int = 0
    overflow: bool = False

    @property
    def conclusive(self) -> bool:
        return self.status in (UNSAT, SAT)


# -- compiled rules ------------------------------------------------------------------------


def _pattern(t):
    if isinstance(t, Var):
        return ("v", t.name)
    if isinstance(t, Const):
        return ("c", t.name)
    return ("f", t.symbol.name, _pattern(t.arg))


def _match(pat, term, b: dict) -> bool:
    while True:
        tag = pat[0]
        if tag == "v":
            old = b.get(pat[1])
            if old is None:
                b[pat[1]] = term
                return True
            return old == term
        if tag == "c":
            return term == pat[1]
        if type(term) is not tuple or term[0] != pat[1]:
            return False
        pat, term = pat[2], term[1]


def _build(pat, b: dict):
    tag = pat[0]
    if tag == "v":
        return b[pat[1]]
    if tag == "c":
        return pat[1]
    return (pat[1], _build(pat[2], b))


def _bound(pat, b: dict) -> bool:
    while pat[0] == "f":
        pat = pat[2]
    return pat[0] == "c" or pat[1] in b


class _Compiled:
    __slots__ = ("index", "rule", "body", "head", "plans", "variables")

    def __init__(self, index: int, rule: Rule, pid):
        self.index = index
        self.rule = rule
        self.body = tuple((pid(a.pred), tuple(_pattern(t) for t in a.args)) for a in rule.body)
        self.head = tuple((pid(a.pred), tuple(_pattern(t) for t in a.args)) for a in rule.head)
        self.variables = tuple(sorted(rule.variables))
        self.plans = []
        for i in range(len(self.body)):
            bound = set(rule.body[i].variables)
            rest = [j for j in range(len(self.body)) if j != i]
            plan = []
            while rest:
                rest.sort(key=lambda j: (-len(rule.body[j].variables & bound),
                                         len(rule.body[j].variables - bound), j))
                j = rest.pop(0)
                plan.append(j)
                bound |= rule.body[j].variables
            self.plans.append(tuple(plan))


# -- the engine ----------------------------------------------------------------------------


class _Closed(Exception):
    def __init__(self, step: int):
        self.step = step


class Engine:
    """Forward chaining with splitting for one program and dataset."""

    def __init__(self, p: Program, facts, max_depth: int, budget: int):
        self.program = p
        self.max_depth = max_depth
        self.budget = budget
        self.preds: list = []
        self._pid: dict = {}
        self.symbols = {f.name: f for f in p.functions}
        self.rules = [_Compiled(i, r, self.pid) for i, r in enumerate(p.rules)]
        self.triggers: dict[int, list[tuple[_Compiled, int]]] = {}
        for cr in self.rules:
            for i, (q, _) in enumerate(cr.body):
                self.triggers.setdefault(q, []).append((cr, i))
        self.depth: dict = {}
        # per-branch state, undone on backtracking
        self.label: dict = {}  # atom -> step id
        self.known_trail: list = []
        self.by_pred: dict = {}
        self.by_arg: dict = {}
        self.processed_trail: list = []
        self.pending: list = []  # (heads, step id)
        self.overflow = False
        self.agenda: deque = deque()
        # global
        self.steps: list = []  # (rule index | None, premises, binding, clause)
        self.added = 0
        self.max_seen = 0

        ground = [self._ground_atom(a) for a in facts]
        if not any(a[1] for a in ground) and not p.signature.constants:
            ground.append((self.pid(TOP_P), (DEFAULT_CONSTANT,)))
        self.facts = ground

    def pid(self, pred) -> int:
        i = self._pid.get(pred)
        if i is None:
            i = self._pid[pred] = len(self.preds)
            self.preds.append(pred)
        return i

    def _ground_term(self, t):
        if isinstance(t, Const):
            return t.name
        if isinstance(t, Fn):
            self.symbols.setdefault(t.symbol.name, t.symbol)
            return (t.symbol.name, self._ground_term(t.arg))
        raise ValueError(f"dataset atoms must be ground, got {t}")

    def _ground_atom(self, a: Atom):
        return (self.pid(a.pred), tuple(self._ground_term(t) for t in a.args))

    def term_depth(self, t) -> int:
        if type(t) is not tuple:
            return 0
        d = self.depth.get(t)
        if d is None:
            d = self.depth[t] = 1 + self.term_depth(t[1])
        return d

    # conversion back to program terms
    def to_term(self, t):
        if type(t) is tuple:
            return Fn(self.symbols[t[0]], self.to_term(t[1]))
        return Const(t)

    def to_atom(self, a) -> Atom:
        return Atom(self.preds[a[0]], tuple(self.to_term(t) for t in a[1]))

    # -- state ---------------------------------------------------------------------------

    def _new_step(self, rule, premises, binding, clause) -> int:
        self.steps.append((rule, premises, binding, clause))
        return len(self.steps) - 1

    def _add(self, atom, step: int) -> None:
        self.added += 1
        if self.added > self.budget:
            raise BudgetExceeded(self.budget)
        self.label[atom] = step
        self.known_trail.append(atom)
        self.agenda.append(atom)
        for t in atom[1]:
            d = self.term_depth(t)
            if d > self.max_seen:
                self.max_seen = d

    def mark(self):
        return (len(self.known_trail), len(self.processed_trail), len(self.pending), self.overflow)

    def undo(self, mark) -> None:
        k, pr, pe, ov = mark
        while len(self.processed_trail) > pr:
            atom = self.processed_trail.pop()
            self.by_pred[atom[0]].pop()
            for i, t in enumerate(atom[1]):
                self.by_arg[(atom[0], i, t)].pop()
        while len(self.known_trail) > k:
            del self.label[self.known_trail.pop()]
        del self.pending[pe:]
        self.overflow = ov
        self.agenda.clear()

    # -- saturation ----------------------------------------------------------------------

    def start(self) -> None:
        for a in self.facts:
            if a not in self.label:
                self._add(a, self._new_step(None, (), (), frozenset((a,))))
        for cr in self.rules:
            if not cr.body:
                self._fire(cr, {}, ())

    def saturate(self) -> None:
        """Run to fixpoint; raises _Closed when the branch closes."""
        while self.agenda:
            atom = self.agenda.popleft()
            q, args = atom
            self.by_pred.setdefault(q, []).append(atom)
            for i, t in enumerate(args):
                self.by_arg.setdefault((q, i, t), []).append(atom)
            self.processed_trail.append(atom)
            for cr, i in self.triggers.get(q, ()):
                b: dict = {}
                if not all(_match(p, t, b) for p, t in zip(cr.body[i][1], args)):
                    continue
                self._join(cr, cr.plans[i], 0, b, {i: atom})

    def _candidates(self, q, pats, b):
        for i, p in enumerate(pats):
            if _bound(p, b):
                return self.by_arg.get((q, i, _build(p, b)), ())
        return self.by_pred.get(q, ())

    def _join(self, cr: _Compiled, plan, k: int, b: dict, chosen: dict) -> None:
        if k == len(plan):
            self._fire(cr, b, tuple(chosen[j] for j in range(len(cr.body))))
            return
        j = plan[k]
        q, pats = cr.body[j]
        for cand in self._candidates(q, pats, b):
            b2 = dict(b)
            if all(_match(p, t, b2) for p, t in zip(pats, cand[1])):
                chosen[j] = cand
                self._join(cr, plan, k + 1, b2, chosen)
        chosen.pop(j, None)

    def _fire(self, cr: _Compiled, b: dict, body) -> None:
        heads = []
        for q, pats in cr.head:
            args = tuple(_build(p, b) for p in pats)
            heads.append((q, args))
        heads = list(dict.fromkeys(heads))
        for h in heads:
            if h in self.label:
                return  # satisfied
        deep = [h for h in heads if any(self.term_depth(t) > self.max_depth for t in h[1])]
        if deep:
            q, args = deep[0]
            if not (len(heads) == 1 and self.preds[q] == EQ_P and args[0] == args[1]):
                self.overflow = True
            return
        premises = tuple(self.label[a] for a in body)
        clause = set(heads)
        for a, s in zip(body, premises):
            c = self.steps[s][3]
            if len(c) > 1:
                clause |= c - {a}
        binding = tuple((v, b[v]) for v in cr.variables if v in b)
        step = self._new_step(cr.index, premises, binding, frozenset(clause))
        if not heads:
            raise _Closed(step)
        if len(heads) == 1:
            self._add(heads[0], step)
        else:
            self.pending.append((tuple(heads), step))

    # -- search --------------------------------------------------------------------------

    def _pick(self):
        best = None
        for heads, step in self.pending:
            if any(h in self.label for h in heads):
                continue
            key = (len(heads), sorted(repr(h) for h in heads))
            if best is None or key < best[0]:
                best = (key, heads, step)
        if best is None:
            return None
        heads = tuple(sorted(best[1], key=repr))
        return heads, best[2]

    def _try(self, thunk):
        try:
            thunk()
            self.saturate()
        except _Closed as c:
            return c.step
        return None

    def solve(self):
        """Returns ("closed", step) or ("open", None)."""
        closed = self._try(self.start)
        stack = []  # [mark, heads, next index]
        while True:
            if closed is None:
                chosen = self._pick()
                if chosen is None:
                    return "open", None
                heads, step = chosen
                frame = [self.mark(), heads, 1]
                stack.append(frame)
                closed = self._try(lambda h=heads[0], s=step: self._add(h, s))
                continue
            while True:
                if not stack:
                    return "closed", closed
                frame = stack[-1]
                self.undo(frame[0])
                clause = self.steps[closed][3]
                heads = frame[1]
                i = frame[2]
                while i < len(heads) and heads[i] not in clause:
                    i += 1
                if i == len(heads):
                    stack.pop()
                    continue
                frame[2] = i + 1
                closed = self._try(lambda h=heads[i], s=closed: self._add(h, s))
                break

    def trace(self, final: int) -> Trace:
        need = set()
        stack = [final]
        while stack:
            s = stack.pop()
            if s in need:
                continue
            need.add(s)
            stack.extend(self.steps[s][1])
        out = []
        for s in sorted(need):
            rule, premises, binding, clause = self.steps[s]
            sub = tuple((v, self.to_term(t)) for v, t in binding)
            out.append(TraceStep(s, rule, premises, sub,
                                 frozenset(self.to_atom(a) for a in clause)))
        return Trace(tuple(out))

    def model(self) -> frozenset:
        return frozenset(self.to_atom(a) for a in self.label)


def _facts(d) -> list[Atom]:
    if d is None:
        return []
    if isinstance(d, Dataset):
        return dataset_atoms(d.facts)
    out = []
    for a in d:
        out.extend(dataset_atoms([a]) if not isinstance(a, Atom) else [a])
    return out


def _run(p: Program, d, max_depth: int, budget: int | None) -> SatReport:
    if max_depth < 0:
        raise ValueError("maxDepth must be non-negative")
    engine = Engine(p, _facts(d), max_depth, budget or default_budget())
    outcome, step = engine.solve()
    if outcome == "closed":
        trace = engine.trace(step)
        if trace.final.clause:
            raise AssertionError("refutation did not close with the empty clause")
        return SatReport(UNSAT, trace=trace, depth_used=engine.max_seen,
                         atom_count=engine.added)
    return SatReport(SAT_BOUNDED if engine.overflow else SAT, model=engine.model(),
                     depth_used=engine.max_seen, atom_count=len(engine.label),
                     overflow=engine.overflow)


def check_sat_disjunctive(p: Program, d=None, max_depth: int = DEFAULT_DEPTH,
                          budget: int | None = None) -> SatReport:
    """Satisfiability of ``p`` with dataset ``d`` over terms up to ``max_depth``."""
    return _run(p, d, max_depth, budget)


def saturate_horn(p: Program, d=None, max_depth: int = DEFAULT_DEPTH,
                  budget: int | None = None) -> SatReport:
    """Forward chaining to fixpoint for a Horn program."""
    if not is_horn_program(p):
        raise ValueError("saturate_horn needs a Horn program")
    return _run(p, d, max_depth, budget)


# -- explicit grounding --------------------------------------------------------------------


@dataclass(frozen=True)
class GroundRule:
    rule: int
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]


def term_universe(constants, functions, max_depth: int) -> list:
    level = [Const(c) for c in constants]
    out = list(level)
    for _ in range(max_depth):
        level = [Fn(f, t) for f in functions for t in level]
        out.extend(level)
    return out


def _subst(t, b):
    if isinstance(t, Var):
        return b[t.name]
    if isinstance(t, Fn):
        return Fn(t.symbol, _subst(t.arg, b))
    return t


def _depth(t) -> int:
    n = 0
    while isinstance(t, Fn):
        n += 1
        t = t.arg
    return n


def ground_program(p: Program, d=None, max_depth: int = DEFAULT_DEPTH,
                   budget: int | None = None) -> list[GroundRule]:
    """Every rule instance over the term universe whose terms stay within ``max_depth``."""
    if max_depth < 0:
        raise ValueError("maxDepth must be non-negative")
    budget = budget or default_budget()
    facts = _facts(d)
    consts = set(p.signature.constants)
    for a in facts:
        for t in a.args:
            while isinstance(t, Fn):
                t = t.arg
            consts.add(t.name)
    if not consts:
        consts.add(DEFAULT_CONSTANT)
    universe = term_universe(sorted(consts), p.functions, max_depth)
    out: list[GroundRule] = []
    for i, r in enumerate(p.rules):
        vs = sorted(r.variables)
        for combo in product(universe, repeat=len(vs)):
            b = dict(zip(vs, combo))
            body = tuple(Atom(a.pred, tuple(_subst(t, b) for t in a.args)) for a in r.body)
            head = tuple(Atom(a.pred, tuple(_subst(t, b) for t in a.args)) for a in r.head)
            if any(_depth(t) > max_depth for a in body + head for t in a.args):
                continue
            out.append(GroundRule(i, body, head))
            if len(out) > budget:
                raise BudgetExceeded(budget, "rule instances")
    return out


# -- equisatisfiability ------------------------------------------------------------------


@dataclass(frozen=True)
class EquisatReport:
    original: SatReport
    via_xi: SatReport
    rewritten: SatReport | None  # None when the ontology is not markable
    verdict: str

    @property
    def legs(self) -> tuple[SatReport, ...]:
        return tuple(r for r in (self.original, self.via_xi, self.rewritten) if r is not None)


def _budget_leg(fn) -> SatReport:
    try:
        return fn()
    except BudgetExceeded:
        return SatReport(SAT_BOUNDED, overflow=True)


def verdict_of(reports) -> str:
    statuses = [r.status for r in reports]
    if UNSAT in statuses and SAT in statuses:
        return DISAGREE
    if all(s == UNSAT for s in statuses) or all(s == SAT for s in statuses):
        return AGREE
    return INCONCLUSIVE


def check_equisat(o: Ontology, d=None, max_depth: int = DEFAULT_DEPTH,
                  budget: int | None = None) -> EquisatReport:
    """Compare the ontology, its successor translation and its Horn rewriting on ``d``."""
    from .backtranslate import normalize_ontology, rewrite_ontology
    from .successor import successor_translate

    original = _budget_leg(lambda: check_sat_disjunctive(standard_translate(o), d, max_depth,
                                                         budget))
    via_xi = _budget_leg(lambda: check_sat_disjunctive(successor_translate(o), d, max_depth,
                                                       budget))
    rw = rewrite_ontology(o)
    rewritten = None
    if rw is not None:
        horn = standard_translate(normalize_ontology(rw.ontology))
        rewritten = _budget_leg(lambda: saturate_horn(horn, d, max_depth, budget))
    legs = [r for r in (original, via_xi, rewritten) if r is not None]
    return EquisatReport(original, via_xi, rewritten, verdict_of(legs))


def sorted_atoms(atoms) -> list[Atom]:
    return sorted(atoms, key=atom_key)


__all__ = [
    "AGREE",
    "DISAGREE",
    "INCONCLUSIVE",
    "SAT",
    "SAT_BOUNDED",
    "UNSAT",
    "BudgetExceeded",
    "EquisatReport",
    "GroundRule",
    "SatReport",
    "Trace",
    "TraceStep",
    "check_equisat",
    "check_sat_disjunctive",
    "ground_program",
    "saturate_horn",
    "term_universe",
    "verdict_of",
]
