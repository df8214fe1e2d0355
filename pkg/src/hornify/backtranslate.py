"""Back-translation of transposed programs into Horn DL axioms.

Function-free rules are rolled up by inverting the standard translation.
Rules over function terms ``f(x)`` are read with a fresh role per function
symbol: a body atom ``B(f(x))`` becomes ``Some(R_Y B)`` and a head atom
``A(f(x))`` becomes ``All(R_Y A)``, except ``not_False(x) -> not_False(f(x))``
which becomes ``not_Bot SubClassOf Some(R_Y not_Bot)``.  Equality rules over
function terms become at-most-one axioms over a fresh union role.

Rule shapes, as tags returned by :func:`classify_rule`::

    T1  A1(x) .. An(x) -> C(x)              T11 B(f(x)) -> A(x)
    T2  R(x,y) A(y) -> C(x)                 T12 A(x) B(f(x)) -> C(f(x))
    T4  A(x) R(x,y) -> C(y)                 T13 guard A(x) B(f(x)) C(f(x)) -> False(z)
    T5  S(x,y) -> R(x,y)                    T14 B(f(x)) C(f(x)) -> A(x)
    T6  A(z) R(z,x1) R(z,x2) B(x1) B(x2) -> Eq(x1,x2)
    T7  guard B(x) R(x,y) A(y) -> False(z)  T15 A(z) B(f(z)) R(z,x) B(x) -> Eq(f(z),x)
    T8  guard A(f(x)) B(x) -> False(z)      T16 A(f(x)) B(x) R(f(x),y) B(y) -> Eq(x,y)
    T9  not_False(x) -> not_False(f(x))     T17 A(z) B(f(z)) B(g(z)) -> Eq(f(z),g(z))
    T10 B(x) -> A(f(x))                     T18 A(f(x)) B(x) B(g(f(x))) -> Eq(x,g(f(x)))
    T19 R(x,y) -> not_False(x)              T20 R(x,y) -> not_False(y)

"guard" is ``not_False(z)`` on a variable that occurs nowhere else; it is
dropped.  Clash rules ``guard P(x) not_P(x) -> False(z)`` are guarded T1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .marking import Marking, MarkingProblem, find_marking, is_unary_marking, minimize_marking
from .ontology import (
    BOT,
    TOP,
    All,
    AtMost1,
    AtMostOne,
    ComplexInclusion,
    Concept,
    ConceptInclusion,
    DLProfile,
    ExistsLeft,
    ExistsRight,
    ForallRight,
    Ontology,
    Role,
    RoleInclusion,
    Some,
    axiom_concepts,
    axiom_roles,
)
from .program import (
    BOT_P,
    EQ_P,
    NOT_BOT,
    TOP_P,
    Atom,
    Fn,
    FunctionSymbol,
    NamedFunction,
    Predicate,
    Program,
    Rule,
    Skolem,
    Successor,
    Var,
    render_rule,
    term_depth,
)
from .successor import successor_translate
from .transpose import transpose

UNCLASSIFIABLE = "Unclassifiable"
RULE_TYPES = ("T1", "T2", "T4", "T5", "T6") + tuple(f"T{i}" for i in range(7, 21))


class UnclassifiableRule(ValueError):
    def __init__(self, rule: Rule):
        super().__init__(f"no DL counterpart for rule {render_rule(rule)} (origin {rule.origin})")
        self.rule = rule


def concept_of(p: Predicate) -> Concept:
    if p == TOP_P:
        return TOP
    if p == BOT_P:
        return BOT
    if p == NOT_BOT:
        return Concept("not_Bot")
    return Concept(str(p))


def _role_label(r: Role) -> str:
    return f"inv_{r.base}" if r.inverted else r.base


class FreshNames:
    """Fresh role names for function symbols, inverse aliases and role unions.

    Names are deterministic and never clash with names already in use.
    """

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.successors: dict[FunctionSymbol, str] = {}
        self.tildes: dict[str, str] = {}
        self.unions: dict[frozenset, str] = {}

    def _claim(self, name: str) -> str:
        while name in self.taken:
            name += "_"
        self.taken.add(name)
        return name

    def successor(self, f: FunctionSymbol) -> Role:
        if f not in self.successors:
            if isinstance(f, Successor):
                base = f"{_role_label(f.role)}__{f.filler.name}"
            elif isinstance(f, Skolem):
                base = f"sk{f.index}_role"
            else:
                base = f"{f.name}_role"
            self.successors[f] = self._claim(base)
        return Role(self.successors[f])

    def tilde(self, role: Role) -> Role:
        if role.base not in self.tildes:
            self.tildes[role.base] = self._claim(f"tilde_{role.base}")
        return Role(self.tildes[role.base])

    def union(self, a: Role, b: Role) -> Role:
        key = frozenset((a, b))
        if key not in self.unions:
            parts = sorted({_role_label(a), _role_label(b)})
            self.unions[key] = self._claim("union_" + "_".join(parts))
        return Role(self.unions[key])

    def describe(self) -> list[str]:
        lines = [f"{f.name} -> {n}" for f, n in self.successors.items()]
        lines += [f"inverse of {k} -> {v}" for k, v in self.tildes.items()]
        for key, n in self.unions.items():
            lines.append(f"union of {', '.join(sorted(str(r) for r in key))} -> {n}")
        return lines


def _include(sub: Role, sup: Role) -> RoleInclusion:
    """``sub`` below ``sup`` with the sub-role kept named."""
    if sub.inverted:
        return RoleInclusion(sub.base, sup.inverse())
    return RoleInclusion(sub.base, sup)


def _lhs(concepts: list[Concept]) -> tuple[Concept, ...]:
    return tuple(concepts) if concepts else (TOP,)


def _exists_left(role: Role, fillers: list[Concept], rhs: Concept, extra=()) -> object:
    if not extra and len(fillers) <= 1:
        return ExistsLeft(role, fillers[0] if fillers else TOP, rhs)
    return ComplexInclusion(tuple(extra) + (Some(role, tuple(fillers)),), rhs)


def _forall_right(lhs: list[Concept], role: Role, rhs: Concept) -> object:
    if len(lhs) <= 1:
        return ForallRight(lhs[0] if lhs else TOP, role, rhs)
    return ComplexInclusion(tuple(lhs), All(role, rhs))


@dataclass
class _Shape:
    head: Atom
    guarded: bool
    unary: dict = field(default_factory=dict)  # term -> list of Concept
    present: set = field(default_factory=set)  # terms mentioned in unary body atoms
    binary: list = field(default_factory=list)
    variables: set = field(default_factory=set)

    def at(self, t) -> list[Concept]:
        return self.unary.get(t, [])

    def terms(self) -> set:
        out = set(self.present)
        for b in self.binary:
            out.update(b.args)
        return out


def _shape(r: Rule) -> _Shape | None:
    if len(r.head) != 1:
        return None
    head = r.head[0]
    body = list(r.body)
    guarded = False
    if head.pred == BOT_P and isinstance(head.args[0], Var):
        z = head.args[0]
        guard = Atom(NOT_BOT, (z,))
        if guard in body:
            rest = [a for a in body if a != guard]
            if all(z.name not in a.variables for a in rest):
                body = rest
                guarded = True
    s = _Shape(head, guarded)
    for a in body:
        s.variables |= a.variables
        if a.pred.arity == 1:
            t = a.args[0]
            s.present.add(t)
            if a.pred != TOP_P:
                s.unary.setdefault(t, [])
                c = concept_of(a.pred)
                if c not in s.unary[t]:
                    s.unary[t].append(c)
        elif a.pred.kind == "role" and not a.pred.negated:
            s.binary.append(a)
        else:
            return None
    return s


def _function_free(s: _Shape) -> bool:
    return all(isinstance(t, Var) for t in s.terms()) and all(
        isinstance(t, Var) for t in s.head.args)


def _role_from(atom: Atom, t) -> Role:
    """The role of a binary atom as seen from its argument ``t``."""
    return Role(atom.pred.name, atom.args[0] != t)


def _other(atom: Atom, t):
    return atom.args[1] if atom.args[0] == t else atom.args[0]


def _unary_rule(s: _Shape, names: FreshNames):
    """Rules with a unary head or a guarded ``False`` head."""
    head_concept = BOT if s.guarded else concept_of(s.head.pred)
    if _function_free(s):
        if not s.binary:
            vs = {t for t in s.terms()}
            if not s.guarded:
                vs.add(s.head.args[0])
            if len(vs) != 1:
                return None
            (v,) = vs
            return "T1", [ConceptInclusion(_lhs(s.at(v)), (head_concept,))]
        if len(s.binary) != 1:
            return None
        b = s.binary[0]
        x, y = b.args
        if x == y or s.terms() != {x, y}:
            return None
        role = Role(b.pred.name)
        if s.guarded:
            return "T7", [_exists_left(role, s.at(y), BOT, s.at(x))]
        w = s.head.args[0]
        if w == x and not s.at(x):
            tag = "T19" if not s.at(y) and s.head.pred == NOT_BOT else "T2"
            return tag, [_exists_left(role, s.at(y), head_concept)]
        if w == y and not s.at(y):
            tag = "T20" if not s.at(x) and s.head.pred == NOT_BOT else "T4"
            return tag, [_forall_right(s.at(x), role, head_concept)]
        return None

    if s.binary:
        return None
    terms = s.terms() | ({s.head.args[0]} if not s.guarded else set())
    fns = [t for t in terms if isinstance(t, Fn)]
    vs = [t for t in terms if isinstance(t, Var)]
    if len(vs) != 1 or len(fns) != 1 or term_depth(fns[0]) != 1 or fns[0].arg != vs[0]:
        return None
    x, fx = vs[0], fns[0]
    role = names.successor(fx.symbol)
    cx, cf = s.at(x), s.at(fx)
    if s.guarded:
        if fx not in s.present:
            return None
        tag = "T8" if len(cf) <= 1 else "T13"
        return tag, [_exists_left(role, cf, BOT, cx)]
    if s.head.args[0] == fx:
        if fx not in s.present:
            if cx == [concept_of(NOT_BOT)] and s.head.pred == NOT_BOT:
                return "T9", [ExistsRight(head_concept, role, head_concept)]
            return "T10", [_forall_right(cx, role, head_concept)]
        return "T12", [ComplexInclusion(tuple(cx) + (Some(role, tuple(cf)),),
                                        All(role, head_concept))]
    if cx or fx not in s.present:
        return None
    tag = "T11" if len(cf) <= 1 else "T14"
    return tag, [_exists_left(role, cf, head_concept)]


def _single(cs: list[Concept]) -> Concept | None:
    if not cs:
        return TOP
    return cs[0] if len(cs) == 1 else None


def _shared(s: _Shape, terms) -> Concept | None:
    """The filler ``B`` carried by every one of ``terms``, or None.

    A successor term may show its own filler where ``Top`` was meant.
    """
    lists = [s.at(t) for t in terms]
    if all(cs == lists[0] for cs in lists):
        return _single(lists[0])
    for t, cs in zip(terms, lists):
        if cs and not (isinstance(t, Fn) and isinstance(t.symbol, Successor)
                       and cs == [t.symbol.filler]):
            return None
    return TOP


def _at_most(a: list[Concept], b: Concept, members: list[Role], names: FreshNames,
             tilde_of: Role | None = None) -> list:
    lhs = _single(a)
    if lhs is None:
        return None
    union = names.union(*members) if len(members) == 2 else names.union(members[0], members[0])
    axioms = [_include(r, union) for r in dict.fromkeys(members)]
    axioms.append(AtMostOne(lhs, union, b))
    if tilde_of is not None:
        tilde = names.tilde(tilde_of)
        axioms.append(_include(tilde, tilde_of.inverse()))
        axioms.append(_include(tilde_of.inverse(), tilde))
    return axioms


def _equality_rule(s: _Shape, names: FreshNames):
    if s.guarded:
        return None
    u, v = s.head.args
    if _function_free(s):
        if len(s.binary) != 2 or u == v:
            return None
        b1, b2 = s.binary
        if b1.pred != b2.pred:
            return None
        centres = set(b1.args) & set(b2.args)
        if len(centres) != 1:
            return None
        (z,) = centres
        if {_other(b1, z), _other(b2, z)} != {u, v} or z in (u, v):
            return None
        r1, r2 = _role_from(b1, z), _role_from(b2, z)
        if r1 != r2 or s.terms() != {z, u, v}:
            return None
        a, bu, bv = _single(s.at(z)), s.at(u), s.at(v)
        if a is None or bu != bv or _single(bu) is None:
            return None
        return "T6", [AtMostOne(a, r1, _single(bu))]

    fns = sorted({t for t in s.terms() | {u, v} if isinstance(t, Fn)}, key=str)
    if len(s.binary) == 1:
        b = s.binary[0]
        # T15: A(z) B(f(z)) R(z,x) B(x) -> Eq(f(z), x)
        for fz, x in ((u, v), (v, u)):
            if isinstance(fz, Fn) and isinstance(fz.arg, Var) and isinstance(x, Var):
                z = fz.arg
                if set(b.args) == {z, x} and z != x and s.terms() == {z, x, fz}:
                    bs = _shared(s, [fz, x])
                    if bs is None or fz not in s.present:
                        return None
                    ra = names.successor(fz.symbol)
                    ax = _at_most(s.at(z), bs, [ra, _role_from(b, z)], names)
                    return ("T15", ax) if ax else None
        # T16: A(f(x)) B(x) R(f(x),y) B(y) -> Eq(x, y)
        if isinstance(u, Var) and isinstance(v, Var) and len(fns) == 1:
            fx = fns[0]
            if isinstance(fx.arg, Var) and fx.arg in (u, v):
                x = fx.arg
                y = v if x == u else u
                if set(b.args) == {fx, y} and s.terms() == {x, y, fx}:
                    bs = _shared(s, [x, y])
                    if bs is None:
                        return None
                    ra = names.successor(fx.symbol)
                    tilde = names.tilde(ra)
                    ax = _at_most(s.at(fx), bs, [tilde, _role_from(b, fx)], names, ra)
                    return ("T16", ax) if ax else None
        return None
    if s.binary:
        return None
    # T17: A(z) B(f(z)) B(g(z)) -> Eq(f(z), g(z))
    if isinstance(u, Fn) and isinstance(v, Fn) and term_depth(u) == term_depth(v) == 1 \
            and u.arg == v.arg and isinstance(u.arg, Var):
        z = u.arg
        if s.terms() - {z, u, v} or u not in s.present or v not in s.present:
            return None
        bs = _shared(s, [u, v])
        if bs is None:
            return None
        roles = [names.successor(u.symbol), names.successor(v.symbol)]
        ax = _at_most(s.at(z), bs, roles, names)
        return ("T17", ax) if ax else None
    # T18: A(f(x)) B(x) B(g(f(x))) -> Eq(x, g(f(x)))
    for x, gfx in ((u, v), (v, u)):
        if isinstance(x, Var) and isinstance(gfx, Fn) and term_depth(gfx) == 2:
            fx = gfx.arg
            if fx.arg != x or s.terms() - {x, fx, gfx}:
                continue
            if fx not in s.present or gfx not in s.present:
                return None
            bs = _shared(s, [x, gfx])
            if bs is None:
                return None
            ra = names.successor(fx.symbol)
            tilde = names.tilde(ra)
            ax = _at_most(s.at(fx), bs, [tilde, names.successor(gfx.symbol)], names, ra)
            return ("T18", ax) if ax else None
    return None


def _role_rule(s: _Shape):
    if s.guarded or len(s.binary) != 1 or s.present:
        return None
    b, h = s.binary[0], s.head
    if h.pred.kind != "role" or h.pred.negated:
        return None
    x, y = b.args
    if x == y or not isinstance(x, Var) or not isinstance(y, Var):
        return None
    if h.args == (x, y):
        return "T5", [RoleInclusion(b.pred.name, Role(h.pred.name))]
    if h.args == (y, x):
        return "T5", [RoleInclusion(b.pred.name, Role(h.pred.name, True))]
    return None


def _translate(r: Rule, names: FreshNames):
    s = _shape(r)
    if s is None:
        return None
    if s.head.pred == EQ_P:
        return _equality_rule(s, names)
    if s.head.pred.arity == 2:
        return _role_rule(s)
    return _unary_rule(s, names)


def classify_rule(r: Rule) -> str:
    """The shape tag of a Horn rule, or ``Unclassifiable``."""
    if len(r.head) > 1:
        raise ValueError(f"not a Horn rule: {render_rule(r)}")
    out = _translate(r, FreshNames())
    return out[0] if out else UNCLASSIFIABLE


@dataclass(frozen=True)
class BackTranslation:
    ontology: Ontology
    names: FreshNames
    tags: tuple[str, ...]  # one per core rule


def _taken_names(p: Program) -> set[str]:
    out = set()
    for q in p.predicates:
        out.add(str(q))
        out.add(q.name)
    return out


def back_translate_detailed(p: Program, names: FreshNames | None = None) -> BackTranslation:
    names = names or FreshNames(_taken_names(p))
    axioms: dict = {}
    tags = []
    for r in p.core:
        if len(r.head) > 1:
            raise ValueError(f"not a Horn rule: {render_rule(r)}")
        out = _translate(r, names)
        if out is None:
            raise UnclassifiableRule(r)
        tag, produced = out
        tags.append(tag)
        for ax in produced:
            axioms.setdefault(ax, None)
    return BackTranslation(Ontology(tuple(axioms)), names, tuple(tags))


def back_translate(p: Program) -> Ontology:
    """Horn DL axioms for the core rules of a transposed program."""
    return back_translate_detailed(p).ontology


psi_backtranslate = back_translate


# -- normalization ----------------------------------------------------------------------


def normalize_ontology(o: Ontology) -> Ontology:
    """Bring conjunctive fillers back into the six normalized shapes.

    Each complex subconcept is replaced by a fresh name ``X``; where it occurs
    on the left, ``sub SubClassOf X`` is added, where it occurs on the right,
    ``X SubClassOf sub``.  The result is satisfiable exactly when the input is.
    """
    taken = {c.name for ax in o.axioms for c in axiom_concepts(ax)}
    taken |= {r.base for ax in o.axioms for r in axiom_roles(ax)}
    memo: dict = {}
    extra: list = []

    def fresh(key, base: str, defining):
        if key not in memo:
            name = base
            while name in taken:
                name += "_"
            taken.add(name)
            memo[key] = Concept(name)
            extra.extend(defining(memo[key]))
        return memo[key]

    def filler(fillers) -> Concept:
        if not fillers:
            return TOP
        if len(fillers) == 1:
            return fillers[0]
        key = ("and", fillers)
        return fresh(key, "and_" + "_".join(c.name for c in fillers),
                     lambda x: [ConceptInclusion(tuple(fillers), (x,))])

    out: list = []
    for ax in o.axioms:
        if not isinstance(ax, ComplexInclusion):
            out.append(ax)
            continue
        rhs = ax.rhs
        if len(ax.lhs) == 1 and isinstance(ax.lhs[0], Some) and isinstance(rhs, Concept):
            e = ax.lhs[0]
            out.append(ExistsLeft(e.role, filler(e.fillers), rhs))
            continue
        lhs = []
        for e in ax.lhs:
            if isinstance(e, Concept):
                lhs.append(e)
                continue
            f = filler(e.fillers)
            key = ("some", e.role, f)
            lhs.append(fresh(key, f"some_{_role_label(e.role)}_{f.name}",
                             lambda x, e=e, f=f: [ExistsLeft(e.role, f, x)]))
        lhs = [c for c in dict.fromkeys(lhs) if not (c.is_top and len(lhs) > 1)]
        if isinstance(rhs, Concept):
            out.append(ConceptInclusion(tuple(lhs), (rhs,)))
            continue
        if len(lhs) == 1:
            target = lhs[0]
        else:
            key = ("rhs", rhs)
            target = fresh(key, _rhs_name(rhs), lambda x, rhs=rhs: [_rhs_axiom(x, rhs)])
            out.append(ConceptInclusion(tuple(lhs), (target,)))
            continue
        out.append(_rhs_axiom(target, rhs))
    seen: dict = {}
    for ax in out + extra:
        seen.setdefault(ax, None)
    return Ontology(tuple(seen))


def _rhs_name(rhs) -> str:
    if isinstance(rhs, All):
        return f"all_{_role_label(rhs.role)}_{rhs.filler.name}"
    if isinstance(rhs, AtMost1):
        return f"atmost_{_role_label(rhs.role)}_{rhs.filler.name}"
    return f"exists_{_role_label(rhs.role)}_{rhs.fillers[0].name}"


def _rhs_axiom(lhs: Concept, rhs):
    if isinstance(rhs, All):
        return ForallRight(lhs, rhs.role, rhs.filler)
    if isinstance(rhs, AtMost1):
        return AtMostOne(lhs, rhs.role, rhs.filler)
    return ExistsRight(lhs, rhs.role, rhs.fillers[0])


# -- the pipeline -------------------------------------------------------------------------


@dataclass(frozen=True)
class Rewriting:
    ontology: Ontology
    marking: Marking
    translated: Program
    transposed: Program
    names: FreshNames
    tags: tuple[str, ...]


def rewrite_ontology(o: Ontology, normalize: bool = False,
                     function_congruence: bool = True) -> Rewriting | None:
    """Horn rewriting of ``o``, or None when ``o`` is not markable."""
    prog = successor_translate(o, function_congruence)
    problem = MarkingProblem(prog)
    found = find_marking(prog, problem)
    if found is None:
        return None
    marking = minimize_marking(prog, found, problem)
    transposed = transpose(prog, marking, problem)
    names = FreshNames(_taken_names(prog) | o.concept_names | o.role_names)
    bt = back_translate_detailed(transposed, names)
    result = normalize_ontology(bt.ontology) if normalize else bt.ontology
    return Rewriting(result, marking, prog, transposed, names, bt.tags)


def rewrite_bound(profile: DLProfile) -> DLProfile:
    """The smallest profile guaranteed to contain a rewriting of ``profile``.

    Existential-only inputs land in Horn-ALC, other inputs keep their logic,
    and functionality additionally needs role inclusions.
    """
    features = set(profile.features)
    if "F" in features:
        features.add("H")
    return DLProfile("ALC", frozenset(features), True)


__all__ = [
    "BackTranslation",
    "FreshNames",
    "RULE_TYPES",
    "Rewriting",
    "UNCLASSIFIABLE",
    "UnclassifiableRule",
    "back_translate",
    "back_translate_detailed",
    "classify_rule",
    "is_unary_marking",
    "normalize_ontology",
    "psi_backtranslate",
    "rewrite_bound",
    "rewrite_ontology",
]
