"""First-order rules with unary function symbols, and the standard translation.

A program is a core of rules plus three generated components over the core
signature: the truth axioms (every argument of every atom is ``True``), the
falsehood rule ``False(x) ->`` and the congruence axioms for ``Eq``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

from .ontology import (
    AtMostOne,
    Concept,
    ConceptInclusion,
    ExistsLeft,
    ExistsRight,
    ForallRight,
    Ontology,
    Role,
    RoleInclusion,
)

# -- terms ------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True, order=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Skolem:
    """The per-axiom function symbol of the standard translation."""

    index: int

    @property
    def name(self) -> str:
        return f"sk{self.index}"


@dataclass(frozen=True, order=True)
class Successor:
    """A function symbol indexed by the concept ``Some(role filler)``."""

    role: Role
    filler: Concept

    @property
    def name(self) -> str:
        r = f"inv_{self.role.base}" if self.role.inverted else self.role.base
        return f"f_{r}_{self.filler.name}"


@dataclass(frozen=True, order=True)
class NamedFunction:
    """A function symbol read from a rules file with no further structure."""

    label: str

    @property
    def name(self) -> str:
        return self.label


FunctionSymbol = Union[Skolem, Successor, NamedFunction]


@dataclass(frozen=True)
class Fn:
    symbol: FunctionSymbol
    arg: "Term"

    def __str__(self) -> str:
        return f"{self.symbol.name}({self.arg})"


Term = Union[Var, Const, Fn]


def term_vars(t: Term) -> set[str]:
    while isinstance(t, Fn):
        t = t.arg
    return {t.name} if isinstance(t, Var) else set()


def term_depth(t: Term) -> int:
    d = 0
    while isinstance(t, Fn):
        d += 1
        t = t.arg
    return d


def term_key(t: Term) -> tuple:
    """Sort key that orders terms by depth, then text."""
    return (term_depth(t), str(t))


# -- predicates and atoms -------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Predicate:
    """``kind`` is one of concept, role, top, bot, eq; ``negated`` marks a complement."""

    name: str
    arity: int
    kind: str
    negated: bool = False

    @property
    def is_special(self) -> bool:
        """True for ``True``, ``False`` and ``Eq`` themselves (not their complements)."""
        return self.kind in ("top", "bot", "eq") and not self.negated

    def complement(self) -> Predicate:
        if self.negated:
            raise ValueError(f"{self} is already a complement")
        return Predicate(self.name, self.arity, self.kind, True)

    def __str__(self) -> str:
        return f"not_{self.name}" if self.negated else self.name

    @property
    def display(self) -> str:
        """Name used in marking lists: ``Bot`` for falsehood."""
        if self.kind == "bot":
            return "not_Bot" if self.negated else "Bot"
        return str(self)


TOP_P = Predicate("True", 1, "top")
BOT_P = Predicate("False", 1, "bot")
EQ_P = Predicate("Eq", 2, "eq")
NOT_BOT = BOT_P.complement()


def concept_pred(c: Concept | str) -> Predicate:
    name = c.name if isinstance(c, Concept) else c
    if name == "Top":
        return TOP_P
    if name == "Bot":
        return BOT_P
    return Predicate(name, 1, "concept")


def role_pred(name: str) -> Predicate:
    return Predicate(name, 2, "role")


def pred_key(p: Predicate) -> tuple:
    """Canonical order: ordinary predicates by name, then the special ones."""
    rank = 1 if p.is_special else 0
    return (rank, p.display)


@dataclass(frozen=True)
class Atom:
    pred: Predicate
    args: tuple[Term, ...]

    def __post_init__(self):
        if len(self.args) != self.pred.arity:
            raise ValueError(f"{self.pred} expects {self.pred.arity} arguments")

    def __str__(self) -> str:
        return f"{self.pred}({','.join(str(a) for a in self.args)})"

    @property
    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.args:
            out |= term_vars(a)
        return out


def atom_key(a: Atom) -> tuple:
    return (str(a.pred), tuple(term_key(t) for t in a.args))


@dataclass(frozen=True)
class Rule:
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]
    origin: str = field(default="input", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(dict.fromkeys(self.body)))
        object.__setattr__(self, "head", tuple(dict.fromkeys(self.head)))

    @property
    def is_horn(self) -> bool:
        return len(self.head) <= 1

    @property
    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.body + self.head:
            out |= a.variables
        return out

    def __str__(self) -> str:
        return render_rule(self)


def render_rule(r: Rule, canonical: bool = False, with_origin: bool = False) -> str:
    body = sorted(r.body, key=atom_key) if canonical else r.body
    head = sorted(r.head, key=atom_key) if canonical else r.head
    left = ", ".join(str(a) for a in body)
    right = " | ".join(str(a) for a in head) if head else "FALSEHOOD"
    text = f"{left} -> {right}." if left else f"-> {right}."
    if with_origin:
        text += f"  # {r.origin}"
    return text


# -- programs ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    predicates: tuple[Predicate, ...]
    constants: tuple[str, ...]
    functions: tuple[FunctionSymbol, ...]


def _term_parts(t: Term, consts: dict, funcs: dict) -> None:
    while isinstance(t, Fn):
        funcs.setdefault(t.symbol, None)
        t = t.arg
    if isinstance(t, Const):
        consts.setdefault(t.name, None)


def signature_of(rules: Iterable[Rule]) -> Signature:
    preds: dict = {}
    consts: dict = {}
    funcs: dict = {}
    for r in rules:
        for a in r.body + r.head:
            if not a.pred.is_special:
                preds.setdefault(a.pred, None)
            for t in a.args:
                _term_parts(t, consts, funcs)
    return Signature(tuple(sorted(preds, key=pred_key)), tuple(sorted(consts)),
                     tuple(sorted(funcs, key=lambda f: f.name)))


@dataclass(frozen=True)
class SigmaComponents:
    top: tuple[Rule, ...]
    bot: tuple[Rule, ...]
    eq: tuple[Rule, ...]


def _arg_vars(n: int) -> tuple[Var, ...]:
    return (Var("x"),) if n == 1 else tuple(Var(f"x{i}") for i in range(1, n + 1))


def signature_components(sig: Signature, function_congruence: bool = True) -> SigmaComponents:
    """Truth, falsehood and equality axioms for a signature.

    ``function_congruence`` adds ``Eq(x,y) -> Eq(f(x),f(y))`` for each function
    symbol; without it equality is only a congruence on predicate positions.
    """
    x, y, z = Var("x"), Var("y"), Var("z")
    top = []
    for p in sig.predicates:
        if p.negated:
            continue  # complements hold on terms that need not exist
        args = _arg_vars(p.arity)
        for v in args:
            top.append(Rule((Atom(p, args),), (Atom(TOP_P, (v,)),), "sigma-top"))
    for c in sig.constants:
        top.append(Rule((), (Atom(TOP_P, (Const(c),)),), "sigma-top"))
    bot = [Rule((Atom(BOT_P, (x,)),), (), "sigma-bot")]
    eq = [
        Rule((Atom(TOP_P, (x,)),), (Atom(EQ_P, (x, x)),), "sigma-eq"),
        Rule((Atom(EQ_P, (x, y)),), (Atom(EQ_P, (y, x)),), "sigma-eq"),
        Rule((Atom(EQ_P, (x, y)), Atom(EQ_P, (y, z))), (Atom(EQ_P, (x, z)),), "sigma-eq"),
    ]
    for p in sig.predicates:
        args = _arg_vars(p.arity)
        for i, v in enumerate(args):
            moved = args[:i] + (y,) + args[i + 1:]
            eq.append(Rule((Atom(p, args), Atom(EQ_P, (v, y))), (Atom(p, moved),), "sigma-eq"))
    if function_congruence:
        for f in sig.functions:
            eq.append(Rule((Atom(EQ_P, (x, y)),), (Atom(EQ_P, (Fn(f, x), Fn(f, y))),),
                           "sigma-eq"))
    return SigmaComponents(tuple(top), tuple(bot), tuple(eq))


@dataclass(frozen=True)
class Program:
    core: tuple[Rule, ...] = ()
    function_congruence: bool = True

    def __post_init__(self):
        object.__setattr__(self, "core", tuple(dict.fromkeys(self.core)))

    @cached_property
    def signature(self) -> Signature:
        return signature_of(self.core)

    @cached_property
    def sigma(self) -> SigmaComponents:
        return signature_components(self.signature, self.function_congruence)

    @property
    def rules(self) -> tuple[Rule, ...]:
        s = self.sigma
        return self.core + s.top + s.bot + s.eq

    @property
    def predicates(self) -> tuple[Predicate, ...]:
        return self.signature.predicates

    @property
    def functions(self) -> tuple[FunctionSymbol, ...]:
        return self.signature.functions

    def __len__(self) -> int:
        return len(self.core)


def is_horn_program(p: Program) -> bool:
    return all(r.is_horn for r in p.rules)


def validate_program(p: Program) -> list[str]:
    """All well-formedness violations of ``p``; an empty list means ok."""
    problems = []
    core = set(p.core)
    for i, r in enumerate(p.rules):
        where = f"rule {i + 1} ({render_rule(r)})"
        body_vars: set[str] = set()
        for a in r.body:
            body_vars |= a.variables
        head_vars: set[str] = set()
        for a in r.head:
            head_vars |= a.variables
        if head_vars - body_vars:
            problems.append(f"{where}: unsafe variables {sorted(head_vars - body_vars)}")
        if r in core:
            for a in r.body:
                if a.pred in (BOT_P, EQ_P):
                    problems.append(f"{where}: core body mentions {a.pred}")
            if not r.head:
                problems.append(f"{where}: core rule with empty head")
            for a in r.head:
                if a.pred == TOP_P:
                    problems.append(f"{where}: core head mentions True")
    return problems


# -- rules text format -----------------------------------------------------------------------


class ProgramSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


_SK_RE = re.compile(r"sk(\d+)\Z")
_SUCC_RE = re.compile(r"f_(inv_)?([A-Za-z][A-Za-z0-9]*)_([A-Za-z][A-Za-z0-9_]*)\Z")
_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"


def function_symbol(name: str) -> FunctionSymbol:
    m = _SK_RE.match(name)
    if m:
        return Skolem(int(m.group(1)))
    m = _SUCC_RE.match(name)
    if m:
        return Successor(Role(m.group(2), bool(m.group(1))), Concept(m.group(3)))
    return NamedFunction(name)


def predicate_named(name: str, arity: int) -> Predicate:
    negated = name.startswith("not_")
    base = name[4:] if negated else name
    if base == "True":
        p = TOP_P
    elif base == "False":
        p = BOT_P
    elif base == "Eq":
        p = EQ_P
    elif arity not in (1, 2):
        raise ValueError(f"{name} has arity {arity}; only unary and binary predicates exist")
    else:
        p = Predicate(base, arity, "concept" if arity == 1 else "role")
    if p.arity != arity:
        raise ValueError(f"{name} has arity {p.arity}")
    return p.complement() if negated else p


class _TermParser:
    _tok = re.compile(r"\s*(\?" + _IDENT + r"|" + _IDENT + r"|[(),]|\S)")

    def __init__(self, text: str, line: int):
        self.tokens = [m.group(1) for m in self._tok.finditer(text)]
        self.pos = 0
        self.line = line

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ProgramSyntaxError(f"expected {expected or 'a token'}, found {tok!r}", self.line)
        self.pos += 1
        return tok

    def term(self) -> Term:
        tok = self.take()
        if tok.startswith("?"):
            return Var(tok[1:])
        if not re.match(_IDENT + r"\Z", tok):
            raise ProgramSyntaxError(f"bad term {tok!r}", self.line)
        if self.peek() == "(":
            self.take("(")
            arg = self.term()
            self.take(")")
            return Fn(function_symbol(tok), arg)
        return Const(tok)

    def atom(self) -> Atom:
        name = self.take()
        if not re.match(_IDENT + r"\Z", name):
            raise ProgramSyntaxError(f"bad predicate {name!r}", self.line)
        self.take("(")
        args = [self.term()]
        while self.peek() == ",":
            self.take(",")
            args.append(self.term())
        self.take(")")
        try:
            return Atom(predicate_named(name, len(args)), tuple(args))
        except ValueError as exc:
            raise ProgramSyntaxError(str(exc), self.line) from None

    def atoms(self, sep: str) -> list[Atom]:
        out = [self.atom()]
        while self.peek() == sep:
            self.take(sep)
            out.append(self.atom())
        if self.peek() is not None:
            raise ProgramSyntaxError(f"unexpected {self.peek()!r}", self.line)
        return out


def parse_rule(text: str, line: int | None = None, origin: str = "input") -> Rule:
    text = text.strip()
    if text.endswith("."):
        text = text[:-1]
    if "->" not in text:
        raise ProgramSyntaxError("missing '->'", line)
    left, right = text.split("->", 1)
    body = _TermParser(left, line).atoms(",") if left.strip() else []
    right = right.strip()
    head = [] if right == "FALSEHOOD" else _TermParser(right, line).atoms("|")
    return Rule(tuple(body), tuple(head), origin)


def parse_program(text: str, function_congruence: bool = True) -> Program:
    """Read core rules, one per line.  The generated components are implicit."""
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rules.append(parse_rule(line, lineno))
    return Program(tuple(rules), function_congruence)


def serialize_program(p: Program, canonical: bool = False, with_origin: bool = True,
                      header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [render_rule(r, canonical, with_origin) for r in p.core]
    return "".join(f"{line}\n" for line in lines)


# -- the standard translation -------------------------------------------------------------------


def role_atom(role: Role, s: Term, t: Term) -> Atom:
    """``R(s,t)`` for a role name, ``S(t,s)`` when ``role`` is ``Inv(S)``."""
    p = role_pred(role.base)
    return Atom(p, (t, s) if role.inverted else (s, t))


def concept_atom(c: Concept, t: Term) -> Atom:
    return Atom(concept_pred(c), (t,))


def translate_axiom(ax, index: int) -> list[Rule]:
    """Rules for one normalized axiom; ``index`` names its skolem symbol."""
    x, y, z = Var("x"), Var("y"), Var("z")
    tag = f"pi:{index}:{ax.kind}"
    if isinstance(ax, ConceptInclusion):
        return [Rule(tuple(concept_atom(a, x) for a in ax.lhs),
                     tuple(concept_atom(c, x) for c in ax.rhs), tag)]
    if isinstance(ax, ExistsLeft):
        return [Rule((role_atom(ax.role, x, y), concept_atom(ax.filler, y)),
                     (concept_atom(ax.rhs, x),), tag)]
    if isinstance(ax, ExistsRight):
        fx = Fn(Skolem(index), x)
        return [Rule((concept_atom(ax.lhs, x),), (role_atom(ax.role, x, fx),), tag),
                Rule((concept_atom(ax.lhs, x),), (concept_atom(ax.filler, fx),), tag)]
    if isinstance(ax, ForallRight):
        return [Rule((concept_atom(ax.lhs, x), role_atom(ax.role, x, y)),
                     (concept_atom(ax.rhs, y),), tag)]
    if isinstance(ax, RoleInclusion):
        return [Rule((role_atom(Role(ax.sub), x, y),), (role_atom(ax.sup, x, y),), tag)]
    if isinstance(ax, AtMostOne):
        x1, x2 = Var("x1"), Var("x2")
        return [Rule((concept_atom(ax.lhs, z), role_atom(ax.role, z, x1),
                      role_atom(ax.role, z, x2), concept_atom(ax.filler, x1),
                      concept_atom(ax.filler, x2)),
                     (Atom(EQ_P, (x1, x2)),), tag)]
    raise ValueError(f"axiom {index} is not in normal form")


def standard_translate(o: Ontology, function_congruence: bool = True) -> Program:
    """The standard first-order translation, at most two rules per axiom."""
    rules = []
    for i, ax in enumerate(o.axioms, 1):
        rules.extend(translate_axiom(ax, i))
    return Program(tuple(rules), function_congruence)


pi_translate = standard_translate


def dataset_atoms(facts) -> list[Atom]:
    """Ground atoms for dataset facts (unary facts are concepts, binary ones roles)."""
    out = []
    for f in facts:
        pred = concept_pred(f.predicate) if len(f.args) == 1 else role_pred(f.predicate)
        out.append(Atom(pred, tuple(Const(a) for a in f.args)))
    return out
