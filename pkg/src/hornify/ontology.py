"""Normalized ALCHIF ontologies: data model, text format, profiles.

Axioms come in six shapes:

    T1  A1 and ... and An  SubClassOf  C1 or ... or Cm
    T2  Some(R A)          SubClassOf  C
    T3  A                  SubClassOf  Some(R B)
    T4  A                  SubClassOf  All(R C)
    T5  S                  SubRoleOf   R
    T6  A                  SubClassOf  AtMost1(R B)

A and B are concept names or Top, C is a concept name or Bot, S is a role
name and R is a possibly inverted role.  The back-translation of rewritten
programs can produce axioms with small conjunctive fillers; those are kept
as :class:`ComplexInclusion` until :func:`hornify.backtranslate.normalize_ontology`
brings them back into the six shapes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


class OntologyError(ValueError):
    """Raised for malformed ontology or dataset text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 axiom_index: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if axiom_index is not None:
            where.append(f"axiom {axiom_index}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.column = column
        self.axiom_index = axiom_index


class NormalFormError(OntologyError):
    """The text parses but the axiom is outside the normalized grammar."""


RESERVED = frozenset({"Top", "Bot", "And", "Or", "Some", "All", "AtMost1", "Inv",
                      "SubClassOf", "SubRoleOf", "True", "False", "Eq", "FALSEHOOD"})

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, order=True)
class Concept:
    """A concept name; ``Top`` and ``Bot`` are the two distinguished ones."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("concept names must be nonempty")

    @property
    def kind(self) -> str:
        if self.name == "Top":
            return "top"
        if self.name == "Bot":
            return "bot"
        return "named"

    @property
    def is_top(self) -> bool:
        return self.name == "Top"

    @property
    def is_bot(self) -> bool:
        return self.name == "Bot"

    @property
    def is_named(self) -> bool:
        return self.name not in ("Top", "Bot")

    def __str__(self) -> str:
        return self.name


TOP = Concept("Top")
BOT = Concept("Bot")


@dataclass(frozen=True, order=True)
class Role:
    """A role name, possibly inverted.  A single flag keeps ``inv`` idempotent."""

    base: str
    inverted: bool = False

    def inverse(self) -> Role:
        return Role(self.base, not self.inverted)

    def __str__(self) -> str:
        return f"Inv({self.base})" if self.inverted else self.base


def inv(role: Role) -> Role:
    return role.inverse()


# -- normalized axioms ---------------------------------------------------------


@dataclass(frozen=True)
class ConceptInclusion:
    """T1: a conjunction of names implies a disjunction of names."""

    lhs: tuple[Concept, ...]
    rhs: tuple[Concept, ...]
    kind = "T1"


@dataclass(frozen=True)
class ExistsLeft:
    """T2: ``Some(role filler) SubClassOf rhs``."""

    role: Role
    filler: Concept
    rhs: Concept
    kind = "T2"


@dataclass(frozen=True)
class ExistsRight:
    """T3: ``lhs SubClassOf Some(role filler)``."""

    lhs: Concept
    role: Role
    filler: Concept
    kind = "T3"


@dataclass(frozen=True)
class ForallRight:
    """T4: ``lhs SubClassOf All(role rhs)``."""

    lhs: Concept
    role: Role
    rhs: Concept
    kind = "T4"


@dataclass(frozen=True)
class RoleInclusion:
    """T5: ``sub SubRoleOf sup`` with ``sub`` a role name."""

    sub: str
    sup: Role
    kind = "T5"


@dataclass(frozen=True)
class AtMostOne:
    """T6: ``lhs SubClassOf AtMost1(role filler)``."""

    lhs: Concept
    role: Role
    filler: Concept
    kind = "T6"


# -- complex concepts produced by back-translation ------------------------------


@dataclass(frozen=True)
class Some:
    role: Role
    fillers: tuple[Concept, ...]  # empty means Top


@dataclass(frozen=True)
class All:
    role: Role
    filler: Concept


@dataclass(frozen=True)
class AtMost1:
    role: Role
    filler: Concept


ConceptExpr = Union[Concept, Some, All, AtMost1]


@dataclass(frozen=True)
class ComplexInclusion:
    """A conjunction of names and existentials implying one concept expression."""

    lhs: tuple[Union[Concept, Some], ...]
    rhs: ConceptExpr
    kind = "complex"


Axiom = Union[ConceptInclusion, ExistsLeft, ExistsRight, ForallRight, RoleInclusion,
              AtMostOne, ComplexInclusion]

NORMAL_KINDS = ("T1", "T2", "T3", "T4", "T5", "T6")


def _expr_concepts(expr) -> Iterator[Concept]:
    if isinstance(expr, Concept):
        yield expr
    elif isinstance(expr, Some):
        yield from expr.fillers
    elif isinstance(expr, (All, AtMost1)):
        yield expr.filler


def _expr_roles(expr) -> Iterator[Role]:
    if isinstance(expr, (Some, All, AtMost1)):
        yield expr.role


def axiom_concepts(ax: Axiom) -> Iterator[Concept]:
    if isinstance(ax, ConceptInclusion):
        yield from ax.lhs
        yield from ax.rhs
    elif isinstance(ax, ExistsLeft):
        yield ax.filler
        yield ax.rhs
    elif isinstance(ax, (ExistsRight, AtMostOne)):
        yield ax.lhs
        yield ax.filler
    elif isinstance(ax, ForallRight):
        yield ax.lhs
        yield ax.rhs
    elif isinstance(ax, ComplexInclusion):
        for e in ax.lhs:
            yield from _expr_concepts(e)
        yield from _expr_concepts(ax.rhs)


def axiom_roles(ax: Axiom) -> Iterator[Role]:
    if isinstance(ax, RoleInclusion):
        yield Role(ax.sub)
        yield ax.sup
    elif isinstance(ax, (ExistsLeft, ExistsRight, ForallRight, AtMostOne)):
        yield ax.role
    elif isinstance(ax, ComplexInclusion):
        for e in ax.lhs:
            yield from _expr_roles(e)
        yield from _expr_roles(ax.rhs)


@dataclass(frozen=True)
class Ontology:
    axioms: tuple[Axiom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))

    def __iter__(self):
        return iter(self.axioms)

    def __len__(self):
        return len(self.axioms)

    @property
    def concept_names(self) -> frozenset[str]:
        return frozenset(c.name for ax in self.axioms for c in axiom_concepts(ax)
                         if c.is_named)

    @property
    def role_names(self) -> frozenset[str]:
        return frozenset(r.base for ax in self.axioms for r in axiom_roles(ax))

    @property
    def is_normalized(self) -> bool:
        return all(ax.kind in NORMAL_KINDS for ax in self.axioms)


# -- datasets --------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Fact:
    predicate: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(self.args)})"


@dataclass(frozen=True)
class Dataset:
    facts: tuple[Fact, ...] = ()

    def __post_init__(self):
        seen = dict.fromkeys(self.facts)
        object.__setattr__(self, "facts", tuple(seen))

    def __iter__(self):
        return iter(self.facts)

    def __len__(self):
        return len(self.facts)

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(a for f in self.facts for a in f.args))


_FACT_RE = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*\(\s*([^()]*)\)\s*\.?\s*\Z")
_CONST_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def parse_dataset(text: str) -> Dataset:
    facts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _FACT_RE.match(line)
        if not m:
            raise OntologyError(f"cannot parse fact {line!r}", line=lineno)
        pred = m.group(1)
        args = tuple(a.strip() for a in m.group(2).split(","))
        if pred in RESERVED:
            raise OntologyError(f"reserved predicate {pred} in dataset", line=lineno)
        if len(args) not in (1, 2):
            raise OntologyError("facts must be unary or binary", line=lineno)
        for a in args:
            if not _CONST_RE.match(a):
                raise OntologyError(f"bad constant {a!r} (constants are lowercase identifiers)",
                                    line=lineno)
        facts.append(Fact(pred, args))
    return Dataset(tuple(facts))


def serialize_dataset(d: Dataset) -> str:
    return "".join(f"{f}\n" for f in d.facts)


# -- ontology text format -----------------------------------------------------------


_TOKEN_RE = re.compile(r"\s*(?:(\()|(\))|([A-Za-z][A-Za-z0-9_]*)|(\S))")


@dataclass
class _Node:
    """Parsed S-expression: ``head(args...)`` or a bare identifier."""

    name: str
    args: list[_Node] | None
    column: int


def _tokenize(line: str, lineno: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if not m or m.end() == pos:
            break
        if m.group(4):
            raise OntologyError(f"unexpected character {m.group(4)!r}", line=lineno,
                                column=m.start(4) + 1)
        if m.group(1):
            tokens.append(("(", "(", m.start(1) + 1))
        elif m.group(2):
            tokens.append((")", ")", m.start(2) + 1))
        elif m.group(3):
            tokens.append(("id", m.group(3), m.start(3) + 1))
        pos = m.end()
    return tokens


def _parse_sexpr(tokens: list, lineno: int) -> _Node:
    pos = 0

    def node() -> _Node:
        nonlocal pos
        if pos >= len(tokens):
            raise OntologyError("unexpected end of line", line=lineno)
        kind, text, col = tokens[pos]
        if kind != "id":
            raise OntologyError(f"expected a name, found {text!r}", line=lineno, column=col)
        pos += 1
        if pos < len(tokens) and tokens[pos][0] == "(":
            pos += 1
            args = []
            while True:
                if pos >= len(tokens):
                    raise OntologyError("missing ')'", line=lineno)
                if tokens[pos][0] == ")":
                    pos += 1
                    break
                args.append(node())
            return _Node(text, args, col)
        return _Node(text, None, col)

    result = node()
    if pos != len(tokens):
        raise OntologyError(f"trailing input {tokens[pos][1]!r}", line=lineno,
                            column=tokens[pos][2])
    return result


def _check_name(n: _Node, lineno: int, what: str) -> str:
    if n.args is not None:
        raise NormalFormError(f"{what} must be a single name, found {n.name}(...)",
                              line=lineno, column=n.column)
    if n.name in RESERVED and n.name not in ("Top", "Bot"):
        raise OntologyError(f"reserved word {n.name!r} used as a name", line=lineno,
                            column=n.column)
    return n.name


def _role(n: _Node, lineno: int) -> Role:
    if n.args is None:
        if n.name in RESERVED:
            raise OntologyError(f"reserved word {n.name!r} used as a role", line=lineno,
                                column=n.column)
        return Role(n.name)
    if n.name == "Inv" and len(n.args) == 1 and n.args[0].args is None:
        return Role(_check_name(n.args[0], lineno, "role"), True)
    raise NormalFormError("roles are names or Inv(name)", line=lineno, column=n.column)


def _concept(n: _Node, lineno: int, what: str) -> Concept:
    return Concept(_check_name(n, lineno, what))


def _names(nodes: list[_Node], lineno: int, what: str) -> tuple[Concept, ...]:
    return tuple(dict.fromkeys(_concept(a, lineno, what) for a in nodes))


def _expr(n: _Node, lineno: int):
    """Parse a concept expression in the relaxed (complex) grammar."""
    if n.args is None:
        return _concept(n, lineno, "concept")
    if n.name == "Some" and len(n.args) == 2:
        f = n.args[1]
        if f.args is not None and f.name == "And":
            fillers = _names(f.args, lineno, "filler conjunct")
        else:
            c = _concept(f, lineno, "filler")
            fillers = () if c.is_top else (c,)
        return Some(_role(n.args[0], lineno), fillers)
    if n.name == "All" and len(n.args) == 2:
        return All(_role(n.args[0], lineno), _concept(n.args[1], lineno, "filler"))
    if n.name == "AtMost1" and len(n.args) == 2:
        return AtMost1(_role(n.args[0], lineno), _concept(n.args[1], lineno, "filler"))
    raise NormalFormError(f"unsupported constructor {n.name}", line=lineno, column=n.column)


def _side_conditions(ax: Axiom, lineno: int, index: int) -> Axiom:
    def ab(c: Concept, what: str):
        if c.is_bot:
            raise NormalFormError(f"{what} must be a name or Top", line=lineno, axiom_index=index)

    def cc(c: Concept, what: str):
        if c.is_top:
            raise NormalFormError(f"{what} must be a name or Bot", line=lineno, axiom_index=index)

    if isinstance(ax, ConceptInclusion):
        if any(c.is_bot for c in ax.lhs):
            raise NormalFormError("Bot on the left of a concept inclusion", line=lineno,
                                  axiom_index=index)
        if any(c.is_top for c in ax.rhs):
            raise NormalFormError("Top on the right of a concept inclusion", line=lineno,
                                  axiom_index=index)
        if len(ax.rhs) > 1 and any(c.is_bot for c in ax.rhs):
            ax = ConceptInclusion(ax.lhs, tuple(c for c in ax.rhs if not c.is_bot))
    elif isinstance(ax, ExistsLeft):
        ab(ax.filler, "filler")
        cc(ax.rhs, "right-hand side")
    elif isinstance(ax, ExistsRight):
        ab(ax.lhs, "left-hand side")
        if not ax.filler.is_named:
            raise NormalFormError("existential filler must be a concept name", line=lineno,
                                  axiom_index=index)
    elif isinstance(ax, ForallRight):
        ab(ax.lhs, "left-hand side")
        cc(ax.rhs, "filler")
    elif isinstance(ax, AtMostOne):
        ab(ax.lhs, "left-hand side")
        ab(ax.filler, "filler")
    return ax


def _axiom(n: _Node, lineno: int, index: int, allow_complex: bool) -> Axiom:
    if n.args is None or n.name not in ("SubClassOf", "SubRoleOf"):
        raise OntologyError("expected SubClassOf(...) or SubRoleOf(...)", line=lineno,
                            column=n.column)
    if len(n.args) != 2:
        raise OntologyError(f"{n.name} takes two arguments", line=lineno, column=n.column)
    left, right = n.args
    if n.name == "SubRoleOf":
        if left.args is not None:
            raise NormalFormError("sub-role must be a role name", line=lineno, axiom_index=index)
        return RoleInclusion(_check_name(left, lineno, "role"), _role(right, lineno))

    try:
        ax = _normal_class_axiom(left, right, lineno)
    except NormalFormError:
        if not allow_complex:
            raise
        ax = None
    if ax is not None:
        return _side_conditions(ax, lineno, index)

    if left.args is not None and left.name == "And":
        lhs = tuple(_expr(a, lineno) for a in left.args)
    else:
        lhs = (_expr(left, lineno),)
    if any(not isinstance(e, (Concept, Some)) for e in lhs):
        raise NormalFormError("left-hand side admits names and Some(...)", line=lineno,
                              axiom_index=index)
    rhs = _expr(right, lineno)
    if isinstance(rhs, Some) and len(rhs.fillers) != 1:
        raise NormalFormError("right-hand Some needs a single named filler", line=lineno,
                              axiom_index=index)
    return ComplexInclusion(lhs, rhs)


def _normal_class_axiom(left: _Node, right: _Node, lineno: int) -> Axiom:
    if left.args is None:
        lhs = _concept(left, lineno, "left-hand side")
        if right.args is None:
            return ConceptInclusion((lhs,), (_concept(right, lineno, "right-hand side"),))
        if right.name == "Or":
            return ConceptInclusion((lhs,), _names(right.args, lineno, "disjunct"))
        if right.name in ("Some", "All", "AtMost1") and len(right.args) == 2:
            role = _role(right.args[0], lineno)
            filler = _concept(right.args[1], lineno, "filler")
            cls = {"Some": ExistsRight, "All": ForallRight, "AtMost1": AtMostOne}[right.name]
            return cls(lhs, role, filler)
        raise NormalFormError(f"unsupported right-hand side {right.name}(...)", line=lineno,
                              column=right.column)
    if left.name == "And":
        if not left.args:
            raise NormalFormError("empty conjunction", line=lineno, column=left.column)
        lhs_names = _names(left.args, lineno, "conjunct")
        if right.args is None:
            rhs = (_concept(right, lineno, "right-hand side"),)
        elif right.name == "Or":
            rhs = _names(right.args, lineno, "disjunct")
        else:
            raise NormalFormError("a conjunction implies a name or a disjunction",
                                  line=lineno, column=right.column)
        return ConceptInclusion(lhs_names, rhs)
    if left.name == "Some" and len(left.args) == 2:
        role = _role(left.args[0], lineno)
        filler = _concept(left.args[1], lineno, "filler")
        if right.args is not None:
            raise NormalFormError("Some(...) on the left implies a single name",
                                  line=lineno, column=right.column)
        return ExistsLeft(role, filler, _concept(right, lineno, "right-hand side"))
    raise NormalFormError(f"unsupported left-hand side {left.name}(...)", line=lineno,
                          column=left.column)


def parse_ontology(text: str, allow_complex: bool = False) -> Ontology:
    """Parse the line-oriented ontology format.

    Args:
        text: file contents; ``#`` starts a comment, one axiom per line.
        allow_complex: also accept the conjunctive fillers produced by
            back-translation (kept as :class:`ComplexInclusion`).

    Returns:
        The ontology with axioms in file order.
    """
    axioms: list[Axiom] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = _tokenize(line, lineno)
        n = _parse_sexpr(tokens, lineno)
        axioms.append(_axiom(n, lineno, len(axioms) + 1, allow_complex))
    return Ontology(tuple(axioms))


def _render_role(r: Role) -> str:
    return str(r)


def _render_expr(e) -> str:
    if isinstance(e, Concept):
        return e.name
    if isinstance(e, Some):
        if not e.fillers:
            filler = "Top"
        elif len(e.fillers) == 1:
            filler = e.fillers[0].name
        else:
            filler = f"And({' '.join(c.name for c in e.fillers)})"
        return f"Some({_render_role(e.role)} {filler})"
    if isinstance(e, All):
        return f"All({_render_role(e.role)} {e.filler.name})"
    if isinstance(e, AtMost1):
        return f"AtMost1({_render_role(e.role)} {e.filler.name})"
    raise TypeError(e)


def render_axiom(ax: Axiom) -> str:
    if isinstance(ax, ConceptInclusion):
        lhs = ax.lhs[0].name if len(ax.lhs) == 1 else f"And({' '.join(c.name for c in ax.lhs)})"
        rhs = ax.rhs[0].name if len(ax.rhs) == 1 else f"Or({' '.join(c.name for c in ax.rhs)})"
        return f"SubClassOf({lhs} {rhs})"
    if isinstance(ax, ExistsLeft):
        return f"SubClassOf(Some({ax.role} {ax.filler}) {ax.rhs})"
    if isinstance(ax, ExistsRight):
        return f"SubClassOf({ax.lhs} Some({ax.role} {ax.filler}))"
    if isinstance(ax, ForallRight):
        return f"SubClassOf({ax.lhs} All({ax.role} {ax.rhs}))"
    if isinstance(ax, AtMostOne):
        return f"SubClassOf({ax.lhs} AtMost1({ax.role} {ax.filler}))"
    if isinstance(ax, RoleInclusion):
        return f"SubRoleOf({ax.sub} {ax.sup})"
    if isinstance(ax, ComplexInclusion):
        if len(ax.lhs) == 1:
            lhs = _render_expr(ax.lhs[0])
        else:
            lhs = f"And({' '.join(_render_expr(e) for e in ax.lhs)})"
        return f"SubClassOf({lhs} {_render_expr(ax.rhs)})"
    raise TypeError(ax)


def serialize_ontology(o: Ontology, header: Iterable[str] = ()) -> str:
    lines = [f"# {h}" if h else "#" for h in header]
    lines.extend(render_axiom(ax) for ax in o.axioms)
    return "".join(f"{line}\n" for line in lines)


# -- role hierarchy -----------------------------------------------------------------


def roles_of(o: Ontology) -> frozenset[Role]:
    names = o.role_names
    return frozenset(Role(n, inv) for n in names for inv in (False, True))


def subrole_closure(o: Ontology) -> frozenset[tuple[Role, Role]]:
    """Reflexive-transitive closure of the role inclusions, closed under inverses."""
    roles = roles_of(o)
    succ: dict[Role, set[Role]] = {r: set() for r in roles}
    for ax in o.axioms:
        if isinstance(ax, RoleInclusion):
            sub = Role(ax.sub)
            succ[sub].add(ax.sup)
            succ[sub.inverse()].add(ax.sup.inverse())
    pairs = set()
    for start in roles:
        seen = {start}
        stack = [start]
        while stack:
            r = stack.pop()
            for s in succ[r]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        pairs.update((start, s) for s in seen)
    return frozenset(pairs)


# -- profiles -------------------------------------------------------------------------


@dataclass(frozen=True)
class DLProfile:
    base: str  # "EL", "ELU" or "ALC"
    features: frozenset[str] = field(default_factory=frozenset)  # subset of {"H", "I", "F"}
    horn: bool = True

    def __str__(self) -> str:
        flags = "".join(f for f in "HIF" if f in self.features)
        prefix = "Horn-" if self.horn and self.base == "ALC" else ""
        return f"{prefix}{self.base}{flags}"

    def within(self, other: DLProfile) -> bool:
        """True when every ontology with this profile also fits ``other``."""
        rank = {"EL": 0, "ELU": 1, "ALC": 2}
        if rank[self.base] > rank[other.base]:
            return False
        if other.horn and not self.horn:
            return False
        return self.features <= other.features


def is_horn_ontology(o: Ontology) -> bool:
    for ax in o.axioms:
        if isinstance(ax, ConceptInclusion) and len(ax.rhs) > 1:
            return False
    return True


def profile_of(o: Ontology) -> DLProfile:
    features = set()
    needs_alc = False
    for ax in o.axioms:
        if any(r.inverted for r in axiom_roles(ax)):
            features.add("I")
        if isinstance(ax, RoleInclusion):
            features.add("H")
        elif isinstance(ax, AtMostOne):
            features.add("F")
        elif isinstance(ax, ForallRight):
            needs_alc = True
        elif isinstance(ax, ComplexInclusion):
            if isinstance(ax.rhs, All):
                needs_alc = True
            elif isinstance(ax.rhs, AtMost1):
                features.add("F")
    horn = is_horn_ontology(o)
    if needs_alc or "I" in features:
        base = "ALC"
    else:
        base = "EL" if horn else "ELU"
    return DLProfile(base, frozenset(features), horn)


def parse_profile(text: str) -> DLProfile:
    """Inverse of ``str(DLProfile)``, e.g. ``Horn-ALCHIF`` or ``ELU``."""
    horn = text.startswith("Horn-")
    body = text[5:] if horn else text
    for base in ("ALC", "ELU", "EL"):
        if body.startswith(base):
            flags = body[len(base):]
            if any(f not in "HIF" for f in flags):
                break
            if base == "EL":
                horn = True
            elif base == "ELU":
                horn = False
            return DLProfile(base, frozenset(flags), horn)
    raise ValueError(f"unknown profile {text!r}")
