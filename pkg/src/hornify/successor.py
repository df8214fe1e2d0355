"""Translation of ontologies into rules that encode successors as function terms.

Each existential ``Some(R B)`` on the right of an axiom gets its own unary
function symbol ``f_R_B``.  Instead of deriving ``R(x, f(x))`` the translation
derives only ``B(f_R_B(x))``, and compensates by instantiating the universal,
existential-left and at-most-one axioms directly on the function terms for
every symbol whose role is below the axiom's role in the hierarchy.  Binary
atoms are never derived over function terms, which keeps roles out of
minimal markings.

``Top`` at a successor term ``f_R_B(x)`` is written ``B(f_R_B(x))``: the
successor exists exactly when its filler holds there, and unlike ``True``
this test survives transposition.
"""

from __future__ import annotations

from .ontology import (
    AtMostOne,
    ExistsLeft,
    ExistsRight,
    ForallRight,
    Ontology,
    Role,
    subrole_closure,
)
from .program import (
    EQ_P,
    Atom,
    Fn,
    Program,
    Rule,
    Successor,
    Var,
    concept_atom,
    role_atom,
    translate_axiom,
)


def successor_symbols(o: Ontology) -> tuple[Successor, ...]:
    """One symbol per distinct ``Some(R B)`` in a T3 axiom, in first-use order."""
    seen: dict[Successor, None] = {}
    for ax in o.axioms:
        if isinstance(ax, ExistsRight):
            seen.setdefault(Successor(ax.role, ax.filler), None)
    return tuple(seen)


def successor_translate(o: Ontology, function_congruence: bool = True) -> Program:
    symbols = successor_symbols(o)
    below = subrole_closure(o)

    def under(role: Role) -> list[Successor]:
        """Symbols f_{R',Y} with R' below ``role``."""
        return [f for f in symbols if (f.role, role) in below]

    def under_inverse(role: Role) -> list[Successor]:
        """Symbols f_{inv(R'),Y} with R' below ``role``."""
        return [f for f in symbols if (f.role.inverse(), role) in below]

    def at(c, t) -> Atom:
        """``c(t)``, reading ``Top`` at a successor term as that successor's filler."""
        if c.is_top and isinstance(t, Fn) and isinstance(t.symbol, Successor):
            return concept_atom(t.symbol.filler, t)
        return concept_atom(c, t)

    x, y, z = Var("x"), Var("y"), Var("z")
    rules: list[Rule] = []
    for i, ax in enumerate(o.axioms, 1):
        tag = f"xi:{i}:{ax.kind}"
        if isinstance(ax, ExistsRight):
            f = Successor(ax.role, ax.filler)
            rules.append(Rule((at(ax.lhs, x),), (at(ax.filler, Fn(f, x)),),
                              tag))
            continue
        rules.extend(Rule(r.body, r.head, tag) for r in translate_axiom(ax, i))
        if isinstance(ax, ExistsLeft):
            a, c = ax.filler, ax.rhs
            for f in under(ax.role):
                rules.append(Rule((at(a, Fn(f, x)),), (at(c, x),), tag))
            for f in under_inverse(ax.role):
                fx = Fn(f, x)
                rules.append(Rule((at(a, x), at(f.filler, fx)),
                                  (at(c, fx),), tag))
        elif isinstance(ax, ForallRight):
            a, c = ax.lhs, ax.rhs
            for f in under_inverse(ax.role):
                rules.append(Rule((at(a, Fn(f, x)),), (at(c, x),), tag))
            for f in under(ax.role):
                fx = Fn(f, x)
                rules.append(Rule((at(a, x), at(f.filler, fx)),
                                  (at(c, fx),), tag))
        elif isinstance(ax, AtMostOne):
            a, b, r = ax.lhs, ax.filler, ax.role
            for f in under(r):
                fz = Fn(f, z)
                rules.append(Rule((at(a, z), at(b, fz), role_atom(r, z, x),
                                   at(b, x)),
                                  (Atom(EQ_P, (fz, x)),), tag))
            for f in under_inverse(r):
                fx = Fn(f, x)
                rules.append(Rule((at(a, fx), at(b, x), role_atom(r, fx, y),
                                   at(b, y)),
                                  (Atom(EQ_P, (x, y)),), tag))
            for f1 in under(r):
                for f2 in under(r):
                    t1, t2 = Fn(f1, z), Fn(f2, z)
                    rules.append(Rule((at(a, z), at(b, t1),
                                       at(b, t2)),
                                      (Atom(EQ_P, (t1, t2)),), tag))
            for f1 in under_inverse(r):
                for f2 in under(r):
                    t1 = Fn(f1, x)
                    t2 = Fn(f2, t1)
                    rules.append(Rule((at(a, t1), at(b, x),
                                       at(b, t2)),
                                      (Atom(EQ_P, (x, t2)),), tag))
    return Program(tuple(rules), function_congruence)


xi_translate = successor_translate
