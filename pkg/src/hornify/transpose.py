"""Transposition of a marked program into a Horn program.

Every marked predicate P gets a complement ``not_P``.  Rules that touch a
marked predicate are inverted: marked body atoms move to the head and marked
head atoms move to the body, each under its complement.  Each output rule
records which scheme produced it in its origin tag:

    kept   rule over Horn predicates only, copied
    case1  one marked body atom Q(t):      ... and not_P_i  -> not_Q(t)
    case2  nothing marked in the body, every head atom marked:
                                            not_False(z) and ... -> False(z)
    case3  exactly one unmarked head atom:  ... and not_P_i  -> P(s)
    case4  not_False(z) and P(x) and not_P(x) -> False(z), per marked P
    case5  P(x1..xn) -> not_False(xi), per predicate and position; True is
           included when some rule body mentions it, so that a term known
           only to exist is covered as well
    case6  not_False(x) -> not_False(f(x)), per function symbol

The generated components of the result are rebuilt for the extended
signature rather than transposed.
"""

from __future__ import annotations

from .marking import MarkingProblem, is_marking
from .program import (
    BOT_P,
    NOT_BOT,
    TOP_P,
    Atom,
    Fn,
    Program,
    Rule,
    Var,
    pred_key,
    signature_of,
)

CASES = ("kept", "case1", "case2", "case3", "case4", "case5", "case6")


class MarkingError(ValueError):
    def __init__(self, violations):
        super().__init__("not a marking: " + "; ".join(violations))
        self.violations = tuple(violations)


def complement_atom(a: Atom) -> Atom:
    return Atom(a.pred.complement(), a.args)


def _fresh(used: set[str], base: str = "z") -> Var:
    if base not in used:
        return Var(base)
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return Var(f"{base}{i}")


def transposition_case(r: Rule) -> str:
    return r.origin.split(" ", 1)[0]


def _vars(atoms) -> set[str]:
    out: set[str] = set()
    for a in atoms:
        out |= a.variables
    return out


def transpose(p: Program, m, problem: MarkingProblem | None = None) -> Program:
    """The Horn program obtained by transposing ``p`` along the marking ``m``."""
    problem = problem or MarkingProblem(p)
    report = is_marking(p, m, problem)
    if not report:
        raise MarkingError(report.violations)
    m = frozenset(m)
    disj = problem.classes.disjunctive
    out: list[Rule] = []
    for r in p.core:
        tag = f"from {r.origin}"
        if all(a.pred not in disj for a in r.body + r.head):
            out.append(Rule(r.body, r.head, f"kept {tag}"))
            continue
        marked = [a for a in r.body if a.pred in m]
        rest = [a for a in r.body if a.pred not in m]
        flipped = [complement_atom(a) for a in r.head if a.pred in m]
        unmarked_head = [a for a in r.head if a.pred not in m]
        if marked:
            head = complement_atom(marked[0])
            body = rest + flipped
            covered = _vars(body)
            guard = [Atom(NOT_BOT, (Var(v),)) for v in sorted(head.variables - covered)]
            out.append(Rule(tuple(guard + body), (head,), f"case1 {tag}"))
        elif not unmarked_head:
            z = _fresh(r.variables)
            out.append(Rule((Atom(NOT_BOT, (z,)),) + tuple(rest + flipped),
                            (Atom(BOT_P, (z,)),), f"case2 {tag}"))
        else:
            out.append(Rule(tuple(rest + flipped), (unmarked_head[0],), f"case3 {tag}"))

    sig = signature_of(p.core)
    x, z = Var("x"), Var("z")
    for q in sorted(m, key=pred_key):
        if q == BOT_P:
            continue  # False(x) already closes every branch on its own
        args = (x,) if q.arity == 1 else tuple(Var(f"x{i}") for i in range(1, q.arity + 1))
        out.append(Rule((Atom(NOT_BOT, (z,)), Atom(q, args), Atom(q.complement(), args)),
                        (Atom(BOT_P, (z,)),), "case4"))
    uses_top = any(a.pred == TOP_P for r in p.core for a in r.body)
    for q in ((TOP_P,) if uses_top else ()) + sig.predicates:
        args = (x,) if q.arity == 1 else tuple(Var(f"x{i}") for i in range(1, q.arity + 1))
        for v in args:
            out.append(Rule((Atom(q, args),), (Atom(NOT_BOT, (v,)),), "case5"))
    for f in sig.functions:
        out.append(Rule((Atom(NOT_BOT, (x,)),), (Atom(NOT_BOT, (Fn(f, x),)),), "case6"))
    return Program(tuple(out), p.function_congruence)
