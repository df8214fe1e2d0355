"""Independent validation of refutation traces.

A step is valid when it is a dataset fact, or when instantiating its rule
with its substitution gives body atoms each contained in the clause of the
matching premise, and its clause equals the heads plus every premise clause
minus its resolved atom.  A refutation ends in the empty clause.
"""

from __future__ import annotations

from .program import TOP_P, Atom, Const, Fn, Program, Var
from .reasoner import DEFAULT_CONSTANT, Trace, _facts


def _subst(t, b: dict):
    if isinstance(t, Var):
        if t.name not in b:
            raise KeyError(t.name)
        return b[t.name]
    if isinstance(t, Fn):
        return Fn(t.symbol, _subst(t.arg, b))
    return t


def _instantiate(a: Atom, b: dict) -> Atom:
    return Atom(a.pred, tuple(_subst(t, b) for t in a.args))


def _ground(t) -> bool:
    while isinstance(t, Fn):
        t = t.arg
    return isinstance(t, Const)


def validate_trace(trace: Trace, p: Program, d=None) -> list[str]:
    """Problems with ``trace`` as a refutation of ``p`` with dataset ``d``; empty if valid."""
    facts = set(_facts(d))
    if not any(a.args for a in facts) and not p.signature.constants:
        facts.add(Atom(TOP_P, (Const(DEFAULT_CONSTANT),)))
    errors: list[str] = []
    clauses: dict[int, frozenset] = {}
    rules = p.rules
    for s in trace.steps:
        if s.id in clauses:
            errors.append(f"step {s.id}: duplicate id")
            continue
        if s.rule is None:
            if len(s.clause) != 1 or next(iter(s.clause)) not in facts:
                errors.append(f"step {s.id}: not a dataset fact")
            clauses[s.id] = s.clause
            continue
        if not 0 <= s.rule < len(rules):
            errors.append(f"step {s.id}: no rule {s.rule}")
            continue
        r = rules[s.rule]
        b = dict(s.substitution)
        if set(b) != r.variables:
            errors.append(f"step {s.id}: substitution does not cover exactly the rule variables")
            continue
        if not all(_ground(t) for t in b.values()):
            errors.append(f"step {s.id}: substitution is not ground")
            continue
        body = [_instantiate(a, b) for a in r.body]
        heads = {_instantiate(a, b) for a in r.head}
        if len(s.premises) != len(body):
            errors.append(f"step {s.id}: {len(body)} body atoms but {len(s.premises)} premises")
            continue
        resolvent = set(heads)
        ok = True
        for atom, pid in zip(body, s.premises):
            if pid not in clauses or pid >= s.id:
                errors.append(f"step {s.id}: premise {pid} is not an earlier step")
                ok = False
                break
            c = clauses[pid]
            if atom not in c:
                errors.append(f"step {s.id}: premise {pid} does not contain {atom}")
                ok = False
                break
            resolvent |= c - {atom}
        if ok and frozenset(resolvent) != s.clause:
            errors.append(f"step {s.id}: clause is not the hyperresolvent")
        clauses[s.id] = s.clause
    if not trace.steps:
        errors.append("empty trace")
    elif trace.final.clause:
        errors.append("trace does not end in the empty clause")
    return errors


def is_valid_refutation(trace: Trace, p: Program, d=None) -> bool:
    return not validate_trace(trace, p, d)


__all__ = ["is_valid_refutation", "validate_trace"]
