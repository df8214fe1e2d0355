"""2-SAT via the implication graph and strongly connected components.

Literals are ``(variable, polarity)`` pairs.  A clause ``(a, b)`` contributes
the implications ``not a -> b`` and ``not b -> a``; the instance is
unsatisfiable iff some variable shares a component with its negation.
Components come out of Tarjan's algorithm in reverse topological order, which
also gives the standard assignment: a variable is true when its positive
literal's component is found before the negative one's.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

Literal = tuple[Hashable, bool]
Clause = tuple[Literal, Literal]


def _neg(lit: Literal) -> Literal:
    return (lit[0], not lit[1])


def solve_2sat(variables: Sequence[Hashable], clauses: Iterable[Clause]) -> dict | None:
    """Satisfying assignment as a dict, or None when unsatisfiable.

    Deterministic for a fixed variable order and clause order.
    """
    nodes: list[Literal] = []
    for v in variables:
        nodes.append((v, True))
        nodes.append((v, False))
    index = {lit: i for i, lit in enumerate(nodes)}
    adj: list[list[int]] = [[] for _ in nodes]
    for a, b in clauses:
        for lit in (a, b):
            if lit not in index:
                raise KeyError(f"unknown variable {lit[0]!r}")
        adj[index[_neg(a)]].append(index[b])
        adj[index[_neg(b)]].append(index[a])

    # iterative Tarjan
    n = len(nodes)
    order = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if order[root] != -1:
            continue
        work = [(root, 0)]
        order[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if order[w] == -1:
                    order[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], order[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == order[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1

    assignment = {}
    for v in variables:
        pos, neg = comp[index[(v, True)]], comp[index[(v, False)]]
        if pos == neg:
            return None
        assignment[v] = pos < neg
    return assignment
