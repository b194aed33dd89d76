"""[V]-adjacency, [V]-connectedness, and [V]-components of a query.

Given a separator set V, two variables are adjacent when some body atom
contains both outside V; components are the maximal connected variable sets
of that graph.  Every variable outside V that occurs in some atom counts as
connected to itself (the degenerate single-variable path).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import Atom, ConjunctiveQuery


@dataclass(frozen=True)
class Component:
    separator: frozenset[str]
    members: frozenset[str]

    @property
    def representative(self) -> str:
        """Least member under the lexicographic variable order."""
        return min(self.members)

    def __contains__(self, var: str) -> bool:
        return var in self.members


def v_adjacent(q: ConjunctiveQuery, v: Iterable[str], x: str, y: str) -> bool:
    """True iff some body atom A has {x, y} <= var(A) - V."""
    vset = frozenset(v)
    qvars = q.variables()
    for name in (x, y):
        if name not in qvars:
            raise ValueError(f"unknown variable {name}")
    if x in vset or y in vset:
        return False
    pair = {x, y}
    return any(pair <= (a.variables() - vset) for a in q.body)


def v_components(q: ConjunctiveQuery, v: Iterable[str]) -> frozenset[Component]:
    """All [V]-components of Q, as a set of Component values."""
    vset = frozenset(v)
    edges = [a.variables() - vset for a in q.body]
    edges = [e for e in edges if e]
    remaining = set().union(*edges) if edges else set()
    comps = []
    while remaining:
        seed = remaining.pop()
        members = {seed}
        changed = True
        while changed:
            changed = False
            for e in edges:
                if e & members and not e <= members:
                    members |= e
                    changed = True
        remaining -= members
        comps.append(Component(vset, frozenset(members)))
    return frozenset(comps)


def atoms_of_component(q: ConjunctiveQuery, c: Component) -> frozenset[Atom]:
    """atoms(C): the body atoms whose variables meet the component."""
    return frozenset(a for a in q.body if a.variables() & c.members)


def component_of(
    q: ConjunctiveQuery, v: Iterable[str], var: str
) -> Component | None:
    """The [V]-component containing ``var``, or None if var lies in V."""
    for c in v_components(q, v):
        if var in c:
            return c
    return None
