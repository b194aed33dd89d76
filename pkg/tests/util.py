"""Random corpus generators shared by the test modules."""

from __future__ import annotations

import random

from htd import Atom, ConjunctiveQuery, Database, constant, variable

RELATIONS = ["r", "s", "t", "u", "w"]


def rand_query(
    rng: random.Random,
    max_atoms: int = 5,
    max_vars: int = 6,
    max_arity: int = 3,
    consts: list[str] | None = None,
    head_vars: bool = False,
    consistent_arity: bool = False,
) -> ConjunctiveQuery:
    """A small random query; relation arities are kept consistent when the
    query is meant to be evaluated over a database."""
    n = rng.randint(1, max_atoms)
    vs = [f"V{i}" for i in range(1, rng.randint(2, max_vars) + 1)]
    arity: dict[str, int] = {}
    body = []
    for i in range(n):
        rel = rng.choice(RELATIONS)
        ar = rng.randint(1, max_arity)
        if consistent_arity:
            ar = arity.setdefault(rel, ar)
        args = []
        for _ in range(ar):
            if consts and rng.random() < 0.15:
                args.append(constant(rng.choice(consts)))
            else:
                args.append(variable(rng.choice(vs)))
        body.append(Atom(rel, tuple(args), i))
    head_args = ()
    if head_vars:
        bvars = sorted(set().union(*(a.variables() for a in body)))
        if bvars:
            head_args = tuple(
                variable(v)
                for v in rng.sample(bvars, rng.randint(0, min(2, len(bvars))))
            )
    return ConjunctiveQuery(Atom("ans", head_args), tuple(body))


def rand_db(
    rng: random.Random,
    q: ConjunctiveQuery,
    consts: list[str],
    max_facts: int = 6,
) -> Database:
    """Facts for every relation of the query, at its arity in the query."""
    arities = {a.relation: len(a.args) for a in q.body}
    relations = {}
    kept = {}
    for rel, ar in arities.items():
        rows = frozenset(
            tuple(rng.choice(consts) for _ in range(ar))
            for _ in range(rng.randint(0, max_facts))
        )
        if rows:
            relations[rel] = rows
            kept[rel] = ar
    return Database(relations, kept)
