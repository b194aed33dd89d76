"""Deciding k-bounded hypertree width and acyclicity.

Three engines are provided and must agree:

* ``decompose``: a memoized top-down search over separator candidates that
  also builds a witness decomposition in normal form,
* ``fixpoint_decide``: a bottom-up evaluation of the decomposable-component
  pairs, decision only,
* ``brute_force_qw``: a complete but budgeted search over pure query
  decompositions, used as the query-width oracle.

``gyo_acyclic`` is an independent ear-removal acyclicity check.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Optional

from .errors import InconclusiveError
from .hypertree import (
    Hypertree,
    HtVertex,
    JoinTree,
    QdVertex,
    QueryDecomposition,
    complete_hd,
    hd_to_jointree,
    normalize_hd,
)
from .model import ConjunctiveQuery


class _Index:
    """Bitmask view of a query: one bit per variable."""

    def __init__(self, q: ConjunctiveQuery):
        self.q = q
        self.vars = sorted(q.variables())
        self.bit = {x: 1 << i for i, x in enumerate(self.vars)}
        self.atom_masks = [self.mask(a.variables()) for a in q.body]
        self.var_atoms = [i for i, m in enumerate(self.atom_masks) if m]
        self.all_mask = (1 << len(self.vars)) - 1
        self._comp_cache: dict[int, tuple[int, ...]] = {}

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for x in names:
            m |= self.bit[x]
        return m

    def unmask(self, m: int) -> frozenset[str]:
        return frozenset(x for x in self.vars if self.bit[x] & m)

    def components(self, sep: int) -> tuple[int, ...]:
        """Masks of the maximal [sep]-connected variable sets."""
        cached = self._comp_cache.get(sep)
        if cached is not None:
            return cached
        edges = [m & ~sep for m in self.atom_masks if m & ~sep]
        comps: list[int] = []
        for e in edges:
            merged = e
            rest = []
            for c in comps:
                if c & merged:
                    merged |= c
                else:
                    rest.append(c)
            rest.append(merged)
            comps = rest
        comps.sort(key=lambda c: c & -c)  # by least variable bit
        result = tuple(comps)
        self._comp_cache[sep] = result
        return result

    def atoms_of(self, comp: int) -> list[int]:
        return [i for i in self.var_atoms if self.atom_masks[i] & comp]

    def candidates(self, k: int) -> list[tuple[tuple[int, ...], int]]:
        """All separator candidates of size 1..k, lexicographic."""
        out = []
        for size in range(1, k + 1):
            for s in combinations(self.var_atoms, size):
                m = 0
                for i in s:
                    m |= self.atom_masks[i]
                out.append((s, m))
        return out


def _trivial_tree(q: ConjunctiveQuery) -> Hypertree:
    if not q.body:
        return Hypertree([])
    # only variable-free atoms: a single vertex labels the first one
    return Hypertree([HtVertex(0, None, frozenset(), frozenset({0}))])


def decompose(q: ConjunctiveQuery, k: int) -> Optional[Hypertree]:
    """A normal-form decomposition of width <= k, or None if none exists."""
    if k < 1:
        raise ValueError("k must be at least 1")
    idx = _Index(q)
    if not idx.var_atoms:
        return _trivial_tree(q)
    cands = idx.candidates(k)
    memo: dict[tuple[int, int], object] = {}

    def solve(comp: int, var_r: int):
        """Witness subtree for the component under separator vars var_r."""
        key = (comp, var_r)
        if key in memo:
            return memo[key]
        border = 0
        for p in idx.atoms_of(comp):
            border |= idx.atom_masks[p] & var_r
        result = None
        for s, var_s in cands:
            if not var_s & comp:
                continue
            if border & ~var_s:
                continue
            kids = []
            for sub in idx.components(var_s):
                if not sub & comp:
                    continue
                child = solve(sub, var_s)
                if child is None:
                    kids = None
                    break
                kids.append((sub, child))
            if kids is not None:
                result = (s, kids)
                break
        memo[key] = result
        return result

    top = idx.components(0)
    witnesses = []
    for comp in top:
        w = solve(comp, 0)
        if w is None:
            return None
        witnesses.append((comp, w))

    verts: list[HtVertex] = []
    counter = [0]

    def build(node, comp: int, chi_parent: int, parent_id: Optional[int]):
        s, kids = node
        var_s = 0
        for i in s:
            var_s |= idx.atom_masks[i]
        chi = var_s & (chi_parent | comp)
        lam = frozenset(i for i in s if idx.atom_masks[i] & chi)
        vid = counter[0]
        counter[0] += 1
        verts.append(HtVertex(vid, parent_id, idx.unmask(chi), lam))
        for sub, child in kids:
            build(child, sub, chi, vid)
        return vid

    root_id = None
    for comp, w in witnesses:
        vid = build(w, comp, 0, root_id)
        if root_id is None:
            root_id = vid
    return normalize_hd(q, Hypertree(verts))


def hypertree_width(
    q: ConjunctiveQuery, k_max: Optional[int] = None
) -> Optional[tuple[int, Hypertree]]:
    """Smallest width and a witness, searching k = 1..k_max."""
    idx = _Index(q)
    bound = max(1, len(idx.var_atoms))
    if k_max is not None:
        bound = min(bound, k_max)
    for k in range(1, bound + 1):
        h = decompose(q, k)
        if h is not None:
            return k, h
    return None


def is_acyclic(q: ConjunctiveQuery) -> Optional[JoinTree]:
    """A join tree of the query, or None if the query is cyclic."""
    h = decompose(q, 1)
    if h is None:
        return None
    return hd_to_jointree(q, complete_hd(q, h))


def gyo_acyclic(q: ConjunctiveQuery) -> bool:
    """Ear removal: repeatedly drop covered edges and solitary variables."""
    edges = []
    for a in q.body:
        vs = set(a.variables())
        if vs:
            edges.append(vs)
    changed = True
    while changed and edges:
        changed = False
        for i, e in enumerate(edges):
            if any(j != i and e <= edges[j] for j in range(len(edges))):
                del edges[i]
                changed = True
                break
        if changed:
            continue
        counts: dict[str, int] = {}
        for e in edges:
            for x in e:
                counts[x] = counts.get(x, 0) + 1
        for e in edges:
            ears = {x for x in e if counts[x] == 1}
            if ears:
                e -= ears
                changed = True
        edges = [e for e in edges if e]
    return not edges


def fixpoint_decide(q: ConjunctiveQuery, k: int) -> bool:
    """Bottom-up variant of the width decision; no witness is produced."""
    if k < 1:
        raise ValueError("k must be at least 1")
    idx = _Index(q)
    if not idx.var_atoms:
        return True
    cands = idx.candidates(k)
    # pairs (separator vars, component) stratified by component size
    pairs = []
    seps = {0} | {m for _, m in cands}
    for var_r in seps:
        for comp in idx.components(var_r):
            pairs.append((var_r, comp))
    pairs.sort(key=lambda p: bin(p[1]).count("1"))
    solved: set[tuple[int, int]] = set()
    for var_r, comp in pairs:
        if (var_r, comp) in solved:
            continue
        border = 0
        for p in idx.atoms_of(comp):
            border |= idx.atom_masks[p] & var_r
        for _, var_s in cands:
            if not var_s & comp:
                continue
            if border & ~var_s:
                continue
            if all(
                (var_s, sub) in solved
                for sub in idx.components(var_s)
                if sub & comp
            ):
                solved.add((var_r, comp))
                break
    return all((0, comp) in solved for comp in idx.components(0))


def _set_partitions(items: list):
    """All partitions of the items into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def brute_force_qw(
    q: ConjunctiveQuery, k: int, budget: int = 500_000
) -> Optional[QueryDecomposition]:
    """Complete search for a pure query decomposition of width <= k.

    Returns a witness decomposition or None; raises InconclusiveError when
    the step budget runs out before the search is exhausted.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not q.body:
        return QueryDecomposition([QdVertex(0, None, frozenset())])
    if k == 0:
        return None
    atom_vars = [a.variables() for a in q.body]
    all_atoms = frozenset(range(len(q.body)))
    fuel = [budget]
    memo: dict[tuple[frozenset[int], frozenset[int]], Optional[tuple]] = {}

    def outside_vars(f: frozenset[int]) -> frozenset[str]:
        out: set[str] = set()
        for i in all_atoms - f:
            out |= atom_vars[i]
        return frozenset(out)

    def grouped(f: frozenset[int], sep_vars: frozenset[str]) -> list[frozenset[int]]:
        """Atoms of f clustered by shared variables outside the separator."""
        groups: list[tuple[set[int], set[str]]] = []
        for i in sorted(f):
            vs = atom_vars[i] - sep_vars
            merged_atoms, merged_vars = {i}, set(vs)
            rest = []
            for ga, gv in groups:
                if gv & merged_vars:
                    merged_atoms |= ga
                    merged_vars |= gv
                else:
                    rest.append((ga, gv))
            rest.append((merged_atoms, merged_vars))
            groups = rest
        return [frozenset(ga) for ga, _ in groups]

    def qdec(f: frozenset[int], r: frozenset[int]) -> Optional[tuple]:
        """Witness subtree (label, child witnesses) covering exactly f."""
        key = (f, r)
        if key in memo:
            return memo[key]
        fuel[0] -= 1
        if fuel[0] < 0:
            raise InconclusiveError("query-width search budget exhausted")
        fvars = frozenset().union(*(atom_vars[i] for i in f))
        boundary = fvars & outside_vars(f)
        pool = sorted(f | r)
        found = None
        for size in range(1, k + 1):
            if found is not None:
                break
            for s in combinations(pool, size):
                sset = frozenset(s)
                if not sset & f:
                    continue
                svars = frozenset().union(*(atom_vars[i] for i in s))
                if not boundary <= svars:
                    continue
                remaining = f - sset
                if not remaining:
                    found = (sset, [])
                    break
                groups = grouped(remaining, svars)
                parts = sorted(
                    _set_partitions(groups), key=len, reverse=True
                )
                for part in parts:
                    fuel[0] -= 1
                    if fuel[0] < 0:
                        raise InconclusiveError(
                            "query-width search budget exhausted"
                        )
                    kids = []
                    for block in part:
                        w = qdec(frozenset().union(*block), sset)
                        if w is None:
                            kids = None
                            break
                        kids.append(w)
                    if kids is not None:
                        found = (sset, kids)
                        break
                if found is not None:
                    break
        memo[key] = found
        return found

    witness = qdec(all_atoms, frozenset())
    if witness is None:
        return None
    verts: list[QdVertex] = []

    def emit(node, parent: Optional[int]):
        label, kids = node
        vid = len(verts)
        verts.append(
            QdVertex(vid, parent, frozenset(("atom", i) for i in sorted(label)))
        )
        for child in kids:
            emit(child, vid)

    emit(witness, None)
    return QueryDecomposition(verts)
