"""Hypertree and query decompositions: types, validators, and transforms.

A hypertree carries two labels per vertex: chi (variables) and lam (body-atom
indices).  Validators check the four hypertree-decomposition conditions, the
three query-decomposition conditions, and the three normal-form conditions;
each violation names its condition and a witness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .components import Component, v_components
from .errors import DecompositionFormatError, InvalidDecompositionError
from .model import ConjunctiveQuery, atoms_vars, parse_query


@dataclass(frozen=True)
class HtVertex:
    id: int
    parent: Optional[int]
    chi: frozenset[str]
    lam: frozenset[int]


class Hypertree:
    """Rooted labeled tree; may be empty (decomposition of an empty body)."""

    def __init__(self, vertices: Iterable[HtVertex]):
        self.vertices: dict[int, HtVertex] = {}
        roots = []
        for v in vertices:
            if v.id in self.vertices:
                raise DecompositionFormatError(f"duplicate vertex id {v.id}")
            self.vertices[v.id] = v
            if v.parent is None:
                roots.append(v.id)
        self.children: dict[int, list[int]] = {i: [] for i in self.vertices}
        for v in self.vertices.values():
            if v.parent is not None:
                if v.parent not in self.vertices:
                    raise DecompositionFormatError(
                        f"vertex {v.id} has unknown parent {v.parent}"
                    )
                self.children[v.parent].append(v.id)
        if self.vertices and len(roots) != 1:
            raise DecompositionFormatError("expected exactly one root vertex")
        self.root_id: Optional[int] = roots[0] if roots else None
        if len(self._preorder_any()) != len(self.vertices):
            raise DecompositionFormatError("parent links do not form a tree")

    def _preorder_any(self) -> list[int]:
        if self.root_id is None:
            return []
        out, stack = [], [self.root_id]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self.children[v])
        return out

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices.values())

    @property
    def root(self) -> Optional[HtVertex]:
        return None if self.root_id is None else self.vertices[self.root_id]

    def subtree_ids(self, vid: int) -> list[int]:
        out, stack = [], [vid]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self.children[v])
        return out

    def chi_subtree(self, vid: int) -> frozenset[str]:
        out: set[str] = set()
        for i in self.subtree_ids(vid):
            out |= self.vertices[i].chi
        return frozenset(out)

    def width(self) -> int:
        return max((len(v.lam) for v in self), default=0)

    def preorder(self) -> list[int]:
        """Canonical preorder: children sorted by (min lam, min chi)."""
        if self.root_id is None:
            return []

        def key(vid: int):
            v = self.vertices[vid]
            return (min(v.lam, default=-1), min(v.chi, default=""), vid)

        out, stack = [], [self.root_id]
        while stack:
            vid = stack.pop()
            out.append(vid)
            stack.extend(sorted(self.children[vid], key=key, reverse=True))
        return out

    def canonical(self):
        """Hashable form for equality up to rooted-tree isomorphism."""

        def rec(vid: int):
            v = self.vertices[vid]
            kids = tuple(sorted(rec(c) for c in self.children[vid]))
            return (tuple(sorted(v.chi)), tuple(sorted(v.lam)), kids)

        return rec(self.root_id) if self.root_id is not None else ()


LabelItem = tuple  # ("atom", index) or ("var", name)


@dataclass(frozen=True)
class QdVertex:
    id: int
    parent: Optional[int]
    label: frozenset[LabelItem]


class QueryDecomposition:
    def __init__(self, vertices: Iterable[QdVertex]):
        self.vertices: dict[int, QdVertex] = {v.id: v for v in vertices}
        roots = [v.id for v in self.vertices.values() if v.parent is None]
        if len(roots) != 1:
            raise DecompositionFormatError("expected exactly one root vertex")
        self.root_id = roots[0]
        self.children: dict[int, list[int]] = {i: [] for i in self.vertices}
        for v in self.vertices.values():
            if v.parent is not None:
                if v.parent not in self.vertices:
                    raise DecompositionFormatError(
                        f"vertex {v.id} has unknown parent {v.parent}"
                    )
                self.children[v.parent].append(v.id)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices.values())

    def is_pure(self) -> bool:
        return all(
            item[0] == "atom" for v in self for item in v.label
        )

    def width(self) -> int:
        return max((len(v.label) for v in self), default=0)

    def label_atoms(self, vid: int) -> frozenset[int]:
        return frozenset(
            i for kind, i in self.vertices[vid].label if kind == "atom"
        )

    def label_vars(self, q: ConjunctiveQuery, vid: int) -> frozenset[str]:
        """Variables labeled explicitly or occurring in a labeled atom."""
        out: set[str] = set()
        for kind, x in self.vertices[vid].label:
            if kind == "var":
                out.add(x)
            else:
                out |= q.body[x].variables()
        return frozenset(out)


@dataclass(frozen=True)
class JtVertex:
    atom: int
    parent: Optional[int]  # parent atom index


class JoinTree:
    """Tree over the body atoms; each atom occurs exactly once."""

    def __init__(self, vertices: Iterable[JtVertex]):
        self.vertices: dict[int, JtVertex] = {}
        roots = []
        for v in vertices:
            if v.atom in self.vertices:
                raise DecompositionFormatError(f"atom {v.atom} occurs twice")
            self.vertices[v.atom] = v
            if v.parent is None:
                roots.append(v.atom)
        if self.vertices and len(roots) != 1:
            raise DecompositionFormatError("expected exactly one root")
        self.root_id = roots[0] if roots else None
        self.children: dict[int, list[int]] = {i: [] for i in self.vertices}
        for v in self.vertices.values():
            if v.parent is not None:
                self.children[v.parent].append(v.atom)

    def __len__(self) -> int:
        return len(self.vertices)

    def __bool__(self) -> bool:
        # an empty join tree (empty-body query) is still a positive answer
        return True


@dataclass(frozen=True)
class Violation:
    condition: str
    vertex: object
    witness: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]
    data: dict = field(default_factory=dict, compare=False)

    @property
    def valid(self) -> bool:
        return not self.violations

    def conditions(self) -> frozenset[str]:
        return frozenset(v.condition for v in self.violations)


def _connected(tree_children, parents, members: set) -> bool:
    """Do the member vertices induce a connected subtree?"""
    if len(members) <= 1:
        return True
    internal_edges = sum(
        1 for m in members if parents[m] is not None and parents[m] in members
    )
    return internal_edges == len(members) - 1


def _check_refs(q: ConjunctiveQuery, h: Hypertree):
    qvars = q.variables()
    for v in h:
        for i in v.lam:
            if not 0 <= i < len(q.body):
                raise DecompositionFormatError(
                    f"vertex {v.id}: dangling atom index {i}"
                )
        for x in v.chi:
            if x not in qvars:
                raise DecompositionFormatError(
                    f"vertex {v.id}: unknown variable {x}"
                )


def validate_hd(q: ConjunctiveQuery, h: Hypertree) -> ValidationReport:
    """Check the four hypertree-decomposition conditions."""
    _check_refs(q, h)
    violations = []
    parents = {v.id: v.parent for v in h}
    # condition 1: every atom covered by some chi
    for a in q.body:
        avars = a.variables()
        if avars and not any(avars <= v.chi for v in h):
            violations.append(
                Violation("HD1", None, f"atom {a.index} ({a}) uncovered")
            )
    # condition 2: per-variable connectedness
    for x in sorted(q.variables()):
        members = {v.id for v in h if x in v.chi}
        if not _connected(h.children, parents, members):
            violations.append(
                Violation("HD2", sorted(members), f"variable {x} disconnected")
            )
    for v in h:
        lam_vars = atoms_vars(q, v.lam)
        # condition 3: chi covered by the lam atoms
        extra = v.chi - lam_vars
        if extra:
            violations.append(
                Violation(
                    "HD3", v.id, f"chi variables {sorted(extra)} not in var(lambda)"
                )
            )
        # condition 4: lam variables reused below must be in chi
        bad = (lam_vars & h.chi_subtree(v.id)) - v.chi
        if bad:
            violations.append(
                Violation(
                    "HD4", v.id, f"variables {sorted(bad)} in subtree but not chi"
                )
            )
    return ValidationReport(tuple(violations))


def validate_qd(q: ConjunctiveQuery, d: QueryDecomposition) -> ValidationReport:
    """Check the three query-decomposition conditions."""
    qvars = q.variables()
    for v in d:
        for kind, x in v.label:
            if kind == "atom" and not 0 <= x < len(q.body):
                raise DecompositionFormatError(
                    f"vertex {v.id}: dangling atom index {x}"
                )
            if kind == "var" and x not in qvars:
                raise DecompositionFormatError(
                    f"vertex {v.id}: unknown variable {x}"
                )
    violations = []
    parents = {v.id: v.parent for v in d}
    covered = set()
    for v in d:
        covered |= d.label_atoms(v.id)
    for a in q.body:
        if a.index not in covered:
            violations.append(
                Violation("QD1", None, f"atom {a.index} ({a}) unlabeled")
            )
    for a in q.body:
        members = {v.id for v in d if a.index in d.label_atoms(v.id)}
        if not _connected(d.children, parents, members):
            violations.append(
                Violation("QD2", sorted(members), f"atom {a.index} disconnected")
            )
    for x in sorted(qvars):
        members = {v.id for v in d if x in d.label_vars(q, v.id)}
        if not _connected(d.children, parents, members):
            violations.append(
                Violation("QD3", sorted(members), f"variable {x} disconnected")
            )
    return ValidationReport(tuple(violations))


def hd_width(h: Hypertree) -> int:
    return h.width()


def complete_hd(q: ConjunctiveQuery, h: Hypertree) -> Hypertree:
    """Attach a leaf per atom lacking a strong cover; width never grows."""
    report = validate_hd(q, h)
    if not report.valid:
        raise InvalidDecompositionError(
            f"not a valid hypertree decomposition: {report.violations[0]}"
        )
    verts = dict(h.vertices)
    next_id = max(verts, default=-1) + 1
    order = h.preorder()
    for a in q.body:
        avars = a.variables()
        if any(avars <= v.chi and a.index in v.lam for v in verts.values()):
            continue
        host = next(
            (vid for vid in order if avars <= h.vertices[vid].chi), None
        )
        if host is None:  # variable-free atom under an empty tree
            if h.root_id is None:
                raise InvalidDecompositionError(
                    "cannot complete an empty decomposition with atoms present"
                )
            host = h.root_id
        verts[next_id] = HtVertex(next_id, host, avars, frozenset({a.index}))
        next_id += 1
    return Hypertree(verts.values())


def is_complete(q: ConjunctiveQuery, h: Hypertree) -> bool:
    return all(
        any(a.variables() <= v.chi and a.index in v.lam for v in h)
        for a in q.body
    )


def _nf_component(
    q: ConjunctiveQuery, h: Hypertree, s: HtVertex
) -> tuple[list[Component], Optional[frozenset[str]]]:
    """Components of [chi(parent)] matching NF condition 1 for child s."""
    r = h.vertices[s.parent]
    chi_ts = h.chi_subtree(s.id)
    comps = [c for c in v_components(q, r.chi) if c.members & chi_ts]
    matching = [
        c.members
        for c in comps
        if chi_ts == c.members | (s.chi & r.chi)
    ]
    return comps, (matching[0] if len(matching) == 1 else None)


def validate_nf(q: ConjunctiveQuery, h: Hypertree) -> ValidationReport:
    """Check the three normal-form conditions; records treecomp per vertex."""
    base = validate_hd(q, h)
    if not base.valid:
        raise InvalidDecompositionError(
            f"not a valid hypertree decomposition: {base.violations[0]}"
        )
    violations = []
    tc: dict[int, frozenset[str]] = {}
    if h.root_id is not None:
        tc[h.root_id] = q.variables()
    for s in h:
        if s.parent is None:
            continue
        r = h.vertices[s.parent]
        comps, match = _nf_component(q, h, s)
        if match is None:
            violations.append(
                Violation(
                    "NF1",
                    s.id,
                    "no unique [parent]-component matching the subtree",
                )
            )
        else:
            tc[s.id] = match
            if not (s.chi & match):
                violations.append(
                    Violation("NF2", s.id, "chi disjoint from its component")
                )
        bad = (atoms_vars(q, s.lam) & r.chi) - s.chi
        if bad:
            violations.append(
                Violation(
                    "NF3", s.id, f"parent chi variables {sorted(bad)} missing"
                )
            )
    return ValidationReport(tuple(violations), data={"treecomp": tc})


def treecomp(q: ConjunctiveQuery, h: Hypertree, vid: int) -> frozenset[str]:
    """var(Q) at the root, else the unique matching [parent]-component."""
    report = validate_nf(q, h)
    if not report.valid:
        raise InvalidDecompositionError(
            f"not in normal form: {report.violations[0]}"
        )
    return report.data["treecomp"][vid]


def normalize_hd(q: ConjunctiveQuery, h: Hypertree) -> Hypertree:
    """Rewrite a valid decomposition into normal form (same width bound)."""
    report = validate_hd(q, h)
    if not report.valid:
        raise InvalidDecompositionError(
            f"not a valid hypertree decomposition: {report.violations[0]}"
        )
    if h.root_id is None:
        return h
    parent = {v.id: v.parent for v in h}
    chi = {v.id: set(v.chi) for v in h}
    lam = {v.id: v.lam for v in h}
    children = {v.id: list(h.children[v.id]) for v in h}
    root = h.root_id
    next_id = max(parent) + 1

    def subtree(vid):
        out, stack = [], [vid]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(children[v])
        return out

    def delete_subtree(vid):
        for w in subtree(vid):
            del parent[w], chi[w], lam[w], children[w]

    fuel = 10000 * (len(h) + 1)
    queue = [root]
    while queue:
        r = queue.pop(0)
        stable = False
        while not stable:
            fuel -= 1
            if fuel < 0:
                raise RuntimeError("normalization did not converge")
            stable = True
            comps = [c.members for c in v_components(q, frozenset(chi[r]))]
            for s in list(children[r]):
                sub = subtree(s)
                chi_ts = set().union(*(chi[v] for v in sub))
                meeting = [c for c in comps if c & chi_ts]
                shared = chi[s] & chi[r]
                if len(meeting) == 1 and chi_ts == set(meeting[0]) | shared:
                    c_r = meeting[0]
                    if not (chi[s] & c_r):
                        # redundant child: chi(s) inside chi(r); splice it out
                        for g in children[s]:
                            parent[g] = r
                            children[r].append(g)
                        children[s] = []
                        children[r].remove(s)
                        delete_subtree(s)
                        stable = False
                        break
                    missing = (atoms_vars(q, lam[s]) & chi[r]) - chi[s]
                    if missing:
                        chi[s] |= missing
                    continue
                # condition 1 violated: split the subtree per component
                children[r].remove(s)
                for c in sorted(meeting, key=min):
                    holders = {v for v in sub if chi[v] & c}
                    mapping = {}
                    for v in sub:  # parents precede children here
                        if v not in holders:
                            continue
                        nid = next_id
                        next_id += 1
                        # nearest copied ancestor, else attach under r
                        anc = parent[v]
                        while anc != r and anc not in mapping:
                            anc = parent[anc]
                        pid = mapping.get(anc, r)
                        mapping[v] = nid
                        parent[nid] = pid
                        chi[nid] = chi[v] & (set(c) | chi[r])
                        lam[nid] = lam[v]
                        children[nid] = []
                        children[pid].append(nid)
                delete_subtree(s)
                stable = False
                break
        queue.extend(children[r])
    verts = [
        HtVertex(v, parent[v], frozenset(chi[v]), lam[v]) for v in parent
    ]
    return Hypertree(verts)


def qd_to_hd(q: ConjunctiveQuery, d: QueryDecomposition) -> Hypertree:
    """Pure query decomposition to hypertree decomposition: chi = var(lam)."""
    if not d.is_pure():
        raise InvalidDecompositionError(
            "query decomposition is not pure (labels contain variables); "
            "purification is out of scope"
        )
    report = validate_qd(q, d)
    if not report.valid:
        raise InvalidDecompositionError(
            f"not a valid query decomposition: {report.violations[0]}"
        )
    verts = []
    for v in d:
        lam = d.label_atoms(v.id)
        verts.append(HtVertex(v.id, v.parent, atoms_vars(q, lam), lam))
    return Hypertree(verts)


def hd_to_jointree(q: ConjunctiveQuery, h: Hypertree) -> JoinTree:
    """Collapse a complete width-1 decomposition to a join tree."""
    report = validate_hd(q, h)
    if not report.valid:
        raise InvalidDecompositionError(
            f"not a valid hypertree decomposition: {report.violations[0]}"
        )
    if h.width() > 1:
        raise InvalidDecompositionError(f"width {h.width()} > 1")
    if not is_complete(q, h):
        raise InvalidDecompositionError("decomposition is not complete")
    if h.root_id is None:
        return JoinTree([])
    # designated vertex per atom: least id with lam={A}, chi=var(A)
    designated: dict[int, int] = {}
    for vid in sorted(h.vertices):
        v = h.vertices[vid]
        if len(v.lam) == 1:
            (a,) = v.lam
            if v.chi == q.body[a].variables() and a not in designated:
                designated[a] = vid
    keep = set(designated.values())
    # undirected adjacency; contract non-designated vertices into a neighbor
    adj: dict[int, set[int]] = {v.id: set() for v in h}
    for v in h:
        if v.parent is not None:
            adj[v.id].add(v.parent)
            adj[v.parent].add(v.id)

    def toward(src: int, targets: set[int]) -> int:
        """Neighbor of src on the path to the nearest target vertex."""
        seen = {src}
        frontier = [(n, n) for n in sorted(adj[src])]
        while frontier:
            nxt = []
            for first, cur in frontier:
                if cur in targets:
                    return first
                seen.add(cur)
                for m in sorted(adj[cur]):
                    if m not in seen:
                        nxt.append((first, m))
            frontier = nxt
        raise InvalidDecompositionError("no designated vertex reachable")

    for vid in sorted(h.vertices):
        if vid in keep:
            continue
        n = toward(vid, keep)
        for m in adj[vid]:
            if m != n:
                adj[m].discard(vid)
                adj[m].add(n)
                adj[n].add(m)
        adj[n].discard(vid)
        del adj[vid]
    atom_of = {vid: a for a, vid in designated.items()}
    root_vid = designated[min(designated)]
    verts = []
    seen = {root_vid}
    stack = [(root_vid, None)]
    while stack:
        vid, par = stack.pop()
        verts.append(JtVertex(atom_of[vid], par))
        for m in sorted(adj[vid]):
            if m not in seen:
                seen.add(m)
                stack.append((m, atom_of[vid]))
    if len(verts) != len(q.body):
        raise InvalidDecompositionError("join tree does not cover every atom")
    return JoinTree(verts)


def validate_jointree(q: ConjunctiveQuery, jt: JoinTree) -> ValidationReport:
    """Connectedness condition: each variable induces a connected subtree."""
    violations = []
    parents = {v.atom: v.parent for v in jt.vertices.values()}
    if set(parents) != {a.index for a in q.body}:
        violations.append(Violation("JT0", None, "atoms not covered exactly once"))
        return ValidationReport(tuple(violations))
    for x in sorted(q.variables()):
        members = {a.index for a in q.body if x in a.variables()}
        if not _connected(jt.children, parents, members):
            violations.append(
                Violation("JT1", sorted(members), f"variable {x} disconnected")
            )
    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# file format (JSON)


def hypertree_to_json(q: ConjunctiveQuery, h: Hypertree) -> str:
    nodes = [
        {
            "id": v.id,
            "parent": v.parent,
            "chi": sorted(v.chi),
            "lambda": sorted(v.lam),
        }
        for v in sorted(h, key=lambda v: v.id)
    ]
    return json.dumps({"query": str(q), "nodes": nodes}, indent=2) + "\n"


def hypertree_from_json(text: str) -> tuple[Optional[ConjunctiveQuery], Hypertree]:
    try:
        doc = json.loads(text)
        q = parse_query(doc["query"]) if doc.get("query") else None
        verts = [
            HtVertex(
                int(n["id"]),
                None if n["parent"] is None else int(n["parent"]),
                frozenset(n["chi"]),
                frozenset(int(i) for i in n["lambda"]),
            )
            for n in doc["nodes"]
        ]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise DecompositionFormatError(f"bad decomposition file: {e}") from e
    return q, Hypertree(verts)


def qd_to_json(q: ConjunctiveQuery, d: QueryDecomposition) -> str:
    nodes = []
    for v in sorted(d, key=lambda v: v.id):
        items = [
            {"atom": x} if kind == "atom" else {"var": x} for kind, x in v.label
        ]
        label = sorted(
            items, key=lambda it: (0, it["atom"]) if "atom" in it else (1, it["var"])
        )
        nodes.append({"id": v.id, "parent": v.parent, "label": label})
    return json.dumps({"query": str(q), "nodes": nodes}, indent=2) + "\n"


def qd_from_json(text: str) -> tuple[Optional[ConjunctiveQuery], QueryDecomposition]:
    try:
        doc = json.loads(text)
        q = parse_query(doc["query"]) if doc.get("query") else None
        verts = []
        for n in doc["nodes"]:
            label = set()
            for item in n["label"]:
                if "atom" in item:
                    label.add(("atom", int(item["atom"])))
                else:
                    label.add(("var", str(item["var"])))
            verts.append(
                QdVertex(
                    int(n["id"]),
                    None if n["parent"] is None else int(n["parent"]),
                    frozenset(label),
                )
            )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise DecompositionFormatError(f"bad decomposition file: {e}") from e
    return q, QueryDecomposition(verts)
