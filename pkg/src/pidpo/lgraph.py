"""Simple undirected graphs labelled with first-order terms, and morphism search.

A morphism is accepted when the labels it associates are compatible *jointly*:
all vertex and edge label pairs share one binding environment, which is the
same as comparing the two ``assoc(...)`` aggregate terms in one go.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .terms import (Fn, Term, Var, erase_variables, match_into, parse_term,
                    rename_into, solved, unify_into, variables)

__all__ = [
    "LabelledGraph", "Morphism", "FrozenGraphError", "MODES",
    "enumerate_monomorphisms", "is_isomorphic", "component_of",
    "wl_colours", "fingerprint", "label_degree_key", "parse_dump",
]

MODES = ("specialize", "iso", "unify")


class FrozenGraphError(RuntimeError):
    pass


def _key(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


class LabelledGraph:
    """Vertex ids are ints handed out by a per-graph counter that never recycles.

    Graphs are assembled with the mutating methods and then frozen; frozen
    graphs reject mutation and are safe to share.  ``copy()`` gives a fresh,
    unfrozen graph with the same ids and counter.
    """

    __slots__ = ("_labels", "_adj", "_next", "_frozen")

    def __init__(self):
        self._labels: Dict[int, Term] = {}
        self._adj: Dict[int, Dict[int, Term]] = {}
        self._next = 0
        self._frozen = False

    # -- construction
    def _check(self):
        if self._frozen:
            raise FrozenGraphError("graph is frozen")

    def add_vertex(self, label, vid: Optional[int] = None) -> int:
        self._check()
        if isinstance(label, str):
            label = parse_term(label)
        if vid is None:
            vid = self._next
        elif vid in self._labels:
            raise ValueError(f"vertex {vid} already present")
        self._next = max(self._next, vid + 1)
        self._labels[vid] = label
        self._adj[vid] = {}
        return vid

    def add_edge(self, a: int, b: int, label) -> None:
        self._check()
        if isinstance(label, str):
            label = parse_term(label)
        if a == b:
            raise ValueError(f"self-loop on vertex {a}")
        if a not in self._labels or b not in self._labels:
            raise KeyError(f"edge endpoint missing: {a}, {b}")
        if b in self._adj[a]:
            raise ValueError(f"parallel edge {a} -- {b}")
        self._adj[a][b] = label
        self._adj[b][a] = label

    def remove_edge(self, a: int, b: int) -> None:
        self._check()
        del self._adj[a][b]
        del self._adj[b][a]

    def remove_vertex(self, v: int) -> None:
        self._check()
        for u in list(self._adj[v]):
            del self._adj[u][v]
        del self._adj[v]
        del self._labels[v]

    def relabel_vertex(self, v: int, label: Term) -> None:
        self._check()
        if v not in self._labels:
            raise KeyError(v)
        self._labels[v] = label

    def relabel_edge(self, a: int, b: int, label: Term) -> None:
        self._check()
        if b not in self._adj[a]:
            raise KeyError((a, b))
        self._adj[a][b] = label
        self._adj[b][a] = label

    def freeze(self) -> "LabelledGraph":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def copy(self) -> "LabelledGraph":
        g = LabelledGraph()
        g._labels = dict(self._labels)
        g._adj = {v: dict(n) for v, n in self._adj.items()}
        g._next = self._next
        return g

    @property
    def next_id(self) -> int:
        return self._next

    # -- queries
    def __contains__(self, v) -> bool:
        return v in self._labels

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def vertices(self) -> List[int]:
        return sorted(self._labels)

    def edges(self) -> Iterator[Tuple[int, int, Term]]:
        """Yield ``(a, b, label)`` with ``a < b``, sorted."""
        for a in sorted(self._adj):
            for b in sorted(self._adj[a]):
                if a < b:
                    yield a, b, self._adj[a][b]

    def num_edges(self) -> int:
        return sum(len(n) for n in self._adj.values()) // 2

    def label(self, v: int) -> Term:
        return self._labels[v]

    def edge_label(self, a: int, b: int) -> Term:
        return self._adj[a][b]

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj.get(a, ())

    def neighbours(self, v: int) -> Dict[int, Term]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def labels(self) -> Dict[int, Term]:
        return dict(self._labels)

    def variables(self) -> set:
        out = set()
        for t in self._labels.values():
            out |= variables(t)
        for _, _, t in self.edges():
            out |= variables(t)
        return out

    def induced_subgraph(self, vs: Iterable[int]) -> "LabelledGraph":
        keep = set(vs)
        g = LabelledGraph()
        for v in sorted(keep):
            g._labels[v] = self._labels[v]
            g._adj[v] = {u: t for u, t in self._adj[v].items() if u in keep}
        g._next = self._next
        return g

    def dump(self) -> str:
        """Debug dump: ``vid: term`` lines, then ``a -- b: term`` lines, sorted."""
        lines = [f"{v}: {self._labels[v]}" for v in self.vertices]
        lines += [f"{a} -- {b}: {t}" for a, b, t in self.edges()]
        return "\n".join(lines)

    def __repr__(self):
        return f"<LabelledGraph |V|={len(self)} |E|={self.num_edges()}>"

    def __eq__(self, other):
        return (isinstance(other, LabelledGraph) and self._labels == other._labels
                and self._adj == other._adj)

    __hash__ = None


def parse_dump(text: str) -> LabelledGraph:
    """Inverse of :meth:`LabelledGraph.dump`."""
    g = LabelledGraph()
    edges = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        head, _, term = line.partition(":")
        if "--" in head:
            a, b = head.split("--")
            edges.append((int(a), int(b), parse_term(term)))
        else:
            g.add_vertex(parse_term(term), int(head))
    for a, b, t in edges:
        g.add_edge(a, b, t)
    return g


def component_of(g: LabelledGraph, v: int) -> LabelledGraph:
    """Induced subgraph on the connected component of `v`, ids preserved."""
    if v not in g:
        raise KeyError(f"vertex {v} not in graph")
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in g.neighbours(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return g.induced_subgraph(seen)


# --- invariants ---------------------------------------------------------------

def wl_colours(g: LabelledGraph, rounds: int = 4) -> Dict[int, int]:
    """Colour refinement over labels with variables erased.

    Invariant under isomorphism-with-renaming, so equal colours are a
    necessary condition for two vertices to correspond.
    """
    col = {v: hash(erase_variables(g.label(v))) for v in g.vertices}
    elab: Dict[Tuple[int, int], int] = {}
    for a, b, t in g.edges():
        elab[(a, b)] = hash(erase_variables(t))
    for _ in range(rounds):
        new = {}
        for v in col:
            nb = sorted((elab[_key(v, u)], col[u]) for u in g.neighbours(v))
            new[v] = hash((col[v], tuple(nb)))
        col = new
    return col


def fingerprint(g: LabelledGraph) -> tuple:
    return tuple(sorted(Counter(wl_colours(g).values()).items()))


def label_degree_key(g: LabelledGraph) -> tuple:
    """Multiset of (label with variables erased, degree)."""
    c = Counter((str(erase_variables(g.label(v))), g.degree(v)) for v in g.vertices)
    return tuple(sorted(c.items()))


# --- morphisms -------------------------------------------------------------

@dataclass
class Morphism:
    pattern: LabelledGraph
    host: LabelledGraph
    vmap: Dict[int, int]
    binding: Dict[Var, Term] = field(default_factory=dict)

    @property
    def edge_map(self) -> Dict[Tuple[int, int], Tuple[int, int]]:
        return {(a, b): _key(self.vmap[a], self.vmap[b]) for a, b, _ in self.pattern.edges()}

    def image(self) -> List[int]:
        return sorted(self.vmap.values())

    def sort_key(self) -> tuple:
        return tuple(sorted(self.vmap.values())) + tuple(self.vmap[v] for v in sorted(self.vmap))


def _root_compatible(p: Term, h: Term, mode: str) -> bool:
    if isinstance(p, Var):
        return mode != "iso" or isinstance(h, Var)
    if isinstance(h, Var):
        return mode == "unify"
    return p.symbol == h.symbol and len(p.args) == len(h.args)


class _Env:
    """Binding environment for one mode; `extend` returns a new env or None."""

    def __init__(self, mode: str):
        self.mode = mode

    def empty(self):
        return ({}, {}) if self.mode == "iso" else {}

    def extend(self, env, p: Term, h: Term):
        mode = self.mode
        if mode == "specialize":
            s = dict(env)
            return s if match_into(p, h, s) else None
        if mode == "iso":
            fwd, bwd = dict(env[0]), dict(env[1])
            return (fwd, bwd) if rename_into(p, h, fwd, bwd) else None
        s = dict(env)
        return s if unify_into(p, h, s) else None

    def result(self, env):
        if self.mode == "specialize":
            return dict(sorted(env.items(), key=lambda kv: kv[0].name))
        if self.mode == "iso":
            return dict(sorted(env[0].items(), key=lambda kv: kv[0].name))
        return solved(env)


def _search_order(pattern: LabelledGraph, cands: Dict[int, list]) -> List[int]:
    remaining = set(pattern.vertices)
    order: List[int] = []
    placed = set()
    while remaining:
        def score(v):
            linked = sum(1 for u in pattern.neighbours(v) if u in placed)
            return (-linked, len(cands[v]), -pattern.degree(v), v)
        v = min(remaining, key=score)
        order.append(v)
        placed.add(v)
        remaining.discard(v)
    return order


def enumerate_monomorphisms(pattern: LabelledGraph, host: LabelledGraph,
                            mode: str = "specialize", *, bijective: bool = False
                            ) -> Iterator[Morphism]:
    """Yield every injective, structure-preserving, label-compatible map.

    `mode` selects the label relation: ``specialize`` (pattern variables bind,
    host variables are frozen), ``iso`` (a variable renaming) or ``unify``
    (a most general unifier; host variables are primed to keep the two
    namespaces apart).  With ``bijective=True`` only bijections are produced.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if bijective and (len(pattern) != len(host) or pattern.num_edges() != host.num_edges()):
        return
    if len(pattern) > len(host):
        return

    if mode == "unify":
        prime = {v: Var(v.name + "'") for v in host.variables()}
        hl = {v: _prime(host.label(v), prime) for v in host.vertices}
        hel = lambda a, b: _prime(host.edge_label(a, b), prime)  # noqa: E731
    else:
        hl = {v: host.label(v) for v in host.vertices}
        hel = host.edge_label

    if bijective:
        pc, hc = wl_colours(pattern), wl_colours(host)
    cands: Dict[int, list] = {}
    for pv in pattern.vertices:
        pl = pattern.label(pv)
        pd = pattern.degree(pv)
        cs = []
        for hv in host.vertices:
            if bijective:
                if pc[pv] != hc[hv]:
                    continue
            elif host.degree(hv) < pd:
                continue
            if _root_compatible(pl, hl[hv], mode):
                cs.append(hv)
        if not cs:
            return
        cands[pv] = cs

    order = _search_order(pattern, cands)
    # for each position: earlier neighbours with the pattern edge label
    back: List[List[Tuple[int, Term]]] = []
    pos = {v: i for i, v in enumerate(order)}
    for i, v in enumerate(order):
        back.append([(u, pattern.edge_label(v, u)) for u in sorted(pattern.neighbours(v))
                     if pos[u] < i])
    ground = {v: not variables(pattern.label(v)) for v in order}
    cand_sets = {v: set(c) for v, c in cands.items()}
    envs = _Env(mode)
    fast = mode != "unify"
    vmap: Dict[int, int] = {}
    used = set()

    def extend(i, env):
        if i == len(order):
            yield Morphism(pattern, host, dict(vmap), envs.result(env))
            return
        pv = order[i]
        nbrs = back[i]
        if nbrs:
            anchor = vmap[nbrs[0][0]]
            pool = sorted(h for h in host.neighbours(anchor) if h in cand_sets[pv])
        else:
            pool = cands[pv]
        plabel = pattern.label(pv)
        for hv in pool:
            if hv in used:
                continue
            if fast and ground[pv]:
                if plabel != hl[hv]:
                    continue
                e2 = env
            else:
                e2 = envs.extend(env, plabel, hl[hv])
                if e2 is None:
                    continue
            ok = True
            for pu, el in nbrs:
                hu = vmap[pu]
                if not host.has_edge(hu, hv):
                    ok = False
                    break
                e2 = envs.extend(e2, el, hel(hu, hv))
                if e2 is None:
                    ok = False
                    break
            if not ok:
                continue
            vmap[pv] = hv
            used.add(hv)
            yield from extend(i + 1, e2)
            del vmap[pv]
            used.discard(hv)

    yield from extend(0, envs.empty())


def _prime(t: Term, prime) -> Term:
    if isinstance(t, Var):
        return prime.get(t, t)
    if not t.args:
        return t
    return Fn(t.symbol, [_prime(a, prime) for a in t.args])


def is_isomorphic(g: LabelledGraph, h: LabelledGraph) -> bool:
    """Bijective morphism whose aggregate labels are equal up to variable renaming."""
    if len(g) != len(h) or g.num_edges() != h.num_edges():
        return False
    if label_degree_key(g) != label_degree_key(h):
        return False
    for _ in enumerate_monomorphisms(g, h, "iso", bijective=True):
        return True
    return False
