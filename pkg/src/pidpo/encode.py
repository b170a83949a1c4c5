"""Encoding processes as term-labelled graphs, and back.

Layout of ``[P]``: a ``go`` vertex hangs off the root ``t(p)``; every parallel
component is a ``t(s)`` child of a ``t(p)``; every choice branch is an operator
child of its ``t(s)``.  Prefix operators (``t(in)``, ``t(out)``) reach their
channel by a ``sync`` edge and their argument by an ``arg`` edge, or by a single
``arg-sync`` edge when both are the same name, and continue in a ``t(p)``.
A call ``A(y1..yn)`` is a ``t(call(A))`` vertex with one ``ptr`` vertex per
argument (edge ``idx(i)``), each pointing at its name (edge ``ref``).

Free names are ``v(x)`` with ``x`` a constant; bound names (input binders,
restricted names) are ``v(_X)`` with a variable, so α-conversion and the
restriction laws reduce to renaming variables.  Tree edges are labelled ``c``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .congruence import canonical_form
from .lgraph import LabelledGraph
from .process import (NIL, Call, Input, Nil, Output, Par, ProcessTerm,
                      RecursiveSystem, Restrict, Sum)
from .terms import Fn, Term, Var

__all__ = [
    "EncodedProcess", "EncodingError", "encode", "decode", "simplify_view", "validate",
    "GO", "TP", "TS", "TIN", "TOUT", "PTR", "GC", "C", "D", "SYNC", "ARG", "ARGSYNC", "REF",
    "name_label", "call_label", "idx_label", "merge_label",
]

GO = Fn("go")
TP = Fn("t", [Fn("p")])
TS = Fn("t", [Fn("s")])
TIN = Fn("t", [Fn("in")])
TOUT = Fn("t", [Fn("out")])
PTR = Fn("ptr")
GC = Fn("gc")

C = Fn("c")
D = Fn("d")
SYNC = Fn("sync")
ARG = Fn("arg")
ARGSYNC = Fn("arg-sync")
REF = Fn("ref")


def name_label(name) -> Term:
    return Fn("v", [name if isinstance(name, Var) else Fn(name)])


def call_label(ident: str) -> Term:
    return Fn("t", [Fn("call", [Fn(ident)])])


def idx_label(i: int) -> Term:
    return Fn("idx", [Fn(str(i))])


def merge_label(t: Term) -> Term:
    return Fn("merge", [t])


class EncodingError(ValueError):
    pass


@dataclass
class EncodedProcess:
    graph: LabelledGraph
    root: int
    name_table: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_graph(cls, graph: LabelledGraph) -> "EncodedProcess":
        """Locate the go vertex and the free-name vertices of a graph."""
        roots = [v for v in graph.vertices if graph.label(v) == GO]
        if len(roots) != 1:
            raise EncodingError(f"expected exactly one go vertex, found {len(roots)}")
        table = {}
        for v in graph.vertices:
            lab = graph.label(v)
            if _is_name(lab) and isinstance(lab.args[0], Fn):
                table[lab.args[0].symbol] = v
        return cls(graph, roots[0], dict(sorted(table.items())))

    def dump(self) -> str:
        return self.graph.dump()


def _is_name(t: Term) -> bool:
    return isinstance(t, Fn) and t.symbol == "v" and len(t.args) == 1


def _is_call(t: Term) -> bool:
    return (isinstance(t, Fn) and t.symbol == "t" and len(t.args) == 1
            and isinstance(t.args[0], Fn) and t.args[0].symbol == "call"
            and len(t.args[0].args) == 1 and isinstance(t.args[0].args[0], Fn))


# --- encoding ---------------------------------------------------------------

class _Cell:
    """A bound name; its vertex is created on first use."""
    __slots__ = ("var", "vid")

    def __init__(self, var: Var):
        self.var = var
        self.vid: Optional[int] = None


class _Encoder:
    def __init__(self, bound_base: str = "b"):
        self.g = LabelledGraph()
        self.free: Dict[str, int] = {}
        self.counter = 0
        self.base = bound_base

    def bind(self) -> _Cell:
        cell = _Cell(Var(f"{self.base}{self.counter}"))
        self.counter += 1
        return cell

    def name(self, n: str, env) -> int:
        cell = env.get(n)
        if cell is None:
            if n not in self.free:
                self.free[n] = self.g.add_vertex(name_label(n))
            return self.free[n]
        if cell.vid is None:
            cell.vid = self.g.add_vertex(name_label(cell.var))
        return cell.vid

    def par(self, p: ProcessTerm, tp: int, env) -> None:
        if isinstance(p, Nil):
            return
        if isinstance(p, Par):
            for q in p.items:
                self.par(q, tp, env)
        elif isinstance(p, Restrict):
            self.par(p.body, tp, {**env, p.name: self.bind()})
        elif isinstance(p, Call):
            ts = self.g.add_vertex(TS)
            self.g.add_edge(tp, ts, C)
            self.call(p, ts, env)
        else:
            branches: List[Tuple[ProcessTerm, dict]] = []
            self._collect(p, env, branches)
            if not branches:
                return
            ts = self.g.add_vertex(TS)
            self.g.add_edge(tp, ts, C)
            for b, benv in branches:
                self.prefix(b, ts, benv)

    def _collect(self, p, env, out):
        if isinstance(p, Nil):
            return
        if isinstance(p, Sum):
            for q in p.items:
                self._collect(q, env, out)
        elif isinstance(p, Restrict):
            self._collect(p.body, {**env, p.name: self.bind()}, out)
        elif isinstance(p, (Input, Output)):
            out.append((p, env))
        else:
            raise EncodingError(f"unguarded choice branch {p!r}")

    def prefix(self, p, ts: int, env) -> None:
        g = self.g
        if isinstance(p, Input):
            op = g.add_vertex(TIN)
            g.add_edge(ts, op, C)
            chan = self.name(p.channel, env)
            cell = self.bind()
            binder = self.name(p.binder, {p.binder: cell})
            g.add_edge(op, chan, SYNC)
            g.add_edge(op, binder, ARG)
            cont_env = {**env, p.binder: cell}
        else:
            op = g.add_vertex(TOUT)
            g.add_edge(ts, op, C)
            chan = self.name(p.channel, env)
            arg = self.name(p.arg, env)
            if chan == arg:
                g.add_edge(op, chan, ARGSYNC)
            else:
                g.add_edge(op, chan, SYNC)
                g.add_edge(op, arg, ARG)
            cont_env = env
        tp = g.add_vertex(TP)
        g.add_edge(op, tp, C)
        self.par(p.cont, tp, cont_env)

    def call(self, p: Call, ts: int, env) -> None:
        g = self.g
        cv = g.add_vertex(call_label(p.ident))
        g.add_edge(ts, cv, C)
        for i, a in enumerate(p.args):
            ptr = g.add_vertex(PTR)
            g.add_edge(cv, ptr, idx_label(i))
            g.add_edge(ptr, self.name(a, env), REF)


def encode(p: ProcessTerm, sys: Optional[RecursiveSystem] = None) -> EncodedProcess:
    """Build ``[p]``.

    The canonical form of `p` is encoded, so bound-name variables ``_b0,
    _b1, ...`` follow its left-to-right order and the vertex numbering only
    depends on the congruence class of `p`.
    """
    if sys is not None:
        sys.validate(p)
    p = canonical_form(p)
    enc = _Encoder()
    go = enc.g.add_vertex(GO)
    tp = enc.g.add_vertex(TP)
    enc.g.add_edge(go, tp, C)
    enc.par(p, tp, {})
    return EncodedProcess(enc.g.freeze(), go, dict(sorted(enc.free.items())))


def encode_body(p: ProcessTerm, params, bound_base: str = "b"):
    """Encode a definition body below a detached ``t(p)``.

    Returns the graph, the id of that ``t(p)`` and the vertex standing for
    each parameter (None for parameters the body never mentions).
    """
    enc = _Encoder(bound_base)
    tp = enc.g.add_vertex(TP)
    enc.par(p, tp, {})
    return enc.g, tp, [enc.free.get(x) for x in params]


# --- validation -------------------------------------------------------------

_OPERATORS = (TIN, TOUT)
_BASE_LABELS = {GO, TP, TS, TIN, TOUT, PTR}


def validate(e: EncodedProcess, *, intermediate: bool = False) -> None:
    """Raise EncodingError naming the first violated encoding invariant.

    With ``intermediate=True`` merge(·)/gc labels are tolerated and only the
    label alphabet is checked.
    """
    g = e.graph
    for v in g.vertices:
        lab = g.label(v)
        ok = lab in _BASE_LABELS or _is_name(lab) or _is_call(lab)
        if intermediate and not ok:
            ok = lab == GC or (isinstance(lab, Fn) and lab.symbol == "merge")
        if not ok:
            raise EncodingError(f"vertex {v} has unexpected label {lab}")
    if intermediate:
        return

    gos = [v for v in g.vertices if g.label(v) == GO]
    if gos != [e.root]:
        raise EncodingError("exactly one go vertex, the root, is required")
    nb = list(g.neighbours(e.root))
    if len(nb) != 1 or g.label(nb[0]) != TP:
        raise EncodingError("go must have exactly one neighbour labelled t(p)")

    seen = {e.root}
    parent: Dict[int, int] = {}
    binder_of: Dict[int, int] = {}      # name vertex -> binding t(in)
    uses: List[Tuple[int, int]] = []    # (user vertex, name vertex)

    def tree_child(u, w, want):
        if g.edge_label(u, w) != want:
            raise EncodingError(f"edge {u} -- {w} should be labelled {want}")
        if w in seen:
            raise EncodingError(f"operator structure is not a tree at vertex {w}")
        seen.add(w)
        parent[w] = u

    stack = [(nb[0], e.root)]
    tree_child(e.root, nb[0], C)
    while stack:
        v, up = stack.pop()
        lab = g.label(v)
        kids = [w for w in g.neighbours(v) if w != up]
        if lab == TP:
            for w in kids:
                if g.label(w) != TS:
                    raise EncodingError(f"t(p) vertex {v} has a non-t(s) child {w}")
                tree_child(v, w, C)
                stack.append((w, v))
        elif lab == TS:
            if not kids:
                raise EncodingError(f"t(s) vertex {v} has no branches")
            for w in kids:
                wl = g.label(w)
                if wl not in _OPERATORS and not _is_call(wl):
                    raise EncodingError(f"t(s) vertex {v} has a non-operator child {w}")
                if _is_call(wl) and len(kids) != 1:
                    raise EncodingError(f"call vertex {w} is a choice branch")
                tree_child(v, w, C)
                stack.append((w, v))
        elif lab in _OPERATORS:
            conts = [w for w in kids if g.label(w) == TP]
            names = [w for w in kids if _is_name(g.label(w))]
            if len(conts) != 1 or len(conts) + len(names) != len(kids):
                raise EncodingError(f"operator {v} needs one t(p) continuation and names")
            labels = sorted(str(g.edge_label(v, w)) for w in names)
            if labels == ["arg-sync"]:
                if lab == TIN:
                    raise EncodingError(f"input {v} binds its own channel")
            elif labels != ["arg", "sync"]:
                raise EncodingError(f"operator {v} has name edges {labels}")
            for w in names:
                seen.add(w)
                if lab == TIN and g.edge_label(v, w) == ARG:
                    if not isinstance(g.label(w).args[0], Var):
                        raise EncodingError(f"input binder {w} is not variable-labelled")
                    if w in binder_of:
                        raise EncodingError(f"name {w} is bound by two inputs")
                    binder_of[w] = v
                else:
                    uses.append((v, w))
            tree_child(v, conts[0], C)
            stack.append((conts[0], v))
        elif _is_call(lab):
            ptrs = sorted(kids)
            idxs = []
            for w in ptrs:
                el = g.edge_label(v, w)
                if g.label(w) != PTR or not (isinstance(el, Fn) and el.symbol == "idx"):
                    raise EncodingError(f"call {v} has a malformed argument edge to {w}")
                idxs.append(el.args[0].symbol)
                tree_child(v, w, el)
                refs = [u for u in g.neighbours(w) if u != v]
                if len(refs) != 1 or g.edge_label(w, refs[0]) != REF or not _is_name(g.label(refs[0])):
                    raise EncodingError(f"pointer {w} must have exactly one ref edge to a name")
                seen.add(refs[0])
                uses.append((w, refs[0]))
            if sorted(idxs, key=int) != [str(i) for i in range(len(idxs))]:
                raise EncodingError(f"call {v} has argument positions {idxs}")
        else:
            raise EncodingError(f"unexpected vertex {v} labelled {lab} in operator tree")

    if seen != set(g.vertices):
        missing = sorted(set(g.vertices) - seen)
        raise EncodingError(f"vertices {missing} are not reachable through the encoding")
    for v in g.vertices:
        if _is_name(g.label(v)):
            for w in g.neighbours(v):
                if g.label(w) not in (TIN, TOUT, PTR):
                    raise EncodingError(f"name {v} is attached to {w}")
    seen_labels = {}
    for v in g.vertices:
        lab = g.label(v)
        if _is_name(lab):
            if lab in seen_labels:
                raise EncodingError(f"name vertices {seen_labels[lab]} and {v} share label {lab}")
            seen_labels[lab] = v
    for user, name in uses:
        b = binder_of.get(name)
        if b is None:
            continue
        u = user
        while u in parent and u != b:
            u = parent[u]
        if u != b:
            raise EncodingError(f"bound name {name} used outside the scope of input {b}")


# --- decoding ----------------------------------------------------------------

def decode(e: EncodedProcess, sys: Optional[RecursiveSystem] = None) -> ProcessTerm:
    """Read the process back from a valid encoding, in canonical form."""
    validate(e)
    g = e.graph
    names: Dict[int, str] = {}
    taken = {lab.args[0].symbol for lab in (g.label(v) for v in g.vertices)
             if _is_name(lab) and isinstance(lab.args[0], Fn)}
    binders = set()
    for v in g.vertices:
        if g.label(v) == TIN:
            for w, el in g.neighbours(v).items():
                if el == ARG:
                    binders.add(w)
    counter = 0
    restricted = []
    for v in g.vertices:
        lab = g.label(v)
        if not _is_name(lab):
            continue
        if isinstance(lab.args[0], Fn):
            names[v] = lab.args[0].symbol
        else:
            while f"n{counter}" in taken:
                counter += 1
            names[v] = f"n{counter}"
            counter += 1
            if v not in binders:
                restricted.append(names[v])

    def par(tp, up) -> ProcessTerm:
        comps = [sum_(w, tp) for w in sorted(g.neighbours(tp)) if w != up]
        return NIL if not comps else comps[0] if len(comps) == 1 else Par(tuple(comps))

    def sum_(ts, up) -> ProcessTerm:
        bs = [branch(w, ts) for w in sorted(g.neighbours(ts)) if w != up]
        return bs[0] if len(bs) == 1 else Sum(tuple(bs))

    def branch(op, up) -> ProcessTerm:
        lab = g.label(op)
        nbrs = {w: el for w, el in g.neighbours(op).items() if w != up}
        if _is_call(lab):
            args = sorted((int(el.args[0].symbol), w) for w, el in nbrs.items())
            refs = []
            for _, ptr in args:
                (n,) = [u for u in g.neighbours(ptr) if u != op]
                refs.append(names[n])
            return Call(lab.args[0].args[0].symbol, tuple(refs))
        cont = next(w for w in nbrs if g.label(w) == TP)
        chan = arg = None
        for w, el in nbrs.items():
            if el in (SYNC, ARGSYNC):
                chan = names[w]
            if el in (ARG, ARGSYNC):
                arg = names[w]
        body = par(cont, op)
        return Input(chan, arg, body) if lab == TIN else Output(chan, arg, body)

    (tp,) = g.neighbours(e.root)
    p = par(tp, e.root)
    for n in reversed(restricted):
        p = Restrict(n, p)
    return canonical_form(p)


# --- presentation -------------------------------------------------------------

def simplify_view(e: EncodedProcess) -> LabelledGraph:
    """Presentation graph: no go/ptr vertices, no t(p)/t(s) that compose nothing."""
    g = e.graph
    out = LabelledGraph()
    ids: Dict[int, int] = {}

    def keep(v) -> int:
        if v not in ids:
            ids[v] = out.add_vertex(g.label(v), v)
        return ids[v]

    def link(a, b, lab):
        if a is not None and not out.has_edge(a, b):
            out.add_edge(a, b, lab)

    def walk(v, up, attach):
        lab = g.label(v)
        kids = sorted(w for w in g.neighbours(v) if w != up)
        if lab in (TP, TS):
            structural = [w for w in kids if g.label(w) in (TS, TIN, TOUT) or _is_call(g.label(w))]
            if len(structural) >= 2:
                me = keep(v)
                link(attach, me, C)
                attach = me
            for w in structural:
                walk(w, v, attach)
        elif lab in _OPERATORS:
            me = keep(v)
            link(attach, me, C)
            for w in kids:
                if _is_name(g.label(w)):
                    out.add_edge(me, keep(w), g.edge_label(v, w))
                else:
                    walk(w, v, me)
        elif _is_call(lab):
            me = keep(v)
            link(attach, me, C)
            slots: Dict[int, List[str]] = {}
            for ptr in kids:
                pos = g.edge_label(v, ptr).args[0]
                for n in g.neighbours(ptr):
                    if n != v:
                        slots.setdefault(n, []).append(pos)
            for n, pos in sorted(slots.items()):
                out.add_edge(me, keep(n), Fn("idx", sorted(pos, key=lambda t: int(t.symbol))))

    for tp in sorted(g.neighbours(e.root)):
        walk(tp, e.root, None)
    return out.freeze()
