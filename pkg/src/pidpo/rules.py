"""The rewriting systems: communication, merging, garbage collection, unfolding.

One reduction is a communication (or unfolding) step followed by the merge
rules to normal form and then the collection rules to normal form.  A
communication leaves ``merge(·)`` vertices tied by a ``d`` edge to the vertex
they should become one with, and relabels the consumed summations ``gc``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .dpo import Rule
from .encode import (ARG, ARGSYNC, C, D, GC, GO, PTR, REF, SYNC, TIN, TOUT, TP, TS,
                     call_label, encode_body, idx_label, merge_label)
from .lgraph import LabelledGraph
from .process import RecursiveSystem
from .terms import parse_term

__all__ = ["RuleSet", "com_rules", "merge_rules", "gc_rules", "unfold_rules", "all_rule_sets"]


@dataclass
class RuleSet:
    kind: str                 # com | merge | gc | unfold
    rules: List[Rule]
    ident: Optional[str] = None

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def dump(self) -> str:
        return "\n\n".join(r.dump() for r in self.rules)


def _graph(vertices: Dict[int, object], edges: Sequence[Tuple[int, int, object]]) -> LabelledGraph:
    g = LabelledGraph()
    for v, lab in vertices.items():
        g.add_vertex(parse_term(lab) if isinstance(lab, str) else lab, v)
    for a, b, lab in edges:
        g.add_edge(a, b, parse_term(lab) if isinstance(lab, str) else lab)
    return g.freeze()


# --- communication -------------------------------------------------------------

def com_rules() -> RuleSet:
    """``x(y).P + M | x<z>.Q + N  →  P{z/y} | Q``, for top-level summations.

    Two variants: the output sends a name other than its channel, or sends
    its own channel (a single ``arg-sync`` edge).
    """
    go, p0, s1, s2, i, o, x, y, z, c1, c2 = range(11)
    common_v = {go: GO, p0: TP, s1: TS, s2: TS, i: TIN, o: TOUT,
                x: "v(_X)", y: "v(_Y)", c1: TP, c2: TP}
    common_e = [(go, p0, C), (p0, s1, C), (p0, s2, C), (s1, i, C), (s2, o, C),
                (i, x, SYNC), (i, y, ARG), (i, c1, C), (o, x, SYNC), (o, c2, C)]
    right_v = {go: GO, p0: TP, s1: GC, s2: GC, x: "v(_X)",
               y: merge_label(parse_term("v(_Y)")),
               c1: merge_label(TP), c2: merge_label(TP)}
    right_e = [(go, p0, C), (c1, p0, D), (c2, p0, D)]

    send = Rule("com",
                _graph({**common_v, z: "v(_Z)"}, common_e + [(o, z, ARG)]),
                _graph({**right_v, z: "v(_Z)"}, right_e + [(y, z, D)]))
    common_e = [e if e[:2] != (o, x) else (o, x, ARGSYNC) for e in common_e]
    self_send = Rule("com-self",
                     _graph(common_v, common_e),
                     _graph(right_v, right_e + [(y, x, D)]))
    return RuleSet("com", [send, self_send])


# --- merging ---------------------------------------------------------------------

def merge_rules() -> RuleSet:
    """Fold every ``merge(·)`` vertex into its ``d`` partner.

    move   hand one edge of the merge vertex over to the partner; only
           applicable when the partner has no edge to that neighbour yet
    fuse   the partner already has the complementary edge: the two become
           one ``arg-sync`` edge (identical labels simply collapse)
    deref  a merged pointer first turns its ``ref`` edge into the ``d`` edge
    finish drop a merge vertex left with nothing but its ``d`` edge
    """
    m, u, n = 0, 1, 2
    M = "merge(_W)"
    rules = []
    rules.append(Rule(
        "move",
        _graph({m: M, u: "_U", n: "_N"}, [(m, u, D), (m, n, "_E")]),
        _graph({m: M, u: "_U", n: "_N"}, [(m, u, D), (u, n, "_E")])))
    for mine, theirs in ((SYNC, ARG), (ARG, SYNC)):
        rules.append(Rule(
            f"fuse-{mine}-{theirs}",
            _graph({m: M, u: "_U", n: "_N"}, [(m, u, D), (m, n, mine), (u, n, theirs)]),
            _graph({m: M, u: "_U", n: "_N"}, [(m, u, D), (u, n, ARGSYNC)])))
    rules.append(Rule(
        "fuse-same",
        _graph({m: M, u: "_U", n: "_N"}, [(m, u, D), (m, n, "_E"), (u, n, "_E")]),
        _graph({m: M, u: "_U", n: "_N"}, [(m, u, D), (u, n, "_E")])))
    rules.append(Rule(
        "deref",
        _graph({m: merge_label(PTR), n: "v(_X)"}, [(m, n, REF)]),
        _graph({m: merge_label(PTR), n: "v(_X)"}, [(m, n, D)])))
    rules.append(Rule(
        "finish",
        _graph({m: M, u: "_U"}, [(m, u, D)]),
        _graph({u: "_U"}, [])))
    return RuleSet("merge", rules)


# --- garbage collection ------------------------------------------------------------

def gc_rules() -> RuleSet:
    """Spread ``gc`` down a discarded subtree and detach it from names.

    The collected vertices end up outside the root's component and are
    pruned with it.  Pointers of discarded calls are collected like tree
    vertices.
    """
    g, w = 0, 1
    return RuleSet("gc", [
        Rule("gc-tree",
             _graph({g: GC, w: "t(_X)"}, [(g, w, "_E")]),
             _graph({g: GC, w: GC}, [])),
        Rule("gc-ptr",
             _graph({g: GC, w: PTR}, [(g, w, "_E")]),
             _graph({g: GC, w: GC}, [])),
        Rule("gc-name",
             _graph({g: GC, w: "v(_X)"}, [(g, w, "_E")]),
             _graph({g: GC, w: "v(_X)"}, [])),
    ])


# --- unfolding -----------------------------------------------------------------------

def unfold_rule(ident: str, params: Sequence[str], body) -> Rule:
    """``A(y1..yn)`` at top level becomes the body; pointers merge into the arguments.

    The body's components are hung straight under the root ``t(p)``.  Where
    the body uses a parameter, it is wired to that argument's pointer, which
    is relabelled ``merge(ptr)``; the merge rules then redirect those edges to
    the actual argument.  Bound names of the body get fresh variables.
    """
    go, p0, s, call = 0, 1, 2, 3
    ptrs = [4 + k for k in range(len(params))]
    left = _graph({go: GO, p0: TP, s: TS, call: call_label(ident), **{p: PTR for p in ptrs}},
                  [(go, p0, C), (p0, s, C), (s, call, C)]
                  + [(call, p, idx_label(k)) for k, p in enumerate(ptrs)])

    bg, btp, formals = encode_body(body, params, bound_base="f")
    offset = 4 + len(params)
    where: Dict[int, int] = {btp: p0}
    for v, ptr in zip(formals, ptrs):
        if v is not None:
            where[v] = ptr
    for v in bg.vertices:
        if v not in where:
            where[v] = offset + v
    right = LabelledGraph()
    right.add_vertex(GO, go)
    right.add_vertex(TP, p0)
    for p in ptrs:
        right.add_vertex(merge_label(PTR), p)
    for v in bg.vertices:
        if where[v] >= offset:
            right.add_vertex(bg.label(v), where[v])
    right.add_edge(go, p0, C)
    for a, b, lab in bg.edges():
        right.add_edge(where[a], where[b], lab)
    return Rule(f"unfold({ident})", left, right.freeze())


def unfold_rules(sys: RecursiveSystem) -> List[RuleSet]:
    return [RuleSet("unfold", [unfold_rule(ident, d.params, d.body)], ident)
            for ident, d in sys.items()]


def all_rule_sets(sys: Optional[RecursiveSystem] = None) -> List[RuleSet]:
    out = [com_rules(), merge_rules(), gc_rules()]
    if sys is not None:
        out += unfold_rules(sys)
    return out
